#include "ternsim/devices.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace ternsim::devices {

namespace {

constexpr double kBoltzmann = 1.380649e-23;
constexpr double kElementaryCharge = 1.602176634e-19;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

} // namespace

std::string_view to_string(SwitchingModel m) {
  return m == SwitchingModel::Threshold ? "threshold" : "thermal";
}

SwitchingModel switching_model_from_string(std::string_view s) {
  auto l = lower(s);
  if (l == "threshold") return SwitchingModel::Threshold;
  if (l == "thermal") return SwitchingModel::Thermal;
  throw Error("unknown memristor switching model '" + std::string(s) + "'");
}

bool MemristorParams::valid() const {
  return 0 < r_on && r_on < r_off && v_on > 0 && v_off > 0 && tau > 0 && temperature > 0 &&
         0 <= x0 && x0 <= 1;
}

void MemristorParams::validate() const {
  if (!(0 < r_on && r_on < r_off)) throw Error("memristor requires 0 < RON < ROFF");
  if (!(v_on > 0 && v_off > 0)) throw Error("memristor thresholds must be positive");
  if (!(tau > 0)) throw Error("memristor TAU must be positive");
  if (!(temperature > 0)) throw Error("memristor TEMP must be positive");
  if (!(0 <= x0 && x0 <= 1)) throw Error("memristor X0 must lie in [0,1]");
}

double memristance(MemristorState state, const MemristorParams& p) {
  double g = state.x / p.r_on + (1.0 - state.x) / p.r_off;
  return 1.0 / g;
}

double memristor_current(MemristorState state, double v, const MemristorParams& p) {
  return v / memristance(state, p);
}

double thermal_voltage(double kelvin) { return kBoltzmann * kelvin / kElementaryCharge; }

MemristorState update_state(MemristorState state, double v, double dt, const MemristorParams& p) {
  if (!(dt > 0)) throw NonpositiveTimestep();
  double x = state.x;
  if (p.model == SwitchingModel::Threshold) {
    double decay = std::exp(-dt / p.tau);
    if (v >= p.v_on)
      x = 1.0 - (1.0 - x) * decay;
    else if (v <= -p.v_off)
      x = x * decay;
  } else {
    double vt = thermal_voltage(p.temperature);
    double rate_on = logistic((v - p.v_on) / vt);
    double rate_off = logistic((-v - p.v_off) / vt);
    double total = rate_on + rate_off;
    double x_inf = rate_on / total;
    x = x_inf + (x - x_inf) * std::exp(-total * dt / p.tau);
  }
  return {std::clamp(x, 0.0, 1.0)};
}

int digital_memristance(double v_anode, double v_cathode) {
  return v_anode > v_cathode ? kDigitalRon : kDigitalRoff;
}

int DigitalMemristor::update(double v_anode, double v_cathode) {
  if (v_anode != v_cathode) value_ = digital_memristance(v_anode, v_cathode);
  return value_;
}

std::string_view to_string(Polarity p) { return p == Polarity::Nmos ? "NMOS" : "PMOS"; }

namespace {

// N-channel square law for vds >= 0; returns {id, d/dvgs, d/dvds}.
struct CoreEval {
  double id, g_gs, g_ds;
};

CoreEval nmos_core(double vth, double k, double vgs, double vds) {
  double vov = vgs - vth;
  if (vov <= 0) return {0, 0, 0};
  if (vds < vov) return {k * (vov * vds - 0.5 * vds * vds), k * vds, k * (vov - vds)};
  return {0.5 * k * vov * vov, k * vov, 0};
}

MosfetEval nmos_eval(double vth, double k, double vg, double vd, double vs) {
  if (vd >= vs) {
    auto c = nmos_core(vth, k, vg - vs, vd - vs);
    return {c.id, c.g_gs, c.g_ds, -c.g_gs - c.g_ds};
  }
  // Source and drain exchange roles; current flows out of the drain terminal.
  auto c = nmos_core(vth, k, vg - vd, vs - vd);
  return {-c.id, -c.g_gs, c.g_gs + c.g_ds, -c.g_ds};
}

} // namespace

MosfetEval mosfet_eval(const MosfetParams& p, double vg, double vd, double vs) {
  if (p.polarity == Polarity::Nmos) return nmos_eval(p.vth, p.k, vg, vd, vs);
  // PMOS is the NMOS mirror under sign inversion of all terminal voltages.
  auto m = nmos_eval(p.vth, p.k, -vg, -vd, -vs);
  return {-m.id, m.d_vg, m.d_vd, m.d_vs};
}

} // namespace ternsim::devices
