#pragma once

#include "ternsim/core.hpp"

#include <string_view>

namespace ternsim {

class NonpositiveTimestep : public Error {
public:
  NonpositiveTimestep() : Error("time step must be positive") {}
};

namespace devices {

/// How a memristor's state responds to its branch voltage.
///
/// Threshold: x only moves while |v| is beyond V_ON / V_OFF.
/// Thermal:   mean metastable-switch form. Both switching directions are
///            always active with Boltzmann-weighted rates set by the
///            thermal voltage kT/q, so biases slightly under threshold still
///            switch, slowly.
enum class SwitchingModel { Threshold, Thermal };

std::string_view to_string(SwitchingModel m);
SwitchingModel switching_model_from_string(std::string_view s);

struct MemristorParams {
  double r_on = 500.0;
  double r_off = 10e3;
  double v_on = 0.27;
  double v_off = 0.27;
  double tau = 500e-12;
  double temperature = 300.0;
  double x0 = 0.0;
  SwitchingModel model = SwitchingModel::Threshold;

  bool valid() const;
  /// Throws ternsim::Error naming the first violated invariant.
  void validate() const;

  friend bool operator==(const MemristorParams&, const MemristorParams&) = default;
};

struct MemristorState {
  double x = 0.0;
};

/// Parallel-conductance mix of the on and off resistances.
double memristance(MemristorState state, const MemristorParams& p);
double memristor_current(MemristorState state, double v, const MemristorParams& p);

/// Advances the state by `dt` under a constant branch voltage `v`
/// (anode minus cathode). The update is the exact solution of the linear
/// relaxation for frozen `v`, so two half steps equal one full step.
MemristorState update_state(MemristorState state, double v, double dt, const MemristorParams& p);

/// Thermal voltage kT/q in volts.
double thermal_voltage(double kelvin);

// Two-valued memristor used by the gate-level backend: 500 encodes R_on and
// 1500 encodes R_off.
inline constexpr int kDigitalRon = 500;
inline constexpr int kDigitalRoff = 1500;

int digital_memristance(double v_anode, double v_cathode);

/// Stateful variant: holds its previous value when the terminals are equal.
class DigitalMemristor {
public:
  int update(double v_anode, double v_cathode);
  int value() const { return value_; }

private:
  int value_ = kDigitalRoff;
};

enum class Polarity { Nmos, Pmos };

std::string_view to_string(Polarity p);

struct MosfetParams {
  Polarity polarity = Polarity::Nmos;
  double vth = 0.3; ///< magnitude, volts
  double k = 2e-3;  ///< A/V^2

  bool valid() const { return vth > 0 && k > 0; }
  friend bool operator==(const MosfetParams&, const MosfetParams&) = default;
};

/// Drain current and its partial derivatives with respect to the three
/// terminal voltages. Positive current flows into the drain.
struct MosfetEval {
  double id = 0;
  double d_vg = 0;
  double d_vd = 0;
  double d_vs = 0;
};

MosfetEval mosfet_eval(const MosfetParams& p, double vg, double vd, double vs);

/// Piecewise square-law drain current (cutoff / triode / saturation).
inline double mosfet_current(const MosfetParams& p, double vg, double vd, double vs) {
  return mosfet_eval(p, vg, vd, vs).id;
}

} // namespace devices
} // namespace ternsim
