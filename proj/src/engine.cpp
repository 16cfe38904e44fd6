#include "ternsim/engine.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ternsim::engine {

using netlist::Circuit;

const std::vector<double>& Waveform::probe(const std::string& node) const {
  auto it = probes.find(node);
  if (it == probes.end()) throw Error("node '" + node + "' was not probed");
  return it->second;
}

StateMap Waveform::final_states() const {
  StateMap out;
  for (const auto& [name, series] : states)
    if (!series.empty()) out[name] = {series.back()};
  return out;
}

void SolverConfig::validate() const {
  if (!(dt > 0)) throw Error("solver dt must be positive");
  if (!(t_stop >= 0)) throw Error("solver t_stop must be non-negative");
  if (!(newton_tol > 0)) throw Error("newton tolerance must be positive");
  if (newton_max_iter < 1) throw Error("newton_max_iter must be at least 1");
  if (!(damping > 0 && damping <= 1)) throw Error("damping must lie in (0, 1]");
  if (!(retry_damping > 0 && retry_damping <= 1)) throw Error("retry damping must lie in (0, 1]");
  if (!(gmin >= 0)) throw Error("gmin must be non-negative");
  if (!(max_step > 0)) throw Error("max_step must be positive");
}

// ---------------------------------------------------------------------------
// Stimulus

Stimulus Stimulus::constant(const LevelMap& inputs, double vdd) {
  Stimulus s;
  s.vdd = vdd;
  for (const auto& [port, level] : inputs) s.schedule[port] = {{0.0, level}};
  return s;
}

void Stimulus::validate() const {
  if (!(slew >= 0)) throw Error("stimulus slew must be non-negative");
  if (!(vdd > 0)) throw Error("stimulus vdd must be positive");
  for (const auto& [port, events] : schedule) {
    if (events.empty()) throw Error("stimulus for port '" + port + "' is empty");
    for (std::size_t i = 1; i < events.size(); ++i) {
      double dwell = events[i].time - events[i - 1].time;
      if (!(dwell > 0))
        throw Error("stimulus times for port '" + port + "' must be strictly increasing");
      if (!(slew < dwell)) throw Error("stimulus slew must be shorter than every dwell");
    }
  }
}

double Stimulus::voltage(const std::string& port, double t) const {
  auto it = schedule.find(port);
  if (it == schedule.end()) throw Error("no stimulus for port '" + port + "'");
  const auto& ev = it->second;
  std::size_t k = 0;
  while (k + 1 < ev.size() && ev[k + 1].time <= t) ++k;
  double target = core::level_to_voltage(ev[k].level, vdd);
  if (k == 0 || slew <= 0 || t >= ev[k].time + slew) return target;
  double from = core::level_to_voltage(ev[k - 1].level, vdd);
  return from + (target - from) * (t - ev[k].time) / slew;
}

std::vector<double> Stimulus::event_times() const {
  std::set<double> times;
  for (const auto& [port, ev] : schedule)
    for (std::size_t i = 1; i < ev.size(); ++i)
      if (ev[i].level != ev[i - 1].level) times.insert(ev[i].time);
  return {times.begin(), times.end()};
}

Stimulus parse_stimulus(std::string_view text) {
  Stimulus s;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty() || toks[0][0] == '*') continue;
    try {
      if (toks[0] == "slew" && toks.size() == 2) {
        s.slew = netlist::parse_si(toks[1]);
      } else if (toks[0] == "vdd" && toks.size() == 2) {
        s.vdd = netlist::parse_si(toks[1]);
      } else if (toks.size() == 3) {
        int level = 0;
        auto [p, ec] = std::from_chars(toks[2].data(), toks[2].data() + toks[2].size(), level);
        if (ec != std::errc{} || p != toks[2].data() + toks[2].size())
          throw Error("bad level '" + toks[2] + "'");
        s.schedule[toks[0]].push_back({netlist::parse_si(toks[1]), core::level_from_int(level)});
      } else {
        throw Error("expected '<port> <time> <level>', 'slew <t>' or 'vdd <v>'");
      }
    } catch (const NetlistError&) {
      throw;
    } catch (const Error& e) {
      throw SyntaxError(line, e.what());
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw SyntaxError(0, e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Simulator

struct Simulator::Impl {
  struct MemristorRef {
    std::size_t anode, cathode;
    devices::MemristorParams params;
  };
  struct ResistorRef {
    std::size_t a, b;
    double g;
  };
  struct MosfetRef {
    std::size_t d, g, s;
    devices::MosfetParams params;
  };
  struct SourceRef {
    std::size_t pos, neg;
    netlist::VoltageSource src;
    int row;
  };

  SolverConfig cfg;
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<int> row;
  std::vector<bool> pinned;
  std::vector<bool> sourced;
  std::size_t node_unknowns = 0;
  std::size_t unknowns = 0;
  std::vector<std::string> memristor_names;
  std::vector<MemristorRef> memristors;
  std::vector<ResistorRef> resistors;
  std::vector<MosfetRef> mosfets;
  std::vector<SourceRef> sources;
  Eigen::VectorXd branch_current;

  Eigen::MatrixXd jac;
  Eigen::VectorXd res;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  void stamp_g(std::size_t a, std::size_t b, double g, const std::vector<double>& v) {
    double i = g * (v[a] - v[b]);
    int ra = row[a];
    int rb = row[b];
    if (ra >= 0) {
      res[ra] += i;
      jac(ra, ra) += g;
      if (rb >= 0) jac(ra, rb) -= g;
    }
    if (rb >= 0) {
      res[rb] -= i;
      jac(rb, rb) += g;
      if (ra >= 0) jac(rb, ra) -= g;
    }
  }

  void add_jac(int r, std::size_t node, double val) {
    int c = row[node];
    if (r >= 0 && c >= 0) jac(r, c) += val;
  }

  void assemble(const std::vector<double>& v, const std::vector<double>& x, double t) {
    jac.setZero();
    res.setZero();
    for (std::size_t i = 0; i < memristors.size(); ++i) {
      const auto& m = memristors[i];
      stamp_g(m.anode, m.cathode, 1.0 / devices::memristance({x[i]}, m.params), v);
    }
    for (const auto& r : resistors) stamp_g(r.a, r.b, r.g, v);
    for (const auto& m : mosfets) {
      auto e = devices::mosfet_eval(m.params, v[m.g], v[m.d], v[m.s]);
      int rd = row[m.d];
      int rs = row[m.s];
      if (rd >= 0) {
        res[rd] += e.id;
        add_jac(rd, m.g, e.d_vg);
        add_jac(rd, m.d, e.d_vd);
        add_jac(rd, m.s, e.d_vs);
      }
      if (rs >= 0) {
        res[rs] -= e.id;
        add_jac(rs, m.g, -e.d_vg);
        add_jac(rs, m.d, -e.d_vd);
        add_jac(rs, m.s, -e.d_vs);
      }
      if (cfg.gmin > 0) stamp_g(m.d, m.s, cfg.gmin, v);
    }
    for (const auto& s : sources) {
      if (s.row < 0) continue;
      double ib = branch_current[s.row - static_cast<int>(node_unknowns)];
      int rp = row[s.pos];
      int rn = row[s.neg];
      if (rp >= 0) {
        res[rp] += ib;
        jac(rp, s.row) += 1;
      }
      if (rn >= 0) {
        res[rn] -= ib;
        jac(rn, s.row) -= 1;
      }
      res[s.row] = v[s.pos] - v[s.neg] - s.src.value_at(t);
      add_jac(s.row, s.pos, 1);
      add_jac(s.row, s.neg, -1);
    }
  }

  // Returns true on convergence; `worst` receives the node with the largest
  // final update.
  bool newton(std::vector<double>& v, const std::vector<double>& x, double t, double damping,
              std::size_t& worst) {
    if (unknowns == 0) return true;
    Eigen::VectorXd delta(unknowns);
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      assemble(v, x, t);
      lu.compute(jac);
      check_singular();
      delta = lu.solve(-res);
      double max_dv = 0;
      for (std::size_t n = 0; n < names.size(); ++n) {
        if (row[n] < 0) continue;
        double d = std::abs(delta[row[n]]);
        if (!std::isfinite(d)) throw SingularSystem("non-finite Newton update at node '" + names[n] + "'");
        if (d >= max_dv) {
          max_dv = d;
          worst = n;
        }
      }
      double scale = max_dv > cfg.damping_onset ? damping : 1.0;
      for (std::size_t n = 0; n < names.size(); ++n)
        if (row[n] >= 0) v[n] += std::clamp(scale * delta[row[n]], -cfg.max_step, cfg.max_step);
      for (std::size_t b = node_unknowns; b < unknowns; ++b)
        branch_current[b - node_unknowns] += scale * delta[b];
      if (max_dv < cfg.newton_tol) return true;
    }
    return false;
  }

  void check_structure() const;

  void check_singular() const {
    const auto& m = lu.matrixLU();
    double scale = jac.cwiseAbs().maxCoeff();
    if (scale == 0) throw SingularSystem("empty conductance matrix");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double piv = std::abs(m(i, i));
      // Structural defects are caught at construction; this only trips on
      // exact cancellation, since weakly tied gmin chains are legitimately tiny.
      if (!(piv > 1e-30 * scale)) throw SingularSystem("zero pivot in nodal matrix");
    }
  }

  double max_tau(bool want_max) const {
    if (memristors.empty()) return devices::MemristorParams{}.tau;
    double out = memristors.front().params.tau;
    for (const auto& m : memristors)
      out = want_max ? std::max(out, m.params.tau) : std::min(out, m.params.tau);
    return out;
  }
};

// Every free node needs a conductive path to a pinned node, and voltage
// sources must not close a loop once all pinned nodes are merged.
void Simulator::Impl::check_structure() const {
  const auto& s = *this;
  std::vector<std::size_t> parent(s.names.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = s.pinned[i] ? 0 : i;
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto join = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  };
  for (const auto& src : s.sources)
    if (src.row >= 0 && !join(src.pos, src.neg))
      throw SingularSystem("voltage source '" + src.src.name + "' closes a loop of sources");
  for (const auto& m : s.memristors) join(m.anode, m.cathode);
  for (const auto& r : s.resistors) join(r.a, r.b);
  for (const auto& m : s.mosfets) join(m.d, m.s);
  for (std::size_t i = 0; i < s.names.size(); ++i)
    if (find(i) != 0) throw SingularSystem("node '" + s.names[i] + "' has no conductive path to a fixed node");
}

Simulator::Simulator(const Circuit& c, std::vector<std::string> pinned_nodes, SolverConfig cfg)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  auto& s = *impl_;
  s.cfg = cfg;
  s.names = c.nodes();
  for (std::size_t i = 0; i < s.names.size(); ++i) s.index.emplace(s.names[i], i);
  s.pinned.assign(s.names.size(), false);
  s.sourced.assign(s.names.size(), false);
  s.pinned[s.index.at(std::string(netlist::kGround))] = true;
  for (const auto& p : pinned_nodes) {
    auto it = s.index.find(p);
    if (it == s.index.end()) throw Error("cannot pin unknown node '" + p + "'");
    s.pinned[it->second] = true;
  }
  s.row.assign(s.names.size(), -1);
  for (std::size_t i = 0; i < s.names.size(); ++i)
    if (!s.pinned[i]) s.row[i] = static_cast<int>(s.node_unknowns++);
  s.unknowns = s.node_unknowns;

  for (const auto& d : c.devices()) {
    if (const auto* m = std::get_if<netlist::Memristor>(&d)) {
      s.memristors.push_back({s.index.at(m->anode), s.index.at(m->cathode), m->params});
      s.memristor_names.push_back(m->name);
    } else if (const auto* r = std::get_if<netlist::Resistor>(&d)) {
      s.resistors.push_back({s.index.at(r->a), s.index.at(r->b), 1.0 / r->ohms});
    } else if (const auto* t = std::get_if<netlist::Mosfet>(&d)) {
      s.mosfets.push_back({s.index.at(t->drain), s.index.at(t->gate), s.index.at(t->source), t->params});
    } else if (const auto* v = std::get_if<netlist::VoltageSource>(&d)) {
      std::size_t pos = s.index.at(v->pos);
      std::size_t neg = s.index.at(v->neg);
      // A source between two pinned nodes adds nothing but an undetermined current.
      int row = (s.pinned[pos] && s.pinned[neg]) ? -1 : static_cast<int>(s.unknowns++);
      s.sources.push_back({pos, neg, *v, row});
      s.sourced[pos] = s.sourced[neg] = true;
    }
  }
  s.check_structure();
  s.branch_current = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.unknowns - s.node_unknowns));
  auto n = static_cast<Eigen::Index>(s.unknowns);
  s.jac.resize(n, n);
  s.res.resize(n);
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

std::size_t Simulator::node_count() const { return impl_->names.size(); }
const std::vector<std::string>& Simulator::node_names() const { return impl_->names; }

std::size_t Simulator::node_index(const std::string& name) const {
  auto it = impl_->index.find(name);
  if (it == impl_->index.end()) throw Error("unknown node '" + name + "'");
  return it->second;
}

const std::vector<std::string>& Simulator::memristor_names() const { return impl_->memristor_names; }

std::vector<double> Simulator::initial_voltages(double vdd) const {
  std::vector<double> v(impl_->names.size(), vdd / 2);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (impl_->pinned[i]) v[i] = 0;
  return v;
}

std::vector<double> Simulator::initial_states() const {
  std::vector<double> x;
  x.reserve(impl_->memristors.size());
  for (const auto& m : impl_->memristors) x.push_back(m.params.x0);
  return x;
}

void Simulator::solve(std::vector<double>& v, const std::vector<double>& x, double t) {
  auto& s = *impl_;
  const auto guess = v;
  const Eigen::VectorXd guess_current = s.branch_current;
  std::size_t worst = 0;
  if (s.newton(v, x, t, s.cfg.damping, worst)) return;
  v = guess;
  s.branch_current = guess_current;
  if (s.newton(v, x, t, s.cfg.retry_damping, worst)) return;
  throw NonConvergence(s.cfg.newton_max_iter, s.names[worst]);
}

void Simulator::update_states(const std::vector<double>& v, std::vector<double>& x, double dt) const {
  const auto& ms = impl_->memristors;
  for (std::size_t i = 0; i < ms.size(); ++i)
    x[i] = devices::update_state({x[i]}, v[ms[i].anode] - v[ms[i].cathode], dt, ms[i].params).x;
}

double Simulator::min_tau() const { return impl_->max_tau(false); }
double Simulator::max_tau() const { return impl_->max_tau(true); }

double Simulator::max_kcl_residual(const std::vector<double>& v, const std::vector<double>& x) const {
  auto& s = *impl_;
  if (s.unknowns == 0) return 0;
  s.assemble(v, x, 0);
  double worst = 0;
  for (std::size_t n = 0; n < s.names.size(); ++n)
    if (s.row[n] >= 0 && !s.sourced[n]) worst = std::max(worst, std::abs(s.res[s.row[n]]));
  return worst;
}

double Simulator::max_conductance(const std::vector<double>& v, const std::vector<double>& x) const {
  auto& s = *impl_;
  if (s.node_unknowns == 0) return 0;
  s.assemble(v, x, 0);
  double g = 0;
  for (std::size_t r = 0; r < s.node_unknowns; ++r)
    g = std::max(g, std::abs(s.jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r))));
  return g;
}

double Simulator::total_branch_power(const std::vector<double>& v, const std::vector<double>& x) const {
  const auto& s = *impl_;
  double p = 0;
  for (std::size_t i = 0; i < s.memristors.size(); ++i) {
    const auto& m = s.memristors[i];
    double dv = v[m.anode] - v[m.cathode];
    p += std::abs(dv * dv / devices::memristance({x[i]}, m.params));
  }
  for (const auto& r : s.resistors) {
    double dv = v[r.a] - v[r.b];
    p += std::abs(dv * dv * r.g);
  }
  for (const auto& m : s.mosfets)
    p += std::abs((v[m.d] - v[m.s]) * devices::mosfet_current(m.params, v[m.g], v[m.d], v[m.s]));
  return p;
}

// ---------------------------------------------------------------------------
// Public entry points

namespace {

double supply_estimate(const Circuit& c, const NodeVoltages& fixed) {
  double vdd = 0;
  for (const auto& d : c.devices())
    if (const auto* v = std::get_if<netlist::VoltageSource>(&d)) vdd = std::max(vdd, std::abs(v->value_at(0)));
  for (const auto& [node, val] : fixed) vdd = std::max(vdd, std::abs(val));
  return vdd > 0 ? vdd : 1.0;
}

std::vector<std::string> keys(const NodeVoltages& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

std::vector<double> state_vector(const Simulator& sim, const StateMap& states) {
  auto x = sim.initial_states();
  const auto& names = sim.memristor_names();
  for (const auto& [name, st] : states) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error("no memristor named '" + name + "'");
    x[static_cast<std::size_t>(it - names.begin())] = std::clamp(st.x, 0.0, 1.0);
  }
  return x;
}

StateMap state_map(const Simulator& sim, const std::vector<double>& x) {
  StateMap out;
  for (std::size_t i = 0; i < x.size(); ++i) out[sim.memristor_names()[i]] = {x[i]};
  return out;
}

NodeVoltages voltage_map(const Simulator& sim, const std::vector<double>& v) {
  NodeVoltages out;
  for (std::size_t i = 0; i < v.size(); ++i) out[sim.node_names()[i]] = v[i];
  return out;
}

// Input port name -> circuit node, checked against the circuit's input ports.
std::map<std::string, std::size_t> bind_inputs(const Circuit& c, const Simulator& sim,
                                                const std::vector<std::string>& ports) {
  std::map<std::string, std::size_t> out;
  for (const auto& name : ports) {
    const auto* p = c.find_port(name);
    if (!p || p->dir != netlist::PortDirection::In)
      throw Error("'" + name + "' is not an input port of the circuit");
    out[name] = sim.node_index(p->node);
  }
  return out;
}

std::vector<std::string> port_nodes(const Circuit& c, const std::vector<std::string>& ports) {
  std::vector<std::string> out;
  for (const auto& name : ports) {
    const auto* p = c.find_port(name);
    if (!p) throw Error("unknown port '" + name + "'");
    out.push_back(p->node);
  }
  return out;
}

} // namespace

NodeVoltages solve_dc(const Circuit& c, const NodeVoltages& fixed, const StateMap& states,
                      const SolverConfig& cfg) {
  Simulator sim(c, keys(fixed), cfg);
  auto v = sim.initial_voltages(supply_estimate(c, fixed));
  for (const auto& [node, val] : fixed) v[sim.node_index(node)] = val;
  auto x = state_vector(sim, states);
  sim.solve(v, x, 0);
  return voltage_map(sim, v);
}

StepResult step(const Circuit& c, const NodeVoltages& fixed, const StateMap& states, double dt,
                const SolverConfig& cfg) {
  if (!(dt > 0)) throw NonpositiveTimestep();
  Simulator sim(c, keys(fixed), cfg);
  auto v = sim.initial_voltages(supply_estimate(c, fixed));
  for (const auto& [node, val] : fixed) v[sim.node_index(node)] = val;
  auto x = state_vector(sim, states);
  sim.solve(v, x, 0);
  StepResult r;
  r.voltages = voltage_map(sim, v);
  sim.update_states(v, x, dt);
  r.states = state_map(sim, x);
  r.dt_warning = dt > sim.min_tau() / 2;
  return r;
}

Waveform run_transient(const Circuit& c, const Stimulus& stim, const SolverConfig& cfg,
                       const std::vector<std::string>& probes, const StateMap& initial_states) {
  stim.validate();
  cfg.validate();
  std::vector<std::string> ports;
  for (const auto& [port, ev] : stim.schedule) ports.push_back(port);
  Simulator sim(c, port_nodes(c, ports), cfg);
  auto inputs = bind_inputs(c, sim, ports);

  std::vector<std::string> probe_names = probes.empty() ? sim.node_names() : probes;
  std::vector<std::size_t> probe_idx;
  for (const auto& p : probe_names) probe_idx.push_back(sim.node_index(p));

  Waveform w;
  w.dt = cfg.dt;
  auto steps = static_cast<std::size_t>(std::floor(cfg.t_stop / cfg.dt + 1e-9));
  for (const auto& p : probe_names) w.probes[p].reserve(steps + 1);

  auto v = sim.initial_voltages(stim.vdd);
  auto x = state_vector(sim, initial_states);
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = static_cast<double>(k) * cfg.dt;
    for (const auto& [port, node] : inputs) v[node] = stim.voltage(port, t);
    try {
      sim.solve(v, x, t);
    } catch (const SimulationError& e) {
      throw TransientAborted(t, e.what(), std::move(w));
    }
    w.time.push_back(t);
    for (std::size_t i = 0; i < probe_names.size(); ++i) w.probes[probe_names[i]].push_back(v[probe_idx[i]]);
    for (std::size_t i = 0; i < x.size(); ++i) w.states[sim.memristor_names()[i]].push_back(x[i]);
    if (k < steps) sim.update_states(v, x, cfg.dt);
  }
  return w;
}

SteadyResult steady_output(const Circuit& c, const LevelMap& inputs, const core::VoltageBands& bands,
                           const SteadyOptions& opt) {
  if (!bands.valid()) throw Error("invalid voltage bands");
  const auto& cfg = opt.solver;
  cfg.validate();
  std::vector<std::string> ports;
  for (const auto& p : c.ports(netlist::PortDirection::In)) {
    if (!inputs.count(p.name)) throw Error("missing level for input port '" + p.name + "'");
    ports.push_back(p.name);
  }
  for (const auto& [name, lvl] : inputs)
    if (std::find(ports.begin(), ports.end(), name) == ports.end())
      throw Error("'" + name + "' is not an input port of the circuit");

  Simulator sim(c, port_nodes(c, ports), cfg);
  auto bound = bind_inputs(c, sim, ports);
  const auto outs = c.ports(netlist::PortDirection::Out);
  std::vector<std::size_t> out_idx;
  for (const auto& p : outs) out_idx.push_back(sim.node_index(p.node));

  const double window = opt.settle_window > 0 ? opt.settle_window : 20 * sim.max_tau();
  auto v = sim.initial_voltages(opt.vdd);
  auto x = state_vector(sim, opt.initial_states);
  for (const auto& [port, node] : bound) v[node] = core::level_to_voltage(inputs.at(port), opt.vdd);

  std::vector<core::Band> last(outs.size());
  double last_change = 0;
  auto steps = static_cast<std::size_t>(std::floor(cfg.t_stop / cfg.dt + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = static_cast<double>(k) * cfg.dt;
    sim.solve(v, x, t);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      auto b = core::classify(v[out_idx[i]], bands);
      if (k == 0 || b != last[i]) {
        if (k > 0) last_change = t;
        last[i] = b;
      }
    }
    if (t - last_change >= window - 1e-3 * cfg.dt) {
      SteadyResult r;
      for (std::size_t i = 0; i < outs.size(); ++i) {
        r.levels[outs[i].name] = core::band_level(last[i]);
        r.voltages[outs[i].name] = v[out_idx[i]];
      }
      r.settle_time = last_change;
      r.sim_time = t;
      r.final_states = state_map(sim, x);
      return r;
    }
    sim.update_states(v, x, cfg.dt);
  }
  throw NotSettled(cfg.t_stop);
}

// ---------------------------------------------------------------------------
// Export

void write_csv(std::ostream& os, const Waveform& w, const std::vector<std::string>& probes) {
  std::vector<std::string> names = probes;
  if (names.empty())
    for (const auto& [n, s] : w.probes) names.push_back(n);
  std::vector<const std::vector<double>*> cols;
  os << "time";
  for (const auto& n : names) {
    cols.push_back(&w.probe(n));
    os << ',' << n;
  }
  os << '\n';
  for (std::size_t k = 0; k < w.size(); ++k) {
    os << netlist::format_number(w.time[k]);
    for (const auto* c : cols) os << ',' << netlist::format_number((*c)[k]);
    os << '\n';
  }
}

namespace {

std::string vcd_id(std::size_t n) {
  std::string id;
  do {
    id.push_back(static_cast<char>(33 + n % 94));
    n /= 94;
  } while (n > 0);
  return id;
}

std::string vcd_name(std::string s) {
  for (auto& ch : s)
    if (ch == '.' || ch == ' ' || ch == '$') ch = '_';
  return s;
}

std::string vcd_bits(const core::MaybeLevel& l) {
  return l ? core::to_string(core::encode_2bit(*l)) : "xx";
}

} // namespace

void write_vcd(std::ostream& os, const Waveform& w, const core::VoltageBands& bands,
               const std::vector<std::string>& probes) {
  std::vector<std::string> names = probes;
  if (names.empty())
    for (const auto& [n, s] : w.probes) names.push_back(n);
  os << "$version ternsim $end\n$timescale 1ps $end\n$scope module circuit $end\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    os << "$var wire 2 " << vcd_id(2 * i) << ' ' << vcd_name(names[i]) << " $end\n";
    os << "$var real 64 " << vcd_id(2 * i + 1) << ' ' << vcd_name(names[i]) << "_v $end\n";
  }
  os << "$upscope $end\n$enddefinitions $end\n";
  std::vector<std::string> last_bits(names.size());
  std::vector<double> last_v(names.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < w.size(); ++k) {
    std::ostringstream changes;
    for (std::size_t i = 0; i < names.size(); ++i) {
      double v = w.probe(names[i])[k];
      auto bits = vcd_bits(core::voltage_to_level(v, bands));
      if (k == 0 || bits != last_bits[i]) changes << 'b' << bits << ' ' << vcd_id(2 * i) << '\n';
      if (k == 0 || v != last_v[i]) changes << 'r' << netlist::format_number(v) << ' ' << vcd_id(2 * i + 1) << '\n';
      last_bits[i] = bits;
      last_v[i] = v;
    }
    auto text = changes.str();
    if (k == 0) {
      os << "#0\n$dumpvars\n" << text << "$end\n";
    } else if (!text.empty()) {
      os << '#' << std::llround(w.time[k] * 1e12) << '\n' << text;
    }
  }
}

} // namespace ternsim::engine
