#pragma once

#include "ternsim/core.hpp"
#include "ternsim/devices.hpp"
#include "ternsim/netlist.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ternsim {
namespace engine {

/// Sampled node voltages and memristor states of a transient run.
struct Waveform {
  double dt = 0;
  std::vector<double> time;
  std::map<std::string, std::vector<double>> probes;
  std::map<std::string, std::vector<double>> states;

  std::size_t size() const { return time.size(); }
  const std::vector<double>& probe(const std::string& node) const;
  /// Memristor states at the last sample.
  std::map<std::string, devices::MemristorState> final_states() const;
};

} // namespace engine

class SimulationError : public Error {
public:
  using Error::Error;
};

class NonConvergence : public SimulationError {
public:
  NonConvergence(int iterations, std::string worst_node)
      : SimulationError("Newton iteration did not converge after " + std::to_string(iterations) +
                        " iterations (worst node '" + worst_node + "')"),
        iterations_(iterations), worst_node_(std::move(worst_node)) {}

  int iterations() const { return iterations_; }
  const std::string& worst_node() const { return worst_node_; }

private:
  int iterations_;
  std::string worst_node_;
};

class SingularSystem : public SimulationError {
public:
  explicit SingularSystem(const std::string& detail)
      : SimulationError("singular nodal system: " + detail) {}
};

class NotSettled : public SimulationError {
public:
  explicit NotSettled(double t_stop)
      : SimulationError("outputs did not settle before t_stop = " + std::to_string(t_stop) + " s"),
        t_stop_(t_stop) {}
  double t_stop() const { return t_stop_; }

private:
  double t_stop_;
};

/// A transient run failed part way; carries everything computed so far.
class TransientAborted : public SimulationError {
public:
  TransientAborted(double time, const std::string& cause, engine::Waveform partial)
      : SimulationError("transient aborted at t = " + std::to_string(time) + " s: " + cause),
        time_(time), partial_(std::move(partial)) {}

  double time() const { return time_; }
  const engine::Waveform& partial() const { return partial_; }

private:
  double time_;
  engine::Waveform partial_;
};

namespace engine {

using NodeVoltages = std::map<std::string, double>;
using StateMap = std::map<std::string, devices::MemristorState>;
using LevelMap = std::map<std::string, core::TernaryLevel>;

struct SolverConfig {
  double dt = 50e-12;
  double t_stop = 100e-9;
  double newton_tol = 1e-6;
  int newton_max_iter = 200;
  double damping = 0.7;
  /// Damping applies to Newton updates larger than this (volts).
  double damping_onset = 0.05;
  double retry_damping = 0.3;
  /// Largest node voltage change applied in one damped Newton update.
  double max_step = 0.5;
  /// Conductance across every transistor channel so cut-off branches never
  /// leave an island of nodes.
  double gmin = 1e-7;

  void validate() const;
};

struct LevelEvent {
  double time = 0;
  core::TernaryLevel level = core::TernaryLevel::L0;
};

/// Per-port level schedules with a linear ramp of `slew` seconds at each change.
struct Stimulus {
  std::map<std::string, std::vector<LevelEvent>> schedule;
  double slew = 0;
  double vdd = 1.0;

  static Stimulus constant(const LevelMap& inputs, double vdd = 1.0);

  void validate() const;
  double voltage(const std::string& port, double t) const;
  /// Times at which some port changes level (the initial level excluded).
  std::vector<double> event_times() const;
};

/// Parses the stimulus text format (see README).
Stimulus parse_stimulus(std::string_view text);

/// Circuit compiled to indexed form; reused across Newton solves.
class Simulator {
public:
  /// `pinned` nodes are held at caller-supplied voltages.
  Simulator(const netlist::Circuit& c, std::vector<std::string> pinned, SolverConfig cfg);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  std::size_t node_count() const;
  const std::vector<std::string>& node_names() const;
  std::size_t node_index(const std::string& name) const;
  const std::vector<std::string>& memristor_names() const;

  /// Initial guess: free nodes at vdd/2.
  std::vector<double> initial_voltages(double vdd) const;
  std::vector<double> initial_states() const;

  /// Damped Newton solve at time `t`. Pinned entries of `v` are inputs, the
  /// rest are the initial guess and are overwritten with the solution.
  /// Retries once with the retry damping before reporting NonConvergence.
  void solve(std::vector<double>& v, const std::vector<double>& x, double t);
  /// Advances every memristor state from its branch voltage.
  void update_states(const std::vector<double>& v, std::vector<double>& x, double dt) const;

  double min_tau() const;
  double max_tau() const;
  /// Largest |KCL residual| over nodes with no source attached.
  double max_kcl_residual(const std::vector<double>& v, const std::vector<double>& x) const;
  /// Largest conductance-like stamp magnitude in the Jacobian.
  double max_conductance(const std::vector<double>& v, const std::vector<double>& x) const;
  /// Sum of |v * i| over all two-terminal elements and channels.
  double total_branch_power(const std::vector<double>& v, const std::vector<double>& x) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

NodeVoltages solve_dc(const netlist::Circuit& c, const NodeVoltages& fixed, const StateMap& states,
                      const SolverConfig& cfg = {});

struct StepResult {
  NodeVoltages voltages;
  StateMap states;
  /// Set when dt exceeds half the smallest memristor time constant.
  bool dt_warning = false;
};

/// Solves with frozen states, then updates every memristor from its branch voltage.
StepResult step(const netlist::Circuit& c, const NodeVoltages& fixed, const StateMap& states,
                double dt, const SolverConfig& cfg = {});

/// Probes every node when `probes` is empty.
Waveform run_transient(const netlist::Circuit& c, const Stimulus& stim, const SolverConfig& cfg,
                       const std::vector<std::string>& probes = {},
                       const StateMap& initial_states = {});

struct SteadyOptions {
  SolverConfig solver{};
  /// Zero selects 20 time constants of the slowest memristor.
  double settle_window = 0;
  StateMap initial_states{};
  double vdd = 1.0;
};

struct SteadyResult {
  std::map<std::string, core::MaybeLevel> levels;
  NodeVoltages voltages;
  /// Last time any output changed band.
  double settle_time = 0;
  double sim_time = 0;
  StateMap final_states;
};

/// Holds `inputs` constant and runs until every output port has stayed in
/// one band for the settle window; throws NotSettled otherwise.
SteadyResult steady_output(const netlist::Circuit& c, const LevelMap& inputs,
                           const core::VoltageBands& bands, const SteadyOptions& opt = {});

void write_csv(std::ostream& os, const Waveform& w, const std::vector<std::string>& probes = {});
void write_vcd(std::ostream& os, const Waveform& w, const core::VoltageBands& bands,
               const std::vector<std::string>& probes = {});

} // namespace engine
} // namespace ternsim
