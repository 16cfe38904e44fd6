#pragma once

#include "ternsim/core.hpp"
#include "ternsim/digital.hpp"
#include "ternsim/engine.hpp"
#include "ternsim/netlist.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ternsim::analysis {

enum class Backend { Analog, Digital };
enum class Decoder { D13, D29, Display };

std::string_view to_string(Backend b);
std::string_view to_string(Decoder d);
std::optional<Backend> backend_from_string(std::string_view s);
std::optional<Decoder> decoder_from_string(std::string_view s);

netlist::Design decoder_design(Decoder d);

/// One row of a reference truth table.
struct ExpectedRow {
  engine::LevelMap inputs;
  std::map<std::string, core::TernaryLevel> outputs;
};

/// Reference tables written out independently of the circuit builders.
std::vector<ExpectedRow> expected_table(Decoder d);
/// Known inconsistencies of the published tables, reported alongside results.
std::vector<std::string> errata_notes(Decoder d);

/// Exchanges the drivers of two nets before evaluation.
struct Fault {
  std::string net_a;
  std::string net_b;
};

/// Parses "swap:A,B".
Fault parse_fault(std::string_view spec);
std::string to_string(const Fault& f);

struct VerifyOptions {
  std::optional<Fault> fault;
  unsigned jobs = 1;
  engine::SteadyOptions steady{};
  core::VoltageBands bands = core::VoltageBands::defaults(1.0);
  netlist::CellParams cells{};
};

struct VectorResult {
  engine::LevelMap inputs;
  std::map<std::string, core::TernaryLevel> expected;
  std::map<std::string, core::MaybeLevel> observed;
  /// Analog only; empty for the digital backend.
  std::map<std::string, double> voltages;
  bool settled = true;
  double settle_time = 0;
  std::string error;
  bool pass = false;
};

struct TruthTableReport {
  Backend backend = Backend::Digital;
  Decoder decoder = Decoder::D13;
  std::optional<Fault> fault;
  std::vector<VectorResult> vectors;
  std::vector<std::string> notes;
  double runtime_s = 0;

  std::size_t passed() const;
  bool pass() const { return !vectors.empty() && passed() == vectors.size(); }
};

TruthTableReport verify(Backend backend, Decoder decoder, const VerifyOptions& opt = {});

/// Analog steady-state table of a single cell. Two-input MRL cells are
/// first programmed with the extreme inputs in the target's order, then
/// read at the target levels (see README, "Gate oracle").
struct GateRow {
  std::vector<core::TernaryLevel> inputs;
  core::TernaryLevel expected = core::TernaryLevel::L0;
  core::MaybeLevel observed;
  double voltage = 0;
  bool pass = false;
};

struct GateOracleOptions {
  netlist::CellParams cells{};
  engine::SteadyOptions steady{};
  core::VoltageBands bands = core::VoltageBands::defaults(1.0);
  /// Skip the programming phase.
  bool direct = false;
};

core::TernaryLevel reference_eval(netlist::CellKind kind, const std::vector<core::TernaryLevel>& in);
std::vector<GateRow> analog_gate_table(netlist::CellKind kind, const GateOracleOptions& opt = {});

struct GlitchEvent {
  std::string node;
  double t_start = 0;
  double t_end = 0;
  /// Band farthest from the final band during the excursion.
  core::Band excursion_band = core::Band::Low;
};

/// Scans each window between stimulus events for nodes that leave the
/// window's final band for at least `min_samples` samples and come back.
std::vector<GlitchEvent> detect_glitches(const engine::Waveform& w, const engine::Stimulus& stim,
                                         const core::VoltageBands& bands, std::size_t min_samples = 2);

struct SettleOptions {
  /// Reference time, normally the last stimulus event.
  double since = 0;
  /// The final band must be held at least this long (0 selects 10 ns).
  double hold = 0;
};

/// Time from `since` to the final entry into the settled band; throws
/// NotSettled when the trace ends in a gap or has not held long enough.
double measure_settling(const engine::Waveform& w, const std::string& node, const core::VoltageBands& bands,
                        const SettleOptions& opt = {});

struct SettleRecord {
  double event_time = 0;
  std::string node;
  core::MaybeLevel final_level;
  /// Negative when the node did not settle inside the window.
  double settle_time = -1;
};

/// Settle time of every probed node after every stimulus event.
std::vector<SettleRecord> settle_report(const engine::Waveform& w, const engine::Stimulus& stim,
                                        const core::VoltageBands& bands);

struct Measured {
  std::size_t pins_in = 0;
  std::size_t pins_out = 0;
  /// Binary lines after two-bit encoding of ternary ports.
  std::size_t encoded_lines_in = 0;
  std::size_t encoded_lines_out = 0;
  std::size_t memristors = 0;
  std::size_t mosfets = 0;
  std::size_t gates = 0;
};

/// A reported figure with the anchor it was taken from.
struct Constant {
  std::string key;
  double value = 0;
  std::string unit;
  std::string citation;
};

struct ResourceReport {
  std::string ternary_name;
  std::string baseline_name;
  Measured ternary;
  Measured baseline;
  std::vector<Constant> reference;
  /// Ratios recomputed from the reference constants.
  double io_power_ratio = 0;
  double total_power_reduction_pct = 0;
  double speed_ratio = 0;
  std::vector<std::string> notes;

  const Constant& constant(std::string_view key) const;
};

/// Reported figures, fixed at compile time.
const std::vector<Constant>& reference_constants();

ResourceReport resource_report(const netlist::Circuit& ternary, const netlist::Circuit& baseline);
/// Display decoder against the BCD baseline, both with default cell parameters.
ResourceReport resource_report();

enum class Polarity { CommonAnode, CommonCathode };

struct Glyph {
  std::array<std::string, 5> rows;
  std::array<bool, 7> lit{};
  std::optional<int> digit;
  std::string text() const;
};

/// `driven_high` holds segments a..g after OR-reduction of each output.
Glyph seven_segment_render(const std::array<bool, 7>& driven_high, Polarity polarity = Polarity::CommonAnode);
/// Renders display decoder outputs Ya..Yg.
Glyph render_outputs(const std::map<std::string, core::BitPair>& outputs);

std::string to_text(const TruthTableReport& r);
nlohmann::json to_json(const TruthTableReport& r);
std::string to_text(const ResourceReport& r);
nlohmann::json to_json(const ResourceReport& r);
nlohmann::json to_json(const std::vector<GlitchEvent>& g);
nlohmann::json to_json(const std::vector<SettleRecord>& s);

} // namespace ternsim::analysis
