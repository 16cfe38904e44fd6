#pragma once

#include "ternsim/core.hpp"
#include "ternsim/netlist.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ternsim::digital {

using EncodedMap = std::map<std::string, core::BitPair>;

/// Gate instance with inputs and output resolved to net indices.
struct GateNode {
  netlist::CellKind kind;
  std::string name;
  std::vector<std::size_t> inputs;
  std::size_t output = 0;
};

/// Acyclic gate network in topological order.
class GateDag {
public:
  /// Throws Error on undriven nets, multiple drivers or a combinational cycle.
  static GateDag from_design(const netlist::Design& d);

  const std::vector<std::string>& nets() const { return nets_; }
  const std::vector<GateNode>& gates() const { return gates_; }
  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  std::size_t net_index(const std::string& net) const;

private:
  std::vector<std::string> nets_;
  std::map<std::string, std::size_t> index_;
  std::vector<GateNode> gates_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

/// Throws InvalidArity on an input count mismatch and InvalidEncoding on 11.
core::BitPair eval_gate(netlist::CellKind kind, const std::vector<core::BitPair>& inputs);

enum class Orientation { And, Or };

std::string_view to_string(Orientation o);

/// Integer divider evaluation with the two-valued memristor.
struct DividerResult {
  int r_a = 0;
  int r_b = 0;
  /// Output in millivolts over the {0, 500, 1000} input scale.
  int v_out_mv = 0;
  core::TernaryLevel level = core::TernaryLevel::L0;
};

inline constexpr int kDividerLowMv = 250;
inline constexpr int kDividerHighMv = 750;

DividerResult divider_detail(core::TernaryLevel a, core::TernaryLevel b, Orientation o);
core::TernaryLevel divider_emulation(core::TernaryLevel a, core::TernaryLevel b, Orientation o);

/// Zero-delay evaluation; returns the primary outputs.
EncodedMap eval_circuit(const GateDag& dag, const EncodedMap& inputs);
/// Same pass, returning the value of every net.
EncodedMap eval_all_nets(const GateDag& dag, const EncodedMap& inputs);

/// Throws InvalidEncoding on 11.
bool or_reduce_segment(core::BitPair out);

struct TraceRow {
  EncodedMap inputs;
  EncodedMap outputs;
};

struct EncodedTrace {
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<TraceRow> rows;
};

/// Evaluates each vector in order, one row per time index.
EncodedTrace run_trace(const GateDag& dag, const std::vector<EncodedMap>& vectors);

/// CSV in the analog column convention (`time,<net>...`), levels written as
/// voltages; row k is stamped at k * period.
void write_trace_csv(std::ostream& os, const EncodedTrace& t, double period, double vdd = 1.0);

} // namespace ternsim::digital
