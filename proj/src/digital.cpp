#include "ternsim/digital.hpp"

#include <algorithm>
#include <ostream>

namespace ternsim::digital {

using core::BitPair;
using core::TernaryLevel;
using netlist::CellType;

GateDag GateDag::from_design(const netlist::Design& d) {
  GateDag g;
  g.inputs_ = d.inputs;
  g.outputs_ = d.outputs;
  auto intern = [&g](const std::string& net) {
    auto [it, fresh] = g.index_.emplace(net, g.nets_.size());
    if (fresh) g.nets_.push_back(net);
    return it->second;
  };
  for (const auto& in : d.inputs) intern(in);
  for (const auto& c : d.cells)
    for (const auto& n : c.inputs) intern(n);

  std::vector<int> driver(g.nets_.size(), -1);
  for (std::size_t i = 0; i < d.cells.size(); ++i) {
    std::size_t out = intern(d.cells[i].output);
    driver.resize(g.nets_.size(), -1);
    bool primary = std::find(d.inputs.begin(), d.inputs.end(), d.cells[i].output) != d.inputs.end();
    if (driver[out] >= 0 || primary) throw Error("net '" + d.cells[i].output + "' has more than one driver");
    driver[out] = static_cast<int>(i);
  }
  for (std::size_t n = 0; n < g.nets_.size(); ++n) {
    bool primary = std::find(d.inputs.begin(), d.inputs.end(), g.nets_[n]) != d.inputs.end();
    if (driver[n] < 0 && !primary) throw Error("net '" + g.nets_[n] + "' is never driven");
  }
  for (const auto& o : d.outputs)
    if (!g.index_.count(o)) throw Error("output '" + o + "' is not a net of the design");

  // Kahn's algorithm, keeping design order among ready gates.
  std::vector<int> pending(d.cells.size(), 0);
  std::vector<std::vector<std::size_t>> users(g.nets_.size());
  for (std::size_t i = 0; i < d.cells.size(); ++i)
    for (const auto& n : d.cells[i].inputs) {
      std::size_t idx = g.index_.at(n);
      if (driver[idx] >= 0) ++pending[i];
      users[idx].push_back(i);
    }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < d.cells.size(); ++i)
    if (pending[i] == 0) ready.push_back(i);
  std::vector<bool> done(d.cells.size(), false);
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    std::size_t i = *it;
    ready.erase(it);
    const auto& c = d.cells[i];
    GateNode node{c.kind, c.name, {}, g.index_.at(c.output)};
    for (const auto& n : c.inputs) node.inputs.push_back(g.index_.at(n));
    g.gates_.push_back(std::move(node));
    done[i] = true;
    for (std::size_t u : users[g.index_.at(c.output)])
      if (--pending[u] == 0) ready.push_back(u);
  }
  for (std::size_t i = 0; i < d.cells.size(); ++i)
    if (!done[i]) throw Error("combinational cycle through gate '" + d.cells[i].name + "'");
  return g;
}

std::size_t GateDag::net_index(const std::string& net) const {
  auto it = index_.find(net);
  if (it == index_.end()) throw Error("unknown net '" + net + "'");
  return it->second;
}

BitPair eval_gate(netlist::CellKind kind, const std::vector<BitPair>& inputs) {
  if (static_cast<int>(inputs.size()) != kind.inputs())
    throw InvalidArity(netlist::to_string(kind) + " takes " + std::to_string(kind.inputs()) + " inputs, got " +
                       std::to_string(inputs.size()));
  std::vector<TernaryLevel> v;
  for (auto b : inputs) v.push_back(core::decode_2bit(b));
  TernaryLevel out = v[0];
  switch (kind.type) {
  case CellType::STI: out = core::ref_sti(v[0]); break;
  case CellType::NTI: out = core::ref_nti(v[0]); break;
  case CellType::PTI: out = core::ref_pti(v[0]); break;
  case CellType::SFBUF: break;
  case CellType::TAND2: out = core::ref_tand(v[0], v[1]); break;
  case CellType::TOR2:
  case CellType::TORN:
    for (auto l : v) out = core::ref_tor(out, l);
    break;
  case CellType::TNOR:
    for (auto l : v) out = core::ref_tor(out, l);
    out = core::ref_sti(out);
    break;
  }
  return core::encode_2bit(out);
}

std::string_view to_string(Orientation o) { return o == Orientation::And ? "AND" : "OR"; }

DividerResult divider_detail(TernaryLevel a, TernaryLevel b, Orientation o) {
  const int va = 500 * core::to_int(a);
  const int vb = 500 * core::to_int(b);
  const int lo = std::min(va, vb);
  const int hi = std::max(va, vb);
  // The output sits between the inputs, which fixes each device's bias: OR
  // cells put anodes on the inputs, AND cells put them on the output.
  const int mid = (lo + hi) / 2;
  auto device = [&](int v_in) {
    return o == Orientation::Or ? devices::digital_memristance(v_in, mid)
                                : devices::digital_memristance(mid, v_in);
  };
  DividerResult r;
  r.r_a = device(va);
  r.r_b = device(vb);
  const int r_low = va <= vb ? r.r_a : r.r_b;
  r.v_out_mv = lo + r_low * (hi - lo) / (r.r_a + r.r_b);
  if (r.v_out_mv <= kDividerLowMv)
    r.level = TernaryLevel::L0;
  else if (r.v_out_mv >= kDividerHighMv)
    r.level = TernaryLevel::L2;
  else
    r.level = TernaryLevel::L1;
  return r;
}

TernaryLevel divider_emulation(TernaryLevel a, TernaryLevel b, Orientation o) {
  return divider_detail(a, b, o).level;
}

EncodedMap eval_all_nets(const GateDag& dag, const EncodedMap& inputs) {
  std::vector<BitPair> val(dag.nets().size());
  for (const auto& in : dag.inputs()) {
    auto it = inputs.find(in);
    if (it == inputs.end()) throw Error("missing value for input '" + in + "'");
    if (!it->second.valid()) throw InvalidEncoding("input '" + in + "' carries code 11");
    val[dag.net_index(in)] = it->second;
  }
  std::vector<BitPair> args;
  for (const auto& g : dag.gates()) {
    args.clear();
    for (auto i : g.inputs) args.push_back(val[i]);
    val[g.output] = eval_gate(g.kind, args);
  }
  EncodedMap out;
  for (std::size_t i = 0; i < val.size(); ++i) out[dag.nets()[i]] = val[i];
  return out;
}

EncodedMap eval_circuit(const GateDag& dag, const EncodedMap& inputs) {
  auto all = eval_all_nets(dag, inputs);
  EncodedMap out;
  for (const auto& o : dag.outputs()) out[o] = all.at(o);
  return out;
}

bool or_reduce_segment(BitPair out) {
  if (!out.valid()) throw InvalidEncoding("segment output carries code 11");
  return out.hi || out.lo;
}

EncodedTrace run_trace(const GateDag& dag, const std::vector<EncodedMap>& vectors) {
  EncodedTrace t;
  t.input_names = dag.inputs();
  t.output_names = dag.outputs();
  for (const auto& v : vectors) t.rows.push_back({v, eval_circuit(dag, v)});
  return t;
}

void write_trace_csv(std::ostream& os, const EncodedTrace& t, double period, double vdd) {
  os << "time";
  for (const auto& n : t.input_names) os << ',' << n;
  for (const auto& n : t.output_names) os << ',' << n;
  os << '\n';
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    os << netlist::format_number(static_cast<double>(k) * period);
    for (const auto& n : t.input_names)
      os << ',' << netlist::format_number(core::level_to_voltage(core::decode_2bit(t.rows[k].inputs.at(n)), vdd));
    for (const auto& n : t.output_names)
      os << ',' << netlist::format_number(core::level_to_voltage(core::decode_2bit(t.rows[k].outputs.at(n)), vdd));
    os << '\n';
  }
}

} // namespace ternsim::digital
