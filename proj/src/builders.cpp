#include "ternsim/netlist.hpp"

#include <algorithm>
#include <array>

namespace ternsim::netlist {

void Design::add(CellKind kind, std::string inst, std::vector<std::string> ins, std::string out) {
  if (static_cast<int>(ins.size()) != kind.inputs())
    throw InvalidArity(to_string(kind) + " instance '" + inst + "' given " +
                       std::to_string(ins.size()) + " inputs");
  cells.push_back({kind, std::move(inst), std::move(ins), std::move(out)});
}

std::size_t Design::count(CellType t) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [t](const CellInstance& c) { return c.kind.type == t; }));
}

namespace {

const std::string kVdd = "vdd";
const std::string kGnd{kGround};

bool needs_supply(CellType t) {
  return t != CellType::TAND2 && t != CellType::TOR2 && t != CellType::TORN;
}

class Elaborator {
public:
  Elaborator(Circuit& c, const CellParams& p) : c_(c), p_(p) {}

  void cell(const CellInstance& inst) {
    switch (inst.kind.type) {
    case CellType::STI:
      inverter(inst.name, inst.inputs[0], inst.output, p_.vth_low, p_.vth_low);
      break;
    case CellType::NTI:
      inverter(inst.name, inst.inputs[0], inst.output, p_.vth_low, p_.vth_high);
      break;
    case CellType::PTI:
      inverter(inst.name, inst.inputs[0], inst.output, p_.vth_high, p_.vth_low);
      break;
    case CellType::TAND2: mrl(inst.name, inst.inputs, inst.output, false); break;
    case CellType::TOR2:
    case CellType::TORN: mrl(inst.name, inst.inputs, inst.output, true); break;
    case CellType::TNOR: {
      std::string mid = inst.name + ".or";
      mrl(inst.name, inst.inputs, mid, true);
      inverter(inst.name, mid, inst.output, p_.vth_low, p_.vth_low);
      break;
    }
    case CellType::SFBUF:
      c_.add_device(Mosfet{"T_" + inst.name + "_sf", kVdd, inst.inputs[0], inst.output,
                           {devices::Polarity::Nmos, p_.vth_follower, p_.k_follower}});
      c_.add_device(Resistor{"R_" + inst.name + "_load", inst.output, kGnd, p_.follower_load});
      break;
    }
  }

private:
  // Complementary pair with a memristor on each side of the output. Both
  // memristors are reverse biased whenever their branch conducts, so they
  // stay near R_off and the pair divides symmetrically when both
  // transistors are on.
  void inverter(const std::string& inst, const std::string& in, const std::string& out,
                double vth_n, double vth_p) {
    std::string up = inst + ".p";
    std::string dn = inst + ".n";
    c_.add_device(Mosfet{"T_" + inst + "_pu", up, in, kVdd,
                         {devices::Polarity::Pmos, vth_p, p_.k_inverter}});
    c_.add_device(Memristor{"M_" + inst + "_up", out, up, p_.memristor});
    c_.add_device(Memristor{"M_" + inst + "_dn", dn, out, p_.memristor});
    c_.add_device(Mosfet{"T_" + inst + "_pd", dn, in, kGnd,
                         {devices::Polarity::Nmos, vth_n, p_.k_inverter}});
  }

  // Memristor-ratioed gate: OR has each anode on its input, AND has each
  // anode on the shared output.
  void mrl(const std::string& inst, const std::vector<std::string>& ins, const std::string& out,
           bool is_or) {
    for (std::size_t i = 0; i < ins.size(); ++i) {
      std::string name = "M_" + inst + "_" + static_cast<char>('a' + i);
      if (is_or)
        c_.add_device(Memristor{name, ins[i], out, p_.memristor});
      else
        c_.add_device(Memristor{name, out, ins[i], p_.memristor});
    }
  }

  Circuit& c_;
  const CellParams& p_;
};

std::vector<std::string> input_names(int n) {
  if (n == 1) return {"in"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  return out;
}

// Adds a 1-3 decoder reading `in` and driving `y0`, `y1`, `y2`.
void add_decoder_1_3(Design& d, const std::string& prefix, const std::string& in,
                     const std::string& y0, const std::string& y1, const std::string& y2) {
  const std::string pti_out = prefix + "xp";
  const std::string y0b = prefix + "y0b";
  const std::string y2b = prefix + "y2b";
  d.add(CellKind::nti(), prefix + "nti0", {in}, y0);
  d.add(CellKind::pti(), prefix + "pti", {in}, pti_out);
  d.add(CellKind::nti(), prefix + "nti2", {pti_out}, y2);
  d.add(CellKind::sfbuf(), prefix + "sf0", {y0}, y0b);
  d.add(CellKind::sfbuf(), prefix + "sf2", {y2}, y2b);
  d.add(CellKind::tnor(), prefix + "tnor", {y0b, y2b}, y1);
}

// Two inverters back to back; restores rail levels of a two-valued net.
void add_restore(Design& d, const std::string& prefix, CellKind inv, const std::string& in,
                 const std::string& out) {
  const std::string mid = prefix + "inv";
  d.add(inv, prefix + "r0", {in}, mid);
  d.add(inv, prefix + "r1", {mid}, out);
}

void add_decoder_2_9(Design& d) {
  add_decoder_1_3(d, "da_", "A", "A0", "A1", "A2");
  add_decoder_1_3(d, "db_", "B", "B0", "B1", "B2");
  for (int i = 0; i < 3; ++i) {
    auto a = "A" + std::to_string(i);
    auto b = "B" + std::to_string(i);
    d.add(CellKind::sfbuf(), "sf_" + a, {a}, a + "b");
    d.add(CellKind::sfbuf(), "sf_" + b, {b}, b + "b");
  }
  for (int ia = 2; ia >= 0; --ia) {
    for (int ib = 2; ib >= 0; --ib) {
      auto y = "Y" + std::to_string(3 * ia + ib);
      auto raw = y + ".and";
      d.add(CellKind::tand2(), "and_" + y,
            {"A" + std::to_string(ia) + "b", "B" + std::to_string(ib) + "b"}, raw);
      add_restore(d, "rs_" + y + "_", CellKind::pti(), raw, y);
    }
  }
}

} // namespace

Circuit elaborate(const Design& d, const CellParams& p) {
  Circuit c;
  bool supply = std::any_of(d.cells.begin(), d.cells.end(),
                            [](const CellInstance& ci) { return needs_supply(ci.kind.type); });
  if (supply) c.add_device(VoltageSource{"Vdd", kVdd, kGnd, p.vdd, {}});
  Elaborator e(c, p);
  for (const auto& ci : d.cells) {
    e.cell(ci);
    c.add_instance(ci);
  }
  for (const auto& in : d.inputs) c.add_port({in, PortDirection::In, in});
  for (const auto& out : d.outputs) c.add_port({out, PortDirection::Out, out});
  c.validate();
  return c;
}

Design cell_design(CellKind kind) {
  Design d;
  d.name = to_string(kind);
  d.inputs = input_names(kind.inputs());
  d.outputs = {"out"};
  d.add(kind, "u0", d.inputs, "out");
  return d;
}

Design decoder_1_3_design() {
  Design d;
  d.name = "d13";
  d.inputs = {"X"};
  d.outputs = {"Y0", "Y1", "Y2"};
  add_decoder_1_3(d, "", "X", "Y0", "Y1", "Y2");
  return d;
}

Design decoder_2_9_design() {
  Design d;
  d.name = "d29";
  d.inputs = {"A", "B"};
  for (int i = 0; i < 9; ++i) d.outputs.push_back("Y" + std::to_string(i));
  add_decoder_2_9(d);
  return d;
}

Design display_decoder_design() {
  Design d;
  d.name = "display";
  d.inputs = {"A", "B"};
  d.outputs = {"Ya", "Yb", "Yc", "Yd", "Ye", "Yf", "Yg"};
  add_decoder_2_9(d);
  for (int i = 0; i <= 7; ++i) {
    auto y = "Y" + std::to_string(i);
    d.add(CellKind::sfbuf(), "sf_" + y, {y}, y + "b");
  }
  struct Segment {
    const char* name;
    std::vector<int> terms;
  };
  const std::array<Segment, 7> segments{{{"Ya", {1, 4}},
                                         {"Yb", {5, 6}},
                                         {"Yc", {2}},
                                         {"Yd", {1, 4, 7}},
                                         {"Ye", {1, 3, 4, 5, 7}},
                                         {"Yf", {1, 2, 3, 7}},
                                         {"Yg", {0, 1, 7}}}};
  for (const auto& s : segments) {
    std::string seg = s.name;
    if (s.terms.size() == 1) {
      // Single term: the buffered decoder line drives the segment directly.
      d.add(CellKind::sfbuf(), "sf_" + seg, {"Y" + std::to_string(s.terms[0])}, seg);
      continue;
    }
    std::vector<std::string> ins;
    for (int t : s.terms) ins.push_back("Y" + std::to_string(t) + "b");
    auto raw = seg + ".or";
    d.add(CellKind::torn(static_cast<int>(ins.size())), "or_" + seg, ins, raw);
    add_restore(d, "rs_" + seg + "_", CellKind::nti(), raw, seg);
  }
  return d;
}

Design bcd_baseline_design() {
  Design d;
  d.name = "bcd-baseline";
  d.inputs = {"D3", "D2", "D1", "D0"};
  d.outputs = {"Ya", "Yb", "Yc", "Yd", "Ye", "Yf", "Yg"};
  for (const auto& in : d.inputs) d.add(CellKind::sti(), "not_" + in, {in}, "n" + in);
  auto literal = [](int digit, int bit) {
    std::string name = "D" + std::to_string(bit);
    return (digit >> bit) & 1 ? name : "n" + name;
  };
  for (int digit = 0; digit <= 9; ++digit) {
    auto m = "m" + std::to_string(digit);
    d.add(CellKind::tand2(), m + "_and0", {literal(digit, 3), literal(digit, 2)}, m + ".t0");
    d.add(CellKind::tand2(), m + "_and1", {m + ".t0", literal(digit, 1)}, m + ".t1");
    d.add(CellKind::tand2(), m + "_and2", {m + ".t1", literal(digit, 0)}, m);
  }
  // Active-low outputs: a segment's output is high for the digits that leave it dark.
  struct Segment {
    const char* name;
    std::vector<int> dark;
  };
  const std::array<Segment, 7> segments{{{"Ya", {1, 4}},
                                         {"Yb", {5, 6}},
                                         {"Yc", {2}},
                                         {"Yd", {1, 4, 7}},
                                         {"Ye", {1, 3, 4, 5, 7, 9}},
                                         {"Yf", {1, 2, 3, 7}},
                                         {"Yg", {0, 1, 7}}}};
  for (const auto& s : segments) {
    if (s.dark.size() == 1) {
      d.add(CellKind::sfbuf(), std::string("buf_") + s.name, {"m" + std::to_string(s.dark[0])},
            s.name);
      continue;
    }
    std::vector<std::string> ins;
    for (int digit : s.dark) ins.push_back("m" + std::to_string(digit));
    d.add(CellKind::torn(static_cast<int>(ins.size())), std::string("or_") + s.name, ins, s.name);
  }
  return d;
}

Design swap_drivers(Design d, const std::string& net_a, const std::string& net_b) {
  bool found_a = false;
  bool found_b = false;
  for (auto& cell : d.cells) {
    if (cell.output == net_a) {
      cell.output = net_b;
      found_a = true;
    } else if (cell.output == net_b) {
      cell.output = net_a;
      found_b = true;
    }
  }
  if (!found_a || !found_b)
    throw Error("cannot swap drivers: net '" + (found_a ? net_b : net_a) + "' has no driver");
  return d;
}

Circuit build_cell(CellKind kind, const CellParams& p) { return elaborate(cell_design(kind), p); }
Circuit build_decoder_1_3(const CellParams& p) { return elaborate(decoder_1_3_design(), p); }
Circuit build_decoder_2_9(const CellParams& p) { return elaborate(decoder_2_9_design(), p); }
Circuit build_decoder_display(const CellParams& p) { return elaborate(display_decoder_design(), p); }

std::string_view to_string(Builtin b) {
  switch (b) {
  case Builtin::D13: return "d13";
  case Builtin::D29: return "d29";
  case Builtin::Display: return "display";
  case Builtin::BcdBaseline: return "bcd-baseline";
  }
  return "?";
}

std::optional<Builtin> builtin_from_string(std::string_view s) {
  for (auto b : {Builtin::D13, Builtin::D29, Builtin::Display, Builtin::BcdBaseline})
    if (to_string(b) == s) return b;
  return std::nullopt;
}

Design builtin_design(Builtin b) {
  switch (b) {
  case Builtin::D13: return decoder_1_3_design();
  case Builtin::D29: return decoder_2_9_design();
  case Builtin::Display: return display_decoder_design();
  case Builtin::BcdBaseline: return bcd_baseline_design();
  }
  return {};
}

} // namespace ternsim::netlist
