#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ternsim/netlist.hpp"

#include <algorithm>
#include <queue>
#include <set>

using namespace ternsim;
using namespace ternsim::netlist;

namespace {

const char* kMinimal = "Vdd vdd 0 DC 1.0\n"
                       "M1 vdd out RON=500 ROFF=10k VON=0.27 VOFF=0.27 TAU=500p X0=0\n"
                       "R1 out 0 1k\n";

std::vector<CellKind> all_cell_kinds() {
  return {CellKind::sti(),  CellKind::nti(),  CellKind::pti(),   CellKind::tand2(), CellKind::tor2(),
          CellKind::tnor(), CellKind::sfbuf(), CellKind::torn(3), CellKind::torn(5)};
}

std::vector<Circuit> all_builder_circuits() {
  std::vector<Circuit> out;
  for (auto k : all_cell_kinds()) out.push_back(build_cell(k));
  for (auto b : {Builtin::D13, Builtin::D29, Builtin::Display, Builtin::BcdBaseline})
    out.push_back(elaborate(builtin_design(b)));
  CellParams thr;
  thr.memristor = devices::MemristorParams{};
  out.push_back(build_decoder_2_9(thr));
  return out;
}

template <class T> std::size_t count_of(const Circuit& c) {
  return std::count_if(c.devices().begin(), c.devices().end(),
                       [](const Device& d) { return std::holds_alternative<T>(d); });
}

const CellInstance& instance(const Circuit& c, const std::string& name) {
  for (const auto& i : c.instances())
    if (i.name == name) return i;
  FAIL("no instance " << name);
  throw 0;
}

// Nodes reachable from `from` over device connectivity, not crossing the rails.
std::set<std::string> reachable(const Circuit& c, const std::string& from) {
  std::set<std::string> seen{from};
  std::queue<std::string> q;
  q.push(from);
  while (!q.empty()) {
    auto n = q.front();
    q.pop();
    for (const auto& d : c.devices()) {
      auto ts = device_terminals(d);
      if (std::find(ts.begin(), ts.end(), n) == ts.end()) continue;
      for (const auto& t : ts) {
        if (t == "vdd" || t == std::string(kGround)) continue;
        if (seen.insert(t).second) q.push(t);
      }
    }
  }
  return seen;
}

template <class E> void check_error(const std::string& text, int line, const std::string& fragment) {
  CAPTURE(text);
  try {
    parse(text);
    FAIL("no error");
  } catch (const E& e) {
    CHECK(e.line() == line);
    CHECK(e.reason().find(fragment) != std::string::npos);
    CHECK(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos);
  }
}

} // namespace

TEST_CASE("parse minimal netlist") {
  auto c = parse(kMinimal);
  CHECK(c.devices().size() == 3);
  CHECK(std::set<std::string>(c.nodes().begin(), c.nodes().end()) == std::set<std::string>{"vdd", "out", "0"});
  auto* m = std::get_if<Memristor>(c.find_device("M1"));
  REQUIRE(m);
  CHECK(m->params.r_off == 10e3);
  CHECK(m->params.tau == doctest::Approx(500e-12));
  auto* r = std::get_if<Resistor>(c.find_device("R1"));
  REQUIRE(r);
  CHECK(r->ohms == 1000.0);
}

TEST_CASE("keywords are case-insensitive") {
  auto c = parse("vdd vdd 0 dc 1\nm1 vdd out ron=1k roff=20k\nr1 out 0 1K\n.PORT OUT y out\n.END\nignored junk\n");
  CHECK(c.devices().size() == 3);
  CHECK(c.find_port("y"));
  CHECK(std::get<Memristor>(*c.find_device("m1")).params.r_on == 1000.0);
}

TEST_CASE("si suffixes") {
  CHECK(parse_si("10k") == 10e3);
  CHECK(parse_si("500p") == doctest::Approx(500e-12));
  CHECK(parse_si("2m") == doctest::Approx(2e-3));
  CHECK(parse_si("3u") == doctest::Approx(3e-6));
  CHECK(parse_si("1n") == doctest::Approx(1e-9));
  CHECK(parse_si("1e3") == 1000.0);
  CHECK_THROWS_AS(parse_si("1x"), Error);
  CHECK_THROWS_AS(parse_si("abc"), Error);
}

TEST_CASE("memristor arity error") { check_error<SyntaxError>("M1 a", 1, "memristor requires 2 nodes"); }

TEST_CASE("malformed inputs report their line") {
  const std::string pre = "* header\n\nVdd vdd 0 DC 1\n";
  check_error<SyntaxError>(pre + "R1 a 0\n", 4, "resistor requires");
  check_error<SyntaxError>(pre + "R1 a 0 -5\n", 4, "resistance must be positive");
  check_error<SyntaxError>(pre + "V1 a 0 AC 1\n", 4, "DC or PWL");
  check_error<SyntaxError>(pre + "V1 a 0 PWL(0 0 1n)\n", 4, "time/value pairs");
  check_error<SyntaxError>(pre + "V1 a 0 PWL(1n 0 1n 1)\n", 4, "strictly increasing");
  check_error<SyntaxError>(pre + "T1 d g s XMOS VTH=0.3 K=1m\n", 4, "NMOS or PMOS");
  check_error<SyntaxError>(pre + "M1 a 0 RON=abc\n", 4, "RON");
  check_error<SyntaxError>(pre + "M1 a 0 FOO=1\n", 4, "unknown memristor parameter");
  check_error<SyntaxError>(pre + "M1 a 0 RON=20k ROFF=10k\n", 4, "");
  check_error<SyntaxError>(pre + ".subckt x\n", 4, "unknown directive");
  check_error<UnknownDevice>(pre + "Q1 a b c\n", 4, "unknown device type");
  check_error<DuplicateName>(pre + "R1 vdd 0 1k\nR1 vdd 0 2k\n", 5, "defined twice");
  check_error<UnboundNode>(pre + "R1 vdd b 1k\n", 4, "dangling");
  check_error<UnboundNode>(pre + "R1 vdd 0 1k\n.port in X nowhere\n", 5, "nowhere");
  check_error<DuplicateName>(pre + "R1 vdd 0 1k\n.port in X vdd\n.port out X vdd\n", 6, "port 'X'");
}

TEST_CASE("serialize empty circuit") {
  Circuit c;
  auto text = serialize(c);
  CHECK(text == "* ternsim netlist\n.end\n");
  CHECK(structurally_equal(parse(text), c));
}

TEST_CASE("round trip over builder outputs") {
  for (const auto& c : all_builder_circuits()) {
    auto text = serialize(c);
    auto back = parse(text);
    CHECK(structurally_equal(back, c));
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("round trip keeps pwl sources") {
  auto c = parse("V1 a 0 PWL(0 0 1n 1 2n 0.5)\nR1 a 0 1k\n.port out a a\n");
  auto back = parse(serialize(c));
  CHECK(structurally_equal(back, c));
  auto& v = std::get<VoltageSource>(*back.find_device("V1"));
  CHECK(v.value_at(0.5e-9) == doctest::Approx(0.5));
  CHECK(v.value_at(5e-9) == doctest::Approx(0.5));
}

TEST_CASE("builders are valid and deterministic") {
  auto a = all_builder_circuits();
  auto b = all_builder_circuits();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK_NOTHROW(a[i].validate());
    CHECK(structurally_equal(a[i], b[i]));
    CHECK(serialize(a[i]) == serialize(b[i]));
  }
}

TEST_CASE("cell kinds") {
  CHECK_THROWS_AS(CellKind::torn(1), InvalidArity);
  CHECK(CellKind::torn(5).inputs() == 5);
  CHECK(cell_kind_from_string("TOR5") == CellKind::torn(5));
  CHECK(cell_kind_from_string("TAND2") == CellKind::tand2());
  CHECK(to_string(CellKind::torn(4)) == "TOR4");
  CHECK_THROWS_AS(cell_kind_from_string("XOR"), Error);
  Design d;
  CHECK_THROWS_AS(d.add(CellKind::tand2(), "u", {"a"}, "y"), InvalidArity);
}

TEST_CASE("cell topologies") {
  auto tand = build_cell(CellKind::tand2());
  CHECK(tand.count_memristors() == 2);
  CHECK(tand.count_mosfets() == 0);
  std::vector<std::string> ports;
  for (const auto& p : tand.ports()) ports.push_back(p.name);
  CHECK(ports == std::vector<std::string>{"a", "b", "out"});

  // AND: anodes face the output; OR: anodes face the inputs
  for (const auto& d : tand.devices())
    if (auto* m = std::get_if<Memristor>(&d)) CHECK(m->anode == "out");
  for (const auto& d : build_cell(CellKind::tor2()).devices())
    if (auto* m = std::get_if<Memristor>(&d)) CHECK(m->cathode == "out");

  // TOR2 into an STI; the inverter pair carries its own two memristors
  auto tnor = build_cell(CellKind::tnor());
  CHECK(tnor.count_memristors() == 2 + build_cell(CellKind::sti()).count_memristors());
  CHECK(tnor.count_mosfets() == 2);
  std::set<std::string> or_out, inv_in;
  for (const auto& d : tnor.devices()) {
    if (auto* m = std::get_if<Memristor>(&d); m && (m->anode == "a" || m->anode == "b"))
      or_out.insert(m->cathode);
    if (auto* t = std::get_if<Mosfet>(&d)) inv_in.insert(t->gate);
  }
  CHECK(or_out.size() == 1);
  CHECK(or_out == inv_in);
  CHECK_FALSE(tnor.find_port(*or_out.begin()));

  auto sf = build_cell(CellKind::sfbuf());
  CHECK(sf.count_mosfets() == 1);
  CHECK(count_of<Resistor>(sf) == 1);
  auto& t = std::get<Mosfet>(*std::find_if(sf.devices().begin(), sf.devices().end(),
                                           [](const Device& d) { return std::holds_alternative<Mosfet>(d); }));
  CHECK(t.drain == "vdd");
  CHECK(t.gate == "in");
  CHECK(t.source == "out");
  CHECK(t.params.polarity == devices::Polarity::Nmos);

  CHECK(build_cell(CellKind::torn(5)).count_memristors() == 5);
}

TEST_CASE("inverter thresholds") {
  CellParams p;
  auto vths = [&](CellKind k) {
    std::map<devices::Polarity, double> out;
    for (const auto& d : build_cell(k, p).devices())
      if (auto* t = std::get_if<Mosfet>(&d)) out[t->params.polarity] = t->params.vth;
    return out;
  };
  using devices::Polarity;
  CHECK(vths(CellKind::sti()) == std::map<Polarity, double>{{Polarity::Nmos, 0.3}, {Polarity::Pmos, 0.3}});
  CHECK(vths(CellKind::nti()) == std::map<Polarity, double>{{Polarity::Nmos, 0.3}, {Polarity::Pmos, 0.7}});
  CHECK(vths(CellKind::pti()) == std::map<Polarity, double>{{Polarity::Nmos, 0.7}, {Polarity::Pmos, 0.3}});
}

TEST_CASE("1-3 decoder structure") {
  auto c = build_decoder_1_3();
  CHECK(c.count_instances(CellType::PTI) == 1);
  CHECK(c.count_instances(CellType::NTI) == 2);
  CHECK(c.count_instances(CellType::TNOR) == 1);
  CHECK(c.count_instances(CellType::SFBUF) == 2);
  std::vector<std::string> outs;
  for (const auto& p : c.ports(PortDirection::Out)) outs.push_back(p.name);
  CHECK(outs == std::vector<std::string>{"Y0", "Y1", "Y2"});
  auto r = reachable(c, "X");
  for (const auto& n : c.nodes())
    if (n != "vdd" && n != "0") CHECK_MESSAGE(r.count(n), n);

  // Y1 = TNOR of the buffered Y0 and Y2
  auto& tnor = instance(c, "tnor");
  CHECK(instance(c, "sf0").inputs[0] == "Y0");
  CHECK(instance(c, "sf2").inputs[0] == "Y2");
  CHECK(tnor.inputs == std::vector<std::string>{instance(c, "sf0").output, instance(c, "sf2").output});
  CHECK(tnor.output == "Y1");
  CHECK(instance(c, "nti2").inputs[0] == instance(c, "pti").output);
}

TEST_CASE("2-9 decoder structure") {
  auto c = build_decoder_2_9();
  auto d13 = build_decoder_1_3();
  CHECK(c.count_instances(CellType::TAND2) == 9);
  CHECK(instance(c, "and_Y7").inputs == std::vector<std::string>{"A2b", "B1b"});
  CHECK(instance(c, "and_Y3").inputs == std::vector<std::string>{"A1b", "B0b"});
  CHECK(instance(c, "sf_A2").inputs[0] == "A2");
  CHECK(instance(c, "sf_B1").inputs[0] == "B1");
  for (int ia = 0; ia < 3; ++ia)
    for (int ib = 0; ib < 3; ++ib) {
      auto y = "Y" + std::to_string(3 * ia + ib);
      CHECK(instance(c, "and_" + y).inputs ==
            std::vector<std::string>{"A" + std::to_string(ia) + "b", "B" + std::to_string(ib) + "b"});
    }
  // two 1-3 decoders, six line buffers, nine AND gates, two restoring inverters per output
  for (auto t : {CellType::NTI, CellType::TNOR})
    CHECK(c.count_instances(t) == 2 * d13.count_instances(t));
  CHECK(c.count_instances(CellType::SFBUF) == 2 * d13.count_instances(CellType::SFBUF) + 6);
  CHECK(c.count_instances(CellType::PTI) == 2 * d13.count_instances(CellType::PTI) + 18);
  CHECK(c.instances().size() == 2 * d13.instances().size() + 6 + 9 + 18);
}

TEST_CASE("display decoder structure") {
  auto c = build_decoder_display();
  CHECK(c.ports(PortDirection::In).size() == 2);
  CHECK(c.ports(PortDirection::Out).size() == 7);
  CHECK(c.ports().size() == 9);
  CHECK(instance(c, "or_Ye").kind == CellKind::torn(5));
  CHECK(instance(c, "or_Ye").inputs == std::vector<std::string>{"Y1b", "Y3b", "Y4b", "Y5b", "Y7b"});
  CHECK(instance(c, "or_Ya").inputs == std::vector<std::string>{"Y1b", "Y4b"});
  CHECK(instance(c, "or_Yg").inputs == std::vector<std::string>{"Y0b", "Y1b", "Y7b"});
  auto& yc = instance(c, "sf_Yc");
  CHECK(yc.kind == CellKind::sfbuf());
  CHECK(yc.inputs[0] == "Y2");
  CHECK(yc.output == "Yc");
  for (const auto& i : c.instances()) CHECK(i.name != "or_Yc");
  CHECK(c.count_instances(CellType::TAND2) == 9);
}

TEST_CASE("swap_drivers exchanges two nets") {
  auto d = swap_drivers(decoder_2_9_design(), "Y7", "Y5");
  int seen = 0;
  for (const auto& ci : d.cells) {
    if (ci.name == "rs_Y7_r1") {
      CHECK(ci.output == "Y5");
      ++seen;
    }
    if (ci.name == "rs_Y5_r1") {
      CHECK(ci.output == "Y7");
      ++seen;
    }
  }
  CHECK(seen == 2);
  CHECK_THROWS_AS(swap_drivers(decoder_2_9_design(), "Y7", "nope"), Error);
}

TEST_CASE("builtin names") {
  CHECK(builtin_from_string("d13") == Builtin::D13);
  CHECK(builtin_from_string("bcd-baseline") == Builtin::BcdBaseline);
  CHECK_FALSE(builtin_from_string("d27").has_value());
  CHECK(elaborate(builtin_design(Builtin::BcdBaseline)).ports(PortDirection::In).size() == 4);
}
