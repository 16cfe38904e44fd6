#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ternsim/analysis.hpp"
#include "ternsim/digital.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

using namespace ternsim;
using namespace ternsim::analysis;
using engine::Stimulus;
using L = core::TernaryLevel;

namespace {

const auto kBands = core::VoltageBands::defaults(1.0);

std::set<std::pair<int, int>> failing_vectors(const TruthTableReport& r) {
  std::set<std::pair<int, int>> out;
  for (const auto& v : r.vectors)
    if (!v.pass) out.insert({core::to_int(v.inputs.at("A")), core::to_int(v.inputs.at("B"))});
  return out;
}

// Devices each cell kind contributes when elaborated.
std::size_t memristors_of(const netlist::CellKind& k) {
  switch (k.type) {
  case netlist::CellType::STI:
  case netlist::CellType::NTI:
  case netlist::CellType::PTI: return 2;
  case netlist::CellType::TNOR: return 4;
  case netlist::CellType::SFBUF: return 0;
  default: return static_cast<std::size_t>(k.arity);
  }
}

std::size_t mosfets_of(const netlist::CellKind& k) {
  switch (k.type) {
  case netlist::CellType::STI:
  case netlist::CellType::NTI:
  case netlist::CellType::PTI:
  case netlist::CellType::TNOR: return 2;
  case netlist::CellType::SFBUF: return 1;
  default: return 0;
  }
}

} // namespace

TEST_CASE("expected tables") {
  CHECK(expected_table(Decoder::D13).size() == 3);
  CHECK(expected_table(Decoder::D29).size() == 9);
  CHECK(expected_table(Decoder::Display).size() == 9);
  for (const auto& row : expected_table(Decoder::D29)) {
    int idx = 3 * core::to_int(row.inputs.at("A")) + core::to_int(row.inputs.at("B"));
    for (int i = 0; i < 9; ++i) CHECK(row.outputs.at("Y" + std::to_string(i)) == (i == idx ? L::L2 : L::L0));
  }
  CHECK(errata_notes(Decoder::D29).size() == 1);
  CHECK(errata_notes(Decoder::D13).empty());
}

TEST_CASE("digital verify") {
  for (auto d : {Decoder::D13, Decoder::D29, Decoder::Display}) {
    auto r = verify(Backend::Digital, d);
    CHECK(r.pass());
    CHECK(r.passed() == expected_table(d).size());
  }
  auto r = verify(Backend::Digital, Decoder::D13);
  CHECK(r.passed() == 3);
  CHECK(verify(Backend::Digital, Decoder::D29).notes == errata_notes(Decoder::D29));
}

TEST_CASE("analog verify agrees with digital") {
  VerifyOptions opt;
  opt.jobs = 4;
  for (auto d : {Decoder::D13, Decoder::D29, Decoder::Display}) {
    auto a = verify(Backend::Analog, d, opt);
    auto g = verify(Backend::Digital, d);
    CHECK(a.pass());
    REQUIRE(a.vectors.size() == g.vectors.size());
    for (std::size_t i = 0; i < a.vectors.size(); ++i) {
      CHECK(a.vectors[i].inputs == g.vectors[i].inputs);
      CHECK(a.vectors[i].settled);
      CHECK(a.vectors[i].observed == g.vectors[i].observed);
    }
  }
}

TEST_CASE("analog verify is independent of the job count") {
  VerifyOptions one, many;
  many.jobs = 3;
  auto a = verify(Backend::Analog, Decoder::D13, one);
  auto b = verify(Backend::Analog, Decoder::D13, many);
  for (std::size_t i = 0; i < a.vectors.size(); ++i) CHECK(a.vectors[i].voltages == b.vectors[i].voltages);
}

TEST_CASE("swapped outputs fail exactly the affected vectors") {
  VerifyOptions opt;
  opt.fault = parse_fault("swap:Y7,Y5");
  std::set<std::pair<int, int>> want{{1, 2}, {2, 1}};
  auto g = verify(Backend::Digital, Decoder::D29, opt);
  CHECK_FALSE(g.pass());
  CHECK(failing_vectors(g) == want);
  opt.jobs = 4;
  auto a = verify(Backend::Analog, Decoder::D29, opt);
  CHECK(failing_vectors(a) == want);
}

TEST_CASE("fault parsing") {
  auto f = parse_fault("swap:Y7,Y5");
  CHECK(f.net_a == "Y7");
  CHECK(f.net_b == "Y5");
  CHECK(to_string(f) == "swap:Y7,Y5");
  CHECK_THROWS_AS(parse_fault("flip:Y7"), Error);
  CHECK_THROWS_AS(parse_fault("swap:Y7"), Error);
  CHECK_THROWS_AS(parse_fault("swap:,Y5"), Error);
}

TEST_CASE("gate oracle") {
  for (auto k : {netlist::CellKind::sti(), netlist::CellKind::nti(), netlist::CellKind::pti(),
                 netlist::CellKind::sfbuf(), netlist::CellKind::tand2(), netlist::CellKind::tor2(),
                 netlist::CellKind::tnor(), netlist::CellKind::torn(3)}) {
    auto rows = analog_gate_table(k);
    std::size_t n = 1;
    for (int i = 0; i < k.inputs(); ++i) n *= 3;
    CHECK(rows.size() == n);
    for (const auto& r : rows) {
      CAPTURE(netlist::to_string(k));
      CHECK(r.expected == reference_eval(k, r.inputs));
      CHECK(r.pass);
    }
  }
}

TEST_CASE("TAND divider intermediate") {
  for (const auto& r : analog_gate_table(netlist::CellKind::tand2())) {
    if (r.inputs == std::vector<L>{L::L2, L::L1} || r.inputs == std::vector<L>{L::L1, L::L2}) {
      double ideal = 0.5 + 500.0 / (500.0 + 10e3) * 0.5;
      CHECK(std::abs(r.voltage - ideal) <= 0.05);
    }
  }
}

TEST_CASE("no glitches without transitions") {
  engine::SolverConfig cfg;
  cfg.t_stop = 30e-9;
  auto c = netlist::build_decoder_2_9();
  auto s = Stimulus::constant({{"A", L::L2}, {"B", L::L1}});
  auto w = engine::run_transient(c, s, cfg);
  CHECK(detect_glitches(w, s, kBands).empty());
}

TEST_CASE("simultaneous transition produces a hazard") {
  engine::SolverConfig cfg;
  cfg.t_stop = 40e-9;
  auto c = netlist::build_decoder_2_9();
  Stimulus s;
  s.slew = 1e-9;
  s.schedule["A"] = {{0, L::L2}, {20e-9, L::L1}};
  s.schedule["B"] = {{0, L::L1}, {20e-9, L::L2}};
  std::vector<std::string> probes;
  for (int i = 0; i < 9; ++i) probes.push_back("Y" + std::to_string(i));
  auto w = engine::run_transient(c, s, cfg, probes);
  auto g = detect_glitches(w, s, kBands);
  CHECK(g.size() >= 1);
  for (const auto& e : g) {
    CHECK(e.t_end > e.t_start);
    CHECK(e.t_start >= 20e-9);
    CHECK(e.t_end <= cfg.t_stop);
    CHECK(e.t_end - e.t_start >= 2 * cfg.dt - 1e-15);
  }
  auto j = to_json(g);
  CHECK(j.size() == g.size());
}

TEST_CASE("settling after a single-input sequence") {
  engine::SolverConfig cfg;
  cfg.t_stop = 110e-9;
  auto c = netlist::build_decoder_1_3();
  Stimulus s;
  s.slew = 1e-9;
  s.schedule["X"] = {{0, L::L0}, {20e-9, L::L2}, {50e-9, L::L1}, {80e-9, L::L0}};
  auto w = engine::run_transient(c, s, cfg, {"Y0", "Y1", "Y2"});
  auto rep = settle_report(w, s, kBands);
  CHECK(rep.size() == 9);
  for (const auto& r : rep) {
    CHECK(r.final_level.has_value());
    CHECK(r.settle_time >= 0);
    CHECK(r.settle_time <= 100e-9);
  }
  bool any_positive = false;
  for (const auto& r : rep) any_positive = any_positive || r.settle_time > 0;
  CHECK(any_positive);
  CHECK(measure_settling(w, "Y0", kBands, {80e-9, 0}) > 0);
}

TEST_CASE("settling of a held input") {
  engine::SolverConfig cfg;
  auto c = netlist::build_decoder_1_3();
  auto w = engine::run_transient(c, Stimulus::constant({{"X", L::L1}}), cfg, {"Y1"});
  CHECK(measure_settling(w, "Y1", kBands, {30e-9, 0}) == 0.0);
}

TEST_CASE("single step settles within the run") {
  engine::SolverConfig cfg;
  auto c = netlist::build_decoder_1_3();
  Stimulus s;
  s.slew = 1e-9;
  s.schedule["X"] = {{0, L::L0}, {20e-9, L::L2}};
  auto w = engine::run_transient(c, s, cfg, {"Y0", "Y2"});
  for (auto n : {"Y0", "Y2"}) {
    double t = measure_settling(w, n, kBands, {20e-9, 0});
    CHECK(t > 0);
    CHECK(t <= 100e-9);
  }
}

TEST_CASE("unsettled node") {
  engine::SolverConfig cfg;
  cfg.t_stop = 3e-9;
  auto c = netlist::build_decoder_1_3();
  Stimulus s;
  s.slew = 0.5e-9;
  s.schedule["X"] = {{0, L::L0}, {1e-9, L::L2}};
  auto w = engine::run_transient(c, s, cfg, {"Y2"});
  CHECK_THROWS_AS(measure_settling(w, "Y2", kBands, {1e-9, 0}), NotSettled);
}

TEST_CASE("seven-segment rendering") {
  auto eight = seven_segment_render({false, false, false, false, false, false, false});
  CHECK(eight.digit == 8);
  CHECK(eight.text() == "###\n#.#\n###\n#.#\n###\n");
  CHECK(seven_segment_render({false, false, false, false, false, false, true}).digit == 0);
  CHECK(seven_segment_render({true, false, false, true, true, false, false}).digit == 4);
  CHECK_FALSE(seven_segment_render({true, true, true, true, true, true, true}).digit.has_value());
  CHECK(seven_segment_render({true, true, true, true, true, true, false}, Polarity::CommonCathode).digit == 0);
}

TEST_CASE("display renders 8 down to 0") {
  auto dag = digital::GateDag::from_design(netlist::display_decoder_design());
  std::vector<int> seq;
  for (int a = 2; a >= 0; --a)
    for (int b = 2; b >= 0; --b) {
      auto out = digital::eval_circuit(dag, {{"A", core::encode_2bit(L(a))}, {"B", core::encode_2bit(L(b))}});
      auto g = render_outputs(out);
      REQUIRE(g.digit.has_value());
      seq.push_back(*g.digit);
    }
  CHECK(seq == std::vector<int>{8, 7, 6, 5, 4, 3, 2, 1, 0});
}

TEST_CASE("reference constants are pinned") {
  struct Pin {
    const char* key;
    double value;
    const char* unit;
    const char* citation;
  };
  const Pin pins[] = {
      {"ternary.io_power_mw", 2, "mW", "FPGA power estimation table: I/O"},
      {"ternary.static_power_mw", 60, "mW", "FPGA power estimation table: static"},
      {"ternary.total_power_mw", 62, "mW", "FPGA power estimation table: total FPGA"},
      {"baseline.io_power_mw", 14, "mW", "BCD baseline power analysis: I/O power"},
      {"baseline.static_power_mw", 60, "mW", "BCD baseline power analysis: equivalent static power"},
      {"ternary.luts", 154, "", "device utilization summary: ternary LUTs"},
      {"ternary.ffs", 154, "", "device utilization summary: ternary flip-flops"},
      {"ternary.registers", 11, "", "device utilization summary: ternary registers"},
      {"ternary.pins", 13, "", "device utilization summary: ternary total pins"},
      {"baseline.luts", 26, "", "device utilization summary: baseline LUTs"},
      {"baseline.ffs", 26, "", "device utilization summary: baseline flip-flops"},
      {"baseline.registers", 12, "", "device utilization summary: baseline registers"},
      {"baseline.pins", 17, "", "device utilization summary: baseline total pins"},
      {"ternary.fmax_mhz", 293.8, "MHz", "timing report: ternary maximum synthesizable frequency"},
      {"baseline.fmax_mhz", 577.7, "MHz", "timing report: baseline maximum synthesizable frequency"},
      {"reported.speed_ratio", 1.98, "x", "timing report: baseline faster by 1.98x"},
      {"reported.total_power_reduction_pct", 18.75, "%", "power analysis: total FPGA power reduction"},
      {"reported.io_power_ratio", 6, "x", "power analysis: I/O power reduction, roughly six-fold"},
  };
  const auto& ref = reference_constants();
  REQUIRE(ref.size() == std::size(pins));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CAPTURE(pins[i].key);
    CHECK(ref[i].key == pins[i].key);
    CHECK(ref[i].value == pins[i].value);
    CHECK(ref[i].unit == pins[i].unit);
    CHECK(ref[i].citation == pins[i].citation);
  }
}

TEST_CASE("resource report") {
  auto r = resource_report();
  CHECK(r.ternary.pins_in == 2);
  CHECK(r.ternary.encoded_lines_in == 4);
  CHECK(r.ternary.pins_out == 7);
  CHECK(r.baseline.pins_in == 4);
  CHECK(r.constant("ternary.total_power_mw").value == 62);
  CHECK(r.constant("baseline.io_power_mw").value == 14);
  CHECK_THROWS_AS(r.constant("nope"), Error);
  CHECK(r.io_power_ratio == doctest::Approx(14.0 / 2.0));
  CHECK(r.total_power_reduction_pct == doctest::Approx(100.0 * (74.0 - 62.0) / 74.0));
  CHECK(r.speed_ratio == doctest::Approx(577.7 / 293.8));

  auto disp = netlist::build_decoder_display();
  auto base = netlist::elaborate(netlist::bcd_baseline_design());
  for (auto [m, c] : {std::pair{r.ternary, &disp}, std::pair{r.baseline, &base}}) {
    std::size_t mem = 0, fet = 0;
    for (const auto& i : c->instances()) {
      mem += memristors_of(i.kind);
      fet += mosfets_of(i.kind);
    }
    CHECK(m.gates == c->instances().size());
    CHECK(m.memristors == mem);
    CHECK(m.mosfets == fet);
  }

  auto text = to_text(r);
  CHECK(text.find("PowerPlay Early Power Estimator") != std::string::npos);
  CHECK(text.find("x7") != std::string::npos);
  CHECK(text.find("about six") != std::string::npos);
  auto j = to_json(r);
  CHECK(j["report"] == "resources");
  CHECK(j["reference"].size() == reference_constants().size());
  CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("truth table serialization") {
  auto r = verify(Backend::Digital, Decoder::D29);
  auto j = to_json(r);
  CHECK(j["report"] == "truth_table");
  CHECK(j["decoder"] == "d29");
  CHECK(j["backend"] == "digital");
  CHECK(j["pass"] == true);
  CHECK(j["passed"] == 9);
  CHECK(j["vectors"].size() == 9);
  CHECK(j["fault"].is_null());
  auto text = to_text(r);
  CHECK(text.find("9/9") != std::string::npos);
}

TEST_CASE("enum names") {
  CHECK(decoder_from_string("display") == Decoder::Display);
  CHECK(backend_from_string("analog") == Backend::Analog);
  CHECK_FALSE(decoder_from_string("d27").has_value());
}
