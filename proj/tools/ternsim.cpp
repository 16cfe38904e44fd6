// ternsim command-line front end.
//
// Exit status: 0 success, 1 parse or input error, 2 solver failure,
// 3 verification failure.

#include "ternsim/analysis.hpp"
#include "ternsim/digital.hpp"
#include "ternsim/engine.hpp"
#include "ternsim/netlist.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ternsim;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

struct InputError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so readers never see a partial file.
void write_atomic(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw InputError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string env_out_dir() {
  const char* env = std::getenv("TERNSIM_OUT_DIR");
  return env ? env : "";
}

std::string default_out_dir() {
  auto dir = env_out_dir();
  return dir.empty() ? "." : dir;
}

std::vector<core::TernaryLevel> parse_levels(const std::string& text) {
  std::vector<core::TernaryLevel> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.size() != 1 || tok[0] < '0' || tok[0] > '2') throw InputError("invalid level '" + tok + "'");
    out.push_back(core::level_from_int(tok[0] - '0'));
  }
  return out;
}

struct SolverFlags {
  double dt = 0;
  double t_stop = 0;
  double newton_tol = 0;
  int max_iter = 0;
  double damping = 0;
  double gmin = -1;

  void add(CLI::App* app) {
    app->add_option("--dt", dt, "time step in seconds");
    app->add_option("--t-stop", t_stop, "simulated time per run in seconds");
    app->add_option("--newton-tol", newton_tol, "Newton tolerance in volts");
    app->add_option("--max-iter", max_iter, "Newton iteration limit");
    app->add_option("--damping", damping, "Newton damping factor in (0, 1]");
    app->add_option("--gmin", gmin, "conductance across transistor channels");
  }

  engine::SolverConfig apply(engine::SolverConfig c) const {
    if (dt > 0) c.dt = dt;
    if (t_stop > 0) c.t_stop = t_stop;
    if (newton_tol > 0) c.newton_tol = newton_tol;
    if (max_iter > 0) c.newton_max_iter = max_iter;
    if (damping > 0) c.damping = damping;
    if (gmin >= 0) c.gmin = gmin;
    c.validate();
    return c;
  }
};

netlist::CellParams cell_params(const std::string& model) {
  netlist::CellParams p;
  p.memristor.model = devices::switching_model_from_string(model);
  return p;
}

// Prefixes parse errors with "file:line".
template <typename F> auto with_location(const std::string& path, F&& parse) {
  try {
    return parse();
  } catch (const NetlistError& e) {
    std::string where = path + (e.line() > 0 ? ":" + std::to_string(e.line()) : "");
    throw InputError(where + ": " + e.kind() + ": " + e.reason());
  }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string builtin;
  std::string netlist_path;
  std::string stimulus_path;
  std::string inputs;
  bool sweep = false;
  double slew = 0;
  std::string format = "both";
  std::string out_dir = default_out_dir();
  std::vector<std::string> probes;
  std::string model = "thermal";
  SolverFlags solver;
};

int cmd_simulate(const SimulateArgs& a) {
  netlist::Circuit circuit;
  std::string name;
  if (!a.builtin.empty()) {
    auto b = netlist::builtin_from_string(a.builtin);
    if (!b) throw InputError("unknown builtin '" + a.builtin + "'");
    circuit = netlist::elaborate(netlist::builtin_design(*b), cell_params(a.model));
    name = a.builtin;
  } else {
    circuit = with_location(a.netlist_path, [&] { return netlist::parse(read_file(a.netlist_path)); });
    name = fs::path(a.netlist_path).stem().string();
  }
  auto cfg = a.solver.apply({});
  const auto in_ports = circuit.ports(netlist::PortDirection::In);
  const auto out_ports = circuit.ports(netlist::PortDirection::Out);

  std::vector<std::string> probes = a.probes;
  if (probes.size() == 1 && probes[0] == "all") {
    probes.clear();
  } else if (probes.empty()) {
    for (const auto& p : in_ports) probes.push_back(p.node);
    for (const auto& p : out_ports) probes.push_back(p.node);
  }

  std::vector<std::pair<std::string, engine::Stimulus>> runs;
  auto constant = [&](const std::vector<core::TernaryLevel>& levels) {
    if (levels.size() != in_ports.size())
      throw InputError("expected " + std::to_string(in_ports.size()) + " input levels");
    engine::LevelMap m;
    std::string tag;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      m[in_ports[i].name] = levels[i];
      tag += core::to_char(levels[i]);
    }
    return std::pair{name + "_" + tag, engine::Stimulus::constant(m)};
  };
  if (!a.stimulus_path.empty()) {
    auto s = with_location(a.stimulus_path, [&] { return engine::parse_stimulus(read_file(a.stimulus_path)); });
    if (a.slew > 0) s.slew = a.slew;
    runs.emplace_back(name, s);
  } else if (a.sweep) {
    std::size_t n = in_ports.size();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<core::TernaryLevel> levels(n);
      for (std::size_t i = 0, c = code; i < n; ++i, c /= 3) levels[n - 1 - i] = core::level_from_int(static_cast<int>(c % 3));
      runs.push_back(constant(levels));
    }
  } else if (!a.inputs.empty()) {
    runs.push_back(constant(parse_levels(a.inputs)));
  } else {
    throw InputError("one of --stimulus, --inputs or --sweep-inputs is required");
  }

  const auto bands = core::VoltageBands::defaults(1.0);
  for (const auto& [tag, stim] : runs) {
    engine::Waveform w;
    try {
      w = engine::run_transient(circuit, stim, cfg, probes);
    } catch (const TransientAborted& e) {
      std::cerr << "error: " << tag << ": " << e.what() << "\n";
      return kExitSolver;
    }
    if (a.format == "csv" || a.format == "both") {
      std::ostringstream os;
      engine::write_csv(os, w, probes);
      write_atomic(fs::path(a.out_dir) / (tag + ".csv"), os.str());
    }
    if (a.format == "vcd" || a.format == "both") {
      std::ostringstream os;
      engine::write_vcd(os, w, bands, probes);
      write_atomic(fs::path(a.out_dir) / (tag + ".vcd"), os.str());
    }
    std::cout << tag << ":";
    for (const auto& p : out_ports) {
      const auto& v = w.probe(p.node);
      std::cout << " " << p.name << "=" << core::to_string(core::voltage_to_level(v.back(), bands));
      try {
        analysis::SettleOptions so;
        auto events = stim.event_times();
        so.since = events.empty() ? 0 : events.back();
        so.hold = std::min(10e-9, w.time.back() - so.since);
        std::cout << " (settled " << analysis::measure_settling(w, p.node, bands, so) * 1e9 << " ns)";
      } catch (const NotSettled&) {
        std::cout << " (not settled)";
      }
    }
    auto glitches = analysis::detect_glitches(w, stim, bands);
    std::cout << "; " << glitches.size() << " glitch event(s)\n";
    for (const auto& g : glitches)
      std::cout << "  glitch " << g.node << " " << g.t_start * 1e9 << "-" << g.t_end * 1e9 << " ns to "
                << core::to_string(g.excursion_band) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string decoder;
  bool all = false;
  std::string backend = "both";
  std::string fault;
  unsigned jobs = 1;
  std::string format = "text";
  std::string out_dir = env_out_dir();
  std::string model = "thermal";
  SolverFlags solver;
};

int cmd_verify(const VerifyArgs& a) {
  std::vector<analysis::Decoder> decoders;
  if (a.all) {
    decoders = {analysis::Decoder::D13, analysis::Decoder::D29, analysis::Decoder::Display};
  } else {
    auto d = analysis::decoder_from_string(a.decoder);
    if (!d) throw InputError("unknown decoder '" + a.decoder + "' (use d13, d29 or display)");
    decoders = {*d};
  }
  std::vector<analysis::Backend> backends;
  if (a.backend == "both")
    backends = {analysis::Backend::Digital, analysis::Backend::Analog};
  else if (auto b = analysis::backend_from_string(a.backend))
    backends = {*b};
  else
    throw InputError("unknown backend '" + a.backend + "'");

  analysis::VerifyOptions opt;
  if (!a.fault.empty()) opt.fault = analysis::parse_fault(a.fault);
  opt.jobs = a.jobs;
  opt.cells = cell_params(a.model);
  opt.steady.solver = a.solver.apply({});

  bool ok = true;
  for (auto d : decoders)
    for (auto b : backends) {
      auto rep = analysis::verify(b, d, opt);
      ok = ok && rep.pass();
      std::string text = analysis::to_text(rep);
      std::string json = analysis::to_json(rep).dump(2) + "\n";
      std::cout << (a.format == "json" ? json : text);
      if (!a.out_dir.empty()) {
        std::string stem = "verify_" + std::string(analysis::to_string(d)) + "_" + std::string(analysis::to_string(b));
        if (a.format != "json") write_atomic(fs::path(a.out_dir) / (stem + ".txt"), text);
        if (a.format != "text") write_atomic(fs::path(a.out_dir) / (stem + ".json"), json);
      }
    }
  return ok ? 0 : kExitVerify;
}

// ---------------------------------------------------------------------------

int cmd_decode(const std::string& a_text, const std::string& b_text) {
  auto a = parse_levels(a_text);
  auto b = parse_levels(b_text);
  if (a.size() != 1 || b.size() != 1) throw InputError("decode takes two levels in {0, 1, 2}");
  auto dag = digital::GateDag::from_design(netlist::display_decoder_design());
  auto out = digital::eval_circuit(dag, {{"A", core::encode_2bit(a[0])}, {"B", core::encode_2bit(b[0])}});
  auto glyph = analysis::render_outputs(out);
  for (const auto& [port, bits] : out) std::cout << port << "=" << core::to_char(core::decode_2bit(bits)) << " ";
  std::cout << "\n" << glyph.text();
  std::cout << "digit " << (glyph.digit ? std::to_string(*glyph.digit) : "?") << "\n";
  return 0;
}

int cmd_compare(const std::string& format, const std::string& out_dir) {
  auto rep = analysis::resource_report();
  std::string text = analysis::to_text(rep);
  std::string json = analysis::to_json(rep).dump(2) + "\n";
  std::cout << (format == "json" ? json : text);
  if (!out_dir.empty()) write_atomic(fs::path(out_dir) / (format == "json" ? "compare.json" : "compare.txt"),
                                     format == "json" ? json : text);
  return 0;
}

int cmd_emit(const std::string& builtin, const std::string& out, const std::string& model) {
  auto b = netlist::builtin_from_string(builtin);
  if (!b) throw InputError("unknown builtin '" + builtin + "'");
  auto text = netlist::serialize(netlist::elaborate(netlist::builtin_design(*b), cell_params(model)));
  if (out.empty())
    std::cout << text;
  else
    write_atomic(out, text);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ternsim: memristor-CMOS ternary logic simulator"};
  app.require_subcommand(1);
  const std::vector<std::string> builtins{"d13", "d29", "display", "bcd-baseline"};

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "transient simulation with CSV/VCD export");
  auto* src_b = s->add_option("--builtin", sim.builtin, "builtin circuit")->check(CLI::IsMember(builtins));
  auto* src_n = s->add_option("--netlist", sim.netlist_path, "netlist file");
  src_b->excludes(src_n);
  s->add_option("--stimulus", sim.stimulus_path, "stimulus file");
  s->add_option("--inputs", sim.inputs, "constant input levels in port order, e.g. 2,1");
  s->add_flag("--sweep-inputs", sim.sweep, "one run per input combination");
  s->add_option("--slew", sim.slew, "override stimulus slew in seconds");
  s->add_option("--format", sim.format, "csv, vcd or both")->check(CLI::IsMember({"csv", "vcd", "both"}));
  s->add_option("--out-dir", sim.out_dir, "output directory (default $TERNSIM_OUT_DIR or .)");
  s->add_option("--probes", sim.probes, "nodes to record, or 'all'");
  s->add_option("--model", sim.model, "memristor model for builtins: thermal or threshold");
  sim.solver.add(s);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "truth-table verification");
  auto* dec = v->add_option("--decoder", ver.decoder, "d13, d29 or display");
  auto* all = v->add_flag("--all", ver.all, "all three decoders");
  dec->excludes(all);
  v->add_option("--backend", ver.backend, "analog, digital or both")
      ->check(CLI::IsMember({"analog", "digital", "both"}));
  v->add_option("--fault", ver.fault, "mutation, e.g. swap:Y7,Y5");
  v->add_option("--jobs", ver.jobs, "parallel analog vectors")->check(CLI::PositiveNumber);
  v->add_option("--format", ver.format, "text, json or both")->check(CLI::IsMember({"text", "json", "both"}));
  v->add_option("--out-dir", ver.out_dir, "write report files here (default $TERNSIM_OUT_DIR)");
  v->add_option("--model", ver.model, "memristor model: thermal or threshold");
  ver.solver.add(v);

  std::string a_level, b_level;
  auto* d = app.add_subcommand("decode", "render the display decoder output for inputs A B");
  d->add_option("A", a_level)->required();
  d->add_option("B", b_level)->required();

  std::string cmp_format = "text";
  std::string cmp_dir = env_out_dir();
  auto* c = app.add_subcommand("compare", "resource comparison against the BCD baseline");
  c->add_option("--format", cmp_format, "text or json")->check(CLI::IsMember({"text", "json"}));
  c->add_option("--out-dir", cmp_dir, "write the report here (default $TERNSIM_OUT_DIR)");

  std::string emit_name, emit_out, emit_model = "thermal";
  auto* e = app.add_subcommand("emit-netlist", "print a builtin circuit as a netlist");
  e->add_option("builtin", emit_name, "builtin circuit")->required()->check(CLI::IsMember(builtins));
  e->add_option("-o,--out", emit_out, "output file");
  e->add_option("--model", emit_model, "memristor model: thermal or threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitInput;
  }

  try {
    if (*s) {
      if (sim.builtin.empty() == sim.netlist_path.empty())
        throw InputError("exactly one of --builtin or --netlist is required");
      return cmd_simulate(sim);
    }
    if (*v) {
      if (!ver.all && ver.decoder.empty()) throw InputError("give --decoder or --all");
      return cmd_verify(ver);
    }
    if (*d) return cmd_decode(a_level, b_level);
    if (*c) return cmd_compare(cmp_format, cmp_dir);
    if (*e) return cmd_emit(emit_name, emit_out, emit_model);
  } catch (const NetlistError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const InputError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const SimulationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  }
  return 0;
}
