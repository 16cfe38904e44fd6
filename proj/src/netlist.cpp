#include "ternsim/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace ternsim::netlist {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

template <class... Ts> struct Overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

double VoltageSource::value_at(double t) const {
  if (pwl.empty()) return dc;
  if (t <= pwl.front().first) return pwl.front().second;
  if (t >= pwl.back().first) return pwl.back().second;
  auto it = std::upper_bound(pwl.begin(), pwl.end(), t,
                             [](double tv, const auto& pt) { return tv < pt.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

const std::string& device_name(const Device& d) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

std::vector<std::string> device_terminals(const Device& d) {
  return std::visit(Overloaded{
                        [](const Memristor& m) { return std::vector{m.anode, m.cathode}; },
                        [](const Mosfet& t) { return std::vector{t.drain, t.gate, t.source}; },
                        [](const Resistor& r) { return std::vector{r.a, r.b}; },
                        [](const VoltageSource& v) { return std::vector{v.pos, v.neg}; },
                    },
                    d);
}

CellKind CellKind::torn(int n) {
  if (n < 2) throw InvalidArity("TORN needs at least 2 inputs, got " + std::to_string(n));
  return {CellType::TORN, n};
}

std::string to_string(CellKind k) {
  switch (k.type) {
  case CellType::STI: return "STI";
  case CellType::NTI: return "NTI";
  case CellType::PTI: return "PTI";
  case CellType::TAND2: return "TAND2";
  case CellType::TOR2: return "TOR2";
  case CellType::TORN: return "TOR" + std::to_string(k.arity);
  case CellType::TNOR: return "TNOR";
  case CellType::SFBUF: return "SFBUF";
  }
  return "?";
}

CellKind cell_kind_from_string(std::string_view s) {
  auto u = upper(s);
  if (u == "STI") return CellKind::sti();
  if (u == "NTI") return CellKind::nti();
  if (u == "PTI") return CellKind::pti();
  if (u == "TAND2" || u == "TAND") return CellKind::tand2();
  if (u == "TOR2" || u == "TOR") return CellKind::tor2();
  if (u == "TNOR") return CellKind::tnor();
  if (u == "SFBUF") return CellKind::sfbuf();
  std::string_view digits;
  if (u.rfind("TORN", 0) == 0)
    digits = std::string_view(u).substr(4);
  else if (u.rfind("TOR", 0) == 0)
    digits = std::string_view(u).substr(3);
  if (!digits.empty()) {
    int n = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && p == digits.data() + digits.size()) return CellKind::torn(n);
  }
  throw Error("unknown cell kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Circuit

bool Circuit::has_node(std::string_view name) const {
  return std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

std::size_t Circuit::add_node(const std::string& name) {
  auto it = std::find(nodes_.begin(), nodes_.end(), name);
  if (it != nodes_.end()) return static_cast<std::size_t>(it - nodes_.begin());
  nodes_.push_back(name);
  return nodes_.size() - 1;
}

void Circuit::add_device(Device d) {
  for (const auto& t : device_terminals(d)) add_node(t);
  devices_.push_back(std::move(d));
}

void Circuit::add_port(Port p) { ports_.push_back(std::move(p)); }

std::vector<Port> Circuit::ports(PortDirection dir) const {
  std::vector<Port> out;
  std::copy_if(ports_.begin(), ports_.end(), std::back_inserter(out),
               [dir](const Port& p) { return p.dir == dir; });
  return out;
}

const Port* Circuit::find_port(std::string_view name) const {
  auto it = std::find_if(ports_.begin(), ports_.end(), [&](const Port& p) { return p.name == name; });
  return it == ports_.end() ? nullptr : &*it;
}

const Device* Circuit::find_device(std::string_view name) const {
  auto it = std::find_if(devices_.begin(), devices_.end(),
                         [&](const Device& d) { return device_name(d) == name; });
  return it == devices_.end() ? nullptr : &*it;
}

std::size_t Circuit::count_memristors() const {
  return static_cast<std::size_t>(std::count_if(devices_.begin(), devices_.end(), [](const Device& d) {
    return std::holds_alternative<Memristor>(d);
  }));
}

std::size_t Circuit::count_mosfets() const {
  return static_cast<std::size_t>(std::count_if(devices_.begin(), devices_.end(), [](const Device& d) {
    return std::holds_alternative<Mosfet>(d);
  }));
}

std::size_t Circuit::count_instances(CellType t) const {
  return static_cast<std::size_t>(std::count_if(
      instances_.begin(), instances_.end(), [t](const CellInstance& i) { return i.kind.type == t; }));
}

namespace {

// Shared by Circuit::validate and the parser; `line_of` maps device/port
// index to a source line (0 when unknown).
void check_circuit(const Circuit& c, const std::vector<int>& device_lines,
                   const std::vector<int>& port_lines) {
  auto dline = [&](std::size_t i) { return i < device_lines.size() ? device_lines[i] : 0; };
  auto pline = [&](std::size_t i) { return i < port_lines.size() ? port_lines[i] : 0; };

  std::map<std::string, std::size_t> seen;
  std::map<std::string, int> terminal_count;
  std::map<std::string, std::size_t> first_user;
  const auto& devs = c.devices();
  for (std::size_t i = 0; i < devs.size(); ++i) {
    const auto& name = device_name(devs[i]);
    if (!seen.emplace(upper(name), i).second)
      throw DuplicateName(dline(i), "device '" + name + "' defined twice");
    for (const auto& t : device_terminals(devs[i])) {
      if (!c.has_node(t)) throw UnboundNode(dline(i), "terminal node '" + t + "' does not exist");
      ++terminal_count[t];
      first_user.emplace(t, i);
    }
  }

  std::set<std::string> port_names;
  std::set<std::string> port_nodes;
  const auto& ports = c.ports();
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (!port_names.insert(ports[i].name).second)
      throw DuplicateName(pline(i), "port '" + ports[i].name + "' defined twice");
    if (!terminal_count.count(ports[i].node))
      throw UnboundNode(pline(i), "port '" + ports[i].name + "' binds node '" + ports[i].node +
                                      "' which no device uses");
    port_nodes.insert(ports[i].node);
  }

  for (const auto& [node, count] : terminal_count) {
    if (node == kGround || port_nodes.count(node)) continue;
    if (count < 2)
      throw UnboundNode(dline(first_user[node]),
                        "node '" + node + "' is dangling (only one device terminal)");
  }
}

} // namespace

void Circuit::validate() const {
  if (!has_node(kGround)) throw UnboundNode(0, "ground node '0' missing");
  check_circuit(*this, {}, {});
}

bool structurally_equal(const Circuit& a, const Circuit& b) {
  std::set<std::string> na(a.nodes().begin(), a.nodes().end());
  std::set<std::string> nb(b.nodes().begin(), b.nodes().end());
  return na == nb && a.devices() == b.devices() && a.ports() == b.ports();
}

// ---------------------------------------------------------------------------
// Text format

double parse_si(std::string_view token) {
  double v = 0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || p == begin) throw Error("not a number: '" + std::string(token) + "'");
  std::string suffix = upper(std::string_view(p, static_cast<std::size_t>(end - p)));
  if (suffix.empty()) return v;
  if (suffix == "K") return v * 1e3;
  if (suffix == "M") return v * 1e-3;
  if (suffix == "U") return v * 1e-6;
  if (suffix == "N") return v * 1e-9;
  if (suffix == "P") return v * 1e-12;
  throw Error("unknown SI suffix in '" + std::string(token) + "'");
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double number_at(const std::string& tok, int line, const std::string& what) {
  try {
    return parse_si(tok);
  } catch (const Error&) {
    throw SyntaxError(line, "bad " + what + " value '" + tok + "'");
  }
}

// Splits trailing KEY=VALUE tokens from positional ones.
struct SplitArgs {
  std::vector<std::string> positional;
  std::vector<std::pair<std::string, std::string>> keyed;
};

SplitArgs split_args(const std::vector<std::string>& toks, std::size_t from, int line) {
  SplitArgs out;
  for (std::size_t i = from; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      if (!out.keyed.empty())
        throw SyntaxError(line, "positional argument '" + toks[i] + "' after KEY=VALUE parameters");
      out.positional.push_back(toks[i]);
    } else {
      if (eq == 0 || eq + 1 == toks[i].size())
        throw SyntaxError(line, "malformed parameter '" + toks[i] + "'");
      out.keyed.emplace_back(upper(toks[i].substr(0, eq)), toks[i].substr(eq + 1));
    }
  }
  return out;
}

Memristor parse_memristor(const std::vector<std::string>& toks, int line) {
  auto args = split_args(toks, 1, line);
  if (args.positional.size() != 2) throw SyntaxError(line, "memristor requires 2 nodes");
  Memristor m{toks[0], args.positional[0], args.positional[1], {}};
  for (const auto& [key, val] : args.keyed) {
    if (key == "RON") m.params.r_on = number_at(val, line, key);
    else if (key == "ROFF") m.params.r_off = number_at(val, line, key);
    else if (key == "VON") m.params.v_on = number_at(val, line, key);
    else if (key == "VOFF") m.params.v_off = number_at(val, line, key);
    else if (key == "TAU") m.params.tau = number_at(val, line, key);
    else if (key == "X0") m.params.x0 = number_at(val, line, key);
    else if (key == "TEMP") m.params.temperature = number_at(val, line, key);
    else if (key == "MODEL") {
      try {
        m.params.model = devices::switching_model_from_string(val);
      } catch (const Error& e) {
        throw SyntaxError(line, e.what());
      }
    } else
      throw SyntaxError(line, "unknown memristor parameter '" + key + "'");
  }
  try {
    m.params.validate();
  } catch (const Error& e) {
    throw SyntaxError(line, e.what());
  }
  return m;
}

Mosfet parse_mosfet(const std::vector<std::string>& toks, int line) {
  auto args = split_args(toks, 1, line);
  if (args.positional.size() != 4)
    throw SyntaxError(line, "transistor requires 3 nodes and a polarity");
  Mosfet t{toks[0], args.positional[0], args.positional[1], args.positional[2], {}};
  auto pol = upper(args.positional[3]);
  if (pol == "NMOS") t.params.polarity = devices::Polarity::Nmos;
  else if (pol == "PMOS") t.params.polarity = devices::Polarity::Pmos;
  else throw SyntaxError(line, "transistor polarity must be NMOS or PMOS, got '" + args.positional[3] + "'");
  for (const auto& [key, val] : args.keyed) {
    if (key == "VTH") t.params.vth = number_at(val, line, key);
    else if (key == "K") t.params.k = number_at(val, line, key);
    else throw SyntaxError(line, "unknown transistor parameter '" + key + "'");
  }
  if (!t.params.valid()) throw SyntaxError(line, "transistor requires VTH > 0 and K > 0");
  return t;
}

Resistor parse_resistor(const std::vector<std::string>& toks, int line) {
  if (toks.size() != 4) throw SyntaxError(line, "resistor requires 2 nodes and a value");
  Resistor r{toks[0], toks[1], toks[2], number_at(toks[3], line, "resistance")};
  if (!(r.ohms > 0)) throw SyntaxError(line, "resistance must be positive");
  return r;
}

VoltageSource parse_source(const std::vector<std::string>& toks, int line) {
  if (toks.size() < 4) throw SyntaxError(line, "voltage source requires 2 nodes and a value");
  VoltageSource v{toks[0], toks[1], toks[2], 0, {}};
  auto kind = upper(toks[3]);
  if (kind == "DC") {
    if (toks.size() != 5) throw SyntaxError(line, "DC source requires exactly one value");
    v.dc = number_at(toks[4], line, "DC");
  } else if (kind == "PWL") {
    std::size_t n = toks.size() - 4;
    if (n == 0 || n % 2) throw SyntaxError(line, "PWL requires time/value pairs");
    for (std::size_t i = 4; i < toks.size(); i += 2) {
      double t = number_at(toks[i], line, "PWL time");
      double val = number_at(toks[i + 1], line, "PWL value");
      if (!v.pwl.empty() && t <= v.pwl.back().first)
        throw SyntaxError(line, "PWL times must be strictly increasing");
      v.pwl.emplace_back(t, val);
    }
  } else {
    throw SyntaxError(line, "voltage source must be DC or PWL, got '" + toks[3] + "'");
  }
  return v;
}

} // namespace

Circuit parse(std::string_view text) {
  Circuit c;
  std::vector<int> device_lines;
  std::vector<int> port_lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto toks = tokenize(raw);
    if (toks.empty() || toks[0][0] == '*') continue;
    const auto head = upper(toks[0]);
    if (head[0] == '.') {
      if (head == ".END") break;
      if (head != ".PORT") throw SyntaxError(line, "unknown directive '" + toks[0] + "'");
      if (toks.size() != 4) throw SyntaxError(line, ".port requires direction, name and node");
      auto dir = upper(toks[1]);
      if (dir != "IN" && dir != "OUT") throw SyntaxError(line, "port direction must be in or out");
      c.add_port({toks[2], dir == "IN" ? PortDirection::In : PortDirection::Out, toks[3]});
      port_lines.push_back(line);
      continue;
    }
    switch (head[0]) {
    case 'V': c.add_device(parse_source(toks, line)); break;
    case 'M': c.add_device(parse_memristor(toks, line)); break;
    case 'T': c.add_device(parse_mosfet(toks, line)); break;
    case 'R': c.add_device(parse_resistor(toks, line)); break;
    default: throw UnknownDevice(line, "unknown device type '" + toks[0] + "'");
    }
    device_lines.push_back(line);
  }
  check_circuit(c, device_lines, port_lines);
  return c;
}

std::string serialize(const Circuit& c) {
  std::ostringstream out;
  out << "* ternsim netlist\n";
  for (const auto& d : c.devices()) {
    std::visit(Overloaded{
                   [&](const Memristor& m) {
                     const auto& p = m.params;
                     out << m.name << ' ' << m.anode << ' ' << m.cathode << " RON=" << format_number(p.r_on)
                         << " ROFF=" << format_number(p.r_off) << " VON=" << format_number(p.v_on)
                         << " VOFF=" << format_number(p.v_off) << " TAU=" << format_number(p.tau)
                         << " X0=" << format_number(p.x0) << " TEMP=" << format_number(p.temperature)
                         << " MODEL=" << devices::to_string(p.model) << '\n';
                   },
                   [&](const Mosfet& t) {
                     out << t.name << ' ' << t.drain << ' ' << t.gate << ' ' << t.source << ' '
                         << devices::to_string(t.params.polarity) << " VTH=" << format_number(t.params.vth)
                         << " K=" << format_number(t.params.k) << '\n';
                   },
                   [&](const Resistor& r) {
                     out << r.name << ' ' << r.a << ' ' << r.b << ' ' << format_number(r.ohms) << '\n';
                   },
                   [&](const VoltageSource& v) {
                     out << v.name << ' ' << v.pos << ' ' << v.neg;
                     if (v.pwl.empty()) {
                       out << " DC " << format_number(v.dc) << '\n';
                     } else {
                       out << " PWL(";
                       for (std::size_t i = 0; i < v.pwl.size(); ++i)
                         out << (i ? " " : "") << format_number(v.pwl[i].first) << ' '
                             << format_number(v.pwl[i].second);
                       out << ")\n";
                     }
                   },
               },
               d);
  }
  for (const auto& p : c.ports())
    out << ".port " << (p.dir == PortDirection::In ? "in" : "out") << ' ' << p.name << ' ' << p.node
        << '\n';
  out << ".end\n";
  return out.str();
}

} // namespace ternsim::netlist
