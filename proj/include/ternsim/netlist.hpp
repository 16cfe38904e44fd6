#pragma once

#include "ternsim/core.hpp"
#include "ternsim/devices.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ternsim {

/// Netlist errors carry the 1-based source line (0 when not from text).
class NetlistError : public Error {
public:
  NetlistError(std::string kind, int line, const std::string& reason)
      : Error(format(kind, line, reason)), kind_(std::move(kind)), line_(line), reason_(reason) {}

  const std::string& kind() const { return kind_; }
  int line() const { return line_; }
  const std::string& reason() const { return reason_; }

private:
  static std::string format(const std::string& kind, int line, const std::string& reason) {
    return line > 0 ? kind + " at line " + std::to_string(line) + ": " + reason
                    : kind + ": " + reason;
  }

  std::string kind_;
  int line_;
  std::string reason_;
};

class SyntaxError : public NetlistError {
public:
  SyntaxError(int line, const std::string& reason) : NetlistError("SyntaxError", line, reason) {}
};

class UnknownDevice : public NetlistError {
public:
  UnknownDevice(int line, const std::string& reason)
      : NetlistError("UnknownDevice", line, reason) {}
};

class DuplicateName : public NetlistError {
public:
  DuplicateName(int line, const std::string& reason)
      : NetlistError("DuplicateName", line, reason) {}
};

class UnboundNode : public NetlistError {
public:
  UnboundNode(int line, const std::string& reason) : NetlistError("UnboundNode", line, reason) {}
};

class InvalidArity : public Error {
public:
  explicit InvalidArity(const std::string& what) : Error("invalid arity: " + what) {}
};

namespace netlist {

inline constexpr std::string_view kGround = "0";

struct Memristor {
  std::string name;
  std::string anode;
  std::string cathode;
  devices::MemristorParams params;
  friend bool operator==(const Memristor&, const Memristor&) = default;
};

struct Mosfet {
  std::string name;
  std::string drain;
  std::string gate;
  std::string source;
  devices::MosfetParams params;
  friend bool operator==(const Mosfet&, const Mosfet&) = default;
};

struct Resistor {
  std::string name;
  std::string a;
  std::string b;
  double ohms = 0;
  friend bool operator==(const Resistor&, const Resistor&) = default;
};

/// DC when `pwl` is empty, piecewise-linear in time otherwise.
struct VoltageSource {
  std::string name;
  std::string pos;
  std::string neg;
  double dc = 0;
  std::vector<std::pair<double, double>> pwl;

  double value_at(double t) const;
  friend bool operator==(const VoltageSource&, const VoltageSource&) = default;
};

using Device = std::variant<Memristor, Mosfet, Resistor, VoltageSource>;

const std::string& device_name(const Device& d);
std::vector<std::string> device_terminals(const Device& d);

enum class PortDirection { In, Out };

struct Port {
  std::string name;
  PortDirection dir = PortDirection::In;
  std::string node;
  friend bool operator==(const Port&, const Port&) = default;
};

enum class CellType { STI, NTI, PTI, TAND2, TOR2, TORN, TNOR, SFBUF };

/// A cell kind; `arity` is only meaningful for TORN.
struct CellKind {
  CellType type = CellType::STI;
  int arity = 1;

  static CellKind sti() { return {CellType::STI, 1}; }
  static CellKind nti() { return {CellType::NTI, 1}; }
  static CellKind pti() { return {CellType::PTI, 1}; }
  static CellKind tand2() { return {CellType::TAND2, 2}; }
  static CellKind tor2() { return {CellType::TOR2, 2}; }
  /// Throws InvalidArity when n < 2.
  static CellKind torn(int n);
  static CellKind tnor() { return {CellType::TNOR, 2}; }
  static CellKind sfbuf() { return {CellType::SFBUF, 1}; }

  int inputs() const { return arity; }
  friend bool operator==(const CellKind&, const CellKind&) = default;
};

std::string to_string(CellKind k);
/// Accepts STI, NTI, PTI, TAND2, TOR2, TNOR, SFBUF and TOR<n> / TORN<n>.
CellKind cell_kind_from_string(std::string_view s);

/// One gate instance in a gate-level design.
struct CellInstance {
  CellKind kind;
  std::string name;
  std::vector<std::string> inputs;
  std::string output;
  friend bool operator==(const CellInstance&, const CellInstance&) = default;
};

/// Flat transistor/memristor level circuit.
class Circuit {
public:
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Device>& devices() const { return devices_; }
  const std::vector<Port>& ports() const { return ports_; }
  /// Gate census recorded by elaboration; empty for parsed circuits.
  const std::vector<CellInstance>& instances() const { return instances_; }

  bool has_node(std::string_view name) const;
  /// Adds the node if absent, returns its index.
  std::size_t add_node(const std::string& name);
  void add_device(Device d);
  void add_port(Port p);
  void add_instance(CellInstance inst) { instances_.push_back(std::move(inst)); }

  std::vector<Port> ports(PortDirection dir) const;
  const Port* find_port(std::string_view name) const;
  const Device* find_device(std::string_view name) const;

  std::size_t count_memristors() const;
  std::size_t count_mosfets() const;
  std::size_t count_instances(CellType t) const;

  /// Checks ground presence, name uniqueness, port bindings and that every
  /// non-port node has at least two device terminals. Throws NetlistError.
  void validate() const;

private:
  std::vector<std::string> nodes_{std::string(kGround)};
  std::vector<Device> devices_;
  std::vector<Port> ports_;
  std::vector<CellInstance> instances_;
};

/// Compares nodes (as a set), devices (in order) and ports (in order).
bool structurally_equal(const Circuit& a, const Circuit& b);

/// Parses a value with an optional SI suffix (k, m, u, n, p).
double parse_si(std::string_view token);
std::string format_number(double v);

Circuit parse(std::string_view text);
std::string serialize(const Circuit& c);

/// Electrical parameters shared by all cells of a design.
struct CellParams {
  devices::MemristorParams memristor = thermal_memristor();
  double vdd = 1.0;
  double k_inverter = 0.1;
  double vth_low = 0.3;
  double vth_high = 0.7;
  double k_follower = 10.0;
  double vth_follower = 0.05;
  double follower_load = 1e3;

  static devices::MemristorParams thermal_memristor() {
    devices::MemristorParams p;
    p.model = devices::SwitchingModel::Thermal;
    return p;
  }
};

/// Gate-level description; the single source of topology for both the
/// analog netlist (via elaborate) and the two-bit gate DAG.
struct Design {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<CellInstance> cells;

  void add(CellKind kind, std::string inst, std::vector<std::string> ins, std::string out);
  std::size_t count(CellType t) const;
};

/// Builds the device-level circuit. Includes a `Vdd vdd 0` source when any
/// cell needs the supply.
Circuit elaborate(const Design& d, const CellParams& p = {});

Design cell_design(CellKind kind);
Design decoder_1_3_design();
Design decoder_2_9_design();
Design display_decoder_design();
/// Binary BCD-to-seven-segment reference built from the same cells, with
/// logic values restricted to {0, 2}.
Design bcd_baseline_design();

/// Exchanges the drivers of two nets, e.g. to mutate Y7/Y5 wiring.
Design swap_drivers(Design d, const std::string& net_a, const std::string& net_b);

Circuit build_cell(CellKind kind, const CellParams& p = {});
Circuit build_decoder_1_3(const CellParams& p = {});
Circuit build_decoder_2_9(const CellParams& p = {});
Circuit build_decoder_display(const CellParams& p = {});

enum class Builtin { D13, D29, Display, BcdBaseline };

std::string_view to_string(Builtin b);
std::optional<Builtin> builtin_from_string(std::string_view s);
Design builtin_design(Builtin b);

} // namespace netlist
} // namespace ternsim
