#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ternsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidEncoding : public Error {
public:
  InvalidEncoding() : Error("invalid ternary encoding: code 11 is reserved") {}
  explicit InvalidEncoding(const std::string& where)
      : Error("invalid ternary encoding: " + where) {}
};

namespace core {

/// Unbalanced positive ternary logic value: 0 = GND, 1 = VDD/2, 2 = VDD.
enum class TernaryLevel : std::uint8_t { L0 = 0, L1 = 1, L2 = 2 };

inline constexpr std::array<TernaryLevel, 3> kAllLevels{TernaryLevel::L0, TernaryLevel::L1,
                                                        TernaryLevel::L2};

/// A quantized analog reading; empty means the voltage sat between bands.
using MaybeLevel = std::optional<TernaryLevel>;

constexpr int to_int(TernaryLevel l) { return static_cast<int>(l); }

/// Throws ternsim::Error when `v` is outside {0,1,2}.
TernaryLevel level_from_int(int v);

char to_char(TernaryLevel l);
std::string to_string(const MaybeLevel& l);

/// Decision bands used to quantize node voltages.
struct VoltageBands {
  double vdd = 1.0;
  double lo_max = 0.20;
  double mid_lo = 0.40;
  double mid_hi = 0.60;
  double hi_min = 0.80;

  /// Symmetric 20 % guard bands around the three nominal levels.
  static VoltageBands defaults(double vdd = 1.0);

  bool valid() const;
};

/// Fine-grained classification of a voltage, including the two gaps.
enum class Band : std::uint8_t { Low, LowGap, Mid, HighGap, High };

std::string_view to_string(Band b);
Band classify(double v, const VoltageBands& bands);
MaybeLevel band_level(Band b);

double level_to_voltage(TernaryLevel level, double vdd);
MaybeLevel voltage_to_level(double v, const VoltageBands& bands);

/// Two-bit encoding (0,1,2) = (00,01,10); 11 is reserved.
struct BitPair {
  bool hi = false;
  bool lo = false;

  constexpr bool valid() const { return !(hi && lo); }
  friend constexpr bool operator==(BitPair, BitPair) = default;
};

std::string to_string(BitPair b);
/// Parses "00", "01", "10" or "11" (the last one parses but is not valid()).
BitPair bitpair_from_string(std::string_view s);

BitPair encode_2bit(TernaryLevel level);
TernaryLevel decode_2bit(BitPair b);

// Reference semantics of the gate primitives.
TernaryLevel ref_sti(TernaryLevel a);
TernaryLevel ref_nti(TernaryLevel a);
TernaryLevel ref_pti(TernaryLevel a);
TernaryLevel ref_tand(TernaryLevel a, TernaryLevel b);
TernaryLevel ref_tor(TernaryLevel a, TernaryLevel b);

} // namespace core
} // namespace ternsim
