#include "ternsim/core.hpp"

#include <algorithm>

namespace ternsim::core {

TernaryLevel level_from_int(int v) {
  if (v < 0 || v > 2)
    throw Error("ternary level out of range: " + std::to_string(v));
  return static_cast<TernaryLevel>(v);
}

char to_char(TernaryLevel l) { return static_cast<char>('0' + to_int(l)); }

std::string to_string(const MaybeLevel& l) { return l ? std::string(1, to_char(*l)) : "X"; }

VoltageBands VoltageBands::defaults(double vdd) {
  return {vdd, 0.20 * vdd, 0.40 * vdd, 0.60 * vdd, 0.80 * vdd};
}

bool VoltageBands::valid() const {
  return vdd > 0 && 0 <= lo_max && lo_max < mid_lo && mid_lo < mid_hi && mid_hi < hi_min &&
         hi_min <= vdd;
}

std::string_view to_string(Band b) {
  switch (b) {
  case Band::Low: return "L0";
  case Band::LowGap: return "gap01";
  case Band::Mid: return "L1";
  case Band::HighGap: return "gap12";
  case Band::High: return "L2";
  }
  return "?";
}

Band classify(double v, const VoltageBands& bands) {
  if (v <= bands.lo_max) return Band::Low;
  if (v < bands.mid_lo) return Band::LowGap;
  if (v <= bands.mid_hi) return Band::Mid;
  if (v < bands.hi_min) return Band::HighGap;
  return Band::High;
}

MaybeLevel band_level(Band b) {
  switch (b) {
  case Band::Low: return TernaryLevel::L0;
  case Band::Mid: return TernaryLevel::L1;
  case Band::High: return TernaryLevel::L2;
  default: return std::nullopt;
  }
}

double level_to_voltage(TernaryLevel level, double vdd) {
  switch (level) {
  case TernaryLevel::L0: return 0.0;
  case TernaryLevel::L1: return vdd / 2;
  case TernaryLevel::L2: return vdd;
  }
  return 0.0;
}

MaybeLevel voltage_to_level(double v, const VoltageBands& bands) {
  return band_level(classify(v, bands));
}

std::string to_string(BitPair b) {
  return std::string{b.hi ? '1' : '0', b.lo ? '1' : '0'};
}

BitPair bitpair_from_string(std::string_view s) {
  if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1'))
    throw Error("expected a two-bit code, got '" + std::string(s) + "'");
  return {s[0] == '1', s[1] == '1'};
}

BitPair encode_2bit(TernaryLevel level) {
  switch (level) {
  case TernaryLevel::L0: return {false, false};
  case TernaryLevel::L1: return {false, true};
  case TernaryLevel::L2: return {true, false};
  }
  return {};
}

TernaryLevel decode_2bit(BitPair b) {
  if (!b.valid()) throw InvalidEncoding();
  if (b.hi) return TernaryLevel::L2;
  return b.lo ? TernaryLevel::L1 : TernaryLevel::L0;
}

TernaryLevel ref_sti(TernaryLevel a) { return static_cast<TernaryLevel>(2 - to_int(a)); }

TernaryLevel ref_nti(TernaryLevel a) {
  return a == TernaryLevel::L0 ? TernaryLevel::L2 : TernaryLevel::L0;
}

TernaryLevel ref_pti(TernaryLevel a) {
  return a == TernaryLevel::L2 ? TernaryLevel::L0 : TernaryLevel::L2;
}

TernaryLevel ref_tand(TernaryLevel a, TernaryLevel b) { return std::min(a, b); }
TernaryLevel ref_tor(TernaryLevel a, TernaryLevel b) { return std::max(a, b); }

} // namespace ternsim::core
