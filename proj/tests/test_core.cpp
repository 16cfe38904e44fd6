#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ternsim/core.hpp"

using namespace ternsim;
using namespace ternsim::core;
using L = TernaryLevel;

TEST_CASE("level_to_voltage") {
  CHECK(level_to_voltage(L::L1, 1.0) == doctest::Approx(0.5));
  CHECK(level_to_voltage(L::L0, 1.0) == 0.0);
  CHECK(level_to_voltage(L::L2, 1.2) == doctest::Approx(1.2));
}

TEST_CASE("voltage_to_level") {
  auto b = VoltageBands::defaults(1.0);
  CHECK(b.lo_max == doctest::Approx(0.20));
  CHECK(b.mid_lo == doctest::Approx(0.40));
  CHECK(b.mid_hi == doctest::Approx(0.60));
  CHECK(b.hi_min == doctest::Approx(0.80));
  CHECK(voltage_to_level(0.50, b) == L::L1);
  CHECK(voltage_to_level(0.98, b) == L::L2);
  CHECK_FALSE(voltage_to_level(0.33, b).has_value());
  CHECK_FALSE(voltage_to_level(0.70, b).has_value());
  // band edges are inclusive
  CHECK(voltage_to_level(0.20, b) == L::L0);
  CHECK(voltage_to_level(0.40, b) == L::L1);
  CHECK(voltage_to_level(0.60, b) == L::L1);
  CHECK(voltage_to_level(0.80, b) == L::L2);
}

TEST_CASE("voltage_to_level inverts level_to_voltage") {
  for (double vdd : {0.8, 1.0, 1.2, 3.3})
    for (L l : kAllLevels)
      CHECK(voltage_to_level(level_to_voltage(l, vdd), VoltageBands::defaults(vdd)) == l);
}

TEST_CASE("classify reports gaps") {
  auto b = VoltageBands::defaults(1.0);
  CHECK(classify(0.1, b) == Band::Low);
  CHECK(classify(0.3, b) == Band::LowGap);
  CHECK(classify(0.5, b) == Band::Mid);
  CHECK(classify(0.7, b) == Band::HighGap);
  CHECK(classify(0.9, b) == Band::High);
  CHECK_FALSE(band_level(Band::LowGap).has_value());
}

TEST_CASE("two-bit encoding") {
  CHECK(encode_2bit(L::L2) == BitPair{true, false});
  CHECK(encode_2bit(L::L0) == BitPair{false, false});
  CHECK(decode_2bit(BitPair{false, true}) == L::L1);
  CHECK_THROWS_AS(decode_2bit(BitPair{true, true}), InvalidEncoding);
  CHECK(to_string(encode_2bit(L::L1)) == "01");
  CHECK(bitpair_from_string("10") == BitPair{true, false});
  CHECK_FALSE(bitpair_from_string("11").valid());
  for (L l : kAllLevels) CHECK(decode_2bit(encode_2bit(l)) == l);
}

TEST_CASE("level_from_int") {
  CHECK(level_from_int(2) == L::L2);
  CHECK_THROWS_AS(level_from_int(3), Error);
  CHECK_THROWS_AS(level_from_int(-1), Error);
}

TEST_CASE("inverters") {
  CHECK(ref_nti(L::L1) == L::L0);
  CHECK(ref_sti(L::L1) == L::L1);
  CHECK(ref_pti(L::L1) == L::L2);

  const L sti[] = {L::L2, L::L1, L::L0};
  const L nti[] = {L::L2, L::L0, L::L0};
  const L pti[] = {L::L2, L::L2, L::L0};
  for (int i = 0; i < 3; ++i) {
    CHECK(ref_sti(L(i)) == sti[i]);
    CHECK(ref_nti(L(i)) == nti[i]);
    CHECK(ref_pti(L(i)) == pti[i]);
  }
}

TEST_CASE("tand and tor") {
  CHECK(ref_tand(L::L2, L::L1) == L::L1);
  CHECK(ref_tor(L::L0, L::L0) == L::L0);
  CHECK(ref_tor(L::L2, L::L1) == L::L2);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      CHECK(to_int(ref_tand(L(a), L(b))) == std::min(a, b));
      CHECK(to_int(ref_tor(L(a), L(b))) == std::max(a, b));
    }
}

TEST_CASE("algebraic properties") {
  for (L a : kAllLevels) {
    CHECK(ref_tand(a, a) == a);
    CHECK(ref_tor(a, a) == a);
    CHECK(ref_tand(a, L::L2) == a);
    CHECK(ref_tor(a, L::L0) == a);
    CHECK(ref_sti(ref_sti(a)) == a);
    if (a != L::L1) {
      CHECK(ref_nti(a) == ref_sti(a));
      CHECK(ref_pti(a) == ref_sti(a));
    }
    for (L b : kAllLevels) {
      CHECK(ref_tand(a, b) == ref_tand(b, a));
      CHECK(ref_tor(a, b) == ref_tor(b, a));
      CHECK(ref_sti(ref_tand(a, b)) == ref_tor(ref_sti(a), ref_sti(b)));
      CHECK(ref_sti(ref_tor(a, b)) == ref_tand(ref_sti(a), ref_sti(b)));
      for (L c : kAllLevels) {
        CHECK(ref_tand(ref_tand(a, b), c) == ref_tand(a, ref_tand(b, c)));
        CHECK(ref_tor(ref_tor(a, b), c) == ref_tor(a, ref_tor(b, c)));
      }
    }
  }
}
