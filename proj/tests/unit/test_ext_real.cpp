#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "nmpg/ext_real.hpp"

using nmpg::ExtReal;

TEST(ExtReal, FiniteArithmetic) {
  EXPECT_EQ((ExtReal(1.5) + ExtReal(2.0)).value(), 3.5);
  EXPECT_EQ((ExtReal(1.0) + 2.0).value(), 3.0);
  EXPECT_EQ((2.0 + ExtReal(1.0)).value(), 3.0);
}

TEST(ExtReal, InfinityAbsorbs) {
  const ExtReal inf = ExtReal::infinity();
  EXPECT_TRUE((inf + ExtReal(-1e300)).is_infinite());
  EXPECT_TRUE((ExtReal(5.0) + inf).is_infinite());
  EXPECT_TRUE((inf + inf).is_infinite());
}

TEST(ExtReal, TotalOrder) {
  const ExtReal inf = ExtReal::infinity();
  EXPECT_LT(ExtReal(-1e308), ExtReal(1e308));
  EXPECT_LT(ExtReal(1e308), inf);
  EXPECT_EQ(inf, ExtReal::infinity());
  EXPECT_FALSE(inf < inf);
  EXPECT_EQ(ExtReal(2.0), ExtReal(2.0));
  EXPECT_NE(ExtReal(2.0), inf);
}

TEST(ExtReal, HostInfinityIsNotAValue) {
  EXPECT_THROW(ExtReal(std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_THROW(ExtReal(-std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_THROW(ExtReal(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST(ExtReal, OverflowIsAnError) {
  EXPECT_THROW(ExtReal(1.7e308) + ExtReal(1.7e308), std::domain_error);
}

TEST(ExtReal, ValueOfInfinityThrows) {
  EXPECT_THROW(ExtReal::infinity().value(), std::logic_error);
  EXPECT_EQ(ExtReal::infinity().to_double(), std::numeric_limits<double>::infinity());
}

TEST(ExtReal, Streams) {
  std::ostringstream s;
  s << ExtReal(1.5) << ' ' << ExtReal::infinity();
  EXPECT_EQ(s.str(), "1.5 +inf");
}
