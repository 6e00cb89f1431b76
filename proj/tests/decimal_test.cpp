#include <gtest/gtest.h>

#include <stdexcept>

#include "vulnprio/decimal.hpp"

using vulnprio::Decimal;

TEST(DecimalTest, ParsesAndRendersShortestExactForm) {
    EXPECT_EQ(Decimal::parse("102.3")->to_string(), "102.3");
    EXPECT_EQ(Decimal::parse("10")->to_string(), "10.0");
    EXPECT_EQ(Decimal::parse("2.250")->to_string(), "2.25");
    EXPECT_EQ(Decimal::parse("0.000000001")->to_string(), "0.000000001");
    EXPECT_EQ(Decimal::parse("-1.5")->to_string(), "-1.5");
}

TEST(DecimalTest, RejectsMalformedText) {
    for (const char* bad : {"", ".5", "5.", "1e3", "+1", "1.2.3", "abc", "0.0000000001"}) {
        EXPECT_FALSE(Decimal::parse(bad).has_value()) << bad;
    }
}

TEST(DecimalTest, FromDoubleRequiresRequestedPrecision) {
    EXPECT_EQ(Decimal::from_double(8.1, 1), Decimal::from_tenths(81));
    EXPECT_EQ(Decimal::from_double(1.2, 4), *Decimal::parse("1.2"));
    EXPECT_FALSE(Decimal::from_double(8.15, 1).has_value());
    EXPECT_FALSE(Decimal::from_double(std::numeric_limits<double>::infinity(), 1).has_value());
}

TEST(DecimalTest, ProductsAreExact) {
    const Decimal a = *Decimal::parse("1.5");
    EXPECT_EQ((a * a).to_string(), "2.25");
    EXPECT_EQ((Decimal::from_tenths(341) * 3).to_string(), "102.3");
    EXPECT_EQ((Decimal::from_tenths(68) * 6).to_string(), "40.8");
}

TEST(DecimalTest, InexactProductThrows) {
    const Decimal tiny = *Decimal::parse("0.00001");
    EXPECT_THROW(tiny * tiny, std::domain_error);
}

TEST(DecimalTest, OverflowThrows) {
    const Decimal big = Decimal::from_integer(9'000'000'000);
    EXPECT_THROW(big * 2, std::overflow_error);
    EXPECT_THROW(Decimal::from_integer(INT64_MAX), std::overflow_error);
}

TEST(DecimalTest, OrderingFollowsValue) {
    EXPECT_LT(*Decimal::parse("9.5"), *Decimal::parse("40.8"));
    EXPECT_EQ(*Decimal::parse("1.0"), Decimal::from_integer(1));
    EXPECT_EQ(Decimal::parse("1.25")->fractional_digits(), 2);
    EXPECT_EQ(Decimal::from_integer(3).fractional_digits(), 0);
}
