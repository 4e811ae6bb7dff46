#include <gtest/gtest.h>

#include "cps/numeric.hpp"

using namespace cps;

TEST(Rationals, RenderWithDenominator)
{
	EXPECT_EQ(to_string(Rational(3)), "3/1");
	Rational x(-6, 4);
	x.canonicalize();
	EXPECT_EQ(to_string(x), "-3/2");
	EXPECT_EQ(to_string(Rational(0)), "0/1");
}

TEST(Rationals, ParseAcceptsIntegersAndFractions)
{
	EXPECT_EQ(parse_rational("7"), Rational(7));
	EXPECT_EQ(parse_rational("6/8"), Rational(3, 4));
	EXPECT_EQ(parse_rational("-1/3"), Rational(-1, 3));
	EXPECT_EQ(parse_rational("+2/4"), Rational(1, 2));
}

TEST(Rationals, ParseRejectsMalformed)
{
	EXPECT_THROW(parse_rational(""), std::invalid_argument);
	EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
	EXPECT_THROW(parse_rational("1/-2"), std::invalid_argument);
	EXPECT_THROW(parse_rational("0.5"), std::invalid_argument);
	EXPECT_THROW(parse_rational("a/b"), std::invalid_argument);
}

TEST(Rationals, RoundTrip)
{
	for (int p = -20; p <= 20; ++p)
		for (int q = 1; q <= 12; ++q) {
			Rational x(p, q);
			x.canonicalize();
			EXPECT_EQ(parse_rational(to_string(x)), x);
		}
}

TEST(Rationals, PowersOfTwo)
{
	EXPECT_EQ(pow2(0), Rational(1));
	EXPECT_EQ(pow2(10), Rational(1024));
	EXPECT_EQ(pow2(-3), Rational(1, 8));
}

TEST(Rationals, DecimalRendering)
{
	EXPECT_EQ(approx_decimal(Rational(1, 2)), "0.5");
	EXPECT_EQ(approx_decimal(Rational(-1, 8)), "-0.125");
	EXPECT_EQ(approx_decimal(Rational(12)), "12");
	EXPECT_EQ(approx_decimal(Rational(0)), "0");
}

TEST(Intervals, Construction)
{
	EXPECT_THROW(RatInterval(1, 0), std::invalid_argument);
	RatInterval a(Rational(1, 4), Rational(3, 4));
	EXPECT_EQ(a.width(), Rational(1, 2));
	EXPECT_EQ(a.midpoint(), Rational(1, 2));
	EXPECT_TRUE(a.contains(Rational(1, 4)));
	EXPECT_FALSE(a.contains(Rational(4, 5)));
}

TEST(Intervals, Intersection)
{
	RatInterval a(0, 2), b(1, 3), c(5, 6);
	EXPECT_EQ(a.intersect(b), RatInterval(1, 2));
	EXPECT_THROW(a.intersect(c), std::domain_error);
	EXPECT_TRUE(a.intersects(b));
	EXPECT_FALSE(a.intersects(c));
}

TEST(Intervals, Arithmetic)
{
	RatInterval a(-1, 2), b(3, 4);
	EXPECT_EQ(interval_add(a, b), RatInterval(2, 6));
	EXPECT_EQ(interval_sub(a, b), RatInterval(-5, -1));
	EXPECT_EQ(interval_mul(a, b), RatInterval(-4, 8));
	EXPECT_EQ(interval_min(a, b), RatInterval(-1, 2));
	EXPECT_EQ(interval_max(a, b), RatInterval(3, 4));
}

TEST(StagedReals, BottomAndConstant)
{
	EXPECT_FALSE(StagedLowerReal::bottom().bound_at(7).has_value());
	EXPECT_EQ(StagedLowerReal::bottom().value_or_zero(7), Rational(0));
	EXPECT_EQ(*StagedLowerReal::constant(Rational(5, 2)).bound_at(3), Rational(5, 2));
}

TEST(StagedReals, TablePersistsLastEntry)
{
	auto x = StagedLowerReal::from_table({std::nullopt, Rational(1), Rational(2)});
	EXPECT_FALSE(x.bound_at(0).has_value());
	EXPECT_EQ(*x.bound_at(1), Rational(1));
	EXPECT_EQ(*x.bound_at(100), Rational(2));
}

TEST(StagedReals, SupTakesLargestBound)
{
	auto s = lower_sup({StagedLowerReal::bottom(), StagedLowerReal::constant(1),
	                    StagedLowerReal::from_table({Rational(0), Rational(3)})});
	EXPECT_EQ(*s.bound_at(0), Rational(1));
	EXPECT_EQ(*s.bound_at(1), Rational(3));
	EXPECT_FALSE(lower_sup({}).bound_at(0).has_value());
}

TEST(StagedReals, WeightedSumTreatsBottomAsZero)
{
	auto s = lower_weighted_sum({{Rational(1, 2), StagedLowerReal::constant(4)},
	                             {Rational(1, 4), StagedLowerReal::bottom()}});
	EXPECT_EQ(*s.bound_at(0), Rational(2));
	auto all_bottom = lower_weighted_sum({{Rational(1), StagedLowerReal::bottom()}});
	EXPECT_FALSE(all_bottom.bound_at(0).has_value());
	EXPECT_EQ(*lower_weighted_sum({}).bound_at(0), Rational(0));
	EXPECT_THROW(lower_weighted_sum({{Rational(0), StagedLowerReal::constant(1)}}), std::invalid_argument);
}

TEST(StagedReals, TwoConstantTestsCombine)
{
	auto s = lower_weighted_sum({{Rational(1, 2), StagedLowerReal::constant(4)},
	                             {Rational(1, 4), StagedLowerReal::constant(8)}});
	EXPECT_EQ(*s.bound_at(0), Rational(4));
}

TEST(StagedReals, Exceeds)
{
	auto x = StagedLowerReal::from_table({std::nullopt, Rational(1), Rational(3)});
	EXPECT_FALSE(exceeds_at(x, 2, 0));
	EXPECT_FALSE(exceeds_at(x, 2, 1));
	EXPECT_TRUE(exceeds_at(x, 2, 2));
}
