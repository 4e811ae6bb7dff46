#include <gtest/gtest.h>

#include "cps/lsc.hpp"
#include "oracles.hpp"

using namespace cps;

namespace {

const UnitInterval &ui() { return static_cast<const UnitInterval &>(*unit_interval()); }
IdealIndex at(Rational x)
{
	x.canonicalize();
	return ui().index_of(x);
}
PointDescriptor pt(const Rational &x) { return PointDescriptor::ideal(unit_interval(), at(x)); }

HatFunction sample_hat()
{
	return {Rational(1), at(0), Rational(1, 2), Rational(1, 4)};
}

} // namespace

TEST(Basics, StepAtCenter)
{
	auto f = LscFunction::step(unit_interval(), {at(Rational(1, 2)), Rational(1)}, Rational(1));
	EXPECT_EQ(f.eval_lower(pt(Rational(1, 2)), 0), Rational(1));
}

TEST(Basics, HatFormula)
{
	EXPECT_EQ(hat_value(sample_hat(), Rational(5, 8)), Rational(1, 2));
	EXPECT_EQ(hat_value(sample_hat(), Rational(1, 4)), Rational(1));
	EXPECT_EQ(hat_value(sample_hat(), Rational(3, 4)), Rational(0));
	auto f = LscFunction::hat(unit_interval(), sample_hat());
	EXPECT_EQ(f.eval_lower(pt(Rational(5, 8)), 10), Rational(1, 2));
}

TEST(Basics, ZeroEverywhere)
{
	auto f = LscFunction::zero(unit_interval());
	for (unsigned k = 0; k <= 8; ++k)
		EXPECT_EQ(f.eval_lower(pt(Rational(k, 8)), 5), Rational(0));
	EXPECT_TRUE(f.pieces(5).empty());
	EXPECT_TRUE(f.superlevel(0, 5).is_empty_set());
}

TEST(Combinators, SupWithZeroAndUnitScale)
{
	auto h = LscFunction::hat(unit_interval(), sample_hat());
	auto s = lsc_sup({h, LscFunction::zero(unit_interval())});
	auto one = lsc_scale(h, 1);
	for (unsigned k = 0; k <= 16; ++k) {
		auto x = pt(Rational(k, 16));
		EXPECT_EQ(s.eval_lower(x, 12), h.eval_lower(x, 12));
		EXPECT_EQ(one.eval_lower(x, 12), h.eval_lower(x, 12));
	}
}

TEST(Combinators, SumOfTwoSteps)
{
	IdealBall b{at(Rational(1, 2)), Rational(1, 4)};
	auto f = lsc_sum({{Rational(1), LscFunction::step(unit_interval(), b, 1)},
	                  {Rational(1), LscFunction::step(unit_interval(), b, 2)}});
	EXPECT_EQ(f.eval_lower(pt(Rational(1, 2)), 4), Rational(3));
	EXPECT_EQ(f.eval_lower(pt(Rational(7, 8)), 4), Rational(0));
}

TEST(Combinators, Indicator)
{
	auto u = REOpenSet::from_balls(unit_interval(), {{at(0), Rational(1, 2)}});
	auto f = indicator(u);
	EXPECT_EQ(f.eval_lower(pt(Rational(1, 4)), 2), Rational(1));
	EXPECT_EQ(f.eval_lower(pt(Rational(3, 4)), 8), Rational(0));
	auto e = indicator(REOpenSet::empty(unit_interval()));
	EXPECT_EQ(e.eval_lower(pt(Rational(1, 4)), 8), Rational(0));
	for (unsigned k = 0; k <= 16; ++k)
		EXPECT_LE(f.eval_lower(pt(Rational(k, 16)), 8), Rational(1));
}

TEST(Superlevels, StepThresholds)
{
	IdealBall b{at(Rational(1, 2)), Rational(1)};
	auto f = LscFunction::step(unit_interval(), b, 2);
	auto one = f.superlevel(1, 4).balls_through(4);
	ASSERT_EQ(one.size(), 1u);
	EXPECT_EQ(one[0].center, b.center);
	EXPECT_EQ(one[0].radius, b.radius);
	EXPECT_TRUE(f.superlevel(3, 4).balls_through(4).empty());
}

TEST(Superlevels, HatRadiusSolvesFormula)
{
	auto f = LscFunction::hat(unit_interval(), sample_hat());
	auto balls = f.superlevel(Rational(1, 2), 4).balls_through(4);
	ASSERT_EQ(balls.size(), 1u);
	EXPECT_EQ(balls[0].center, at(0));
	EXPECT_EQ(balls[0].radius, Rational(5, 8));
}

TEST(Pieces, StaircaseStaysUnderHat)
{
	auto h = sample_hat();
	auto f = LscFunction::hat(unit_interval(), h);
	for (Stage s : {0u, 3u, 9u, 15u}) {
		for (const auto &p : f.pieces(s)) {
			ASSERT_EQ(p.region.size(), 1u);
			ASSERT_EQ(p.region[0].size(), 1u);
			// Every point of the piece ball sits at distance < radius, where
			// the hat is at least the piece value.
			EXPECT_LE(p.value, hat_value(h, p.region[0][0].radius));
		}
	}
}

TEST(Monotonicity, EvalNondecreasingInStage)
{
	std::vector<LscFunction> fs{
		LscFunction::hat(unit_interval(), sample_hat()),
		lsc_sum({{Rational(1, 2), LscFunction::step(unit_interval(), {at(Rational(1, 3)), Rational(1, 5)}, 3)},
		         {Rational(1), LscFunction::hat(unit_interval(), {Rational(2), at(1), Rational(1, 8), Rational(1, 2)})}}),
		lsc_sup({LscFunction::step(unit_interval(), {at(Rational(1, 4)), Rational(1, 4)}, 1),
		         LscFunction::step(unit_interval(), {at(Rational(1, 2)), Rational(1, 4)}, 2)}),
	};
	for (const auto &f : fs) {
		for (int i = 0; i < 20; ++i) {
			Rational x(static_cast<unsigned long>(oracle::uniform(0, 60)), 60);
			x.canonicalize();
			Rational prev = -1;
			for (Stage s = 0; s <= 16; ++s) {
				Rational v = f.eval_lower(pt(x), s);
				EXPECT_GE(v, prev);
				prev = v;
			}
		}
	}
}

TEST(LevelCount, CountsNestedMembership)
{
	// U_n = B(0, 2^-n): G(x) = largest n with x < 2^-n.
	auto g = level_count(unit_interval(), [](Stage n) {
		return REOpenSet::from_balls(unit_interval(), {{at(0), pow2(-static_cast<int>(n))}});
	});
	EXPECT_EQ(g.eval_lower(pt(Rational(3, 4)), 10), Rational(0));
	EXPECT_EQ(g.eval_lower(pt(Rational(1, 5)), 10), Rational(2));
	EXPECT_EQ(g.eval_lower(pt(Rational(0)), 10), Rational(10));
	auto above = g.superlevel(Rational(3, 2), 10).balls_through(10);
	ASSERT_FALSE(above.empty());
	for (const auto &b : above)
		EXPECT_TRUE(ui().ball_subset(b, {at(0), Rational(1, 4)}));
}
