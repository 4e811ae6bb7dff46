#include <gtest/gtest.h>

#include "cps/binaryrep.hpp"
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

// sqrt(2)/2 through approximations within 2^-(n+2).
PointDescriptor half_root_two()
{
	return PointDescriptor::from_stream(unit_interval(), [](Stage n) {
		Integer s;
		Integer target = Integer(2) << (2 * (n + 2));
		mpz_sqrt(s.get_mpz_t(), target.get_mpz_t());
		Rational x(s, Integer(1) << (n + 3));
		return at(x);
	});
}

Rational random_point()
{
	// Odd numerators over 3 * 2^k or 5 * 7 stay off every dyadic boundary.
	unsigned den = oracle::uniform(0, 1) ? 3 * 1024 : 35;
	Rational x(static_cast<unsigned long>(oracle::uniform(1, den - 1)), den);
	x.canonicalize();
	return x;
}

} // namespace

TEST(Schedules, DyadicLayout)
{
	EXPECT_EQ(dyadic_schedule_size(0), 2u);
	EXPECT_EQ(dyadic_schedule_size(17), 262161u);
	auto sched = dyadic_unit_schedule(6);
	EXPECT_EQ(sched.size, dyadic_schedule_size(6));
	for (std::size_t i = 0; i < sched.size; i += 7) {
		auto e = sched.entry(i);
		auto o = oracle::dyadic_ball(i);
		EXPECT_EQ(ui().value(e.center), o.center);
		ASSERT_TRUE(std::holds_alternative<QuadraticRadius>(e.radius));
		EXPECT_EQ(std::get<QuadraticRadius>(e.radius).scale, o.scale);
	}
}

TEST(Schedules, CylinderLayout)
{
	auto sched = cantor_cylinder_schedule(3);
	EXPECT_EQ(sched.size, 2u + 4u + 8u);
	EXPECT_EQ(CantorSpace::word(sched.entry(3).center, 2), "10");
	EXPECT_THROW(cantor_cylinder_schedule(0), InvalidParameter);
}

TEST(Radii, NestedAndCertified)
{
	auto rep = make_dyadic_lebesgue_rep(6);
	for (std::size_t i : {0u, 5u, 40u}) {
		auto r = rep->radius(i);
		auto o = oracle::dyadic_ball(i);
		RatInterval prev = r->interval_at(0);
		for (Stage k = 1; k <= 12; ++k) {
			RatInterval j = r->interval_at(k);
			EXPECT_TRUE(prev.contains(j));
			// The true radius q * sqrt(2) lies in every interval.
			EXPECT_TRUE((oracle::QRoot2{j.lo(), 0} <= oracle::QRoot2{0, o.scale}));
			EXPECT_TRUE((oracle::QRoot2{0, o.scale} <= oracle::QRoot2{j.hi(), 0}));
			prev = j;
		}
		std::size_t avoided = 0;
		for (const auto &c : r->certificates()) {
			EXPECT_EQ(c.avoided.has_value(), c.avoided_distance.has_value());
			if (c.avoided_distance) {
				EXPECT_FALSE(c.interval.intersects(*c.avoided_distance));
				EXPECT_TRUE(c.avoided_distance->contains(ui().require_exact(r->center(), *c.avoided)));
				++avoided;
			}
			EXPECT_FALSE(c.sphere_mass_bound.has_value());
		}
		EXPECT_GT(avoided, 0u);
	}
}

TEST(Radii, SearchInsideSeedWithAtoms)
{
	auto mu = dirac(unit_interval(), at(Rational(1, 2)));
	auto r = radius_search(unit_interval(), mu, at(Rational(1, 2)), {Rational(1, 4), Rational(1, 2)}, 10000);
	for (Stage k = 0; k <= 6; ++k) {
		RatInterval j = r->interval_at(k);
		EXPECT_GE(j.lo(), Rational(1, 4));
		EXPECT_LE(j.hi(), Rational(1, 2));
	}
	for (const auto &c : r->certificates()) {
		ASSERT_TRUE(c.sphere_mass_bound.has_value());
		EXPECT_LT(*c.sphere_mass_bound, Rational(1, c.stage + 1));
	}
}

TEST(Radii, StepBudgetIsShared)
{
	auto rep = std::make_shared<BinaryRep>(lebesgue_unit(), dyadic_unit_schedule(4), 3);
	EXPECT_THROW(rep->radius(0)->interval_at(10), BudgetExhausted);
	EXPECT_EQ(rep->budget().used(), 3u);
}

TEST(Encode, BitsMatchExactGeometry)
{
	auto rep = make_dyadic_lebesgue_rep(8);
	for (int trial = 0; trial < 20; ++trial) {
		Rational x = random_point();
		std::string bits = encode(*rep, pt(x), 200, 24);
		for (std::size_t i = 0; i < bits.size(); ++i)
			ASSERT_EQ(bits[i], oracle::dyadic_bit(x, i)) << "x = " << x << " bit " << i;
	}
}

TEST(Encode, CenterHasBitOne)
{
	auto rep = make_dyadic_lebesgue_rep(4);
	for (std::size_t i = 0; i < 20; ++i)
		EXPECT_EQ(encode(*rep, PointDescriptor::ideal(unit_interval(), rep->center(i)), i + 1, 8)[i], '1');
}

TEST(Encode, BoundaryPointNeverResolves)
{
	// Ball 0 is B(0, sqrt(2)/2) and the point sits on its sphere.
	auto rep = make_dyadic_lebesgue_rep(4);
	for (Stage budget : {0u, 4u, 16u}) {
		try {
			encode(*rep, half_root_two(), 1, budget);
			ADD_FAILURE() << "boundary bit resolved";
		} catch (const EncodeExhausted &e) {
			EXPECT_EQ(e.bits, "");
		}
	}
}

TEST(Decode, RoundTrip)
{
	auto rep = make_dyadic_lebesgue_rep(12);
	for (int trial = 0; trial < 10; ++trial) {
		Rational x = random_point();
		std::string bits = encode(*rep, pt(x), rep->size(), 30);
		auto d = decode(*rep, bits, 10, 30);
		EXPECT_EQ(d.witnesses.size(), 11u);
		Rational y = ui().value(d.point.at(10));
		Rational err = y > x ? Rational(y - x) : Rational(x - y);
		EXPECT_LE(err, pow2(-10)) << "x = " << x;
	}
}

TEST(Decode, AllZerosHasNoWitness)
{
	auto rep = make_dyadic_lebesgue_rep(4);
	EXPECT_THROW(decode(*rep, std::string(rep->size(), '0'), 2, 10), BudgetExhausted);
}

TEST(Decode, DisjointSelectionsRejected)
{
	auto rep = make_dyadic_lebesgue_rep(6);
	std::string omega(rep->size(), '0');
	// Level 4 balls around 0 and 1 are far apart.
	omega[dyadic_schedule_size(3)] = '1';
	omega[dyadic_schedule_size(4) - 1] = '1';
	EXPECT_THROW(decode(*rep, omega, 8, 10), InvalidExpansion);
	EXPECT_THROW(decode(*rep, "012", 1, 4), std::invalid_argument);
}

TEST(Decode, CylindersActAsIdentity)
{
	auto rep = std::make_shared<BinaryRep>(bernoulli(Rational(1, 2)), cantor_cylinder_schedule(7), 100000);
	for (int trial = 0; trial < 10; ++trial) {
		IdealIndex w = oracle::uniform(0, 127);
		auto x = PointDescriptor::ideal(cantor_space(), w);
		std::string bits = encode(*rep, x, rep->size(), 12);
		// Length-7 cylinders have radius below 2^-6, enough for precision 5.
		auto d = decode(*rep, bits, 5, 12);
		EXPECT_LE(cantor_space()->require_exact(d.point.at(5), w), pow2(-5));
	}
}

TEST(Cells, MatchExactLengths)
{
	auto rep = make_dyadic_lebesgue_rep(4);
	for (std::size_t len = 1; len <= 4; ++len) {
		for (std::uint64_t code = 0; code < (std::uint64_t(1) << len); ++code) {
			std::string w(len, '0');
			for (std::size_t i = 0; i < len; ++i)
				w[i] = (code >> i & 1) ? '1' : '0';
			RatInterval e = cell_measure(*rep, w, 12);
			auto truth = oracle::dyadic_cell_length(w);
			EXPECT_TRUE((oracle::QRoot2{e.lo(), 0} <= truth)) << w;
			EXPECT_TRUE((truth <= oracle::QRoot2{e.hi(), 0})) << w;
		}
	}
}

TEST(Cells, EmptyWordAndPrefixAdditivity)
{
	auto rep = make_dyadic_lebesgue_rep(4);
	EXPECT_EQ(cell_measure(*rep, "", 3), RatInterval(1, 1));
	for (const std::string w : {"0", "1", "01", "110", "1010"}) {
		for (Stage s : {4u, 10u}) {
			Rational lo0 = cell_lower(*rep, w + "0", s), lo1 = cell_lower(*rep, w + "1", s);
			EXPECT_LE(lo0 + lo1, cell_measure(*rep, w, s).hi()) << w;
		}
	}
	EXPECT_THROW(cell_measure(*rep, std::string(17, '0'), 2), std::invalid_argument);
}

TEST(Digest, RejectsForeignDescriptor)
{
	auto rep = make_dyadic_lebesgue_rep(4);
	EXPECT_NO_THROW(rep->check_digest(measure_digest(*lebesgue_unit())));
	EXPECT_THROW(rep->check_digest(measure_digest(*bernoulli(Rational(1, 3)))), DigestMismatch);
}
