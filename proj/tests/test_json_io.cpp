#include <gtest/gtest.h>

#include "cps/json_io.hpp"

using namespace cps;
using namespace cps::io;

namespace {

const UnitInterval &ui() { return static_cast<const UnitInterval &>(*unit_interval()); }
IdealIndex at(Rational x)
{
	x.canonicalize();
	return ui().index_of(x);
}

} // namespace

TEST(Documents, InlineAndRationals)
{
	EXPECT_EQ(load_document(R"({"a": 1})")["a"], 1);
	EXPECT_EQ(rational_json(Rational(3, 4)), "3/4");
	EXPECT_EQ(parse_rational_json("6/8", "w"), Rational(3, 4));
	EXPECT_EQ(parse_rational_json(2, "w"), Rational(2));
	try {
		parse_rational_json(0.5, "weight");
		FAIL();
	} catch (const DocumentError &e) {
		EXPECT_EQ(e.field, "weight");
	}
	EXPECT_THROW(load_document("/nonexistent/doc.json"), DocumentError);
}

TEST(Documents, Spaces)
{
	EXPECT_EQ(parse_space("unit_interval")->kind(), "unit_interval");
	EXPECT_EQ(parse_space("cantor")->kind(), "cantor");
	auto p = parse_space(json::parse(R"({"product": ["unit_interval", "cantor"]})"));
	EXPECT_EQ(space_json(*p), json::parse(R"({"product": ["unit_interval", "cantor"]})"));
	EXPECT_THROW(parse_space("sphere"), DocumentError);
}

TEST(Documents, IdealForms)
{
	EXPECT_EQ(parse_ideal(ui(), json::parse(R"({"rational": "1/2"})")), 8u);
	EXPECT_EQ(parse_ideal(ui(), 8), 8u);
	EXPECT_EQ(parse_ideal(ui(), json::parse(R"({"index": 4})")), 4u);
	EXPECT_THROW(parse_ideal(ui(), 12), DocumentError);
	EXPECT_EQ(parse_ideal(*cantor_space(), json::parse(R"({"word": "01"})")), 2u);
	EXPECT_EQ(ideal_json(ui(), 8), json::parse(R"({"index": 8, "rational": "1/2"})"));
}

TEST(Documents, Points)
{
	auto x = parse_point(unit_interval(), json::parse(R"({"quadratic": {"a": "0", "b": "1/2", "d": 2}})"));
	for (Stage n = 0; n <= 12; ++n) {
		Rational v = ui().value(x.at(n));
		// |v - sqrt(2)/2| small: compare squares against 1/2.
		Rational err = v * v - Rational(1, 2);
		if (err < 0)
			err = -err;
		EXPECT_LE(err, pow2(-static_cast<int>(n) - 1));
	}
	auto s = parse_point(unit_interval(),
	                     json::parse(R"({"ideal_stream": [{"rational": "1/2"}, {"rational": "1/4"}], "constant_from": 1})"));
	EXPECT_EQ(s.at(5), at(Rational(1, 4)));
}

TEST(Documents, MeasuresRoundTrip)
{
	auto j = json::parse(R"({"atoms": [{"point": {"rational": "0"}, "weight": "1/2"},
	                                    {"point": {"rational": "1"}, "weight": "1/2"}]})");
	auto m = parse_ideal_measure(ui(), j);
	EXPECT_EQ(m.size(), 2u);
	EXPECT_EQ(parse_ideal_measure(ui(), ideal_measure_json(ui(), m)), m);
	auto bad = json::parse(R"({"atoms": [{"point": {"rational": "0"}, "weight": "1/3"}]})");
	EXPECT_THROW(parse_ideal_measure(ui(), bad), DocumentError);
}

TEST(Documents, Builtins)
{
	auto b = parse_measure(nullptr, json::parse(R"({"builtin": "bernoulli", "p": "1/3"})"));
	EXPECT_EQ(measure_digest(*b), measure_digest(*bernoulli(Rational(1, 3))));
	auto l = parse_measure(nullptr, json::parse(R"({"builtin": "lebesgue_unit"})"));
	EXPECT_EQ(measure_digest(*l), measure_digest(*lebesgue_unit()));
	EXPECT_THROW(parse_measure(nullptr, json::parse(R"({"builtin": "gaussian"})")), DocumentError);
}

TEST(Documents, SetsAndFunctions)
{
	auto u = parse_set(unit_interval(), json::parse(R"({"balls": [{"center": {"rational": "1/2"}, "radius": "1/4"}]})"));
	EXPECT_TRUE(u.contains_at(PointDescriptor::ideal(unit_interval(), at(Rational(5, 8))), 4));
	auto f = parse_function(unit_interval(), json::parse(R"({"basics": [
	    {"step": {"center": {"rational": "1/4"}, "radius": "1/4", "value": "1"}},
	    {"step": {"center": {"rational": "1/2"}, "radius": "1/4", "value": "2"}}], "combine": "sup"})"));
	EXPECT_EQ(f.eval_lower(PointDescriptor::ideal(unit_interval(), at(Rational(3, 8))), 6), Rational(2));
	EXPECT_THROW(parse_function(unit_interval(), json::parse(R"({"basics": [{"ramp": {}}]})")), DocumentError);
}

TEST(Documents, RepsAndDigests)
{
	auto rep = parse_rep(json::parse(R"({"space": "unit_interval", "measure": {"builtin": "lebesgue_unit"},
	                                     "basis": {"builtin": "dyadic", "levels": 3}, "budget": 1000})"));
	EXPECT_EQ(rep->size(), dyadic_schedule_size(3));
	auto doc = rep_json(*rep, 3, 2);
	EXPECT_EQ(doc["descriptor_digest"], rep->digest());
	auto wrong = json::parse(R"({"space": "unit_interval", "measure": {"builtin": "lebesgue_unit"},
	                             "basis": {"builtin": "dyadic", "levels": 3}, "budget": 1000,
	                             "descriptor_digest": "0000000000000000"})");
	try {
		parse_rep(wrong);
		FAIL();
	} catch (const DocumentError &e) {
		EXPECT_EQ(e.field, "rep.descriptor_digest");
	}
}

TEST(Documents, Tests)
{
	auto mu = bernoulli(Rational(1, 2));
	auto t = parse_test(mu, json::parse(R"({"kind": "ml", "builtin": "zero_prefix"})"));
	ASSERT_TRUE(std::holds_alternative<MLTest>(t));
	EXPECT_EQ(std::get<MLTest>(t).certificate(), Certificate::CylinderExact);
	auto lv = parse_test(mu, json::parse(R"({"kind": "ml", "certificate": "asserted",
	                                          "levels": [{"balls": [{"center": {"word": "0"}, "radius": "1/2"}]}]})"));
	ASSERT_TRUE(std::holds_alternative<MLTest>(lv));
	EXPECT_TRUE(std::get<MLTest>(lv).level(3).is_empty_set());
	EXPECT_THROW(parse_test(mu, json::parse(R"({"kind": "integral", "certificate": "by_construction",
	                                             "f": {"zero": true}})")),
	             DocumentError);
}
