#include "cps/json_io.hpp"

#include <fstream>
#include <sstream>

namespace cps::io {

namespace {

[[noreturn]] void fail(const std::string &field, const std::string &message)
{
	throw DocumentError(field, field + ": " + message);
}

const json &member(const json &j, const char *key, const std::string &where)
{
	if (!j.is_object() || !j.contains(key))
		fail(where, std::string("missing \"") + key + "\"");
	return j.at(key);
}

std::uint64_t parse_natural(const json &j, const std::string &field)
{
	if (j.is_number_unsigned())
		return j.get<std::uint64_t>();
	if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
		return static_cast<std::uint64_t>(j.get<std::int64_t>());
	if (j.is_string()) {
		const std::string &s = j.get_ref<const std::string &>();
		if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
			try {
				return std::stoull(s);
			} catch (const std::out_of_range &) {
			}
		}
	}
	fail(field, "expected a natural number");
}

std::string require_bits(const json &j, const std::string &field)
{
	if (!j.is_string())
		fail(field, "expected a string of 0 and 1");
	std::string s = j.get<std::string>();
	if (s.find_first_not_of("01") != std::string::npos)
		fail(field, "expected a string of 0 and 1");
	return s;
}

const json &array_member(const json &j, const char *key, const std::string &where)
{
	const json &a = member(j, key, where);
	if (!a.is_array())
		fail(where + "." + key, "expected an array");
	return a;
}

// Rational approximations of a + b*sqrt(d) within 2^-(n+3), clamped to [0, 1].
PointDescriptor quadratic_point(SpacePtr space, const Rational &a, const Rational &b, std::uint64_t d)
{
	const auto *ui = dynamic_cast<const UnitInterval *>(space.get());
	if (!ui)
		fail("point.quadratic", "quadratic points live on the unit interval");
	Rational lo = a, hi = a;
	// Coarse check that the value lies in [0, 1].
	{
		Integer bn = abs(b.get_num());
		Integer root2 = bn * bn * Integer(std::to_string(d), 10) * (Integer(1) << 40);
		Integer r;
		mpz_sqrt(r.get_mpz_t(), root2.get_mpz_t());
		Rational t(r, b.get_den() * (Integer(1) << 20));
		t.canonicalize();
		Rational slack(1, b.get_den() * (Integer(1) << 20));
		slack.canonicalize();
		if (b >= 0) {
			lo = a + t;
			hi = a + t + slack;
		} else {
			lo = a - t - slack;
			hi = a - t;
		}
		if (hi < 0 || lo > 1)
			fail("point.quadratic", "value lies outside [0, 1]");
	}
	auto stream = [ui, a, b, d](Stage n) {
		unsigned k = n + 3;
		Integer bn = abs(b.get_num());
		Integer radicand = bn * bn * Integer(std::to_string(d), 10) * (Integer(1) << (2 * k));
		Integer r;
		mpz_sqrt(r.get_mpz_t(), radicand.get_mpz_t());
		Rational t(r, b.get_den() * (Integer(1) << k));
		t.canonicalize();
		Rational v = b >= 0 ? Rational(a + t) : Rational(a - t);
		if (v < 0)
			v = 0;
		if (v > 1)
			v = 1;
		return ui->index_of(v);
	};
	return PointDescriptor::from_stream(std::move(space), stream);
}

class EmptyLevels {
public:
	explicit EmptyLevels(SpacePtr space) : space_(std::move(space)) {}
	REOpenSet operator()(Stage) const { return REOpenSet::empty(space_); }

private:
	SpacePtr space_;
};

} // namespace

json load_document(const std::string &text_or_path)
{
	std::string text;
	auto first = text_or_path.find_first_not_of(" \t\r\n");
	if (first != std::string::npos &&
	    (text_or_path[first] == '{' || text_or_path[first] == '[' || text_or_path[first] == '"')) {
		text = text_or_path;
	} else {
		std::ifstream in(text_or_path);
		if (!in)
			fail("document", "cannot read " + text_or_path);
		std::ostringstream ss;
		ss << in.rdbuf();
		text = ss.str();
	}
	try {
		return json::parse(text);
	} catch (const json::parse_error &e) {
		fail("document", std::string("invalid JSON: ") + e.what());
	}
}

json rational_json(const Rational &q) { return to_string(q); }

Rational parse_rational_json(const json &j, const std::string &field)
{
	if (j.is_number_integer())
		return Rational(Integer(std::to_string(j.get<std::int64_t>()), 10));
	if (j.is_string()) {
		try {
			return parse_rational(j.get<std::string>());
		} catch (const std::invalid_argument &e) {
			fail(field, e.what());
		}
	}
	fail(field, "expected a rational string \"p/q\"");
}

SpacePtr parse_space(const json &j)
{
	if (j.is_object() && j.contains("space"))
		return parse_space(j.at("space"));
	if (j.is_string()) {
		const std::string &s = j.get_ref<const std::string &>();
		if (s == "unit_interval")
			return unit_interval();
		if (s == "cantor")
			return cantor_space();
		fail("space", "unknown space \"" + s + "\"");
	}
	if (j.is_object() && j.contains("product")) {
		const json &p = j.at("product");
		if (!p.is_array() || p.size() != 2)
			fail("space.product", "expected two component spaces");
		return product_space(parse_space(p[0]), parse_space(p[1]));
	}
	fail("space", "expected \"unit_interval\", \"cantor\" or {\"product\": [a, b]}");
}

json space_json(const MetricSpace &space)
{
	if (const auto *p = dynamic_cast<const ProductSpace *>(&space))
		return {{"product", {space_json(*p->first()), space_json(*p->second())}}};
	return space.kind();
}

IdealIndex parse_ideal(const MetricSpace &space, const json &j)
{
	IdealIndex i = 0;
	if (j.is_number() || j.is_string()) {
		i = parse_natural(j, "point");
	} else if (j.is_object() && j.contains("index")) {
		i = parse_natural(j.at("index"), "point.index");
	} else if (j.is_object() && j.contains("rational")) {
		const auto *ui = dynamic_cast<const UnitInterval *>(&space);
		if (!ui)
			fail("point.rational", "rational points need the unit interval");
		Rational x = parse_rational_json(j.at("rational"), "point.rational");
		try {
			i = ui->index_of(x);
		} catch (const std::exception &e) {
			fail("point.rational", e.what());
		}
	} else if (j.is_object() && j.contains("word")) {
		if (space.kind() != "cantor")
			fail("point.word", "words need Cantor space");
		std::string w = require_bits(j.at("word"), "point.word");
		if (w.size() > 64)
			fail("point.word", "ideal words are limited to 64 bits");
		i = CantorSpace::index_of(w);
	} else if (j.is_object() && j.contains("pair")) {
		const auto *p = dynamic_cast<const ProductSpace *>(&space);
		const json &pr = j.at("pair");
		if (!p || !pr.is_array() || pr.size() != 2)
			fail("point.pair", "pairs need a product space and two components");
		try {
			i = p->pair(parse_ideal(*p->first(), pr[0]), parse_ideal(*p->second(), pr[1]));
		} catch (const InvalidIndex &e) {
			fail("point.pair", e.what());
		}
	} else {
		fail("point", "expected an ideal point");
	}
	if (!space.valid_index(i))
		fail("point", "index " + std::to_string(i) + " is not an ideal point of " + space.kind());
	return i;
}

json ideal_json(const MetricSpace &space, IdealIndex i)
{
	json out{{"index", i}};
	if (const auto *ui = dynamic_cast<const UnitInterval *>(&space))
		out["rational"] = to_string(ui->value(i));
	else if (space.kind() == "cantor") {
		unsigned len = 1;
		while (len < 64 && (i >> len) != 0)
			++len;
		out["word"] = CantorSpace::word(i, len);
	}
	return out;
}

PointDescriptor parse_point(SpacePtr space, const json &j)
{
	if (j.is_object() && j.contains("ideal"))
		return PointDescriptor::ideal(space, parse_ideal(*space, j.at("ideal")));
	if (j.is_object() && j.contains("ideal_stream")) {
		const json &s = array_member(j, "ideal_stream", "point");
		if (s.empty())
			fail("point.ideal_stream", "stream prefix is empty");
		std::vector<IdealIndex> prefix;
		for (const auto &e : s)
			prefix.push_back(parse_ideal(*space, e));
		std::size_t from = prefix.size() - 1;
		if (j.contains("constant_from"))
			from = parse_natural(j.at("constant_from"), "point.constant_from");
		return PointDescriptor::from_prefix(space, std::move(prefix), from);
	}
	if (j.is_object() && j.contains("quadratic")) {
		const json &q = j.at("quadratic");
		Rational a = parse_rational_json(member(q, "a", "point.quadratic"), "point.quadratic.a");
		Rational b = parse_rational_json(member(q, "b", "point.quadratic"), "point.quadratic.b");
		std::uint64_t d = parse_natural(member(q, "d", "point.quadratic"), "point.quadratic.d");
		return quadratic_point(std::move(space), a, b, d);
	}
	return PointDescriptor::ideal(space, parse_ideal(*space, j));
}

IdealMeasure parse_ideal_measure(const MetricSpace &space, const json &j)
{
	const json &atoms = array_member(j, "atoms", "measure");
	std::vector<Atom> out;
	for (const auto &a : atoms) {
		IdealIndex p = parse_ideal(space, member(a, "point", "measure.atoms"));
		Rational w = parse_rational_json(member(a, "weight", "measure.atoms"), "measure.atoms.weight");
		out.push_back({p, w});
	}
	try {
		return IdealMeasure(std::move(out));
	} catch (const InvalidParameter &e) {
		fail("measure.atoms", e.what());
	}
}

json ideal_measure_json(const MetricSpace &space, const IdealMeasure &mu)
{
	json atoms = json::array();
	for (const auto &a : mu.atoms())
		atoms.push_back({{"point", ideal_json(space, a.point)}, {"weight", to_string(a.weight)}});
	return {{"atoms", atoms}};
}

MeasurePtr parse_measure(SpacePtr space, const json &j)
{
	if (j.is_object() && j.contains("space"))
		space = parse_space(j.at("space"));
	if (j.is_object() && j.contains("builtin")) {
		const json &b = j.at("builtin");
		std::string name = b.is_string() ? b.get<std::string>() : std::string();
		if (name == "lebesgue_unit")
			return lebesgue_unit();
		if (name == "bernoulli") {
			try {
				return bernoulli(parse_rational_json(member(j, "p", "measure"), "measure.p"));
			} catch (const InvalidParameter &e) {
				fail("measure.p", e.what());
			}
		}
		if (name == "dirac") {
			if (!space)
				fail("measure", "dirac needs a space");
			return dirac(space, parse_ideal(*space, member(j, "point", "measure")));
		}
		fail("measure.builtin", "unknown builtin measure");
	}
	if (j.is_object() && j.contains("convex_combo")) {
		std::vector<std::pair<Rational, MeasurePtr>> parts;
		for (const auto &p : array_member(j, "convex_combo", "measure")) {
			Rational w = parse_rational_json(member(p, "weight", "measure.convex_combo"),
			                                 "measure.convex_combo.weight");
			parts.emplace_back(w, parse_measure(space, member(p, "measure", "measure.convex_combo")));
		}
		try {
			return convex_combo(std::move(parts));
		} catch (const std::invalid_argument &e) {
			fail("measure.convex_combo", e.what());
		}
	}
	if (!space)
		fail("space", "measure document needs a space");
	if (j.is_object() && j.contains("stages")) {
		std::vector<IdealMeasure> stages;
		for (const auto &s : array_member(j, "stages", "measure"))
			stages.push_back(parse_ideal_measure(*space, s));
		if (stages.empty())
			fail("measure.stages", "no stages given");
		return measure_from_stages(space, std::move(stages));
	}
	if (j.is_object() && j.contains("atoms"))
		return measure_from_stages(space, {parse_ideal_measure(*space, j)});
	fail("measure", "expected atoms, stages, builtin or convex_combo");
}

namespace {

std::vector<IdealBall> parse_balls(const MetricSpace &space, const json &list, const std::string &field)
{
	if (!list.is_array())
		fail(field, "expected an array of balls");
	std::vector<IdealBall> out;
	for (const auto &b : list) {
		IdealIndex c = parse_ideal(space, member(b, "center", field));
		Rational r = parse_rational_json(member(b, "radius", field), field + ".radius");
		if (r <= 0)
			fail(field + ".radius", "radius must be positive");
		out.push_back({c, r});
	}
	return out;
}

} // namespace

REOpenSet parse_set(SpacePtr space, const json &j)
{
	if (!j.is_object())
		fail("set", "expected an object");
	if (j.contains("empty"))
		return REOpenSet::empty(space);
	if (j.contains("balls"))
		return REOpenSet::from_balls(space, parse_balls(*space, j.at("balls"), "set.balls"));
	if (j.contains("sequence"))
		return REOpenSet::from_sequence(space, parse_balls(*space, j.at("sequence"), "set.sequence"));
	if (j.contains("union") || j.contains("intersection")) {
		bool uni = j.contains("union");
		const json &parts = uni ? j.at("union") : j.at("intersection");
		if (!parts.is_array() || parts.empty())
			fail(uni ? "set.union" : "set.intersection", "expected a nonempty array of sets");
		REOpenSet acc = parse_set(space, parts[0]);
		for (std::size_t i = 1; i < parts.size(); ++i) {
			REOpenSet next = parse_set(space, parts[i]);
			acc = uni ? reopen_union(acc, next) : reopen_intersection(acc, next);
		}
		return acc;
	}
	fail("set", "expected balls, sequence, union, intersection or empty");
}

LscFunction parse_function(SpacePtr space, const json &j)
{
	if (!j.is_object())
		fail("function", "expected an object");
	if (j.contains("zero"))
		return LscFunction::zero(space);
	if (j.contains("indicator"))
		return indicator(parse_set(space, j.at("indicator")));
	if (j.contains("scale")) {
		const json &s = j.at("scale");
		Rational w = parse_rational_json(member(s, "factor", "function.scale"), "function.scale.factor");
		if (w < 0)
			fail("function.scale.factor", "factor must be nonnegative");
		return lsc_scale(parse_function(space, member(s, "f", "function.scale")), w);
	}
	if (j.contains("basics")) {
		if (j.contains("combine") && j.at("combine") != "sup")
			fail("function.combine", "basics combine only by \"sup\"");
		std::vector<BasicFunction> basics;
		for (const auto &b : array_member(j, "basics", "function")) {
			if (b.contains("step")) {
				const json &s = b.at("step");
				IdealIndex c = parse_ideal(*space, member(s, "center", "function.step"));
				Rational r = parse_rational_json(member(s, "radius", "function.step"), "function.step.radius");
				Rational v = parse_rational_json(member(s, "value", "function.step"), "function.step.value");
				basics.push_back(StepFunction{{c, r}, v});
			} else if (b.contains("hat")) {
				const json &h = b.at("hat");
				HatFunction hat;
				hat.center = parse_ideal(*space, member(h, "center", "function.hat"));
				hat.inner_radius = parse_rational_json(member(h, "inner_radius", "function.hat"),
				                                       "function.hat.inner_radius");
				hat.slope_width = parse_rational_json(member(h, "slope_width", "function.hat"),
				                                      "function.hat.slope_width");
				hat.value = parse_rational_json(member(h, "value", "function.hat"), "function.hat.value");
				basics.push_back(hat);
			} else {
				fail("function.basics", "expected step or hat");
			}
		}
		try {
			return LscFunction::from_basics(space, std::move(basics));
		} catch (const std::invalid_argument &e) {
			fail("function.basics", e.what());
		}
	}
	if (j.contains("combine")) {
		const json &c = j.at("combine");
		if (c.is_object() && c.contains("weighted_sum")) {
			std::vector<std::pair<Rational, LscFunction>> terms;
			for (const auto &t : array_member(c, "weighted_sum", "function.combine")) {
				Rational w = parse_rational_json(member(t, "weight", "function.combine.weighted_sum"),
				                                 "function.combine.weighted_sum.weight");
				if (w < 0)
					fail("function.combine.weighted_sum.weight", "weights must be nonnegative");
				terms.emplace_back(w, parse_function(space, member(t, "f", "function.combine.weighted_sum")));
			}
			return lsc_sum(std::move(terms));
		}
		if (c.is_object() && c.contains("sup")) {
			std::vector<LscFunction> fs;
			for (const auto &f : array_member(c, "sup", "function.combine"))
				fs.push_back(parse_function(space, f));
			return lsc_sup(std::move(fs));
		}
	}
	fail("function", "expected basics, combine, scale, indicator or zero");
}

RepPtr parse_rep(const json &j)
{
	SpacePtr space = parse_space(member(j, "space", "rep"));
	MeasurePtr mu = parse_measure(space, member(j, "measure", "rep"));
	if (mu->space()->kind() != space->kind())
		fail("rep.measure", "measure lives on a different space");
	std::uint64_t budget = 1'000'000;
	if (j.contains("budget"))
		budget = parse_natural(j.at("budget"), "rep.budget");
	const json &basis = member(j, "basis", "rep");
	BasisSchedule schedule;
	if (basis.is_object()) {
		std::string kind = basis.value("builtin", std::string());
		unsigned levels = static_cast<unsigned>(parse_natural(member(basis, "levels", "rep.basis"), "rep.basis.levels"));
		try {
			if (kind == "dyadic") {
				if (space->kind() != "unit_interval")
					fail("rep.basis", "the dyadic basis lives on the unit interval");
				schedule = dyadic_unit_schedule(levels);
			} else if (kind == "cylinders") {
				if (space->kind() != "cantor")
					fail("rep.basis", "the cylinder basis lives on Cantor space");
				schedule = cantor_cylinder_schedule(levels);
			} else {
				fail("rep.basis.builtin", "expected \"dyadic\" or \"cylinders\"");
			}
		} catch (const InvalidParameter &e) {
			fail("rep.basis.levels", e.what());
		}
	} else if (basis.is_array()) {
		std::vector<BasisEntry> entries;
		for (const auto &e : basis) {
			IdealIndex c = parse_ideal(*space, member(e, "center", "rep.basis"));
			if (e.contains("sqrt2_times")) {
				Rational q = parse_rational_json(e.at("sqrt2_times"), "rep.basis.sqrt2_times");
				if (q <= 0)
					fail("rep.basis.sqrt2_times", "scale must be positive");
				entries.push_back({c, QuadraticRadius{q}});
			} else {
				const json &seed = member(e, "seed", "rep.basis");
				if (!seed.is_array() || seed.size() != 2)
					fail("rep.basis.seed", "expected [lo, hi]");
				Rational lo = parse_rational_json(seed[0], "rep.basis.seed");
				Rational hi = parse_rational_json(seed[1], "rep.basis.seed");
				if (lo <= 0 || hi <= lo)
					fail("rep.basis.seed", "seed must satisfy 0 < lo < hi");
				entries.push_back({c, SearchRadius{RatInterval(lo, hi)}});
			}
		}
		if (entries.empty())
			fail("rep.basis", "basis is empty");
		schedule = explicit_schedule(std::move(entries));
	} else {
		fail("rep.basis", "expected a builtin schedule or a list of balls");
	}
	auto rep = std::make_shared<BinaryRep>(mu, std::move(schedule), budget);
	if (j.contains("descriptor_digest")) {
		const json &d = j.at("descriptor_digest");
		if (!d.is_string())
			fail("rep.descriptor_digest", "expected a hex string");
		try {
			rep->check_digest(d.get<std::string>());
		} catch (const DigestMismatch &e) {
			fail("rep.descriptor_digest", e.what());
		}
	}
	return rep;
}

json rep_json(const BinaryRep &rep, std::size_t balls, Stage through)
{
	json radii = json::array();
	for (std::size_t i = 0; i < std::min(balls, rep.size()); ++i) {
		auto r = rep.radius(i);
		json stages = json::array();
		for (Stage k = 0; k <= through; ++k) {
			RatInterval j = r->interval_at(k);
			stages.push_back({to_string(j.lo()), to_string(j.hi())});
		}
		radii.push_back({{"center", ideal_json(*rep.space(), r->center())}, {"stages", stages}});
	}
	return {{"space", space_json(*rep.space())},
	        {"basis", rep.schedule().description},
	        {"descriptor_digest", rep.digest()},
	        {"radii", radii},
	        {"certification_steps", rep.budget().used()}};
}

TestDoc parse_test(MeasurePtr measure, const json &j)
{
	std::string kind = j.is_object() ? j.value("kind", std::string()) : std::string();
	SpacePtr space = measure->space();
	if (kind == "ml") {
		if (j.contains("builtin")) {
			if (j.at("builtin") != "zero_prefix")
				fail("test.builtin", "expected \"zero_prefix\"");
			try {
				return zero_prefix_test(measure);
			} catch (const std::invalid_argument &e) {
				fail("test.builtin", e.what());
			}
		}
		std::vector<REOpenSet> levels;
		for (const auto &l : array_member(j, "levels", "test"))
			levels.push_back(parse_set(space, l));
		Certificate cert = Certificate::None;
		if (j.contains("certificate")) {
			try {
				cert = parse_certificate(j.at("certificate").get<std::string>());
			} catch (const std::exception &e) {
				fail("test.certificate", e.what());
			}
		}
		auto shared = std::make_shared<const std::vector<REOpenSet>>(std::move(levels));
		EmptyLevels empty(space);
		return MLTest(
			measure, [shared, empty](Stage n) { return n < shared->size() ? (*shared)[n] : empty(n); }, cert);
	}
	if (kind == "integral") {
		LscFunction f = parse_function(space, member(j, "f", "test"));
		Certificate cert = Certificate::Asserted;
		if (j.contains("certificate")) {
			try {
				cert = parse_certificate(j.at("certificate").get<std::string>());
			} catch (const std::exception &e) {
				fail("test.certificate", e.what());
			}
		}
		if (cert == Certificate::ByConstruction || cert == Certificate::CylinderExact)
			fail("test.certificate", "integral tests from documents can only be asserted");
		return IntegralTest{f, measure, cert};
	}
	fail("test.kind", "expected \"ml\" or \"integral\"");
}

} // namespace cps::io
