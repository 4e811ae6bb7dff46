// Command-line front end: loads JSON documents, runs one staged query and
// prints a deterministic JSON result.
//
// Exit codes: 0 success, 1 malformed input or failed precondition,
// 2 budget exhausted (partial results are printed).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cps/json_io.hpp"

using namespace cps;
using cps::io::json;

namespace {

struct Options {
	std::string space;
	std::vector<std::string> measures;
	std::string set;
	std::string function;
	std::string minus;
	std::string bound;
	std::string test;
	std::string point;
	std::string rep;
	std::string word;
	std::string kind = "both";
	std::string direction = "ml_to_integral";
	Stage stage = 12;
	Stage budget = 20;
	std::size_t bits = 16;
	unsigned precision = 4;
	unsigned levels = 4;
	unsigned grid = 32;
	std::size_t cap = kDefaultSupportCap;
	bool approx = false;
};

class Output {
public:
	explicit Output(bool approx) : approx_(approx) {}

	void put(json &obj, const std::string &key, const Rational &q) const
	{
		obj[key] = to_string(q);
		if (approx_)
			obj[key + "_approx"] = approx_decimal(q);
	}

private:
	bool approx_;
};

void emit(const json &j) { std::cout << j.dump(2) << "\n"; }

int fail(const std::string &error, const std::string &message, const std::string &field = "")
{
	json j{{"status", "error"}, {"error", error}, {"message", message}};
	if (!field.empty())
		j["field"] = field;
	emit(j);
	return 1;
}

// A bare name such as unit_interval is accepted alongside documents.
SpacePtr load_space(const std::string &arg)
{
	if (arg == "unit_interval" || arg == "cantor")
		return io::parse_space(json(arg));
	return io::parse_space(io::load_document(arg));
}

SpacePtr resolve_space(const Options &o, const std::vector<json> &docs)
{
	if (!o.space.empty())
		return load_space(o.space);
	for (const auto &d : docs)
		if (d.is_object() && d.contains("space"))
			return io::parse_space(d.at("space"));
	return nullptr;
}

MeasurePtr load_measure(const Options &o, std::size_t which = 0)
{
	if (o.measures.size() <= which)
		throw io::DocumentError("measure", "measure: missing --measure");
	json doc = io::load_document(o.measures[which]);
	SpacePtr space = resolve_space(o, {doc});
	return io::parse_measure(space, doc);
}

IdealMeasure load_ideal_measure(const Options &o, const MetricSpace &space, std::size_t which)
{
	if (o.measures.size() <= which)
		throw io::DocumentError("measure", "measure: dist needs two --measure documents");
	return io::parse_ideal_measure(space, io::load_document(o.measures[which]));
}

json point_json(const MetricSpace &space, const std::vector<IdealIndex> &stream)
{
	json s = json::array();
	for (IdealIndex i : stream)
		s.push_back(io::ideal_json(space, i));
	return {{"ideal_stream", s}, {"constant_from", stream.empty() ? 0 : stream.size() - 1}};
}

int cmd_dist(const Options &o, const Output &out)
{
	if (o.kind != "prokhorov" && o.kind != "wasserstein" && o.kind != "both")
		return fail("invalid_argument", "kind must be prokhorov, wasserstein or both", "kind");
	if (o.space.empty())
		return fail("invalid_document", "space: dist needs --space", "space");
	SpacePtr space = load_space(o.space);
	IdealMeasure mu = load_ideal_measure(o, *space, 0);
	IdealMeasure nu = load_ideal_measure(o, *space, 1);
	json result;
	auto prokhorov = [&] {
		json p;
		out.put(p, "value", prokhorov_exact(mu, nu, *space, o.cap));
		return p;
	};
	auto wasserstein = [&] {
		WassersteinResult w = wasserstein_exact(mu, nu, *space, o.cap);
		json p;
		out.put(p, "value", w.value);
		json plan = json::array();
		for (std::size_t i = 0; i < w.plan.sources.size(); ++i) {
			for (std::size_t k = 0; k < w.plan.targets.size(); ++k) {
				if (w.plan.flows[i][k] == 0)
					continue;
				json e{{"from", io::ideal_json(*space, w.plan.sources[i])},
				       {"to", io::ideal_json(*space, w.plan.targets[k])}};
				out.put(e, "mass", w.plan.flows[i][k]);
				plan.push_back(e);
			}
		}
		p["plan"] = plan;
		return p;
	};
	if (o.kind == "prokhorov") {
		result = prokhorov();
		result["kind"] = "prokhorov";
	} else if (o.kind == "wasserstein") {
		result = wasserstein();
		result["kind"] = "wasserstein";
	} else {
		result["prokhorov"] = prokhorov();
		result["wasserstein"] = wasserstein();
	}
	result["status"] = "ok";
	emit(result);
	return 0;
}

int cmd_val(const Options &o, const Output &out)
{
	MeasurePtr mu = load_measure(o);
	REOpenSet u = io::parse_set(mu->space(), io::load_document(o.set));
	json r{{"status", "ok"}, {"stage", o.stage}};
	out.put(r, "lower", valuation_lower(*mu, u, o.stage));
	emit(r);
	return 0;
}

int cmd_integrate(const Options &o, const Output &out)
{
	MeasurePtr mu = load_measure(o);
	LscFunction f = io::parse_function(mu->space(), io::load_document(o.function));
	json r{{"status", "ok"}, {"stage", o.stage}};
	if (!o.minus.empty()) {
		if (o.bound.empty())
			return fail("invalid_argument", "--minus needs --bound", "bound");
		LscFunction g = io::parse_function(mu->space(), io::load_document(o.minus));
		Rational m = parse_rational(o.bound);
		RatInterval iv = integrate_bounded(*mu, f, g, m, o.stage);
		out.put(r, "lower", iv.lo());
		out.put(r, "upper", iv.hi());
	} else {
		out.put(r, "lower", integrate_lower(*mu, f, o.stage));
	}
	emit(r);
	return 0;
}

int cmd_encode(const Options &o, const Output &)
{
	RepPtr rep = io::parse_rep(io::load_document(o.rep));
	PointDescriptor x = io::parse_point(rep->space(), io::load_document(o.point));
	try {
		std::string bits = encode(*rep, x, o.bits, o.budget);
		emit({{"status", "ok"}, {"bits", bits}});
		return 0;
	} catch (const EncodeExhausted &e) {
		emit({{"status", "budget_exhausted"}, {"bits", e.bits}, {"message", e.what()}});
		return 2;
	}
}

int cmd_decode(const Options &o, const Output &out)
{
	RepPtr rep = io::parse_rep(io::load_document(o.rep));
	DecodeResult d = decode(*rep, o.word, o.precision, o.budget);
	std::vector<IdealIndex> stream;
	for (std::size_t w : d.witnesses)
		stream.push_back(rep->center(w));
	json r{{"status", "ok"}, {"witnesses", d.witnesses}, {"point", point_json(*rep->space(), stream)}};
	out.put(r, "within", pow2(-static_cast<int>(o.precision)));
	emit(r);
	return 0;
}

int cmd_cellmeasure(const Options &o, const Output &out)
{
	RepPtr rep = io::parse_rep(io::load_document(o.rep));
	if (o.word.find_first_not_of("01") != std::string::npos)
		return fail("invalid_argument", "word must consist of 0 and 1", "word");
	RatInterval m = cell_measure(*rep, o.word, o.stage);
	json r{{"status", "ok"}, {"word", o.word}, {"stage", o.stage}};
	out.put(r, "lower", m.lo());
	out.put(r, "upper", m.hi());
	emit(r);
	return 0;
}

io::TestDoc load_test(const Options &o, MeasurePtr mu)
{
	if (o.test.empty())
		throw io::DocumentError("test", "test: missing --test");
	return io::parse_test(std::move(mu), io::load_document(o.test));
}

int cmd_testconv(const Options &o, const Output &out)
{
	MeasurePtr mu = load_measure(o);
	io::TestDoc doc = load_test(o, mu);
	std::optional<PointDescriptor> x;
	if (!o.point.empty())
		x = io::parse_point(mu->space(), io::load_document(o.point));
	json r{{"status", "ok"}, {"direction", o.direction}, {"stage", o.stage}};
	if (o.direction == "ml_to_integral") {
		const auto *u = std::get_if<MLTest>(&doc);
		if (!u)
			return fail("invalid_document", "ml_to_integral needs an ml test", "test.kind");
		IntegralTest t = ml_to_integral(*u);
		r["certificate"] = certificate_name(t.certificate);
		out.put(r, "integral_lower", monitored_integral(t, o.stage));
		if (x)
			out.put(r, "value_lower", t.f.eval_lower(*x, o.stage));
	} else if (o.direction == "integral_to_ml") {
		const auto *t = std::get_if<IntegralTest>(&doc);
		if (!t)
			return fail("invalid_document", "integral_to_ml needs an integral test", "test.kind");
		MLTest u = integral_to_ml(*t, o.budget);
		r["certificate"] = certificate_name(u.certificate());
		json levels = json::array();
		for (Stage n = 0; n < o.levels; ++n) {
			REOpenSet level = u.level(n);
			json l{{"level", n}};
			out.put(l, "mass_lower", valuation_lower(*mu, level, o.stage));
			if (x)
				l["contains"] = level.contains_at(*x, o.stage);
			levels.push_back(l);
		}
		r["levels"] = levels;
	} else {
		return fail("invalid_argument", "direction must be ml_to_integral or integral_to_ml", "direction");
	}
	emit(r);
	return 0;
}

int cmd_deficiency(const Options &o, const Output &out)
{
	MeasurePtr mu = load_measure(o);
	io::TestDoc doc = load_test(o, mu);
	IntegralTest t = std::holds_alternative<MLTest>(doc) ? ml_to_integral(std::get<MLTest>(doc))
	                                                     : std::get<IntegralTest>(doc);
	if (o.point.empty())
		return fail("invalid_document", "point: missing --point", "point");
	PointDescriptor x = io::parse_point(mu->space(), io::load_document(o.point));
	DeficiencyReport d = deficiency(x, t, o.stage);
	json r{{"status", "ok"}, {"stage", d.stage}};
	out.put(r, "lower_bound", d.lower_bound);
	if (d.nonrandom_level) {
		r["nonrandom_level"] = *d.nonrandom_level;
		r["verdict"] = "non-random at level " + std::to_string(*d.nonrandom_level);
	} else {
		r["nonrandom_level"] = nullptr;
		r["verdict"] = "no evidence";
	}
	emit(r);
	return 0;
}

int cmd_checkbounds(const Options &o, const Output &out)
{
	if (o.space.empty())
		return fail("invalid_document", "space: checkbounds needs --space", "space");
	SpacePtr space = load_space(o.space);
	IdealMeasure mu = load_ideal_measure(o, *space, 0);
	IdealMeasure nu = load_ideal_measure(o, *space, 1);
	EquivalenceReport rep = check_equivalence_bounds(mu, nu, *space, o.grid);
	json r{{"status", "ok"},
	       {"wasserstein_bound", rep.wasserstein_bound},
	       {"prokhorov_bound", rep.prokhorov_bound},
	       {"checked", rep.checked_eps.size()}};
	out.put(r, "prokhorov", rep.prokhorov);
	out.put(r, "wasserstein", rep.wasserstein);
	out.put(r, "diameter", rep.diameter);
	json failed = json::array();
	for (const auto &e : rep.failed_eps)
		failed.push_back(to_string(e));
	r["failed_eps"] = failed;
	emit(r);
	return 0;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Exact computations on computable probability spaces"};
	app.require_subcommand(1);
	app.fallthrough();
	Options o;
	app.add_flag("--approx", o.approx, "Add non-authoritative decimal renderings");

	auto add_space = [&](CLI::App *c) { c->add_option("--space", o.space, "Space document"); };
	auto add_measure = [&](CLI::App *c) { c->add_option("--measure", o.measures, "Measure document")->required(); };
	auto add_stage = [&](CLI::App *c) { c->add_option("--stage", o.stage, "Stage"); };
	auto add_budget = [&](CLI::App *c) { c->add_option("--budget", o.budget, "Stage budget"); };

	auto *dist = app.add_subcommand("dist", "Exact Prokhorov / Wasserstein distance");
	add_space(dist);
	add_measure(dist);
	dist->add_option("--kind", o.kind, "prokhorov, wasserstein or both");
	dist->add_option("--cap", o.cap, "Support size cap");

	auto *val = app.add_subcommand("val", "Staged lower bound on mu(U)");
	add_space(val);
	add_measure(val);
	val->add_option("--set", o.set, "Open set document")->required();
	add_stage(val);

	auto *integ = app.add_subcommand("integrate", "Staged lower bound on an integral");
	add_space(integ);
	add_measure(integ);
	integ->add_option("--function", o.function, "Function document")->required();
	integ->add_option("--minus", o.minus, "Function document for M - f (bounded mode)");
	integ->add_option("--bound", o.bound, "M for bounded mode");
	add_stage(integ);

	auto *enc = app.add_subcommand("encode", "Binary expansion prefix of a point");
	enc->add_option("--rep", o.rep, "Representation document")->required();
	enc->add_option("--point", o.point, "Point document")->required();
	enc->add_option("--bits", o.bits, "Number of bits");
	add_budget(enc);

	auto *dec = app.add_subcommand("decode", "Point from a binary expansion");
	dec->add_option("--rep", o.rep, "Representation document")->required();
	dec->add_option("--word", o.word, "Expansion bits")->required();
	dec->add_option("--precision", o.precision, "Target precision exponent");
	add_budget(dec);

	auto *cell = app.add_subcommand("cellmeasure", "Enclosure of a cell's measure");
	cell->add_option("--rep", o.rep, "Representation document")->required();
	cell->add_option("--word", o.word, "Cell word")->required();
	add_stage(cell);

	auto *conv = app.add_subcommand("testconv", "Convert between ML and integral tests");
	add_space(conv);
	add_measure(conv);
	conv->add_option("--test", o.test, "Test document")->required();
	conv->add_option("--direction", o.direction, "ml_to_integral or integral_to_ml");
	conv->add_option("--point", o.point, "Point document");
	conv->add_option("--levels", o.levels, "Levels to report");
	add_stage(conv);
	add_budget(conv);

	auto *def = app.add_subcommand("deficiency", "Staged deficiency lower bound");
	add_space(def);
	add_measure(def);
	def->add_option("--test", o.test, "Test document")->required();
	def->add_option("--point", o.point, "Point document")->required();
	add_stage(def);

	auto *chk = app.add_subcommand("checkbounds", "Check the Prokhorov/Wasserstein equivalence bounds");
	add_space(chk);
	add_measure(chk);
	chk->add_option("--grid", o.grid, "Grid size for eps values");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		return fail("usage", e.what());
	}

	Output out(o.approx);
	try {
		if (*dist)
			return cmd_dist(o, out);
		if (*val)
			return cmd_val(o, out);
		if (*integ)
			return cmd_integrate(o, out);
		if (*enc)
			return cmd_encode(o, out);
		if (*dec)
			return cmd_decode(o, out);
		if (*cell)
			return cmd_cellmeasure(o, out);
		if (*conv)
			return cmd_testconv(o, out);
		if (*def)
			return cmd_deficiency(o, out);
		if (*chk)
			return cmd_checkbounds(o, out);
	} catch (const BudgetExhausted &e) {
		emit({{"status", "budget_exhausted"}, {"message", e.what()}});
		return 2;
	} catch (const io::DocumentError &e) {
		return fail("invalid_document", e.what(), e.field);
	} catch (const SupportTooLarge &e) {
		return fail("support_too_large", e.what());
	} catch (const UnboundedSpace &e) {
		return fail("unbounded_space", e.what());
	} catch (const InvalidExpansion &e) {
		return fail("invalid_expansion", e.what());
	} catch (const DigestMismatch &e) {
		return fail("digest_mismatch", e.what());
	} catch (const FastCauchyViolation &e) {
		return fail("fast_cauchy_violation", e.what());
	} catch (const CertificationViolation &e) {
		return fail("certification_violation", e.what());
	} catch (const UncertifiedBounds &e) {
		return fail("uncertified_bounds", e.what());
	} catch (const std::exception &e) {
		return fail("invalid_argument", e.what());
	}
	return fail("usage", "no subcommand");
}
