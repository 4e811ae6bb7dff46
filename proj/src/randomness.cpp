#include "cps/randomness.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace cps {

std::string certificate_name(Certificate c)
{
	switch (c) {
	case Certificate::ByConstruction:
		return "by_construction";
	case Certificate::CylinderExact:
		return "cylinder_exact";
	case Certificate::Asserted:
		return "asserted";
	case Certificate::None:
		return "none";
	}
	return "none";
}

Certificate parse_certificate(std::string_view name)
{
	if (name == "by_construction")
		return Certificate::ByConstruction;
	if (name == "cylinder_exact")
		return Certificate::CylinderExact;
	if (name == "asserted")
		return Certificate::Asserted;
	if (name == "none")
		return Certificate::None;
	throw std::invalid_argument("unknown certificate kind: " + std::string(name));
}

struct MLTest::Cache {
	std::function<REOpenSet(Stage)> fn;
	std::mutex mutex;
	std::map<Stage, REOpenSet> levels;
};

MLTest::MLTest(MeasurePtr measure, std::function<REOpenSet(Stage)> levels, Certificate certificate)
: measure_(std::move(measure)), cache_(std::make_shared<Cache>()), certificate_(certificate)
{
	cache_->fn = std::move(levels);
}

REOpenSet MLTest::level(Stage n) const
{
	{
		std::lock_guard lock(cache_->mutex);
		if (auto it = cache_->levels.find(n); it != cache_->levels.end())
			return it->second;
	}
	REOpenSet u = cache_->fn(n);
	std::lock_guard lock(cache_->mutex);
	return cache_->levels.emplace(n, std::move(u)).first->second;
}

std::function<REOpenSet(Stage)> MLTest::levels() const
{
	MLTest self = *this;
	return [self](Stage n) { return self.level(n); };
}

Rational MLTest::cylinder_level_mass(Stage n, Stage stage) const
{
	if (space()->kind() != "cantor" || !measure_->cylinder_exact())
		throw std::invalid_argument("exact level masses need a cylinder-exact measure on Cantor space");
	Dnf region = level(n).inner(stage);
	unsigned len = 1;
	for (const auto &conj : region)
		for (const auto &c : conj)
			len = std::max(len, c.inside ? CantorSpace::open_cylinder_length(c.radius)
			                             : CantorSpace::closed_cylinder_length(c.radius));
	if (len > 63)
		throw SupportTooLarge("level region needs more than 63 positions");
	Rational mass = measure_->stage_mass(len - 1, region);
	if (certificate_ == Certificate::CylinderExact && mass > pow2(-static_cast<int>(n)))
		throw CertificationViolation("level " + std::to_string(n) + " has mass " + to_string(mass));
	return mass;
}

MLTest zero_prefix_test(MeasurePtr measure)
{
	if (measure->space()->kind() != "cantor")
		throw std::invalid_argument("zero-prefix test lives on Cantor space");
	Certificate cert = measure->cylinder_exact() ? Certificate::CylinderExact : Certificate::Asserted;
	SpacePtr space = measure->space();
	return MLTest(
		measure,
		[space](Stage n) {
			return REOpenSet::from_balls(space, {IdealBall{0, pow2(-static_cast<int>(n))}});
		},
		cert);
}

MLTest integral_to_ml(const IntegralTest &t, Stage stage_budget)
{
	LscFunction f = t.f;
	return MLTest(
		t.measure,
		[f, stage_budget](Stage n) { return f.superlevel(pow2(static_cast<int>(n)), stage_budget); },
		Certificate::ByConstruction);
}

IntegralTest ml_to_integral(const MLTest &u)
{
	if (u.certificate() == Certificate::None)
		throw UncertifiedBounds("Martin-Löf test has no measure certificate");
	return {level_count(u.space(), u.levels()), u.measure(), Certificate::ByConstruction};
}

IntegralTest finite_universal(const std::vector<IntegralTest> &tests)
{
	if (tests.empty())
		throw std::invalid_argument("finite_universal needs at least one test");
	const std::string digest = measure_digest(*tests.front().measure);
	std::vector<std::pair<Rational, LscFunction>> terms;
	Certificate cert = Certificate::ByConstruction;
	for (std::size_t i = 0; i < tests.size(); ++i) {
		if (measure_digest(*tests[i].measure) != digest)
			throw std::invalid_argument("tests refer to different measures");
		if (tests[i].certificate == Certificate::None)
			throw UncertifiedBounds("test " + std::to_string(i) + " has no certificate");
		if (tests[i].certificate == Certificate::Asserted)
			cert = Certificate::Asserted;
		terms.emplace_back(pow2(-static_cast<int>(i) - 1), tests[i].f);
	}
	return {lsc_sum(std::move(terms)), tests.front().measure, cert};
}

DeficiencyReport deficiency(const PointDescriptor &x, const IntegralTest &t, Stage stage)
{
	DeficiencyReport r;
	r.stage = stage;
	r.lower_bound = t.f.eval_lower(x, stage);
	Rational threshold = 1;
	for (unsigned k = 0; r.lower_bound > threshold; ++k) {
		r.nonrandom_level = k;
		threshold *= 2;
	}
	return r;
}

MLTest full_measure_open_to_ml(const REOpenSet &u, MeasurePtr mu, Stage stage_budget)
{
	SpacePtr space = u.space();
	auto level = [u, mu, space, stage_budget](Stage i) {
		const Rational target = 1 - pow2(-static_cast<int>(i));
		for (Stage m = 1; m <= stage_budget; ++m) {
			const Rational shrink_factor = 1 - pow2(-static_cast<int>(m));
			Dnf inner;
			std::vector<StagedConstraint> complement;
			for (const auto &b : u.balls_through(m)) {
				Rational r = b.radius * shrink_factor;
				inner.push_back({{b.center, r, true}});
				complement.push_back({b.center, [r](Stage) { return RatInterval::point(r); }, false});
			}
			if (inner.empty())
				continue;
			if (valuation_lower(*mu, inner, m) > target)
				return REOpenSet::region(space, std::move(complement));
		}
		throw BudgetExhausted("no closed inner approximation of mass > 1 - 2^-" + std::to_string(i) +
		                      " by stage " + std::to_string(stage_budget));
	};
	return MLTest(std::move(mu), level, Certificate::ByConstruction);
}

std::size_t transport_bits(const BinaryRep &rep, Stage stage)
{
	return std::min<std::size_t>({rep.size(), 64, 4 * (std::size_t(stage) + 1)});
}

namespace {

constexpr unsigned kMaxTransportWord = 10;

bool word_satisfies(std::uint64_t word, const Conjunction &conj)
{
	for (const auto &c : conj) {
		unsigned m = c.inside ? CantorSpace::open_cylinder_length(c.radius)
		                      : CantorSpace::closed_cylinder_length(c.radius);
		std::uint64_t mask = m >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << m) - 1;
		bool agree = ((word ^ c.center) & mask) == 0;
		if (agree != c.inside)
			return false;
	}
	return true;
}

unsigned conj_length(const Conjunction &conj)
{
	unsigned len = 0;
	for (const auto &c : conj)
		len = std::max(len, c.inside ? CantorSpace::open_cylinder_length(c.radius)
		                             : CantorSpace::closed_cylinder_length(c.radius));
	return len;
}

class TransportNode final : public LscFunction::Node {
public:
	TransportNode(RepPtr rep, LscFunction cantor_f, Stage budget)
	: Node(rep->space()), rep_(std::move(rep)), f_(std::move(cantor_f)), budget_(budget)
	{}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		Stage s = std::min(stage, budget_);
		std::string bits;
		try {
			bits = encode(*rep_, x, transport_bits(*rep_, s), s);
		} catch (const EncodeExhausted &e) {
			bits = e.bits;
		}
		Rational radius = pow2(1 - static_cast<int>(bits.size()));
		return f_.eval_lower_on_ball({CantorSpace::index_of(bits), radius}, s);
	}

	std::vector<Piece> pieces(Stage stage) const override
	{
		Stage s = std::min(stage, budget_);
		std::vector<Piece> out;
		for (const auto &p : f_.pieces(s)) {
			Piece q{p.value, {}};
			for (const auto &conj : p.region) {
				unsigned len = conj_length(conj);
				if (len > kMaxTransportWord || len > rep_->size())
					continue;
				for (std::uint64_t w = 0; w < (std::uint64_t(1) << len); ++w) {
					if (!word_satisfies(w, conj))
						continue;
					Conjunction cell;
					for (unsigned i = 0; i < len; ++i) {
						auto r = rep_->radius(i);
						bool inside = (w >> i) & 1;
						RatInterval j = r->interval_at(s);
						cell.push_back({r->center(), inside ? j.lo() : j.hi(), inside});
					}
					if (auto simplified = simplify(*space, std::move(cell)))
						q.region.push_back(std::move(*simplified));
				}
			}
			if (!q.region.empty())
				out.push_back(std::move(q));
		}
		return out;
	}

	bool is_zero() const override { return f_.node().is_zero(); }

private:
	RepPtr rep_;
	LscFunction f_;
	Stage budget_;
};

std::mutex monitor_mutex;
MonitorSnapshot monitor_state;

} // namespace

IntegralTest transport_test(RepPtr rep, const IntegralTest &cantor_test, Stage stage_budget)
{
	if (cantor_test.f.space()->kind() != "cantor")
		throw std::invalid_argument("transported test must live on Cantor space");
	Certificate cert = cantor_test.certificate == Certificate::Asserted ? Certificate::Asserted
	                                                                   : Certificate::ByConstruction;
	if (cantor_test.certificate == Certificate::None)
		throw UncertifiedBounds("Cantor-side test has no certificate");
	MeasurePtr mu = rep->measure();
	auto node = std::make_shared<TransportNode>(std::move(rep), cantor_test.f, stage_budget);
	return {LscFunction(std::move(node)), std::move(mu), cert};
}

Rational monitored_integral(const IntegralTest &t, Stage stage)
{
	Rational v = integrate_lower(*t.measure, t.f, stage);
	std::lock_guard lock(monitor_mutex);
	++monitor_state.checks;
	bool trusted = t.certificate == Certificate::ByConstruction || t.certificate == Certificate::CylinderExact;
	if (trusted && v > monitor_state.max_trusted_lower)
		monitor_state.max_trusted_lower = v;
	if (v > 1) {
		++monitor_state.violations;
		throw CertificationViolation("staged integral lower bound " + to_string(v) + " exceeds 1 (" +
		                             certificate_name(t.certificate) + ")");
	}
	return v;
}

MonitorSnapshot monitor_snapshot()
{
	std::lock_guard lock(monitor_mutex);
	return monitor_state;
}

void monitor_reset()
{
	std::lock_guard lock(monitor_mutex);
	monitor_state = {};
}

} // namespace cps
