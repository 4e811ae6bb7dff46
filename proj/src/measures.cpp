#include "cps/measures.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>

#include "cps/flow.hpp"

namespace cps {

IdealMeasure::IdealMeasure(std::vector<Atom> atoms)
{
	std::map<IdealIndex, Rational> merged;
	Rational total = 0;
	for (auto &a : atoms) {
		if (a.weight <= 0)
			throw InvalidParameter("ideal measure weights must be positive");
		merged[a.point] += a.weight;
		total += a.weight;
	}
	if (total != 1)
		throw InvalidParameter("ideal measure weights sum to " + to_string(total) + ", not 1");
	for (auto &[p, w] : merged)
		atoms_.push_back({p, w});
}

bool operator==(const IdealMeasure &a, const IdealMeasure &b)
{
	if (a.atoms_.size() != b.atoms_.size())
		return false;
	for (std::size_t i = 0; i < a.atoms_.size(); ++i)
		if (a.atoms_[i].point != b.atoms_[i].point || a.atoms_[i].weight != b.atoms_[i].weight)
			return false;
	return true;
}

IdealMeasure mix(const std::vector<std::pair<Rational, IdealMeasure>> &parts)
{
	std::vector<Atom> atoms;
	for (const auto &[w, m] : parts)
		for (const auto &a : m.atoms())
			atoms.push_back({a.point, w * a.weight});
	return IdealMeasure(std::move(atoms));
}

namespace {

void check_cap(const IdealMeasure &mu, const IdealMeasure &nu, std::size_t cap)
{
	if (mu.size() > cap || nu.size() > cap)
		throw SupportTooLarge("support sizes " + std::to_string(mu.size()) + " and " +
		                      std::to_string(nu.size()) + " exceed the cap " + std::to_string(cap));
}

std::vector<std::vector<Rational>> distance_matrix(const IdealMeasure &mu, const IdealMeasure &nu,
                                                   const MetricSpace &space)
{
	std::vector<std::vector<Rational>> d(mu.size(), std::vector<Rational>(nu.size()));
	for (std::size_t i = 0; i < mu.size(); ++i)
		for (std::size_t j = 0; j < nu.size(); ++j)
			d[i][j] = space.require_exact(mu.atoms()[i].point, nu.atoms()[j].point);
	return d;
}

std::vector<Rational> weights(const IdealMeasure &m)
{
	std::vector<Rational> w;
	for (const auto &a : m.atoms())
		w.push_back(a.weight);
	return w;
}

// 1 - maxflow over the pairs whose distance satisfies keep(d): the largest
// mu(A) - nu(neighbourhood of A).
template <class Keep>
Rational deficiency(const IdealMeasure &mu, const IdealMeasure &nu,
                    const std::vector<std::vector<Rational>> &d, Keep keep)
{
	std::vector<BipartiteEdge> edges;
	for (std::size_t i = 0; i < mu.size(); ++i)
		for (std::size_t j = 0; j < nu.size(); ++j)
			if (keep(d[i][j]))
				edges.push_back({i, j});
	return 1 - bipartite_max_flow(weights(mu), weights(nu), edges);
}

} // namespace

Rational prokhorov_exact(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &space,
                         std::size_t cap)
{
	check_cap(mu, nu, cap);
	auto d = distance_matrix(mu, nu, space);
	std::vector<Rational> grid{Rational(0)};
	for (const auto &row : d)
		grid.insert(grid.end(), row.begin(), row.end());
	std::sort(grid.begin(), grid.end());
	grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

	// For eps in (grid[k], grid[k+1]] the deficiency is phi(k), computed on
	// pairs with d <= grid[k]. rho = min_k max(grid[k], phi(k)); the max is
	// minimised where phi first drops to grid[k].
	auto phi = [&](std::size_t k) {
		return deficiency(mu, nu, d, [&](const Rational &x) { return x <= grid[k]; });
	};
	std::size_t lo = 0, hi = grid.size() - 1;
	while (lo < hi) {
		std::size_t mid = (lo + hi) / 2;
		if (phi(mid) <= grid[mid])
			hi = mid;
		else
			lo = mid + 1;
	}
	if (lo == 0)
		return grid[0];
	return rat_min(grid[lo], phi(lo - 1));
}

bool prokhorov_less_than(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &space,
                         const Rational &eps, std::size_t cap)
{
	check_cap(mu, nu, cap);
	if (eps <= 0)
		return false;
	auto d = distance_matrix(mu, nu, space);
	return deficiency(mu, nu, d, [&](const Rational &x) { return x < eps; }) < eps;
}

bool prokhorov_at_most(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &space,
                       const Rational &eps, std::size_t cap)
{
	check_cap(mu, nu, cap);
	if (eps < 0)
		return false;
	auto d = distance_matrix(mu, nu, space);
	return deficiency(mu, nu, d, [&](const Rational &x) { return x <= eps; }) <= eps;
}

WassersteinResult wasserstein_exact(const IdealMeasure &mu, const IdealMeasure &nu,
                                    const MetricSpace &space, std::size_t cap)
{
	if (!space.diameter_bound())
		throw UnboundedSpace(space.kind() + ": Wasserstein distance needs a bounded space");
	check_cap(mu, nu, cap);
	auto d = distance_matrix(mu, nu, space);
	WassersteinResult out;
	out.plan.flows = min_cost_transport(weights(mu), weights(nu), d);
	for (const auto &a : mu.atoms())
		out.plan.sources.push_back(a.point);
	for (const auto &a : nu.atoms())
		out.plan.targets.push_back(a.point);
	out.value = 0;
	for (std::size_t i = 0; i < mu.size(); ++i)
		for (std::size_t j = 0; j < nu.size(); ++j)
			out.value += out.plan.flows[i][j] * d[i][j];
	return out;
}

EquivalenceReport check_equivalence_bounds(const IdealMeasure &mu, const IdealMeasure &nu,
                                           const MetricSpace &space, unsigned grid,
                                           const std::vector<Rational> &extra_eps)
{
	auto m = space.diameter_bound();
	if (!m)
		throw UnboundedSpace(space.kind() + ": equivalence bounds need a diameter bound");
	EquivalenceReport r;
	r.diameter = *m;
	r.prokhorov = prokhorov_exact(mu, nu, space);
	r.wasserstein = wasserstein_exact(mu, nu, space).value;
	r.wasserstein_bound = r.wasserstein <= (r.diameter + 1) * r.prokhorov;

	std::vector<Rational> cands = extra_eps;
	for (unsigned j = 1; j <= grid; ++j) {
		Rational step{Integer(j), Integer(grid)};
		step.canonicalize();
		cands.push_back(step);
		cands.push_back(r.wasserstein + step);
	}
	std::sort(cands.begin(), cands.end());
	cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
	r.prokhorov_bound = true;
	for (const auto &eps : cands) {
		if (!(eps * eps > r.wasserstein && eps < 1))
			continue;
		r.checked_eps.push_back(eps);
		if (!(r.prokhorov < eps)) {
			r.prokhorov_bound = false;
			r.failed_eps.push_back(eps);
		}
	}
	return r;
}

namespace {

bool satisfies(const MetricSpace &space, IdealIndex p, const Conjunction &conj)
{
	for (const auto &c : conj) {
		Rational d = space.require_exact(p, c.center);
		if (c.inside ? !(d < c.radius) : !(d > c.radius))
			return false;
	}
	return true;
}

} // namespace

Rational region_mass(const MetricSpace &space, const IdealMeasure &mu, const Dnf &region)
{
	Rational total = 0;
	for (const auto &a : mu.atoms()) {
		for (const auto &conj : region) {
			if (satisfies(space, a.point, conj)) {
				total += a.weight;
				break;
			}
		}
	}
	return total;
}

Rational valuation_ideal_union(const MetricSpace &space, const IdealMeasure &mu,
                               const std::vector<IdealBall> &balls, bool closed)
{
	Rational total = 0;
	for (const auto &a : mu.atoms()) {
		for (const auto &b : balls) {
			Rational d = space.require_exact(a.point, b.center);
			if (closed ? d <= b.radius : d < b.radius) {
				total += a.weight;
				break;
			}
		}
	}
	return total;
}

Rational MeasureDescriptor::stage_mass(Stage n, const Dnf &region) const
{
	if (region.empty())
		return 0;
	return region_mass(*space_, ideal_at(n), region);
}

namespace {

Rational rat_of(std::uint64_t v) { return Rational(Integer(std::to_string(v), 10)); }

// Interval of [0,1] with open or closed ends.
struct Span {
	Rational lo, hi;
	bool lo_closed = true, hi_closed = true;

	bool empty() const { return hi < lo || (lo == hi && !(lo_closed && hi_closed)); }
};

Span meet(const Span &a, const Span &b)
{
	Span s;
	if (a.lo > b.lo || (a.lo == b.lo && !a.lo_closed)) {
		s.lo = a.lo;
		s.lo_closed = a.lo_closed;
	} else {
		s.lo = b.lo;
		s.lo_closed = b.lo_closed;
	}
	if (a.hi < b.hi || (a.hi == b.hi && !a.hi_closed)) {
		s.hi = a.hi;
		s.hi_closed = a.hi_closed;
	} else {
		s.hi = b.hi;
		s.hi_closed = b.hi_closed;
	}
	return s;
}

std::vector<Span> conjunction_spans(const UnitInterval &ui, const Conjunction &conj)
{
	std::vector<Span> cur{{Rational(0), Rational(1), true, true}};
	for (const auto &c : conj) {
		Rational x = ui.value(c.center);
		std::vector<Span> cuts;
		if (c.inside) {
			cuts.push_back({x - c.radius, x + c.radius, false, false});
		} else {
			cuts.push_back({Rational(0), x - c.radius, true, false});
			cuts.push_back({x + c.radius, Rational(1), false, true});
		}
		std::vector<Span> next;
		for (const auto &s : cur) {
			for (const auto &k : cuts) {
				Span m = meet(s, k);
				if (!m.empty())
					next.push_back(m);
			}
		}
		cur = std::move(next);
	}
	return cur;
}

Integer floor_q(const Rational &q)
{
	Integer z;
	mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
	return z;
}

Integer ceil_q(const Rational &q)
{
	Integer z;
	mpz_cdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
	return z;
}

class LebesgueUnit final : public MeasureDescriptor {
public:
	LebesgueUnit() : MeasureDescriptor(unit_interval()) {}

	IdealMeasure ideal_at(Stage n) const override
	{
		if (n > 20)
			throw SupportTooLarge("lebesgue_unit: stage " + std::to_string(n) + " has too many atoms");
		const auto &ui = static_cast<const UnitInterval &>(*space());
		std::uint64_t count = std::uint64_t{1} << (n + 2);
		Rational w = pow2(-static_cast<int>(n + 2));
		Rational denom = pow2(static_cast<int>(n + 3));
		std::vector<Atom> atoms;
		atoms.reserve(count);
		for (std::uint64_t j = 0; j < count; ++j)
			atoms.push_back({ui.index_of(rat_of(2 * j + 1) / denom), w});
		return IdealMeasure(std::move(atoms));
	}

	// Counts midpoints (2j+1)/2^(n+3) in the region.
	Rational stage_mass(Stage n, const Dnf &region) const override
	{
		const auto &ui = static_cast<const UnitInterval &>(*space());
		Rational big_n = pow2(static_cast<int>(n + 3));
		Integer last = pow2(static_cast<int>(n + 2)).get_num() - 1;
		std::vector<std::pair<Integer, Integer>> ranges;
		for (const auto &conj : region) {
			for (const auto &s : conjunction_spans(ui, conj)) {
				Rational a = (s.lo * big_n - 1) / 2;
				Rational b = (s.hi * big_n - 1) / 2;
				Integer jlo = s.lo_closed ? ceil_q(a) : floor_q(a) + 1;
				Integer jhi = s.hi_closed ? floor_q(b) : ceil_q(b) - 1;
				if (jlo < 0)
					jlo = 0;
				if (jhi > last)
					jhi = last;
				if (jlo <= jhi)
					ranges.emplace_back(jlo, jhi);
			}
		}
		std::sort(ranges.begin(), ranges.end());
		Integer count = 0;
		std::optional<std::pair<Integer, Integer>> open;
		for (auto &r : ranges) {
			if (open && r.first <= open->second + 1) {
				if (r.second > open->second)
					open->second = r.second;
				continue;
			}
			if (open)
				count += open->second - open->first + 1;
			open = r;
		}
		if (open)
			count += open->second - open->first + 1;
		return Rational(count) * pow2(-static_cast<int>(n + 2));
	}

	std::string canonical() const override { return "lebesgue_unit"; }
	bool atomless() const override { return true; }
};

struct CylinderTest {
	std::uint64_t bits;
	unsigned length;
	bool positive;
};

enum class Tri { False, True, Open };

Tri cylinder_status(const CylinderTest &c, std::uint64_t prefix, unsigned len, bool final)
{
	unsigned m = std::min(len, c.length);
	std::uint64_t mask = m >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1);
	bool in;
	if ((prefix ^ c.bits) & mask)
		in = false;
	else if (len >= c.length)
		in = true;
	else if (final) {
		std::uint64_t full = c.length >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << c.length) - 1);
		in = ((prefix ^ c.bits) & full) == 0;
	} else
		return Tri::Open;
	return in == c.positive ? Tri::True : Tri::False;
}

class Bernoulli final : public MeasureDescriptor {
public:
	explicit Bernoulli(Rational p) : MeasureDescriptor(cantor_space()), p_(std::move(p))
	{
		if (p_ <= 0 || p_ >= 1)
			throw InvalidParameter("bernoulli parameter must lie in (0,1)");
	}

	IdealMeasure ideal_at(Stage n) const override
	{
		if (n > 20)
			throw SupportTooLarge("bernoulli: stage " + std::to_string(n) + " has too many atoms");
		unsigned len = n + 1;
		std::vector<Atom> atoms;
		for (std::uint64_t w = 0; w < (std::uint64_t{1} << len); ++w)
			atoms.push_back({w, word_weight(w, len)});
		return IdealMeasure(std::move(atoms));
	}

	bool cylinder_exact() const override { return true; }

	Rational stage_mass(Stage n, const Dnf &region) const override
	{
		if (region.empty())
			return 0;
		std::vector<std::vector<CylinderTest>> tests;
		for (const auto &conj : region) {
			std::vector<CylinderTest> t;
			for (const auto &c : conj) {
				unsigned m = c.inside ? CantorSpace::open_cylinder_length(c.radius)
				                      : CantorSpace::closed_cylinder_length(c.radius);
				t.push_back({c.center, m, c.inside});
			}
			tests.push_back(std::move(t));
		}
		unsigned depth = std::min<unsigned>(n, 62) + 1;
		return mass(tests, 0, 0, depth, Rational(1));
	}

	std::string canonical() const override { return "bernoulli(" + to_string(p_) + ")"; }
	bool atomless() const override { return true; }

private:
	Rational word_weight(std::uint64_t w, unsigned len) const
	{
		Rational out = 1;
		for (unsigned j = 0; j < len; ++j)
			out *= ((w >> j) & 1) ? p_ : Rational(1 - p_);
		return out;
	}

	Rational mass(const std::vector<std::vector<CylinderTest>> &tests, std::uint64_t prefix,
	              unsigned len, unsigned depth, const Rational &w) const
	{
		bool final = len == depth;
		bool all_false = true;
		for (const auto &conj : tests) {
			Tri t = Tri::True;
			for (const auto &c : conj) {
				Tri s = cylinder_status(c, prefix, len, final);
				if (s == Tri::False) {
					t = Tri::False;
					break;
				}
				if (s == Tri::Open)
					t = Tri::Open;
			}
			if (t == Tri::True)
				return w;
			if (t == Tri::Open)
				all_false = false;
		}
		if (all_false || final)
			return 0;
		return mass(tests, prefix, len + 1, depth, w * (1 - p_)) +
		       mass(tests, prefix | (std::uint64_t{1} << len), len + 1, depth, w * p_);
	}

	Rational p_;
};

class Dirac final : public MeasureDescriptor {
public:
	Dirac(SpacePtr space, IdealIndex i) : MeasureDescriptor(std::move(space)), i_(i)
	{
		this->space()->check_index(i_);
	}
	IdealMeasure ideal_at(Stage) const override { return IdealMeasure::dirac(i_); }
	std::string canonical() const override
	{
		return "dirac(" + space()->kind() + "," + std::to_string(i_) + ")";
	}

private:
	IdealIndex i_;
};

class ConvexCombo final : public MeasureDescriptor {
public:
	explicit ConvexCombo(std::vector<std::pair<Rational, MeasurePtr>> parts)
	: MeasureDescriptor(parts.empty() ? unit_interval() : parts.front().second->space()),
	  parts_(std::move(parts))
	{
		if (parts_.empty())
			throw InvalidParameter("convex_combo needs at least one component");
		Rational total = 0;
		for (const auto &[w, m] : parts_) {
			if (w <= 0)
				throw InvalidParameter("convex_combo weights must be positive");
			if (m->space()->kind() != space()->kind())
				throw InvalidParameter("convex_combo components live on different spaces");
			total += w;
		}
		if (total != 1)
			throw InvalidParameter("convex_combo weights sum to " + to_string(total));
	}

	IdealMeasure ideal_at(Stage n) const override
	{
		std::vector<std::pair<Rational, IdealMeasure>> stage;
		for (const auto &[w, m] : parts_)
			stage.emplace_back(w, m->ideal_at(n));
		return mix(stage);
	}
	Rational stage_mass(Stage n, const Dnf &region) const override
	{
		Rational total = 0;
		for (const auto &[w, m] : parts_)
			total += w * m->stage_mass(n, region);
		return total;
	}
	std::string canonical() const override
	{
		std::string out = "combo(";
		for (std::size_t i = 0; i < parts_.size(); ++i) {
			if (i)
				out += ";";
			out += to_string(parts_[i].first) + ":" + parts_[i].second->canonical();
		}
		return out + ")";
	}
	bool atomless() const override
	{
		return std::all_of(parts_.begin(), parts_.end(), [](const auto &p) { return p.second->atomless(); });
	}

private:
	std::vector<std::pair<Rational, MeasurePtr>> parts_;
};

class StagesMeasure final : public MeasureDescriptor {
public:
	StagesMeasure(SpacePtr space, std::vector<IdealMeasure> stages)
	: MeasureDescriptor(std::move(space)), stages_(std::move(stages))
	{
		if (stages_.empty())
			throw InvalidParameter("measure needs at least one stage");
		for (const auto &m : stages_)
			for (const auto &a : m.atoms())
				this->space()->check_index(a.point);
	}

	IdealMeasure ideal_at(Stage n) const override
	{
		std::size_t k = std::min<std::size_t>(n, stages_.size() - 1);
		verify_through(k);
		return stages_[k];
	}

	std::string canonical() const override
	{
		std::string out = "stages(" + space()->kind();
		for (const auto &m : stages_) {
			out += ";";
			for (const auto &a : m.atoms())
				out += std::to_string(a.point) + ":" + to_string(a.weight) + ",";
		}
		return out + ")";
	}

private:
	void verify_through(std::size_t k) const
	{
		std::lock_guard lock(mutex_);
		while (verified_ < k) {
			std::size_t m = verified_;
			if (!prokhorov_less_than(stages_[m], stages_[m + 1], *space(), pow2(-static_cast<int>(m)),
			                         SIZE_MAX))
				throw FastCauchyViolation("measure stages " + std::to_string(m) + " and " +
				                          std::to_string(m + 1) + " are not 2^-" + std::to_string(m) +
				                          "-close in the Prokhorov metric");
			++verified_;
		}
	}

	std::vector<IdealMeasure> stages_;
	mutable std::mutex mutex_;
	mutable std::size_t verified_ = 0;
};

} // namespace

MeasurePtr lebesgue_unit()
{
	static const MeasurePtr m = std::make_shared<LebesgueUnit>();
	return m;
}

MeasurePtr bernoulli(const Rational &p) { return std::make_shared<Bernoulli>(p); }

MeasurePtr dirac(SpacePtr space, IdealIndex i) { return std::make_shared<Dirac>(std::move(space), i); }

MeasurePtr convex_combo(std::vector<std::pair<Rational, MeasurePtr>> parts)
{
	return std::make_shared<ConvexCombo>(std::move(parts));
}

MeasurePtr measure_from_stages(SpacePtr space, std::vector<IdealMeasure> stages)
{
	return std::make_shared<StagesMeasure>(std::move(space), std::move(stages));
}

std::string measure_digest(const MeasureDescriptor &mu)
{
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char c : mu.canonical()) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

Dnf shrink(const MetricSpace &space, const Dnf &region, const Rational &eps)
{
	Dnf out;
	for (const auto &conj : region) {
		Conjunction c = conj;
		for (auto &k : c)
			k.radius += k.inside ? Rational(-eps) : eps;
		if (auto s = simplify(space, std::move(c)))
			out.push_back(std::move(*s));
	}
	return out;
}

Rational valuation_lower(const MeasureDescriptor &mu, const Dnf &region, Stage stage)
{
	Rational best = 0;
	if (region.empty())
		return best;
	for (Stage n = 1; n <= stage; ++n) {
		Rational eps = pow2(1 - static_cast<int>(n));
		Dnf shrunk = shrink(*mu.space(), region, eps);
		if (shrunk.empty())
			continue;
		Rational v = mu.stage_mass(n, shrunk) - eps;
		if (v > best)
			best = v;
	}
	return best;
}

Rational valuation_lower(const MeasureDescriptor &mu, const REOpenSet &u, Stage stage)
{
	if (u.is_empty_set())
		return 0;
	return valuation_lower(mu, u.inner(stage), stage);
}

Rational integrate_lower(const MeasureDescriptor &mu, const LscFunction &f, Stage stage)
{
	if (f.node().is_zero())
		return 0;
	auto parts = f.node().linear_parts();
	if (!parts.empty()) {
		Rational total = 0;
		for (const auto &[w, g] : parts)
			total += w * integrate_lower(mu, g, stage);
		return total;
	}
	// Layer cake over the distinct piece values: sum of
	// (v_k - v_{k-1}) * mu({f >= v_k}).
	auto pieces = f.pieces(stage);
	std::vector<Rational> values;
	for (const auto &p : pieces)
		values.push_back(p.value);
	std::sort(values.begin(), values.end());
	values.erase(std::unique(values.begin(), values.end()), values.end());
	Rational total = 0, prev = 0;
	for (const auto &v : values) {
		Dnf layer;
		for (const auto &p : pieces)
			if (p.value >= v)
				layer.insert(layer.end(), p.region.begin(), p.region.end());
		total += (v - prev) * valuation_lower(mu, layer, stage);
		prev = v;
	}
	return total;
}

RatInterval integrate_bounded(const MeasureDescriptor &mu, const LscFunction &f_plus_m,
                              const LscFunction &m_minus_f, const Rational &m, Stage stage)
{
	Rational lo = integrate_lower(mu, f_plus_m, stage) - m;
	Rational hi = m - integrate_lower(mu, m_minus_f, stage);
	return {lo, hi};
}

} // namespace cps
