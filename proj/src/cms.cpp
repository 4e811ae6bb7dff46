#include "cps/cms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace cps {

namespace {

using u128 = unsigned __int128;

std::uint64_t isqrt_u128(u128 x)
{
	auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
	while (static_cast<u128>(r) * r > x)
		--r;
	while (static_cast<u128>(r + 1) * (r + 1) <= x)
		++r;
	return r;
}

Rational to_rational(std::uint64_t v)
{
	Integer z;
	mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
	return Rational(z);
}

std::uint64_t to_u64(const Integer &z)
{
	if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64)
		throw InvalidIndex("value does not fit a 64-bit index");
	std::uint64_t v = 0;
	mpz_export(&v, nullptr, 1, sizeof(v), 0, 0, z.get_mpz_t());
	return v;
}

// Portion of [0,1] covered by an interval with open or closed ends.
struct Span {
	Rational lo, hi;
	bool lo_closed = false, hi_closed = false;

	bool empty() const { return hi < lo || (lo == hi && !(lo_closed && hi_closed)); }
};

Span clip(Span s)
{
	if (s.lo < 0) {
		s.lo = 0;
		s.lo_closed = true;
	}
	if (s.hi > 1) {
		s.hi = 1;
		s.hi_closed = true;
	}
	return s;
}

Span open_span(const Rational &c, const Rational &r) { return clip({c - r, c + r, false, false}); }
Span closed_span(const Rational &c, const Rational &r) { return clip({c - r, c + r, true, true}); }

bool span_subset(const Span &in, const Span &out)
{
	if (in.empty())
		return true;
	if (out.empty())
		return false;
	bool lo_ok = out.lo < in.lo || (out.lo == in.lo && (out.lo_closed || !in.lo_closed));
	bool hi_ok = in.hi < out.hi || (out.hi == in.hi && (out.hi_closed || !in.hi_closed));
	return lo_ok && hi_ok;
}

bool spans_disjoint(const Span &a, const Span &b)
{
	if (a.empty() || b.empty())
		return true;
	auto before = [](const Span &x, const Span &y) {
		return x.hi < y.lo || (x.hi == y.lo && !(x.hi_closed && y.lo_closed));
	};
	return before(a, b) || before(b, a);
}

std::uint64_t prefix_mask(unsigned m) { return m >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1); }

} // namespace

IdealIndex cantor_pair(IdealIndex a, IdealIndex b)
{
	u128 s = static_cast<u128>(a) + b;
	u128 z = s * (s + 1) / 2 + b;
	if (z > std::numeric_limits<std::uint64_t>::max())
		throw InvalidIndex("pairing overflow");
	return static_cast<IdealIndex>(z);
}

std::pair<IdealIndex, IdealIndex> cantor_unpair(IdealIndex z)
{
	std::uint64_t root = isqrt_u128(static_cast<u128>(z) * 8 + 1);
	u128 w = (root - 1) / 2;
	u128 t = w * (w + 1) / 2;
	auto b = static_cast<IdealIndex>(static_cast<u128>(z) - t);
	auto a = static_cast<IdealIndex>(w - b);
	return {a, b};
}

RatInterval MetricSpace::distance(IdealIndex i, IdealIndex j, unsigned) const
{
	if (auto d = exact_distance(i, j))
		return RatInterval::point(*d);
	throw IrrationalDistance(kind() + ": no distance oracle for irrational distances");
}

Rational MetricSpace::require_exact(IdealIndex i, IdealIndex j) const
{
	auto d = exact_distance(i, j);
	if (!d)
		throw IrrationalDistance(kind() + ": distance between " + std::to_string(i) + " and " +
		                         std::to_string(j) + " is not rational");
	return *d;
}

void MetricSpace::check_index(IdealIndex i) const
{
	if (!valid_index(i))
		throw InvalidIndex(kind() + ": invalid ideal index " + std::to_string(i));
}

bool MetricSpace::ball_subset(const IdealBall &inner, const IdealBall &outer) const
{
	if (auto d = exact_distance(inner.center, outer.center))
		return *d + inner.radius <= outer.radius;
	return distance(inner.center, outer.center, 40).hi() + inner.radius <= outer.radius;
}

bool MetricSpace::ball_disjoint_closed(const IdealBall &a, const IdealBall &b) const
{
	if (auto d = exact_distance(a.center, b.center))
		return *d >= a.radius + b.radius;
	return distance(a.center, b.center, 40).lo() >= a.radius + b.radius;
}

bool UnitInterval::valid_index(IdealIndex i) const
{
	auto [p, q] = cantor_unpair(i);
	return q >= 1 && p <= q && std::gcd(p, q) == 1;
}

Rational UnitInterval::value(IdealIndex i) const
{
	check_index(i);
	auto [p, q] = cantor_unpair(i);
	return Rational(to_rational(p) / to_rational(q));
}

IdealIndex UnitInterval::index_of(const Rational &x) const
{
	if (x < 0 || x > 1)
		throw InvalidIndex("unit_interval: " + to_string(x) + " is outside [0,1]");
	return cantor_pair(to_u64(x.get_num()), to_u64(x.get_den()));
}

std::optional<Rational> UnitInterval::exact_distance(IdealIndex i, IdealIndex j) const
{
	Rational d = value(i) - value(j);
	return d < 0 ? Rational(-d) : d;
}

std::vector<IdealIndex> UnitInterval::net(unsigned level) const
{
	if (level > 24)
		throw std::invalid_argument("unit_interval: net level too large");
	std::uint64_t n = std::uint64_t{1} << level;
	std::vector<IdealIndex> out;
	out.reserve(n + 1);
	for (std::uint64_t k = 0; k <= n; ++k) {
		Rational x(to_rational(k) / to_rational(n));
		out.push_back(index_of(x));
	}
	return out;
}

bool UnitInterval::ball_subset(const IdealBall &inner, const IdealBall &outer) const
{
	return span_subset(open_span(value(inner.center), inner.radius),
	                   open_span(value(outer.center), outer.radius));
}

bool UnitInterval::ball_disjoint_closed(const IdealBall &a, const IdealBall &b) const
{
	return spans_disjoint(open_span(value(a.center), a.radius),
	                      closed_span(value(b.center), b.radius));
}

std::optional<Rational> CantorSpace::exact_distance(IdealIndex i, IdealIndex j) const
{
	if (i == j)
		return Rational(0);
	return pow2(-std::countr_zero(i ^ j));
}

std::vector<IdealIndex> CantorSpace::net(unsigned level) const
{
	if (level > 22)
		throw std::invalid_argument("cantor: net level too large");
	std::vector<IdealIndex> out(std::size_t{1} << (level + 1));
	std::iota(out.begin(), out.end(), IdealIndex{0});
	return out;
}

namespace {

// Every m below the returned value has 2^-m > r.
unsigned cylinder_search_start(const Rational &r)
{
	long bn = static_cast<long>(mpz_sizeinbase(r.get_num_mpz_t(), 2));
	long bd = static_cast<long>(mpz_sizeinbase(r.get_den_mpz_t(), 2));
	return static_cast<unsigned>(std::max(0L, bd - bn - 1));
}

} // namespace

unsigned CantorSpace::open_cylinder_length(const Rational &r)
{
	unsigned m = r > 0 ? cylinder_search_start(r) : 0;
	while (pow2(-static_cast<int>(m)) >= r)
		++m;
	return m;
}

unsigned CantorSpace::closed_cylinder_length(const Rational &r)
{
	if (r <= 0)
		return 65;
	unsigned m = cylinder_search_start(r);
	while (pow2(-static_cast<int>(m)) > r)
		++m;
	return m;
}

bool CantorSpace::ball_subset(const IdealBall &inner, const IdealBall &outer) const
{
	if (inner.radius <= 0)
		return true;
	unsigned mi = open_cylinder_length(inner.radius);
	unsigned mo = open_cylinder_length(outer.radius);
	return mi >= mo && ((inner.center ^ outer.center) & prefix_mask(mo)) == 0;
}

bool CantorSpace::ball_disjoint_closed(const IdealBall &a, const IdealBall &b) const
{
	if (a.radius <= 0 || b.radius < 0)
		return true;
	unsigned m = std::min(open_cylinder_length(a.radius), closed_cylinder_length(b.radius));
	return ((a.center ^ b.center) & prefix_mask(m)) != 0;
}

IdealIndex CantorSpace::index_of(std::string_view word)
{
	std::size_t last = word.find_last_of('1');
	if (last != std::string_view::npos && last >= 64)
		throw InvalidIndex("cantor: ideal words are limited to 64 significant bits");
	IdealIndex i = 0;
	for (std::size_t j = 0; j < word.size(); ++j) {
		if (word[j] == '1')
			i |= IdealIndex{1} << j;
		else if (word[j] != '0')
			throw std::invalid_argument("cantor: words are strings over {0,1}");
	}
	return i;
}

std::string CantorSpace::word(IdealIndex i, unsigned length)
{
	std::string w(length, '0');
	for (unsigned j = 0; j < length && j < 64; ++j)
		if ((i >> j) & 1)
			w[j] = '1';
	return w;
}

ProductSpace::ProductSpace(SpacePtr a, SpacePtr b)
: a_(std::move(a)), b_(std::move(b))
{
	if (!a_ || !b_)
		throw std::invalid_argument("product: null component");
}

IdealIndex ProductSpace::pair(IdealIndex a, IdealIndex b) const { return cantor_pair(a, b); }

std::pair<IdealIndex, IdealIndex> ProductSpace::unpair(IdealIndex i) const { return cantor_unpair(i); }

bool ProductSpace::valid_index(IdealIndex i) const
{
	auto [x, y] = unpair(i);
	return a_->valid_index(x) && b_->valid_index(y);
}

std::optional<Rational> ProductSpace::exact_distance(IdealIndex i, IdealIndex j) const
{
	auto [x1, y1] = unpair(i);
	auto [x2, y2] = unpair(j);
	auto dx = a_->exact_distance(x1, x2);
	auto dy = b_->exact_distance(y1, y2);
	if (!dx || !dy)
		return std::nullopt;
	return rat_max(*dx, *dy);
}

RatInterval ProductSpace::distance(IdealIndex i, IdealIndex j, unsigned precision) const
{
	auto [x1, y1] = unpair(i);
	auto [x2, y2] = unpair(j);
	return interval_max(a_->distance(x1, x2, precision), b_->distance(y1, y2, precision));
}

std::optional<Rational> ProductSpace::diameter_bound() const
{
	auto da = a_->diameter_bound();
	auto db = b_->diameter_bound();
	if (!da || !db)
		return std::nullopt;
	return rat_max(*da, *db);
}

std::vector<IdealIndex> ProductSpace::net(unsigned level) const
{
	std::vector<IdealIndex> out;
	auto na = a_->net(level);
	auto nb = b_->net(level);
	out.reserve(na.size() * nb.size());
	for (auto x : na)
		for (auto y : nb)
			out.push_back(pair(x, y));
	return out;
}

SpacePtr unit_interval()
{
	static const SpacePtr s = std::make_shared<UnitInterval>();
	return s;
}

SpacePtr cantor_space()
{
	static const SpacePtr s = std::make_shared<CantorSpace>();
	return s;
}

SpacePtr product_space(SpacePtr a, SpacePtr b)
{
	return std::make_shared<ProductSpace>(std::move(a), std::move(b));
}

struct PointDescriptor::State {
	Stream stream;
	std::mutex mutex;
	std::vector<IdealIndex> prefix;
};

PointDescriptor::PointDescriptor(SpacePtr space, Stream stream, std::optional<IdealIndex> exact)
: space_(std::move(space)), state_(std::make_shared<State>()), exact_(exact)
{
	if (!space_)
		throw std::invalid_argument("point: null space");
	state_->stream = std::move(stream);
}

PointDescriptor PointDescriptor::ideal(SpacePtr space, IdealIndex i)
{
	space->check_index(i);
	return PointDescriptor(std::move(space), [i](Stage) { return i; }, i);
}

PointDescriptor PointDescriptor::from_stream(SpacePtr space, Stream stream)
{
	return PointDescriptor(std::move(space), std::move(stream), std::nullopt);
}

PointDescriptor PointDescriptor::from_prefix(SpacePtr space, std::vector<IdealIndex> prefix,
                                             std::size_t constant_from)
{
	if (prefix.empty())
		throw std::invalid_argument("point: empty ideal stream");
	std::size_t last = std::min(constant_from, prefix.size() - 1);
	if (last == 0)
		return ideal(std::move(space), prefix[0]);
	prefix.resize(last + 1);
	return from_stream(std::move(space), [p = std::move(prefix)](Stage n) {
		return p[std::min<std::size_t>(n, p.size() - 1)];
	});
}

IdealIndex PointDescriptor::at(Stage n) const
{
	if (exact_)
		return *exact_;
	std::lock_guard lock(state_->mutex);
	auto &pre = state_->prefix;
	while (pre.size() <= n) {
		Stage m = static_cast<Stage>(pre.size());
		IdealIndex next = state_->stream(m);
		space_->check_index(next);
		if (m > 0) {
			Rational bound = pow2(-static_cast<int>(m - 1));
			RatInterval d = space_->distance(pre.back(), next, m + 2);
			if (d.lo() >= bound)
				throw FastCauchyViolation("point stream: d(s_" + std::to_string(m - 1) + ", s_" +
				                          std::to_string(m) + ") >= 2^-" + std::to_string(m - 1));
		}
		pre.push_back(next);
	}
	return pre[n];
}

namespace {

RatInterval widen(const RatInterval &d, const Rational &err)
{
	Rational lo = d.lo() - err;
	return {lo < 0 ? Rational(0) : lo, d.hi() + err};
}

} // namespace

RatInterval point_ideal_distance_raw(const PointDescriptor &x, IdealIndex s, unsigned k)
{
	const auto &space = *x.space();
	if (auto e = x.exact())
		return space.distance(*e, s, k);
	IdealIndex xn = x.at(k + 3);
	return widen(space.distance(xn, s, k + 1), pow2(-static_cast<int>(k + 2)));
}

RatInterval point_ideal_distance(const PointDescriptor &x, IdealIndex s, unsigned k)
{
	if (auto e = x.exact())
		return x.space()->distance(*e, s, k);
	RatInterval acc = point_ideal_distance_raw(x, s, 0);
	for (unsigned j = 1; j <= k; ++j)
		acc = acc.intersect(point_ideal_distance_raw(x, s, j));
	return acc;
}

RatInterval point_distance(const PointDescriptor &x, const PointDescriptor &y, unsigned k)
{
	if (auto e = y.exact())
		return point_ideal_distance(x, *e, k);
	if (auto e = x.exact())
		return point_ideal_distance(y, *e, k);
	const auto &space = *x.space();
	auto raw = [&](unsigned j) {
		return widen(space.distance(x.at(j + 4), y.at(j + 4), j + 1),
		             pow2(-static_cast<int>(j + 2)));
	};
	RatInterval acc = raw(0);
	for (unsigned j = 1; j <= k; ++j)
		acc = acc.intersect(raw(j));
	return acc;
}

Verdict in_ball_at_stage(const PointDescriptor &x, const IdealBall &ball, Stage stage)
{
	RatInterval d = point_ideal_distance(x, ball.center, stage);
	if (d.hi() < ball.radius)
		return Verdict::Inside;
	if (d.lo() > ball.radius)
		return Verdict::Outside;
	return Verdict::Unknown;
}

bool proves_constraint(const PointDescriptor &x, const BallConstraint &c, Stage stage)
{
	if (!c.inside && c.radius < 0)
		return true;
	if (c.inside && c.radius <= 0)
		return false;
	Verdict v = in_ball_at_stage(x, {c.center, c.radius}, stage);
	return v == (c.inside ? Verdict::Inside : Verdict::Outside);
}

std::optional<Conjunction> simplify(const MetricSpace &space, Conjunction c)
{
	Conjunction kept;
	for (auto &b : c) {
		if (b.inside && b.radius <= 0)
			return std::nullopt;
		if (!b.inside && b.radius < 0)
			continue;
		kept.push_back(std::move(b));
	}
	std::vector<bool> drop(kept.size(), false);
	for (std::size_t i = 0; i < kept.size(); ++i) {
		if (!kept[i].inside || drop[i])
			continue;
		IdealBall bi{kept[i].center, kept[i].radius};
		for (std::size_t j = 0; j < kept.size(); ++j) {
			if (i == j || drop[j])
				continue;
			IdealBall bj{kept[j].center, kept[j].radius};
			if (kept[j].inside) {
				if (space.ball_disjoint_closed(bi, bj))
					return std::nullopt;
				if (space.ball_subset(bi, bj))
					drop[j] = true;
			} else if (space.ball_subset(bi, bj)) {
				return std::nullopt;
			}
		}
	}
	Conjunction out;
	for (std::size_t i = 0; i < kept.size(); ++i)
		if (!drop[i])
			out.push_back(std::move(kept[i]));
	return out;
}

std::vector<IdealBall> refine_conjunction(const MetricSpace &space, const Conjunction &c,
                                          unsigned max_level)
{
	std::vector<IdealBall> out;
	for (unsigned level = 0; level <= max_level; ++level) {
		Rational rho = pow2(-static_cast<int>(level));
		for (IdealIndex s : space.net(level)) {
			IdealBall b{s, rho};
			bool ok = std::all_of(c.begin(), c.end(), [&](const BallConstraint &k) {
				IdealBall kb{k.center, k.radius};
				return k.inside ? space.ball_subset(b, kb) : space.ball_disjoint_closed(b, kb);
			});
			if (!ok)
				continue;
			bool covered = std::any_of(out.begin(), out.end(),
			                           [&](const IdealBall &o) { return space.ball_subset(b, o); });
			if (!covered)
				out.push_back(b);
		}
	}
	return out;
}

bool REOpenSet::Impl::contains_at(const PointDescriptor &x, Stage stage) const
{
	for (const auto &conj : inner(stage)) {
		bool all = std::all_of(conj.begin(), conj.end(),
		                       [&](const BallConstraint &c) { return proves_constraint(x, c, stage); });
		if (all)
			return true;
	}
	return false;
}

std::vector<IdealBall> REOpenSet::Impl::balls_through(Stage stage) const
{
	std::vector<IdealBall> out;
	for (const auto &conj : inner(stage)) {
		if (conj.size() == 1 && conj[0].inside) {
			out.push_back({conj[0].center, conj[0].radius});
			continue;
		}
		auto sub = refine_conjunction(*space, conj, std::min<Stage>(stage, 8));
		out.insert(out.end(), sub.begin(), sub.end());
	}
	return out;
}

namespace {

class EmptyImpl final : public REOpenSet::Impl {
public:
	using Impl::Impl;
	Dnf inner(Stage) const override { return {}; }
	bool contains_at(const PointDescriptor &, Stage) const override { return false; }
	bool is_empty_set() const override { return true; }
};

class BatchImpl final : public REOpenSet::Impl {
public:
	BatchImpl(SpacePtr space, std::function<std::vector<IdealBall>(Stage)> fn)
	: Impl(std::move(space)), fn_(std::move(fn))
	{}

	Dnf inner(Stage stage) const override
	{
		Dnf out;
		for (Stage n = 0; n <= stage; ++n)
			for (auto &b : fn_(n))
				if (b.radius > 0)
					out.push_back({BallConstraint{b.center, b.radius, true}});
		return out;
	}

private:
	std::function<std::vector<IdealBall>(Stage)> fn_;
};

class UnionImpl final : public REOpenSet::Impl {
public:
	UnionImpl(REOpenSet a, REOpenSet b) : Impl(a.space()), a_(std::move(a)), b_(std::move(b)) {}

	Dnf inner(Stage stage) const override
	{
		Dnf out = a_.inner(stage);
		Dnf rest = b_.inner(stage);
		out.insert(out.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
		return out;
	}
	bool contains_at(const PointDescriptor &x, Stage stage) const override
	{
		return a_.contains_at(x, stage) || b_.contains_at(x, stage);
	}
	std::vector<IdealBall> balls_through(Stage stage) const override
	{
		auto out = a_.balls_through(stage);
		auto rest = b_.balls_through(stage);
		out.insert(out.end(), rest.begin(), rest.end());
		return out;
	}

private:
	REOpenSet a_, b_;
};

class IntersectionImpl final : public REOpenSet::Impl {
public:
	IntersectionImpl(REOpenSet a, REOpenSet b) : Impl(a.space()), a_(std::move(a)), b_(std::move(b)) {}

	Dnf inner(Stage stage) const override
	{
		{
			std::lock_guard lock(mutex_);
			if (auto it = memo_.find(stage); it != memo_.end())
				return it->second;
		}
		Dnf out;
		Dnf left = a_.inner(stage);
		Dnf right = b_.inner(stage);
		for (const auto &l : left) {
			for (const auto &r : right) {
				Conjunction c = l;
				c.insert(c.end(), r.begin(), r.end());
				if (auto s = simplify(*space, std::move(c)))
					out.push_back(std::move(*s));
			}
		}
		std::lock_guard lock(mutex_);
		return memo_.emplace(stage, std::move(out)).first->second;
	}
	bool contains_at(const PointDescriptor &x, Stage stage) const override
	{
		return a_.contains_at(x, stage) && b_.contains_at(x, stage);
	}

private:
	REOpenSet a_, b_;
	mutable std::mutex mutex_;
	mutable std::map<Stage, Dnf> memo_;
};

class RegionImpl final : public REOpenSet::Impl {
public:
	RegionImpl(SpacePtr space, std::vector<StagedConstraint> cs)
	: Impl(std::move(space)), cs_(std::move(cs))
	{}

	Dnf inner(Stage stage) const override
	{
		Conjunction c;
		for (const auto &k : cs_) {
			RatInterval r = k.radius(stage);
			c.push_back({k.center, k.inside ? r.lo() : r.hi(), k.inside});
		}
		if (auto s = simplify(*space, std::move(c)))
			return {std::move(*s)};
		return {};
	}

private:
	std::vector<StagedConstraint> cs_;
};

class SetBatchImpl final : public REOpenSet::Impl {
public:
	SetBatchImpl(SpacePtr space, std::function<std::vector<REOpenSet>(Stage)> fn)
	: Impl(std::move(space)), fn_(std::move(fn))
	{}

	Dnf inner(Stage stage) const override
	{
		Dnf out;
		for (Stage n = 0; n <= stage; ++n) {
			for (const auto &u : fn_(n)) {
				Dnf d = u.inner(stage);
				out.insert(out.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
			}
		}
		return out;
	}
	bool contains_at(const PointDescriptor &x, Stage stage) const override
	{
		for (Stage n = 0; n <= stage; ++n)
			for (const auto &u : fn_(n))
				if (u.contains_at(x, stage))
					return true;
		return false;
	}
	std::vector<IdealBall> balls_through(Stage stage) const override
	{
		std::vector<IdealBall> out;
		for (Stage n = 0; n <= stage; ++n) {
			for (const auto &u : fn_(n)) {
				auto b = u.balls_through(stage);
				out.insert(out.end(), b.begin(), b.end());
			}
		}
		return out;
	}

private:
	std::function<std::vector<REOpenSet>(Stage)> fn_;
};

} // namespace

REOpenSet::REOpenSet() : REOpenSet(empty(unit_interval())) {}

REOpenSet::REOpenSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

REOpenSet REOpenSet::empty(SpacePtr space)
{
	return REOpenSet(std::make_shared<EmptyImpl>(std::move(space)));
}

REOpenSet REOpenSet::from_batches(SpacePtr space, std::function<std::vector<IdealBall>(Stage)> fn)
{
	return REOpenSet(std::make_shared<BatchImpl>(std::move(space), std::move(fn)));
}

REOpenSet REOpenSet::from_balls(SpacePtr space, std::vector<IdealBall> balls)
{
	for (const auto &b : balls) {
		space->check_index(b.center);
		if (b.radius <= 0)
			throw std::invalid_argument("ideal ball radius must be positive");
	}
	if (balls.empty())
		return empty(std::move(space));
	return from_batches(std::move(space), [b = std::move(balls)](Stage n) {
		return n == 0 ? b : std::vector<IdealBall>{};
	});
}

REOpenSet REOpenSet::from_sequence(SpacePtr space, std::vector<IdealBall> balls)
{
	for (const auto &b : balls) {
		space->check_index(b.center);
		if (b.radius <= 0)
			throw std::invalid_argument("ideal ball radius must be positive");
	}
	if (balls.empty())
		return empty(std::move(space));
	return from_batches(std::move(space), [b = std::move(balls)](Stage n) {
		return n < b.size() ? std::vector<IdealBall>{b[n]} : std::vector<IdealBall>{};
	});
}

REOpenSet REOpenSet::region(SpacePtr space, std::vector<StagedConstraint> constraints)
{
	return REOpenSet(std::make_shared<RegionImpl>(std::move(space), std::move(constraints)));
}

REOpenSet REOpenSet::from_set_batches(SpacePtr space, std::function<std::vector<REOpenSet>(Stage)> fn)
{
	return REOpenSet(std::make_shared<SetBatchImpl>(std::move(space), std::move(fn)));
}

const SpacePtr &REOpenSet::space() const { return impl_->space; }
bool REOpenSet::is_empty_set() const { return impl_->is_empty_set(); }
Dnf REOpenSet::inner(Stage stage) const { return impl_->inner(stage); }

bool REOpenSet::contains_at(const PointDescriptor &x, Stage stage) const
{
	return impl_->contains_at(x, stage);
}

std::vector<IdealBall> REOpenSet::balls_through(Stage stage) const
{
	return impl_->balls_through(stage);
}

REOpenSet reopen_union(const REOpenSet &u, const REOpenSet &v)
{
	if (u.is_empty_set())
		return v;
	if (v.is_empty_set())
		return u;
	return REOpenSet(std::make_shared<UnionImpl>(u, v));
}

REOpenSet reopen_intersection(const REOpenSet &u, const REOpenSet &v)
{
	if (u.is_empty_set())
		return u;
	if (v.is_empty_set())
		return v;
	return REOpenSet(std::make_shared<IntersectionImpl>(u, v));
}

} // namespace cps
