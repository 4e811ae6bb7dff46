#pragma once

// Independent reference computations used to freeze expected values.
// Nothing here calls the flow solvers, the staged valuation or the cell
// machinery of the library; only space distances and index conversions.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cps/measures.hpp"

namespace oracle {

using cps::IdealIndex;
using cps::IdealMeasure;
using cps::MetricSpace;
using cps::Rational;

inline Rational dist(const MetricSpace &s, IdealIndex a, IdealIndex b) { return s.require_exact(a, b); }

/// Prokhorov distance by enumeration of subsets of the first support:
/// h(e) = max_A mu(A) - nu({y : d(y, A) <= e}); the answer is the least
/// candidate e with h(e) <= e.
inline Rational prokhorov(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &s)
{
	const auto &a = mu.atoms();
	const auto &b = nu.atoms();
	std::set<Rational> cand{Rational(0)};
	for (const auto &x : a)
		for (const auto &y : b)
			cand.insert(dist(s, x.point, y.point));
	std::vector<Rational> radii(cand.begin(), cand.end());
	auto h = [&](const Rational &e) {
		Rational worst = 0;
		for (std::uint32_t mask = 1; mask < (1u << a.size()); ++mask) {
			Rational ma = 0;
			for (std::size_t i = 0; i < a.size(); ++i)
				if (mask >> i & 1)
					ma += a[i].weight;
			Rational nb = 0;
			for (const auto &y : b) {
				for (std::size_t i = 0; i < a.size(); ++i) {
					if ((mask >> i & 1) && dist(s, a[i].point, y.point) <= e) {
						nb += y.weight;
						break;
					}
				}
			}
			worst = std::max(worst, Rational(ma - nb));
		}
		return worst;
	};
	for (const auto &r : radii)
		cand.insert(h(r));
	for (const auto &e : cand)
		if (e >= 0 && h(e) <= e)
			return e;
	return 1;
}

/// Optimal transport cost by enumerating every saturation order: pick a
/// live row and column, ship min(supply, demand), retire whichever side
/// empties. Every vertex of the transport polytope arises this way.
inline Rational wasserstein(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &s)
{
	const auto &a = mu.atoms();
	const auto &b = nu.atoms();
	std::vector<std::vector<Rational>> cost(a.size(), std::vector<Rational>(b.size()));
	for (std::size_t i = 0; i < a.size(); ++i)
		for (std::size_t j = 0; j < b.size(); ++j)
			cost[i][j] = dist(s, a[i].point, b[j].point);
	std::map<std::string, Rational> memo;
	std::function<Rational(std::vector<Rational>, std::vector<Rational>)> go =
		[&](std::vector<Rational> sa, std::vector<Rational> sb) -> Rational {
		std::string key;
		for (const auto &q : sa)
			key += q.get_str() + ",";
		key += "|";
		for (const auto &q : sb)
			key += q.get_str() + ",";
		if (auto it = memo.find(key); it != memo.end())
			return it->second;
		bool rows_left = std::any_of(sa.begin(), sa.end(), [](const Rational &q) { return q > 0; });
		Rational best = -1;
		if (!rows_left) {
			best = 0;
		} else {
			for (std::size_t i = 0; i < sa.size(); ++i) {
				if (sa[i] <= 0)
					continue;
				for (std::size_t j = 0; j < sb.size(); ++j) {
					if (sb[j] <= 0)
						continue;
					Rational x = std::min(sa[i], sb[j]);
					auto na = sa, nb = sb;
					na[i] -= x;
					nb[j] -= x;
					Rational c = x * cost[i][j] + go(na, nb);
					if (best < 0 || c < best)
						best = c;
				}
			}
		}
		memo[key] = best;
		return best;
	};
	std::vector<Rational> sa, sb;
	for (const auto &x : a)
		sa.push_back(x.weight);
	for (const auto &y : b)
		sb.push_back(y.weight);
	return go(sa, sb);
}

/// Lebesgue measure of a finite union of open intervals (c - r, c + r)
/// clipped to [0, 1].
inline Rational interval_union_length(std::vector<std::pair<Rational, Rational>> spans)
{
	for (auto &[lo, hi] : spans) {
		lo = std::max(lo, Rational(0));
		hi = std::min(hi, Rational(1));
	}
	std::erase_if(spans, [](const auto &p) { return p.second <= p.first; });
	std::sort(spans.begin(), spans.end());
	Rational total = 0, cur_lo = 0, cur_hi = -1;
	bool open = false;
	for (const auto &[lo, hi] : spans) {
		if (open && lo <= cur_hi) {
			cur_hi = std::max(cur_hi, hi);
			continue;
		}
		if (open)
			total += cur_hi - cur_lo;
		cur_lo = lo;
		cur_hi = hi;
		open = true;
	}
	if (open)
		total += cur_hi - cur_lo;
	return total;
}

/// Bernoulli(p) weight of a union of cylinders given as words.
inline Rational cylinder_union_weight(const std::vector<std::string> &words, const Rational &p)
{
	std::size_t len = 0;
	for (const auto &w : words)
		len = std::max(len, w.size());
	Rational total = 0;
	for (std::uint64_t code = 0; code < (std::uint64_t(1) << len); ++code) {
		std::string w(len, '0');
		for (std::size_t i = 0; i < len; ++i)
			w[i] = (code >> i & 1) ? '1' : '0';
		bool hit = std::any_of(words.begin(), words.end(),
		                       [&](const std::string &c) { return w.compare(0, c.size(), c) == 0; });
		if (!hit)
			continue;
		Rational weight = 1;
		for (char ch : w)
			weight *= ch == '1' ? p : Rational(1 - p);
		total += weight;
	}
	return total;
}

/// Integral over [0, 1] of the pointwise max of steps value * 1{|x - c| < r}.
struct Step {
	Rational center, radius, value;
};

inline Rational step_sup_integral(const std::vector<Step> &steps)
{
	std::set<Rational> cuts{Rational(0), Rational(1)};
	for (const auto &s : steps) {
		for (Rational e : {Rational(s.center - s.radius), Rational(s.center + s.radius)})
			if (e > 0 && e < 1)
				cuts.insert(e);
	}
	std::vector<Rational> pts(cuts.begin(), cuts.end());
	Rational total = 0;
	for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
		Rational mid = (pts[i] + pts[i + 1]) / 2;
		Rational best = 0;
		for (const auto &s : steps) {
			Rational d = mid - s.center;
			if (d < 0)
				d = -d;
			if (d < s.radius)
				best = std::max(best, s.value);
		}
		total += best * (pts[i + 1] - pts[i]);
	}
	return total;
}

/// Numbers a + b*sqrt(2) with rational a, b.
struct QRoot2 {
	Rational a, b;

	friend QRoot2 operator+(const QRoot2 &x, const QRoot2 &y) { return {x.a + y.a, x.b + y.b}; }
	friend QRoot2 operator-(const QRoot2 &x, const QRoot2 &y) { return {x.a - y.a, x.b - y.b}; }

	int sign() const
	{
		int sa = cmp(a, 0), sb = cmp(b, 0);
		if (sa >= 0 && sb >= 0)
			return (sa > 0 || sb > 0) ? 1 : 0;
		if (sa <= 0 && sb <= 0)
			return -1;
		// Opposite signs: compare a^2 with 2 b^2.
		Rational lhs = a * a, rhs = 2 * b * b;
		if (sa > 0)
			return lhs > rhs ? 1 : -1;
		return rhs > lhs ? 1 : -1;
	}
	friend bool operator<(const QRoot2 &x, const QRoot2 &y) { return (x - y).sign() < 0; }
	friend bool operator<=(const QRoot2 &x, const QRoot2 &y) { return (x - y).sign() <= 0; }
	friend bool operator==(const QRoot2 &x, const QRoot2 &y) { return x.a == y.a && x.b == y.b; }
};

inline QRoot2 qmin(const QRoot2 &x, const QRoot2 &y) { return x < y ? x : y; }
inline QRoot2 qmax(const QRoot2 &x, const QRoot2 &y) { return x < y ? y : x; }

/// Ball i of the dyadic schedule: level l holds centers k/2^l, k = 0..2^l,
/// with radius sqrt(2) / 2^(l+1).
struct DyadicBall {
	Rational center;
	Rational scale;
};

inline DyadicBall dyadic_ball(std::size_t i)
{
	unsigned l = 0;
	while (i >= (std::size_t(1) << l) + 1) {
		i -= (std::size_t(1) << l) + 1;
		++l;
	}
	Rational c(static_cast<unsigned long>(i), static_cast<unsigned long>(std::size_t(1) << l));
	c.canonicalize();
	Rational q(1, static_cast<unsigned long>(std::size_t(2) << l));
	return {c, q};
}

/// Lebesgue measure of the cell of word under the dyadic schedule, exact
/// in Q(sqrt 2): bit 1 keeps (c - r, c + r), bit 0 removes [c - r, c + r].
inline QRoot2 dyadic_cell_length(const std::string &word)
{
	using Span = std::pair<QRoot2, QRoot2>;
	std::vector<Span> spans{{QRoot2{0, 0}, QRoot2{1, 0}}};
	for (std::size_t i = 0; i < word.size(); ++i) {
		DyadicBall b = dyadic_ball(i);
		QRoot2 lo{b.center, -b.scale}, hi{b.center, b.scale};
		std::vector<Span> next;
		for (const auto &[s, e] : spans) {
			if (word[i] == '1') {
				QRoot2 ns = qmax(s, lo), ne = qmin(e, hi);
				if (ns < ne)
					next.push_back({ns, ne});
			} else {
				QRoot2 le = qmin(e, lo);
				if (s < le)
					next.push_back({s, le});
				QRoot2 rs = qmax(s, hi);
				if (rs < e)
					next.push_back({rs, e});
			}
		}
		spans = std::move(next);
	}
	QRoot2 total{0, 0};
	for (const auto &[s, e] : spans)
		total = total + (e - s);
	return total;
}

/// Bit i of the expansion of x under the dyadic schedule, exactly.
inline char dyadic_bit(const Rational &x, std::size_t i)
{
	DyadicBall b = dyadic_ball(i);
	Rational d = x - b.center;
	if (d < 0)
		d = -d;
	return (QRoot2{d, 0} < QRoot2{0, b.scale}) ? '1' : '0';
}

/// Fixed-seed generator shared by the tests.
inline std::mt19937_64 &rng()
{
	static std::mt19937_64 g(20260418);
	return g;
}

inline std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi)
{
	return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng());
}

/// Random weights with the given common denominator, all positive.
inline std::vector<Rational> random_weights(std::size_t n, unsigned denominator)
{
	std::vector<unsigned> parts(n, 1);
	for (unsigned rest = denominator - static_cast<unsigned>(n); rest > 0; --rest)
		++parts[uniform(0, n - 1)];
	std::vector<Rational> w;
	for (unsigned p : parts) {
		Rational q(p, denominator);
		q.canonicalize();
		w.push_back(q);
	}
	return w;
}

} // namespace oracle
