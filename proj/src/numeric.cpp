#include "cps/numeric.hpp"

#include <algorithm>
#include <sstream>

namespace cps {

std::string to_string(const Rational &q)
{
	return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text)
{
	auto is_int = [](std::string_view s) {
		if (!s.empty() && (s.front() == '-' || s.front() == '+'))
			s.remove_prefix(1);
		return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
			return c >= '0' && c <= '9';
		});
	};
	std::string_view num = text, den = "1";
	if (auto slash = text.find('/'); slash != std::string_view::npos) {
		num = text.substr(0, slash);
		den = text.substr(slash + 1);
	}
	if (!is_int(num) || !is_int(den) || den.front() == '-' || den.front() == '+')
		throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
	std::string n(num.front() == '+' ? num.substr(1) : num);
	Integer p(n, 10), q(std::string(den), 10);
	if (q == 0)
		throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
	Rational r(p, q);
	r.canonicalize();
	return r;
}

Rational pow2(int e)
{
	Integer one = 1;
	Integer p;
	mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
	return e < 0 ? Rational(Integer(1), p) : Rational(p);
}

std::string approx_decimal(const Rational &q, int digits)
{
	mpf_class f(q, 256);
	mp_exp_t exp;
	std::string mant = f.get_str(exp, 10, static_cast<std::size_t>(digits));
	if (mant.empty())
		return "0";
	bool neg = mant.front() == '-';
	if (neg)
		mant.erase(0, 1);
	std::ostringstream os;
	if (neg)
		os << '-';
	if (exp <= 0) {
		os << "0." << std::string(static_cast<std::size_t>(-exp), '0') << mant;
	} else if (static_cast<std::size_t>(exp) >= mant.size()) {
		os << mant << std::string(static_cast<std::size_t>(exp) - mant.size(), '0');
	} else {
		os << mant.substr(0, static_cast<std::size_t>(exp)) << '.'
		   << mant.substr(static_cast<std::size_t>(exp));
	}
	return os.str();
}

Rational rat_min(const Rational &a, const Rational &b) { return a < b ? a : b; }
Rational rat_max(const Rational &a, const Rational &b) { return a < b ? b : a; }

RatInterval::RatInterval(Rational lo, Rational hi)
: lo_(std::move(lo)), hi_(std::move(hi))
{
	if (hi_ < lo_)
		throw std::invalid_argument("interval with lo > hi: [" + to_string(lo_) + ", " +
		                            to_string(hi_) + "]");
}

RatInterval RatInterval::intersect(const RatInterval &o) const
{
	if (!intersects(o))
		throw std::domain_error("disjoint intervals");
	return {rat_max(lo_, o.lo_), rat_min(hi_, o.hi_)};
}

RatInterval interval_add(const RatInterval &a, const RatInterval &b)
{
	return {a.lo() + b.lo(), a.hi() + b.hi()};
}

RatInterval interval_sub(const RatInterval &a, const RatInterval &b)
{
	return {a.lo() - b.hi(), a.hi() - b.lo()};
}

RatInterval interval_mul(const RatInterval &a, const RatInterval &b)
{
	Rational p[4] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
	return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

RatInterval interval_min(const RatInterval &a, const RatInterval &b)
{
	return {rat_min(a.lo(), b.lo()), rat_min(a.hi(), b.hi())};
}

RatInterval interval_max(const RatInterval &a, const RatInterval &b)
{
	return {rat_max(a.lo(), b.lo()), rat_max(a.hi(), b.hi())};
}

StagedLowerReal::StagedLowerReal()
: StagedLowerReal(Fn([](Stage) -> Bound { return std::nullopt; }))
{}

StagedLowerReal::StagedLowerReal(Fn fn)
: fn_(std::make_shared<const Fn>(std::move(fn)))
{}

StagedLowerReal StagedLowerReal::bottom() { return StagedLowerReal(); }

StagedLowerReal StagedLowerReal::constant(Rational q)
{
	return StagedLowerReal([q = std::move(q)](Stage) -> Bound { return q; });
}

StagedLowerReal StagedLowerReal::from_table(std::vector<Bound> table)
{
	return StagedLowerReal([t = std::move(table)](Stage n) -> Bound {
		if (t.empty())
			return std::nullopt;
		return t[std::min<std::size_t>(n, t.size() - 1)];
	});
}

Rational StagedLowerReal::value_or_zero(Stage n) const
{
	auto b = bound_at(n);
	return b ? *b : Rational(0);
}

StagedUpperReal::StagedUpperReal()
: StagedUpperReal(Fn([](Stage) -> Bound { return std::nullopt; }))
{}

StagedUpperReal::StagedUpperReal(Fn fn)
: fn_(std::make_shared<const Fn>(std::move(fn)))
{}

StagedUpperReal StagedUpperReal::constant(Rational q)
{
	return StagedUpperReal([q = std::move(q)](Stage) -> Bound { return q; });
}

StagedLowerReal lower_sup(std::vector<StagedLowerReal> xs)
{
	return StagedLowerReal([xs = std::move(xs)](Stage n) -> StagedLowerReal::Bound {
		StagedLowerReal::Bound best;
		for (const auto &x : xs) {
			auto b = x.bound_at(n);
			if (b && (!best || *best < *b))
				best = std::move(b);
		}
		return best;
	});
}

StagedLowerReal lower_weighted_sum(std::vector<WeightedLower> pairs)
{
	for (const auto &p : pairs)
		if (p.weight <= 0)
			throw std::invalid_argument("lower_weighted_sum: weights must be positive");
	return StagedLowerReal([pairs = std::move(pairs)](Stage n) -> StagedLowerReal::Bound {
		if (pairs.empty())
			return Rational(0);
		Rational sum = 0;
		bool any = false;
		for (const auto &p : pairs) {
			if (auto b = p.value.bound_at(n)) {
				sum += p.weight * *b;
				any = true;
			}
		}
		if (!any)
			return std::nullopt;
		return sum;
	});
}

bool exceeds_at(const StagedLowerReal &x, const Rational &threshold, Stage stage)
{
	auto b = x.bound_at(stage);
	return b && *b > threshold;
}

} // namespace cps
