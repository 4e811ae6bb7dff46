#pragma once

// Exact scalars and staged semicomputable reals.
//
// Every semicomputation in this library is driven by a single natural
// number, the stage. A StagedLowerReal is a monotone map from stages to
// rational lower bounds; its value is the supremum over all stages.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace cps {

using Rational = mpq_class;
using Integer = mpz_class;
using Stage = std::uint32_t;

/// Canonical "p/q" rendering. The denominator is always printed.
std::string to_string(const Rational &q);

/// Parses "p", "p/q" or "-p/q" and returns the reduced value.
/// Throws std::invalid_argument on malformed text or zero denominator.
Rational parse_rational(std::string_view text);

/// 2^e for any integer e.
Rational pow2(int e);

/// Decimal rendering for display only.
std::string approx_decimal(const Rational &q, int digits = 12);

Rational rat_min(const Rational &a, const Rational &b);
Rational rat_max(const Rational &a, const Rational &b);

/// Closed rational interval [lo, hi].
class RatInterval {
public:
	RatInterval() = default;
	RatInterval(Rational lo, Rational hi);
	static RatInterval point(const Rational &x) { return {x, x}; }

	const Rational &lo() const { return lo_; }
	const Rational &hi() const { return hi_; }
	Rational width() const { return hi_ - lo_; }
	Rational midpoint() const { return (lo_ + hi_) / 2; }

	bool contains(const Rational &x) const { return lo_ <= x && x <= hi_; }
	bool contains(const RatInterval &o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
	bool intersects(const RatInterval &o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

	/// Intersection; throws std::domain_error when disjoint.
	RatInterval intersect(const RatInterval &o) const;

	friend bool operator==(const RatInterval &a, const RatInterval &b)
	{
		return a.lo_ == b.lo_ && a.hi_ == b.hi_;
	}

private:
	Rational lo_{0};
	Rational hi_{0};
};

RatInterval interval_add(const RatInterval &a, const RatInterval &b);
RatInterval interval_sub(const RatInterval &a, const RatInterval &b);
RatInterval interval_mul(const RatInterval &a, const RatInterval &b);
RatInterval interval_min(const RatInterval &a, const RatInterval &b);
RatInterval interval_max(const RatInterval &a, const RatInterval &b);

/// A lower semicomputable real in [-inf, +inf]: stage -> rational lower
/// bound, or nullopt for the bottom element (no bound yet).
///
/// Consumers that deal with nonnegative quantities read the bottom
/// element as 0 (see value_or_zero).
class StagedLowerReal {
public:
	using Bound = std::optional<Rational>;
	using Fn = std::function<Bound(Stage)>;

	/// Bottom at every stage.
	StagedLowerReal();
	explicit StagedLowerReal(Fn fn);

	static StagedLowerReal bottom();
	static StagedLowerReal constant(Rational q);
	/// Table lookup; the last entry persists beyond the table.
	static StagedLowerReal from_table(std::vector<Bound> table);

	Bound bound_at(Stage n) const { return (*fn_)(n); }
	Rational value_or_zero(Stage n) const;

private:
	std::shared_ptr<const Fn> fn_;
};

/// An upper semicomputable real: stage -> rational upper bound, or nullopt
/// for +inf.
class StagedUpperReal {
public:
	using Bound = std::optional<Rational>;
	using Fn = std::function<Bound(Stage)>;

	StagedUpperReal();
	explicit StagedUpperReal(Fn fn);
	static StagedUpperReal constant(Rational q);

	Bound bound_at(Stage n) const { return (*fn_)(n); }

private:
	std::shared_ptr<const Fn> fn_;
};

StagedLowerReal lower_sup(std::vector<StagedLowerReal> xs);

struct WeightedLower {
	Rational weight;
	StagedLowerReal value;
};

/// Sum of weight * value. A bottom summand contributes 0; the result is
/// bottom only when every summand is bottom. Empty input yields constant 0.
StagedLowerReal lower_weighted_sum(std::vector<WeightedLower> pairs);

bool exceeds_at(const StagedLowerReal &x, const Rational &threshold, Stage stage);

/// Raised when a bounded semicomputation runs out of fuel. Never a wrong
/// answer: the same query with a larger budget may succeed.
class BudgetExhausted : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

} // namespace cps
