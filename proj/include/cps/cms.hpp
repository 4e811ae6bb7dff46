#pragma once

// Computable metric spaces: ideal points with an interval distance oracle,
// points as fast Cauchy streams of ideal points, ideal balls, and r.e. open
// sets with semidecidable membership.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cps/numeric.hpp"

namespace cps {

using IdealIndex = std::uint64_t;

class FastCauchyViolation : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class IrrationalDistance : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class InvalidIndex : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

struct IdealBall {
	IdealIndex center = 0;
	Rational radius;
};

/// A separable metric space with a numbered dense set of ideal points.
///
/// Numberings are injective; indices outside the numbering's domain are
/// rejected by valid_index().
class MetricSpace {
public:
	virtual ~MetricSpace() = default;

	virtual std::string kind() const = 0;
	virtual bool valid_index(IdealIndex i) const = 0;

	/// Exact distance when it is rational, nullopt otherwise.
	virtual std::optional<Rational> exact_distance(IdealIndex i, IdealIndex j) const = 0;

	/// Interval of width <= 2^-precision containing d(s_i, s_j).
	virtual RatInterval distance(IdealIndex i, IdealIndex j, unsigned precision) const;

	/// Upper bound on every distance, if the space is bounded.
	virtual std::optional<Rational> diameter_bound() const { return std::nullopt; }

	/// Finite set of ideal points such that every point of the space lies
	/// within 2^-level of one of them.
	virtual std::vector<IdealIndex> net(unsigned level) const = 0;

	/// True when B(inner) is contained in B(outer). The default uses the
	/// triangle inequality on exact distances and may answer false for
	/// genuine inclusions.
	virtual bool ball_subset(const IdealBall &inner, const IdealBall &outer) const;

	/// True when B(a) and the closed ball Bbar(b) are provably disjoint.
	virtual bool ball_disjoint_closed(const IdealBall &a, const IdealBall &b) const;

	/// Exact distance or IrrationalDistance.
	Rational require_exact(IdealIndex i, IdealIndex j) const;
	void check_index(IdealIndex i) const;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Rationals in [0,1] with |x - y|. Index of p/q is the Cantor pairing
/// (p+q)(p+q+1)/2 + q, restricted to canonical p/q with 0 <= p <= q.
class UnitInterval final : public MetricSpace {
public:
	std::string kind() const override { return "unit_interval"; }
	bool valid_index(IdealIndex i) const override;
	std::optional<Rational> exact_distance(IdealIndex i, IdealIndex j) const override;
	std::optional<Rational> diameter_bound() const override { return Rational(1); }
	std::vector<IdealIndex> net(unsigned level) const override;
	bool ball_subset(const IdealBall &inner, const IdealBall &outer) const override;
	bool ball_disjoint_closed(const IdealBall &a, const IdealBall &b) const override;

	Rational value(IdealIndex i) const;
	IdealIndex index_of(const Rational &x) const;
};

/// Binary sequences with d = 2^-(first differing position). Ideal point i
/// is the sequence whose bit j is bit j of i, followed by zeros.
class CantorSpace final : public MetricSpace {
public:
	std::string kind() const override { return "cantor"; }
	bool valid_index(IdealIndex) const override { return true; }
	std::optional<Rational> exact_distance(IdealIndex i, IdealIndex j) const override;
	std::optional<Rational> diameter_bound() const override { return Rational(1); }
	std::vector<IdealIndex> net(unsigned level) const override;
	bool ball_subset(const IdealBall &inner, const IdealBall &outer) const override;
	bool ball_disjoint_closed(const IdealBall &a, const IdealBall &b) const override;

	/// Number of leading positions fixed by the open ball of radius r:
	/// d(x, s) < r iff x agrees with s on positions [0, m).
	static unsigned open_cylinder_length(const Rational &r);
	/// Same for the closed ball d(x, s) <= r.
	static unsigned closed_cylinder_length(const Rational &r);
	static IdealIndex index_of(std::string_view word);
	static std::string word(IdealIndex i, unsigned length);
};

/// Product with the max metric. Index is the Cantor pairing of the
/// component indices.
class ProductSpace final : public MetricSpace {
public:
	ProductSpace(SpacePtr a, SpacePtr b);

	std::string kind() const override { return "product"; }
	bool valid_index(IdealIndex i) const override;
	std::optional<Rational> exact_distance(IdealIndex i, IdealIndex j) const override;
	RatInterval distance(IdealIndex i, IdealIndex j, unsigned precision) const override;
	std::optional<Rational> diameter_bound() const override;
	std::vector<IdealIndex> net(unsigned level) const override;

	const SpacePtr &first() const { return a_; }
	const SpacePtr &second() const { return b_; }
	IdealIndex pair(IdealIndex a, IdealIndex b) const;
	std::pair<IdealIndex, IdealIndex> unpair(IdealIndex i) const;

private:
	SpacePtr a_, b_;
};

SpacePtr unit_interval();
SpacePtr cantor_space();
SpacePtr product_space(SpacePtr a, SpacePtr b);

/// Cantor pairing with overflow detection.
IdealIndex cantor_pair(IdealIndex a, IdealIndex b);
std::pair<IdealIndex, IdealIndex> cantor_unpair(IdealIndex z);

/// A point given by a fast Cauchy stream of ideal points:
/// d(s_n, s_{n+1}) < 2^-n. The contract is checked lazily on the prefix
/// actually consumed; a provable violation raises FastCauchyViolation.
class PointDescriptor {
public:
	using Stream = std::function<IdealIndex(Stage)>;

	static PointDescriptor ideal(SpacePtr space, IdealIndex i);
	static PointDescriptor from_stream(SpacePtr space, Stream stream);
	/// Finite prefix; from position constant_from on the stream repeats
	/// element constant_from (or the last element when the prefix is shorter).
	static PointDescriptor from_prefix(SpacePtr space, std::vector<IdealIndex> prefix,
	                                   std::size_t constant_from);

	IdealIndex at(Stage n) const;
	/// Set when the point is itself an ideal point.
	std::optional<IdealIndex> exact() const { return exact_; }
	const SpacePtr &space() const { return space_; }

private:
	struct State;
	PointDescriptor(SpacePtr space, Stream stream, std::optional<IdealIndex> exact);

	SpacePtr space_;
	std::shared_ptr<State> state_;
	std::optional<IdealIndex> exact_;
};

/// Interval of width <= 2^-k containing d(x, y). Intervals are nested in k.
RatInterval point_distance(const PointDescriptor &x, const PointDescriptor &y, unsigned k);

/// Same, against an ideal point.
RatInterval point_ideal_distance(const PointDescriptor &x, IdealIndex s, unsigned k);

/// Single-stage enclosure (not intersected with earlier stages).
RatInterval point_ideal_distance_raw(const PointDescriptor &x, IdealIndex s, unsigned k);

enum class Verdict { Inside, Outside, Unknown };

/// Inside when d(x, center) < radius is proven at this stage, Outside when
/// d(x, center) > radius is proven. Stable in the stage.
Verdict in_ball_at_stage(const PointDescriptor &x, const IdealBall &ball, Stage stage);

/// d(x, c) < r (inside) or d(x, c) > r (outside).
struct BallConstraint {
	IdealIndex center = 0;
	Rational radius;
	bool inside = true;
};

using Conjunction = std::vector<BallConstraint>;
/// Union of conjunctions.
using Dnf = std::vector<Conjunction>;

bool proves_constraint(const PointDescriptor &x, const BallConstraint &c, Stage stage);

/// Removes redundant inside constraints; returns nullopt when the
/// conjunction is provably empty.
std::optional<Conjunction> simplify(const MetricSpace &space, Conjunction c);

/// Staged constraint whose radius is only known through enclosures, as for
/// the almost decidable balls of a binary representation.
struct StagedConstraint {
	IdealIndex center = 0;
	std::function<RatInterval(Stage)> radius;
	bool inside = true;
};

/// An r.e. open set. The representation offers, for each stage, a finite
/// inner approximation as a union of conjunctions of ball constraints;
/// these grow with the stage and exhaust the set in the limit.
class REOpenSet {
public:
	class Impl;

	REOpenSet();
	explicit REOpenSet(std::shared_ptr<const Impl> impl);

	static REOpenSet empty(SpacePtr space);
	/// Stage n enumerates the batch returned by fn(n).
	static REOpenSet from_batches(SpacePtr space, std::function<std::vector<IdealBall>(Stage)> fn);
	/// All balls enumerated at stage 0.
	static REOpenSet from_balls(SpacePtr space, std::vector<IdealBall> balls);
	/// Ball k is enumerated at stage k.
	static REOpenSet from_sequence(SpacePtr space, std::vector<IdealBall> balls);
	/// Conjunction of staged constraints (cells, complements of closed balls).
	static REOpenSet region(SpacePtr space, std::vector<StagedConstraint> constraints);
	/// Union of the sets produced by fn at each stage; the sets from earlier
	/// stages persist.
	static REOpenSet from_set_batches(SpacePtr space, std::function<std::vector<REOpenSet>(Stage)> fn);

	const SpacePtr &space() const;
	bool is_empty_set() const;

	/// Inner approximation: all constraints from stages <= stage.
	Dnf inner(Stage stage) const;
	bool contains_at(const PointDescriptor &x, Stage stage) const;
	/// Ideal balls enumerated by stage (cumulative). Non-ball regions are
	/// refined into sub-balls centred on net points.
	std::vector<IdealBall> balls_through(Stage stage) const;

	const Impl &impl() const { return *impl_; }

private:
	std::shared_ptr<const Impl> impl_;
};

class REOpenSet::Impl {
public:
	explicit Impl(SpacePtr space) : space(std::move(space)) {}
	virtual ~Impl() = default;
	virtual Dnf inner(Stage stage) const = 0;
	virtual bool contains_at(const PointDescriptor &x, Stage stage) const;
	virtual std::vector<IdealBall> balls_through(Stage stage) const;
	virtual bool is_empty_set() const { return false; }

	SpacePtr space;
};

REOpenSet reopen_union(const REOpenSet &u, const REOpenSet &v);
REOpenSet reopen_intersection(const REOpenSet &u, const REOpenSet &v);

/// Sub-balls of a conjunction, centred on net points of levels <= max_level.
std::vector<IdealBall> refine_conjunction(const MetricSpace &space, const Conjunction &c,
                                          unsigned max_level);

} // namespace cps
