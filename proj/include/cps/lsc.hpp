#pragma once

// Lower semicontinuous functions X -> [0, +inf] as enumerated suprema of
// step and hat functions, plus combination nodes (sup, scale, weighted
// sum, indicator, level counting).

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "cps/cms.hpp"

namespace cps {

/// value on the open ball, 0 elsewhere.
struct StepFunction {
	IdealBall ball;
	Rational value;
};

/// value * [1 - [d(y, center) - inner_radius]^+ / slope_width]^+
struct HatFunction {
	Rational value;
	IdealIndex center = 0;
	Rational inner_radius;
	Rational slope_width;
};

using BasicFunction = std::variant<StepFunction, HatFunction>;

/// A step-like minorant found at some stage: the function is >= value on
/// the region.
struct Piece {
	Rational value;
	Dnf region;
};

Rational hat_value(const HatFunction &h, const Rational &distance);

class LscFunction {
public:
	class Node;

	LscFunction();
	explicit LscFunction(std::shared_ptr<const Node> node);

	/// Constant 0 (empty enumeration).
	static LscFunction zero(SpacePtr space);
	/// Stage n enumerates the basics returned by fn(n).
	static LscFunction from_batches(SpacePtr space, std::function<std::vector<BasicFunction>(Stage)> fn);
	/// All basics enumerated at stage 0.
	static LscFunction from_basics(SpacePtr space, std::vector<BasicFunction> basics);
	static LscFunction step(SpacePtr space, IdealBall ball, Rational value);
	static LscFunction hat(SpacePtr space, HatFunction h);

	const SpacePtr &space() const;

	/// Certified lower bound on f(x); nondecreasing in stage.
	Rational eval_lower(const PointDescriptor &x, Stage stage) const;
	/// Certified lower bound on inf of f over the open ball.
	Rational eval_lower_on_ball(const IdealBall &ball, Stage stage) const;
	/// Step minorants enumerated by the stage. Their supremum over all
	/// stages is f.
	std::vector<Piece> pieces(Stage stage) const;
	/// {x : f(x) > c}, enumerated using the basics found by stage_budget.
	REOpenSet superlevel(const Rational &c, Stage stage_budget) const;

	const Node &node() const { return *node_; }

private:
	std::shared_ptr<const Node> node_;
};

class LscFunction::Node {
public:
	explicit Node(SpacePtr space) : space(std::move(space)) {}
	virtual ~Node() = default;

	virtual Rational eval(const PointDescriptor &x, Stage stage) const = 0;
	virtual std::vector<Piece> pieces(Stage stage) const = 0;
	/// Default: constraint-checked pieces for the inner approximation and
	/// eval for membership.
	virtual REOpenSet superlevel(const Rational &c, Stage budget, const LscFunction &self) const;
	/// Default: largest piece value whose region provably contains the ball.
	virtual Rational eval_on_ball(const IdealBall &ball, Stage stage) const;
	/// Nonempty for nodes that are nonnegative combinations of children,
	/// so integration can distribute over them.
	virtual std::vector<std::pair<Rational, LscFunction>> linear_parts() const { return {}; }
	virtual bool is_zero() const { return false; }

	SpacePtr space;
};

LscFunction lsc_sup(std::vector<LscFunction> fs);
LscFunction lsc_scale(const LscFunction &f, const Rational &factor);
/// Finite nonnegative combination, kept as a lazy node.
LscFunction lsc_sum(std::vector<std::pair<Rational, LscFunction>> terms);
/// 1 on u, 0 elsewhere.
LscFunction indicator(const REOpenSet &u);
/// x -> sup{n : x in U_0 and ... and U_n}, 0 when x is not in U_0.
/// levels(n) must return U_n.
LscFunction level_count(SpacePtr space, std::function<REOpenSet(Stage)> levels);

/// True when the ball is provably inside the region (some conjunction
/// holds on the whole ball).
bool region_contains_ball(const MetricSpace &space, const Dnf &region, const IdealBall &ball);

} // namespace cps
