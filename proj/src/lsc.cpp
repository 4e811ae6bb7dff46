#include "cps/lsc.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace cps {

Rational hat_value(const HatFunction &h, const Rational &distance)
{
	Rational excess = distance - h.inner_radius;
	if (excess < 0)
		excess = 0;
	Rational frac = 1 - excess / h.slope_width;
	if (frac <= 0)
		return 0;
	return h.value * frac;
}

bool region_contains_ball(const MetricSpace &space, const Dnf &region, const IdealBall &ball)
{
	for (const auto &conj : region) {
		bool all = std::all_of(conj.begin(), conj.end(), [&](const BallConstraint &c) {
			IdealBall cb{c.center, c.radius};
			return c.inside ? space.ball_subset(ball, cb) : space.ball_disjoint_closed(ball, cb);
		});
		if (all)
			return true;
	}
	return false;
}

namespace {

// Superlevel set read off a function's own staged evaluation and pieces.
class SuperlevelImpl final : public REOpenSet::Impl {
public:
	SuperlevelImpl(LscFunction f, Rational c, Stage budget)
	: Impl(f.space()), f_(std::move(f)), c_(std::move(c)), budget_(budget)
	{}

	Dnf inner(Stage stage) const override
	{
		Dnf out;
		for (auto &p : f_.pieces(std::min(stage, budget_))) {
			if (p.value > c_)
				out.insert(out.end(), std::make_move_iterator(p.region.begin()),
				           std::make_move_iterator(p.region.end()));
		}
		return out;
	}
	bool contains_at(const PointDescriptor &x, Stage stage) const override
	{
		return f_.eval_lower(x, std::min(stage, budget_)) > c_;
	}

private:
	LscFunction f_;
	Rational c_;
	Stage budget_;
};

class ZeroNode final : public LscFunction::Node {
public:
	using Node::Node;
	Rational eval(const PointDescriptor &, Stage) const override { return 0; }
	std::vector<Piece> pieces(Stage) const override { return {}; }
	REOpenSet superlevel(const Rational &, Stage, const LscFunction &) const override
	{
		return REOpenSet::empty(space);
	}
	Rational eval_on_ball(const IdealBall &, Stage) const override { return 0; }
	bool is_zero() const override { return true; }
};

class BasicsNode final : public LscFunction::Node {
public:
	BasicsNode(SpacePtr space, std::function<std::vector<BasicFunction>(Stage)> fn)
	: Node(std::move(space)), fn_(std::move(fn))
	{}

	std::vector<BasicFunction> through(Stage stage) const
	{
		std::vector<BasicFunction> out;
		for (Stage n = 0; n <= stage; ++n) {
			auto b = fn_(n);
			out.insert(out.end(), b.begin(), b.end());
		}
		return out;
	}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		Rational best = 0;
		for (const auto &b : through(stage)) {
			Rational v = 0;
			if (auto s = std::get_if<StepFunction>(&b)) {
				if (s->value > best && in_ball_at_stage(x, s->ball, stage) == Verdict::Inside)
					v = s->value;
			} else {
				const auto &h = std::get<HatFunction>(b);
				if (h.value > best)
					v = hat_value(h, point_ideal_distance(x, h.center, stage).hi());
			}
			if (v > best)
				best = v;
		}
		return best;
	}

	std::vector<Piece> pieces(Stage stage) const override
	{
		std::vector<Piece> out;
		unsigned depth = stage / 3;
		for (const auto &b : through(stage)) {
			if (auto s = std::get_if<StepFunction>(&b)) {
				out.push_back({s->value, {{BallConstraint{s->ball.center, s->ball.radius, true}}}});
				continue;
			}
			// Staircase under the hat: value q*j/2^depth where the hat is at
			// least that high.
			const auto &h = std::get<HatFunction>(b);
			Rational steps = pow2(static_cast<int>(depth));
			for (Integer j = 1; j <= steps; ++j) {
				Rational frac = Rational(j) / steps;
				Rational radius = h.inner_radius + h.slope_width * (1 - frac);
				if (radius <= 0)
					continue;
				out.push_back({h.value * frac, {{BallConstraint{h.center, radius, true}}}});
			}
		}
		return out;
	}

	REOpenSet superlevel(const Rational &c, Stage budget, const LscFunction &) const override
	{
		auto fn = fn_;
		return REOpenSet::from_batches(space, [fn, c, budget](Stage n) {
			std::vector<IdealBall> out;
			if (n > budget)
				return out;
			for (const auto &b : fn(n)) {
				if (auto s = std::get_if<StepFunction>(&b)) {
					if (s->value > c)
						out.push_back(s->ball);
					continue;
				}
				const auto &h = std::get<HatFunction>(b);
				if (h.value <= c)
					continue;
				Rational radius = h.inner_radius + h.slope_width * (1 - c / h.value);
				if (radius > 0)
					out.push_back({h.center, radius});
			}
			return out;
		});
	}

	Rational eval_on_ball(const IdealBall &ball, Stage stage) const override
	{
		Rational best = 0;
		for (const auto &b : through(stage)) {
			Rational v = 0;
			if (auto s = std::get_if<StepFunction>(&b)) {
				if (space->ball_subset(ball, s->ball))
					v = s->value;
			} else {
				const auto &h = std::get<HatFunction>(b);
				Rational far = space->distance(ball.center, h.center, stage).hi() + ball.radius;
				v = hat_value(h, far);
			}
			if (v > best)
				best = v;
		}
		return best;
	}

private:
	std::function<std::vector<BasicFunction>(Stage)> fn_;
};

class SupNode final : public LscFunction::Node {
public:
	SupNode(SpacePtr space, std::vector<LscFunction> fs) : Node(std::move(space)), fs_(std::move(fs)) {}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		Rational best = 0;
		for (const auto &f : fs_)
			best = rat_max(best, f.eval_lower(x, stage));
		return best;
	}
	std::vector<Piece> pieces(Stage stage) const override
	{
		std::vector<Piece> out;
		for (const auto &f : fs_) {
			auto p = f.pieces(stage);
			out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
		}
		return out;
	}
	REOpenSet superlevel(const Rational &c, Stage budget, const LscFunction &) const override
	{
		REOpenSet out = REOpenSet::empty(space);
		for (const auto &f : fs_)
			out = reopen_union(out, f.superlevel(c, budget));
		return out;
	}
	Rational eval_on_ball(const IdealBall &ball, Stage stage) const override
	{
		Rational best = 0;
		for (const auto &f : fs_)
			best = rat_max(best, f.eval_lower_on_ball(ball, stage));
		return best;
	}

private:
	std::vector<LscFunction> fs_;
};

class ScaleNode final : public LscFunction::Node {
public:
	ScaleNode(LscFunction f, Rational w) : Node(f.space()), f_(std::move(f)), w_(std::move(w)) {}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		return w_ * f_.eval_lower(x, stage);
	}
	std::vector<Piece> pieces(Stage stage) const override
	{
		auto out = f_.pieces(stage);
		for (auto &p : out)
			p.value *= w_;
		return out;
	}
	REOpenSet superlevel(const Rational &c, Stage budget, const LscFunction &) const override
	{
		return f_.superlevel(c / w_, budget);
	}
	Rational eval_on_ball(const IdealBall &ball, Stage stage) const override
	{
		return w_ * f_.eval_lower_on_ball(ball, stage);
	}
	std::vector<std::pair<Rational, LscFunction>> linear_parts() const override { return {{w_, f_}}; }

private:
	LscFunction f_;
	Rational w_;
};

class SumNode final : public LscFunction::Node {
public:
	SumNode(SpacePtr space, std::vector<std::pair<Rational, LscFunction>> terms)
	: Node(std::move(space)), terms_(std::move(terms))
	{}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		Rational sum = 0;
		for (const auto &[w, f] : terms_)
			sum += w * f.eval_lower(x, stage);
		return sum;
	}

	// Every choice of at most one piece per term, values added and regions
	// intersected.
	std::vector<Piece> pieces(Stage stage) const override
	{
		std::vector<Piece> acc{{Rational(0), {Conjunction{}}}};
		for (const auto &[w, f] : terms_) {
			auto ps = f.pieces(stage);
			std::vector<Piece> next = acc;
			for (const auto &a : acc) {
				for (const auto &p : ps) {
					Piece combo{a.value + w * p.value, {}};
					for (const auto &l : a.region) {
						for (const auto &r : p.region) {
							Conjunction c = l;
							c.insert(c.end(), r.begin(), r.end());
							if (auto s = simplify(*space, std::move(c)))
								combo.region.push_back(std::move(*s));
						}
					}
					if (!combo.region.empty())
						next.push_back(std::move(combo));
				}
			}
			acc = std::move(next);
		}
		std::erase_if(acc, [](const Piece &p) { return p.value <= 0; });
		return acc;
	}

	Rational eval_on_ball(const IdealBall &ball, Stage stage) const override
	{
		Rational sum = 0;
		for (const auto &[w, f] : terms_)
			sum += w * f.eval_lower_on_ball(ball, stage);
		return sum;
	}
	std::vector<std::pair<Rational, LscFunction>> linear_parts() const override { return terms_; }

private:
	std::vector<std::pair<Rational, LscFunction>> terms_;
};

class IndicatorNode final : public LscFunction::Node {
public:
	explicit IndicatorNode(REOpenSet u) : Node(u.space()), u_(std::move(u)) {}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		return u_.contains_at(x, stage) ? 1 : 0;
	}
	std::vector<Piece> pieces(Stage stage) const override
	{
		Dnf region = u_.inner(stage);
		if (region.empty())
			return {};
		return {{Rational(1), std::move(region)}};
	}
	REOpenSet superlevel(const Rational &c, Stage, const LscFunction &) const override
	{
		return c < 1 ? u_ : REOpenSet::empty(space);
	}

private:
	REOpenSet u_;
};

// Levels U_0, U_1, ... and the running intersections U_0 and ... and U_n,
// folded iteratively so long chains stay off the call stack.
class LevelChain {
public:
	LevelChain(SpacePtr space, std::function<REOpenSet(Stage)> levels)
	: space_(std::move(space)), levels_(std::move(levels))
	{}

	const SpacePtr &space() const { return space_; }

	REOpenSet level(Stage n) const
	{
		{
			std::lock_guard lock(mutex_);
			if (auto it = levels_cache_.find(n); it != levels_cache_.end())
				return it->second;
		}
		REOpenSet u = levels_(n);
		std::lock_guard lock(mutex_);
		return levels_cache_.emplace(n, std::move(u)).first->second;
	}

	Dnf running_inner(Stage n, Stage stage) const
	{
		Stage k = 0;
		Dnf cur;
		{
			std::lock_guard lock(mutex_);
			auto &folds = folds_[stage];
			if (!folds.empty()) {
				k = std::min<Stage>(n, static_cast<Stage>(folds.size() - 1));
				cur = folds[k];
			}
		}
		if (k == 0 && cur.empty()) {
			cur = level(0).inner(stage);
			remember(stage, 0, cur);
		}
		while (k < n && !cur.empty()) {
			++k;
			Dnf next;
			Dnf right = level(k).inner(stage);
			for (const auto &l : cur) {
				for (const auto &r : right) {
					Conjunction c = l;
					c.insert(c.end(), r.begin(), r.end());
					if (auto simplified = simplify(*space_, std::move(c)))
						next.push_back(std::move(*simplified));
				}
			}
			cur = std::move(next);
			remember(stage, k, cur);
		}
		return k < n ? Dnf{} : cur;
	}

	bool running_contains(Stage n, const PointDescriptor &x, Stage stage) const
	{
		for (Stage k = 0; k <= n; ++k)
			if (!level(k).contains_at(x, stage))
				return false;
		return true;
	}

private:
	void remember(Stage stage, Stage k, const Dnf &d) const
	{
		std::lock_guard lock(mutex_);
		auto &folds = folds_[stage];
		if (folds.size() == k)
			folds.push_back(d);
	}

	SpacePtr space_;
	std::function<REOpenSet(Stage)> levels_;
	mutable std::mutex mutex_;
	mutable std::map<Stage, REOpenSet> levels_cache_;
	// folds_[stage][k] is the inner approximation of U_0 and ... and U_k.
	mutable std::map<Stage, std::vector<Dnf>> folds_;
};

class RunningImpl final : public REOpenSet::Impl {
public:
	RunningImpl(std::shared_ptr<const LevelChain> chain, Stage n) : Impl(chain->space()), chain_(std::move(chain)), n_(n) {}

	Dnf inner(Stage stage) const override { return chain_->running_inner(n_, stage); }
	bool contains_at(const PointDescriptor &x, Stage stage) const override
	{
		return chain_->running_contains(n_, x, stage);
	}

private:
	std::shared_ptr<const LevelChain> chain_;
	Stage n_;
};

class LevelCountNode final : public LscFunction::Node {
public:
	LevelCountNode(SpacePtr space, std::function<REOpenSet(Stage)> levels)
	: Node(space), chain_(std::make_shared<LevelChain>(space, std::move(levels)))
	{}

	Rational eval(const PointDescriptor &x, Stage stage) const override
	{
		Stage reached = 0;
		for (Stage n = 0; n <= stage; ++n) {
			if (!chain_->level(n).contains_at(x, stage))
				break;
			reached = n;
		}
		return Rational(reached);
	}

	std::vector<Piece> pieces(Stage stage) const override
	{
		std::vector<Piece> out;
		for (Stage n = 1; n <= stage; ++n) {
			Dnf region = chain_->running_inner(n, stage);
			if (region.empty())
				break;
			out.push_back({Rational(n), std::move(region)});
		}
		return out;
	}

	REOpenSet superlevel(const Rational &c, Stage, const LscFunction &) const override
	{
		if (c < 0)
			throw std::invalid_argument("superlevel threshold must be nonnegative");
		Integer fl = c.get_num() / c.get_den();
		return REOpenSet(std::make_shared<RunningImpl>(chain_, static_cast<Stage>(fl.get_ui()) + 1));
	}

private:
	std::shared_ptr<const LevelChain> chain_;
};

} // namespace

REOpenSet LscFunction::Node::superlevel(const Rational &c, Stage budget, const LscFunction &self) const
{
	if (c < 0)
		throw std::invalid_argument("superlevel threshold must be nonnegative");
	return REOpenSet(std::make_shared<SuperlevelImpl>(self, c, budget));
}

Rational LscFunction::Node::eval_on_ball(const IdealBall &ball, Stage stage) const
{
	Rational best = 0;
	for (const auto &p : pieces(stage))
		if (p.value > best && region_contains_ball(*space, p.region, ball))
			best = p.value;
	return best;
}

LscFunction::LscFunction() : LscFunction(zero(unit_interval())) {}

LscFunction::LscFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

LscFunction LscFunction::zero(SpacePtr space)
{
	return LscFunction(std::make_shared<ZeroNode>(std::move(space)));
}

LscFunction LscFunction::from_batches(SpacePtr space, std::function<std::vector<BasicFunction>(Stage)> fn)
{
	return LscFunction(std::make_shared<BasicsNode>(std::move(space), std::move(fn)));
}

LscFunction LscFunction::from_basics(SpacePtr space, std::vector<BasicFunction> basics)
{
	for (const auto &b : basics) {
		if (auto s = std::get_if<StepFunction>(&b)) {
			space->check_index(s->ball.center);
			if (s->value <= 0 || s->ball.radius <= 0)
				throw std::invalid_argument("step function needs positive value and radius");
		} else {
			const auto &h = std::get<HatFunction>(b);
			space->check_index(h.center);
			if (h.value <= 0 || h.slope_width <= 0 || h.inner_radius < 0)
				throw std::invalid_argument("hat function needs q > 0, eps > 0, r >= 0");
		}
	}
	if (basics.empty())
		return zero(std::move(space));
	return from_batches(std::move(space), [b = std::move(basics)](Stage n) {
		return n == 0 ? b : std::vector<BasicFunction>{};
	});
}

LscFunction LscFunction::step(SpacePtr space, IdealBall ball, Rational value)
{
	return from_basics(std::move(space), {StepFunction{std::move(ball), std::move(value)}});
}

LscFunction LscFunction::hat(SpacePtr space, HatFunction h)
{
	return from_basics(std::move(space), {std::move(h)});
}

const SpacePtr &LscFunction::space() const { return node_->space; }

Rational LscFunction::eval_lower(const PointDescriptor &x, Stage stage) const
{
	return node_->eval(x, stage);
}

Rational LscFunction::eval_lower_on_ball(const IdealBall &ball, Stage stage) const
{
	return node_->eval_on_ball(ball, stage);
}

std::vector<Piece> LscFunction::pieces(Stage stage) const { return node_->pieces(stage); }

REOpenSet LscFunction::superlevel(const Rational &c, Stage stage_budget) const
{
	if (c < 0)
		throw std::invalid_argument("superlevel threshold must be nonnegative");
	return node_->superlevel(c, stage_budget, *this);
}

LscFunction lsc_sup(std::vector<LscFunction> fs)
{
	if (fs.empty())
		return LscFunction::zero(unit_interval());
	SpacePtr space = fs.front().space();
	std::erase_if(fs, [](const LscFunction &f) { return f.node().is_zero(); });
	if (fs.empty())
		return LscFunction::zero(space);
	if (fs.size() == 1)
		return fs.front();
	return LscFunction(std::make_shared<SupNode>(space, std::move(fs)));
}

LscFunction lsc_scale(const LscFunction &f, const Rational &factor)
{
	if (factor <= 0)
		throw std::invalid_argument("scale factor must be positive");
	if (factor == 1 || f.node().is_zero())
		return f;
	return LscFunction(std::make_shared<ScaleNode>(f, factor));
}

LscFunction lsc_sum(std::vector<std::pair<Rational, LscFunction>> terms)
{
	if (terms.empty())
		return LscFunction::zero(unit_interval());
	SpacePtr space = terms.front().second.space();
	for (const auto &[w, f] : terms)
		if (w <= 0)
			throw std::invalid_argument("sum weights must be positive");
	return LscFunction(std::make_shared<SumNode>(space, std::move(terms)));
}

LscFunction indicator(const REOpenSet &u)
{
	if (u.is_empty_set())
		return LscFunction::zero(u.space());
	return LscFunction(std::make_shared<IndicatorNode>(u));
}

LscFunction level_count(SpacePtr space, std::function<REOpenSet(Stage)> levels)
{
	return LscFunction(std::make_shared<LevelCountNode>(std::move(space), std::move(levels)));
}

} // namespace cps
