#pragma once

// Ideal measures, computable-measure descriptors, exact Prokhorov and
// Wasserstein distances, staged valuation of open sets and staged
// integration of lsc functions.

#include <memory>
#include <string>
#include <vector>

#include "cps/cms.hpp"
#include "cps/lsc.hpp"

namespace cps {

class SupportTooLarge : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class UnboundedSpace : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class InvalidParameter : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

struct Atom {
	IdealIndex point = 0;
	Rational weight;
};

/// Finite probability measure on ideal points. Atoms are kept sorted by
/// point index with positive weights summing to exactly 1.
class IdealMeasure {
public:
	IdealMeasure() = default;
	/// Validates and merges duplicate points. Throws InvalidParameter.
	explicit IdealMeasure(std::vector<Atom> atoms);

	static IdealMeasure dirac(IdealIndex i) { return IdealMeasure({{i, Rational(1)}}); }

	const std::vector<Atom> &atoms() const { return atoms_; }
	std::size_t size() const { return atoms_.size(); }

	friend bool operator==(const IdealMeasure &a, const IdealMeasure &b);

private:
	std::vector<Atom> atoms_;
};

/// Mixture of ideal measures (weights need not be normalised separately;
/// the result must have total mass 1).
IdealMeasure mix(const std::vector<std::pair<Rational, IdealMeasure>> &parts);

inline constexpr std::size_t kDefaultSupportCap = 64;

/// Prokhorov distance, computed exactly. The infimum over the feasible set
/// is returned whether or not it is attained.
Rational prokhorov_exact(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &space,
                         std::size_t cap = kDefaultSupportCap);
/// rho(mu, nu) < eps, decided exactly with one flow computation.
bool prokhorov_less_than(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &space,
                         const Rational &eps, std::size_t cap = kDefaultSupportCap);
/// rho(mu, nu) <= eps.
bool prokhorov_at_most(const IdealMeasure &mu, const IdealMeasure &nu, const MetricSpace &space,
                       const Rational &eps, std::size_t cap = kDefaultSupportCap);

struct TransportPlan {
	std::vector<IdealIndex> sources;
	std::vector<IdealIndex> targets;
	std::vector<std::vector<Rational>> flows;
};

struct WassersteinResult {
	Rational value;
	TransportPlan plan;
};

/// Optimal transport cost with a witness plan. Requires a bounded space.
WassersteinResult wasserstein_exact(const IdealMeasure &mu, const IdealMeasure &nu,
                                    const MetricSpace &space, std::size_t cap = kDefaultSupportCap);

struct EquivalenceReport {
	Rational prokhorov;
	Rational wasserstein;
	Rational diameter;
	/// W <= (M+1) * rho
	bool wasserstein_bound = false;
	/// Every checked eps (eps^2 > W, eps < 1) satisfies rho < eps.
	bool prokhorov_bound = false;
	std::vector<Rational> checked_eps;
	std::vector<Rational> failed_eps;
};

/// Checks both directions of the Prokhorov/Wasserstein equivalence. The eps
/// values examined are W + j/grid and j/grid for j = 1..grid, plus any
/// extra values supplied.
EquivalenceReport check_equivalence_bounds(const IdealMeasure &mu, const IdealMeasure &nu,
                                           const MetricSpace &space, unsigned grid = 32,
                                           const std::vector<Rational> &extra_eps = {});

/// Exact mass of the atoms lying in a region (constraints checked with
/// exact distances).
Rational region_mass(const MetricSpace &space, const IdealMeasure &mu, const Dnf &region);

/// Exact mass of the atoms in the union of the open (or closed) balls.
Rational valuation_ideal_union(const MetricSpace &space, const IdealMeasure &mu,
                               const std::vector<IdealBall> &balls, bool closed);

/// A computable measure: a fast Cauchy sequence of ideal measures in the
/// Prokhorov metric, rho(mu_n, mu_{n+1}) < 2^-n.
class MeasureDescriptor {
public:
	explicit MeasureDescriptor(SpacePtr space) : space_(std::move(space)) {}
	virtual ~MeasureDescriptor() = default;

	virtual IdealMeasure ideal_at(Stage n) const = 0;
	/// Exact mu_n-mass of the region. Descriptors with huge stages override
	/// this with a closed form.
	virtual Rational stage_mass(Stage n, const Dnf &region) const;
	/// Canonical text identifying the descriptor; feeds the digest.
	virtual std::string canonical() const = 0;
	virtual bool atomless() const { return false; }
	/// True when stage_mass(n, r) is the exact measure of every Cantor
	/// region r decided by the first n+1 positions.
	virtual bool cylinder_exact() const { return false; }

	const SpacePtr &space() const { return space_; }

private:
	SpacePtr space_;
};

using MeasurePtr = std::shared_ptr<const MeasureDescriptor>;

/// Uniform measure on the 2^(n+2) dyadic midpoints (2j+1)/2^(n+3).
MeasurePtr lebesgue_unit();
/// Product measure on Cantor space with P(bit = 1) = p; stage n sits on
/// the words of length n+1.
MeasurePtr bernoulli(const Rational &p);
MeasurePtr dirac(SpacePtr space, IdealIndex i);
/// Atomwise mixture of descriptors over the same space.
MeasurePtr convex_combo(std::vector<std::pair<Rational, MeasurePtr>> parts);
/// User-supplied stages; the last stage repeats. The fast Cauchy
/// condition is verified lazily, exactly, on consumed stages.
MeasurePtr measure_from_stages(SpacePtr space, std::vector<IdealMeasure> stages);

/// 16 hex digits identifying the descriptor.
std::string measure_digest(const MeasureDescriptor &mu);

/// Lower bound on mu(U): max over 1 <= n <= stage of
/// [mu_n(U shrunk by eps_n) - eps_n]^+, eps_n = 2^(-n+1), with U replaced
/// by its stage approximation.
Rational valuation_lower(const MeasureDescriptor &mu, const REOpenSet &u, Stage stage);
Rational valuation_lower(const MeasureDescriptor &mu, const Dnf &region, Stage stage);

/// Region with every inside radius reduced and every outside radius
/// increased by eps. Conjunctions that become empty are dropped.
Dnf shrink(const MetricSpace &space, const Dnf &region, const Rational &eps);

/// Lower bound on the integral of f; nondecreasing in stage.
Rational integrate_lower(const MeasureDescriptor &mu, const LscFunction &f, Stage stage);

/// Enclosure of the integral of a bounded f given lsc parts f + M and M - f.
RatInterval integrate_bounded(const MeasureDescriptor &mu, const LscFunction &f_plus_m,
                              const LscFunction &m_minus_f, const Rational &m, Stage stage);

} // namespace cps
