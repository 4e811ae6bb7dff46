#pragma once

// Binary representations of a computable probability space: almost
// decidable balls found by nested interval search, cells, the encoder,
// the decoder and cell measures.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "cps/measures.hpp"

namespace cps {

class InvalidExpansion : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class DigestMismatch : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Shared pool of certification steps.
class StepBudget {
public:
	explicit StepBudget(std::uint64_t limit) : limit_(limit) {}
	/// Consumes one step or throws BudgetExhausted.
	void take();
	std::uint64_t used() const { return used_.load(); }
	std::uint64_t limit() const { return limit_; }

private:
	std::uint64_t limit_;
	std::atomic<std::uint64_t> used_{0};
};

/// Radius q * sqrt(2); never equal to a rational distance.
struct QuadraticRadius {
	Rational scale;
};

/// Radius searched inside a seed interval.
struct SearchRadius {
	RatInterval seed;
};

using RadiusSpec = std::variant<QuadraticRadius, SearchRadius>;

struct BasisEntry {
	IdealIndex center = 0;
	RadiusSpec radius;
};

/// Evidence kept for each certified stage k >= 1.
struct RadiusCertificate {
	Stage stage = 0;
	RatInterval interval;
	/// Ideal point whose distance to the center the interval avoids.
	std::optional<IdealIndex> avoided;
	std::optional<RatInterval> avoided_distance;
	/// Upper bound on mu(closed ball) - mu(open ball) over the interval,
	/// absent when the measure is atomless.
	std::optional<Rational> sphere_mass_bound;
};

/// The nested intervals J_0 ⊇ J_1 ⊇ ... whose intersection is an almost
/// decidable radius. Stages are certified lazily and memoised.
class AlmostDecidableRadius {
public:
	AlmostDecidableRadius(SpacePtr space, MeasurePtr measure, BasisEntry entry,
	                      std::shared_ptr<StepBudget> budget);

	/// J_k; certifies stages up to k on demand. Throws BudgetExhausted.
	RatInterval interval_at(Stage k) const;
	std::vector<RatInterval> certified() const;
	std::vector<RadiusCertificate> certificates() const;
	IdealIndex center() const { return entry_.center; }
	const BasisEntry &entry() const { return entry_; }

private:
	void certify_next() const;
	RatInterval quadratic_enclosure(unsigned precision) const;

	SpacePtr space_;
	MeasurePtr measure_;
	BasisEntry entry_;
	std::shared_ptr<StepBudget> budget_;
	mutable std::mutex mutex_;
	mutable std::vector<RatInterval> stages_;
	mutable std::vector<RadiusCertificate> certs_;
	mutable unsigned precision_ = 1;
};

/// Ball schedule of a representation: entry(i) for i < size.
struct BasisSchedule {
	std::size_t size = 0;
	std::function<BasisEntry(std::size_t)> entry;
	/// Short description used in documents ("dyadic:17", "explicit", ...).
	std::string description;
};

/// Centers k/2^l (k = 0..2^l) for levels l = 0..levels, radius sqrt(2)/2^(l+1).
BasisSchedule dyadic_unit_schedule(unsigned levels);
/// Cylinders on Cantor space: for each length l = 1..levels and each word w
/// of length l, center w0^inf with radius searched in
/// [5/4 * 2^-l, 7/4 * 2^-l], so the ball is the cylinder [w].
BasisSchedule cantor_cylinder_schedule(unsigned levels);
BasisSchedule explicit_schedule(std::vector<BasisEntry> entries);

/// Total number of balls in the dyadic schedule up to the given level.
std::size_t dyadic_schedule_size(unsigned levels);

class BinaryRep {
public:
	BinaryRep(MeasurePtr measure, BasisSchedule schedule, std::uint64_t step_budget);

	const SpacePtr &space() const { return measure_->space(); }
	const MeasurePtr &measure() const { return measure_; }
	const BasisSchedule &schedule() const { return schedule_; }
	std::size_t size() const { return schedule_.size; }
	IdealIndex center(std::size_t i) const;
	std::shared_ptr<const AlmostDecidableRadius> radius(std::size_t i) const;
	std::string digest() const { return digest_; }
	/// Rejects a representation document made for a different descriptor.
	void check_digest(const std::string &digest) const;
	const StepBudget &budget() const { return *budget_; }

private:
	MeasurePtr measure_;
	BasisSchedule schedule_;
	std::string digest_;
	std::shared_ptr<StepBudget> budget_;
	mutable std::mutex mutex_;
	mutable std::vector<std::shared_ptr<const AlmostDecidableRadius>> radii_;
};

using RepPtr = std::shared_ptr<const BinaryRep>;

RepPtr make_dyadic_lebesgue_rep(unsigned levels = 17, std::uint64_t step_budget = 1'000'000);

/// Single-ball radius search, as used inside representations.
std::shared_ptr<const AlmostDecidableRadius> radius_search(SpacePtr space, MeasurePtr mu, IdealIndex center,
                                                          RatInterval seed, std::uint64_t step_budget);

class EncodeExhausted : public BudgetExhausted {
public:
	EncodeExhausted(const std::string &what, std::string bits)
	: BudgetExhausted(what), bits(std::move(bits))
	{}
	std::string bits;
};

/// First nbits of the expansion of x. Throws EncodeExhausted carrying the
/// resolved prefix when a bit does not resolve within stage_budget.
std::string encode(const BinaryRep &rep, const PointDescriptor &x, std::size_t nbits, Stage stage_budget);

struct DecodeResult {
	PointDescriptor point;
	/// witnesses[n] is the ball index used for precision n.
	std::vector<std::size_t> witnesses;
};

/// Point with expansion omega, to within 2^-precision. A cell is treated
/// as proven empty when two balls selected by 1 bits are provably disjoint.
DecodeResult decode(const BinaryRep &rep, std::string_view omega, unsigned precision, Stage stage_budget);

/// Region of the cell: bit 1 -> inside the ball, bit 0 -> outside its closure.
REOpenSet cell_region(const BinaryRep &rep, std::string_view word);
Rational cell_lower(const BinaryRep &rep, std::string_view word, Stage stage);
/// Two-sided enclosure of mu(cell(word)).
RatInterval cell_measure(const BinaryRep &rep, std::string_view word, Stage stage);

} // namespace cps
