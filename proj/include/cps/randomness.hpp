#pragma once

// Randomness tests: integral tests (lsc functions with integral at most 1),
// Martin-Löf tests (open levels with mu(U_n) <= 2^-n), the converters
// between them, a finite universal combinator, deficiency bounds and
// transport of tests along a binary representation.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cps/binaryrep.hpp"
#include "cps/lsc.hpp"
#include "cps/measures.hpp"

namespace cps {

/// Why a test's bound holds. Only ByConstruction and CylinderExact are
/// trusted; Asserted bounds are monitored.
enum class Certificate { ByConstruction, CylinderExact, Asserted, None };

std::string certificate_name(Certificate c);
Certificate parse_certificate(std::string_view name);

class UncertifiedBounds : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// A staged bound contradicting a certificate.
class CertificationViolation : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

struct IntegralTest {
	LscFunction f;
	MeasurePtr measure;
	Certificate certificate = Certificate::Asserted;
};

class MLTest {
public:
	MLTest(MeasurePtr measure, std::function<REOpenSet(Stage)> levels, Certificate certificate);

	/// U_n, memoised.
	REOpenSet level(Stage n) const;
	std::function<REOpenSet(Stage)> levels() const;
	const MeasurePtr &measure() const { return measure_; }
	const SpacePtr &space() const { return measure_->space(); }
	Certificate certificate() const { return certificate_; }

	/// Exact mass of the stage approximation of U_n; requires a
	/// cylinder-exact measure on Cantor space. Throws
	/// CertificationViolation when a CylinderExact test breaks its bound.
	Rational cylinder_level_mass(Stage n, Stage stage) const;

private:
	struct Cache;
	MeasurePtr measure_;
	std::shared_ptr<Cache> cache_;
	Certificate certificate_;
};

/// U_n = [0^(n+1)] on Cantor space.
MLTest zero_prefix_test(MeasurePtr measure);

/// Level n is the superlevel {f > 2^n}.
MLTest integral_to_ml(const IntegralTest &t, Stage stage_budget);
/// x -> sup{n : x in U_0 and ... and U_n}. Throws UncertifiedBounds when the
/// test carries no certificate.
IntegralTest ml_to_integral(const MLTest &u);
/// sum_i 2^(-i-1) t_i.
IntegralTest finite_universal(const std::vector<IntegralTest> &tests);

struct DeficiencyReport {
	Stage stage = 0;
	Rational lower_bound;
	/// Largest k with lower_bound > 2^k.
	std::optional<unsigned> nonrandom_level;
};

DeficiencyReport deficiency(const PointDescriptor &x, const IntegralTest &t, Stage stage);

/// Martin-Löf test covering the complement of u. Level i is the complement
/// of a finite union of closed balls, each strictly inside a ball of u, of
/// mass > 1 - 2^-i. Levels are computed on first use and throw
/// BudgetExhausted when no such union is found by stage_budget.
MLTest full_measure_open_to_ml(const REOpenSet &u, MeasurePtr mu, Stage stage_budget);

/// t composed with the encoder. The value at x at stage s lower-bounds t on
/// the cylinder of the expansion prefix resolved by stage s (at most 64
/// bits, the length limit of Cantor ideal words).
IntegralTest transport_test(RepPtr rep, const IntegralTest &cantor_test, Stage stage_budget);

/// Number of expansion bits consulted by a transported test at a stage.
std::size_t transport_bits(const BinaryRep &rep, Stage stage);

struct MonitorSnapshot {
	std::uint64_t checks = 0;
	std::uint64_t violations = 0;
	Rational max_trusted_lower;
};

/// integrate_lower(t), recorded by the process-wide monitor. A bound above
/// 1 counts as a violation and raises CertificationViolation.
Rational monitored_integral(const IntegralTest &t, Stage stage);
MonitorSnapshot monitor_snapshot();
void monitor_reset();

} // namespace cps
