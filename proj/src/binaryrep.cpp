#include "cps/binaryrep.hpp"

#include <algorithm>

namespace cps {

namespace {

constexpr unsigned kMaxPrecision = 400;
constexpr unsigned kMaxSplitDepth = 20;
constexpr Stage kMaxValuationStage = 40;
constexpr std::size_t kMaxCellLength = 16;

RatInterval distance_to_ideal(const MetricSpace &space, IdealIndex a, IdealIndex b, unsigned precision)
{
	if (auto d = space.exact_distance(a, b))
		return RatInterval::point(*d);
	return space.distance(a, b, precision);
}

bool avoids(const RatInterval &j, const RatInterval &d)
{
	return j.hi() < d.lo() || j.lo() > d.hi();
}

} // namespace

void StepBudget::take()
{
	std::uint64_t cur = used_.load();
	do {
		if (cur >= limit_)
			throw BudgetExhausted("certification step budget exhausted");
	} while (!used_.compare_exchange_weak(cur, cur + 1));
}

AlmostDecidableRadius::AlmostDecidableRadius(SpacePtr space, MeasurePtr measure, BasisEntry entry,
                                             std::shared_ptr<StepBudget> budget)
: space_(std::move(space)), measure_(std::move(measure)), entry_(std::move(entry)), budget_(std::move(budget))
{
	space_->check_index(entry_.center);
	if (const auto *q = std::get_if<QuadraticRadius>(&entry_.radius)) {
		if (q->scale <= 0)
			throw InvalidParameter("radius scale must be positive");
		stages_.push_back(quadratic_enclosure(precision_));
	} else {
		const auto &seed = std::get<SearchRadius>(entry_.radius).seed;
		if (seed.lo() <= 0 || seed.hi() <= seed.lo())
			throw InvalidParameter("radius seed must be a nondegenerate positive interval");
		stages_.push_back(seed);
	}
}

RatInterval AlmostDecidableRadius::quadratic_enclosure(unsigned precision) const
{
	Integer n = Integer(2) << (2 * precision);
	Integer s;
	mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
	Rational unit = pow2(-static_cast<int>(precision));
	const Rational &q = std::get<QuadraticRadius>(entry_.radius).scale;
	return {q * Rational(s) * unit, q * Rational(s + 1) * unit};
}

RatInterval AlmostDecidableRadius::interval_at(Stage k) const
{
	std::lock_guard lock(mutex_);
	while (stages_.size() <= k)
		certify_next();
	return stages_[k];
}

std::vector<RatInterval> AlmostDecidableRadius::certified() const
{
	std::lock_guard lock(mutex_);
	return stages_;
}

std::vector<RadiusCertificate> AlmostDecidableRadius::certificates() const
{
	std::lock_guard lock(mutex_);
	return certs_;
}

void AlmostDecidableRadius::certify_next() const
{
	const Stage k = static_cast<Stage>(stages_.size());
	budget_->take();
	RadiusCertificate cert;
	cert.stage = k;

	// The stage-k interval must miss d(center, s_{k-1}) and, unless the
	// measure is atomless, carry a sphere mass bound below 1/(k+1).
	std::optional<IdealIndex> avoid;
	if (space_->valid_index(k - 1))
		avoid = k - 1;
	const bool check_mass = !measure_->atomless();
	const Rational mass_target(1, k + 1);

	auto sphere_bound = [&](const RatInterval &p, Stage v) {
		Dnf outside{{{entry_.center, p.hi(), false}}};
		Dnf inside{{{entry_.center, p.lo(), true}}};
		return Rational(1 - valuation_lower(*measure_, outside, v) - valuation_lower(*measure_, inside, v));
	};

	if (std::holds_alternative<QuadraticRadius>(entry_.radius)) {
		unsigned p = std::max<unsigned>(precision_, k + 1);
		RatInterval j = quadratic_enclosure(p);
		if (avoid) {
			RatInterval d = distance_to_ideal(*space_, entry_.center, *avoid, p + 4);
			while (!avoids(j, d)) {
				budget_->take();
				if (++p > kMaxPrecision)
					throw BudgetExhausted("radius enclosure precision limit reached");
				j = quadratic_enclosure(p);
				d = distance_to_ideal(*space_, entry_.center, *avoid, p + 4);
			}
			cert.avoided = avoid;
			cert.avoided_distance = d;
		}
		if (check_mass) {
			Stage v = std::min<Stage>(k + 2, kMaxValuationStage);
			Rational b = sphere_bound(j, v);
			while (b >= mass_target) {
				budget_->take();
				if (++p > kMaxPrecision)
					throw BudgetExhausted("radius enclosure precision limit reached");
				j = quadratic_enclosure(p);
				v = std::min<Stage>(v + 1, kMaxValuationStage);
				b = sphere_bound(j, v);
			}
			cert.sphere_mass_bound = b;
		}
		precision_ = p;
		cert.interval = j;
		stages_.push_back(j);
		certs_.push_back(std::move(cert));
		return;
	}

	const RatInterval parent = stages_.back();
	for (unsigned m = 1; m <= kMaxSplitDepth; ++m) {
		const std::uint64_t parts = std::uint64_t(1) << m;
		const Rational step = parent.width() / Rational(Integer(std::to_string(parts), 10));
		for (std::uint64_t t = 0; t < parts; ++t) {
			budget_->take();
			Rational lo = parent.lo() + step * Rational(Integer(std::to_string(t), 10));
			RatInterval piece(lo, lo + step);
			std::optional<RatInterval> d;
			if (avoid) {
				d = distance_to_ideal(*space_, entry_.center, *avoid, k + m + 4);
				if (!avoids(piece, *d))
					continue;
			}
			std::optional<Rational> mass;
			if (check_mass) {
				mass = sphere_bound(piece, std::min<Stage>(k + m + 2, kMaxValuationStage));
				if (*mass >= mass_target)
					continue;
			}
			cert.interval = piece;
			cert.avoided = avoid;
			cert.avoided_distance = d;
			cert.sphere_mass_bound = mass;
			stages_.push_back(piece);
			certs_.push_back(std::move(cert));
			return;
		}
	}
	throw BudgetExhausted("no certifiable radius interval at stage " + std::to_string(k));
}

std::size_t dyadic_schedule_size(unsigned levels)
{
	std::size_t n = 0;
	for (unsigned l = 0; l <= levels; ++l)
		n += (std::size_t(1) << l) + 1;
	return n;
}

BasisSchedule dyadic_unit_schedule(unsigned levels)
{
	if (levels > 30)
		throw InvalidParameter("dyadic schedule supports at most 30 levels");
	BasisSchedule s;
	s.size = dyadic_schedule_size(levels);
	s.description = "dyadic:" + std::to_string(levels);
	s.entry = [](std::size_t i) {
		unsigned l = 0;
		while (i >= (std::size_t(1) << l) + 1) {
			i -= (std::size_t(1) << l) + 1;
			++l;
		}
		Rational c(Integer(std::to_string(i), 10), Integer(std::to_string(std::size_t(1) << l), 10));
		c.canonicalize();
		static const UnitInterval ui;
		return BasisEntry{ui.index_of(c), QuadraticRadius{pow2(-static_cast<int>(l) - 1)}};
	};
	return s;
}

BasisSchedule cantor_cylinder_schedule(unsigned levels)
{
	if (levels == 0 || levels > 40)
		throw InvalidParameter("cylinder schedule needs 1 to 40 levels");
	BasisSchedule s;
	s.size = (std::size_t(1) << (levels + 1)) - 2;
	s.description = "cylinders:" + std::to_string(levels);
	s.entry = [](std::size_t i) {
		unsigned l = 1;
		while (i >= (std::size_t(1) << l)) {
			i -= std::size_t(1) << l;
			++l;
		}
		Rational unit = pow2(-static_cast<int>(l));
		return BasisEntry{static_cast<IdealIndex>(i),
		                  SearchRadius{RatInterval(unit * Rational(5, 4), unit * Rational(7, 4))}};
	};
	return s;
}

BasisSchedule explicit_schedule(std::vector<BasisEntry> entries)
{
	auto shared = std::make_shared<const std::vector<BasisEntry>>(std::move(entries));
	BasisSchedule s;
	s.size = shared->size();
	s.description = "explicit";
	s.entry = [shared](std::size_t i) { return shared->at(i); };
	return s;
}

BinaryRep::BinaryRep(MeasurePtr measure, BasisSchedule schedule, std::uint64_t step_budget)
: measure_(std::move(measure)),
  schedule_(std::move(schedule)),
  digest_(measure_digest(*measure_)),
  budget_(std::make_shared<StepBudget>(step_budget)),
  radii_(schedule_.size)
{}

IdealIndex BinaryRep::center(std::size_t i) const
{
	return radius(i)->center();
}

std::shared_ptr<const AlmostDecidableRadius> BinaryRep::radius(std::size_t i) const
{
	if (i >= schedule_.size)
		throw std::out_of_range("ball index beyond the basis schedule");
	std::lock_guard lock(mutex_);
	auto &slot = radii_[i];
	if (!slot)
		slot = std::make_shared<AlmostDecidableRadius>(space(), measure_, schedule_.entry(i), budget_);
	return slot;
}

void BinaryRep::check_digest(const std::string &digest) const
{
	if (digest != digest_)
		throw DigestMismatch("representation was built for descriptor " + digest + ", not " + digest_);
}

RepPtr make_dyadic_lebesgue_rep(unsigned levels, std::uint64_t step_budget)
{
	return std::make_shared<BinaryRep>(lebesgue_unit(), dyadic_unit_schedule(levels), step_budget);
}

std::shared_ptr<const AlmostDecidableRadius> radius_search(SpacePtr space, MeasurePtr mu, IdealIndex center,
                                                          RatInterval seed, std::uint64_t step_budget)
{
	return std::make_shared<AlmostDecidableRadius>(std::move(space), std::move(mu),
	                                               BasisEntry{center, SearchRadius{std::move(seed)}},
	                                               std::make_shared<StepBudget>(step_budget));
}

std::string encode(const BinaryRep &rep, const PointDescriptor &x, std::size_t nbits, Stage stage_budget)
{
	if (nbits > rep.size())
		throw std::out_of_range("more bits requested than the basis schedule provides");
	std::string bits;
	bits.reserve(nbits);
	for (std::size_t i = 0; i < nbits; ++i) {
		auto r = rep.radius(i);
		char bit = 0;
		try {
			for (Stage k = 0; k <= stage_budget && !bit; ++k) {
				RatInterval d = point_ideal_distance_raw(x, r->center(), k);
				RatInterval j = r->interval_at(k);
				if (d.hi() < j.lo())
					bit = '1';
				else if (d.lo() > j.hi())
					bit = '0';
			}
		} catch (const BudgetExhausted &e) {
			throw EncodeExhausted(e.what(), bits);
		}
		if (!bit)
			throw EncodeExhausted("bit " + std::to_string(i) + " unresolved within the stage budget", bits);
		bits.push_back(bit);
	}
	return bits;
}

DecodeResult decode(const BinaryRep &rep, std::string_view omega, unsigned precision, Stage stage_budget)
{
	if (omega.size() > rep.size())
		throw std::out_of_range("expansion longer than the basis schedule");
	std::vector<std::size_t> ones;
	for (std::size_t i = 0; i < omega.size(); ++i) {
		if (omega[i] == '1')
			ones.push_back(i);
		else if (omega[i] != '0')
			throw std::invalid_argument("expansion must consist of 0 and 1");
	}
	const MetricSpace &space = *rep.space();

	// Only 1 bits before the first provable disjointness may serve.
	std::size_t usable = ones.size();
	bool proven_empty = false;
	for (std::size_t b = 1; b < ones.size() && !proven_empty; ++b) {
		auto rb = rep.radius(ones[b]);
		Rational hb = rb->interval_at(stage_budget).hi();
		for (std::size_t a = 0; a < b; ++a) {
			auto ra = rep.radius(ones[a]);
			Rational ha = ra->interval_at(stage_budget).hi();
			RatInterval d = distance_to_ideal(space, ra->center(), rb->center(), stage_budget + 2);
			if (d.lo() >= ha + hb) {
				usable = b;
				proven_empty = true;
				break;
			}
		}
	}

	std::vector<std::size_t> witnesses;
	std::size_t from = 0;
	for (unsigned n = 0; n <= precision; ++n) {
		Rational bound = pow2(-static_cast<int>(n) - 1);
		bool found = false;
		for (std::size_t t = from; t < usable && !found; ++t) {
			auto r = rep.radius(ones[t]);
			for (Stage k = 0; k <= stage_budget; ++k) {
				if (r->interval_at(k).hi() < bound) {
					witnesses.push_back(ones[t]);
					from = t;
					found = true;
					break;
				}
			}
		}
		if (!found) {
			if (proven_empty)
				throw InvalidExpansion("expansion selects provably disjoint balls");
			throw BudgetExhausted("no witness for precision " + std::to_string(n));
		}
	}
	std::vector<IdealIndex> stream;
	for (std::size_t w : witnesses)
		stream.push_back(rep.center(w));
	auto point = PointDescriptor::from_prefix(rep.space(), stream, stream.size() - 1);
	return {std::move(point), std::move(witnesses)};
}

REOpenSet cell_region(const BinaryRep &rep, std::string_view word)
{
	std::vector<StagedConstraint> cs;
	for (std::size_t i = 0; i < word.size(); ++i) {
		if (word[i] != '0' && word[i] != '1')
			throw std::invalid_argument("cell word must consist of 0 and 1");
		auto r = rep.radius(i);
		cs.push_back({r->center(), [r](Stage s) { return r->interval_at(s); }, word[i] == '1'});
	}
	return REOpenSet::region(rep.space(), std::move(cs));
}

Rational cell_lower(const BinaryRep &rep, std::string_view word, Stage stage)
{
	if (word.empty())
		return 1;
	return valuation_lower(*rep.measure(), cell_region(rep, word), stage);
}

RatInterval cell_measure(const BinaryRep &rep, std::string_view word, Stage stage)
{
	if (word.size() > kMaxCellLength)
		throw std::invalid_argument("cell words are limited to 16 bits");
	Rational lo = cell_lower(rep, word, stage);
	Rational others = 0;
	const std::size_t len = word.size();
	std::string w(len, '0');
	for (std::uint64_t code = 0; code < (std::uint64_t(1) << len); ++code) {
		for (std::size_t i = 0; i < len; ++i)
			w[i] = (code >> i) & 1 ? '1' : '0';
		if (w != word)
			others += cell_lower(rep, w, stage);
	}
	Rational hi = 1 - others;
	if (hi > 1)
		hi = 1;
	return {lo, hi};
}

} // namespace cps
