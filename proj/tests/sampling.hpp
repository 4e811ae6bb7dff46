#pragma once

// Fixed-seed samplers for ideal measures and points.

#include "cps/measures.hpp"
#include "oracles.hpp"

namespace sampling {

using cps::IdealIndex;
using cps::IdealMeasure;
using cps::Rational;

/// A rational p/q in [0, 1] with q <= max_den, as a unit-interval index.
inline IdealIndex unit_point(unsigned max_den)
{
	unsigned q = static_cast<unsigned>(oracle::uniform(1, max_den));
	unsigned p = static_cast<unsigned>(oracle::uniform(0, q));
	Rational x(p, q);
	x.canonicalize();
	static const cps::UnitInterval ui;
	return ui.index_of(x);
}

/// A word of at most max_len bits, as a Cantor index.
inline IdealIndex cantor_point(unsigned max_len)
{
	return oracle::uniform(0, (std::uint64_t(1) << max_len) - 1);
}

inline IdealMeasure random_measure(bool cantor, std::size_t max_support = 5)
{
	std::size_t n = oracle::uniform(1, max_support);
	auto w = oracle::random_weights(n, static_cast<unsigned>(oracle::uniform(n, 12)));
	std::vector<cps::Atom> atoms;
	for (std::size_t i = 0; i < n; ++i)
		atoms.push_back({cantor ? cantor_point(4) : unit_point(8), w[i]});
	return IdealMeasure(std::move(atoms));
}

} // namespace sampling
