#pragma once

// Exact network-flow kernels on bipartite supply/demand graphs.

#include <cstddef>
#include <vector>

#include "cps/numeric.hpp"

namespace cps {

struct BipartiteEdge {
	std::size_t source = 0;
	std::size_t target = 0;
};

/// Maximum flow from supplies to demands along the given edges (edges
/// have unbounded capacity). Supplies and demands must be nonnegative.
Rational bipartite_max_flow(const std::vector<Rational> &supply, const std::vector<Rational> &demand,
                            const std::vector<BipartiteEdge> &edges);

/// Minimum-cost transport between equal-mass supplies and demands on the
/// complete bipartite graph. Returns the flow matrix; cost[i][j] >= 0.
std::vector<std::vector<Rational>> min_cost_transport(const std::vector<Rational> &supply,
                                                      const std::vector<Rational> &demand,
                                                      const std::vector<std::vector<Rational>> &cost);

} // namespace cps
