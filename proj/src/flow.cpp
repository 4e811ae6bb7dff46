#include "cps/flow.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>

namespace cps {

namespace {

Integer common_denominator(const std::vector<const std::vector<Rational> *> &lists)
{
	Integer l = 1;
	for (const auto *v : lists)
		for (const auto &q : *v)
			mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
	return l;
}

Integer scaled(const Rational &q, const Integer &l)
{
	Integer out = q.get_num() * (l / q.get_den());
	return out;
}

template <class Cap>
class Dinic {
public:
	explicit Dinic(std::size_t n) : adj_(n), level_(n), it_(n) {}

	void add_edge(std::size_t u, std::size_t v, Cap c)
	{
		adj_[u].push_back(edges_.size());
		edges_.push_back({v, std::move(c)});
		adj_[v].push_back(edges_.size());
		edges_.push_back({u, Cap(0)});
	}

	Cap run(std::size_t s, std::size_t t)
	{
		Cap total = 0;
		while (bfs(s, t)) {
			std::fill(it_.begin(), it_.end(), 0);
			while (true) {
				Cap pushed = dfs(s, t);
				if (pushed == 0)
					break;
				total += pushed;
			}
		}
		return total;
	}

private:
	struct Edge {
		std::size_t to;
		Cap cap;
	};

	bool bfs(std::size_t s, std::size_t t)
	{
		std::fill(level_.begin(), level_.end(), -1);
		std::queue<std::size_t> q;
		level_[s] = 0;
		q.push(s);
		while (!q.empty()) {
			std::size_t u = q.front();
			q.pop();
			for (std::size_t id : adj_[u]) {
				const Edge &e = edges_[id];
				if (e.cap > 0 && level_[e.to] < 0) {
					level_[e.to] = level_[u] + 1;
					q.push(e.to);
				}
			}
		}
		return level_[t] >= 0;
	}

	// Iterative augmenting search along the level graph.
	Cap dfs(std::size_t s, std::size_t t)
	{
		std::vector<std::size_t> path_edges;
		std::size_t u = s;
		while (true) {
			if (u == t) {
				Cap bottleneck = edges_[path_edges.front()].cap;
				for (std::size_t id : path_edges)
					if (edges_[id].cap < bottleneck)
						bottleneck = edges_[id].cap;
				for (std::size_t id : path_edges) {
					edges_[id].cap -= bottleneck;
					edges_[id ^ 1].cap += bottleneck;
				}
				return bottleneck;
			}
			bool advanced = false;
			for (; it_[u] < adj_[u].size(); ++it_[u]) {
				std::size_t id = adj_[u][it_[u]];
				const Edge &e = edges_[id];
				if (e.cap > 0 && level_[e.to] == level_[u] + 1) {
					path_edges.push_back(id);
					u = e.to;
					advanced = true;
					break;
				}
			}
			if (advanced)
				continue;
			if (u == s)
				return 0;
			// Dead end: retreat and skip the edge that led here.
			level_[u] = -1;
			std::size_t back = path_edges.back();
			path_edges.pop_back();
			u = edges_[back ^ 1].to;
			++it_[u];
		}
	}

	std::vector<std::vector<std::size_t>> adj_;
	std::vector<Edge> edges_;
	std::vector<int> level_;
	std::vector<std::size_t> it_;
};

template <class Cap>
Cap run_max_flow(const std::vector<Cap> &supply, const std::vector<Cap> &demand,
                 const std::vector<BipartiteEdge> &edges, const Cap &infinite)
{
	std::size_t n = supply.size(), m = demand.size();
	std::size_t s = n + m, t = n + m + 1;
	Dinic<Cap> g(n + m + 2);
	for (std::size_t i = 0; i < n; ++i)
		if (supply[i] > 0)
			g.add_edge(s, i, supply[i]);
	for (std::size_t j = 0; j < m; ++j)
		if (demand[j] > 0)
			g.add_edge(n + j, t, demand[j]);
	for (const auto &e : edges)
		g.add_edge(e.source, n + e.target, infinite);
	return g.run(s, t);
}

} // namespace

Rational bipartite_max_flow(const std::vector<Rational> &supply, const std::vector<Rational> &demand,
                            const std::vector<BipartiteEdge> &edges)
{
	for (const auto &e : edges)
		if (e.source >= supply.size() || e.target >= demand.size())
			throw std::out_of_range("bipartite edge out of range");
	Integer l = common_denominator({&supply, &demand});
	std::vector<Integer> a, b;
	Integer total = 0;
	for (const auto &q : supply) {
		if (q < 0)
			throw std::invalid_argument("negative supply");
		a.push_back(scaled(q, l));
		total += a.back();
	}
	for (const auto &q : demand) {
		if (q < 0)
			throw std::invalid_argument("negative demand");
		b.push_back(scaled(q, l));
		total += b.back();
	}
	Integer flow;
	if (mpz_sizeinbase(total.get_mpz_t(), 2) < 62) {
		std::vector<long> a64, b64;
		for (const auto &z : a)
			a64.push_back(z.get_si());
		for (const auto &z : b)
			b64.push_back(z.get_si());
		flow = run_max_flow<long>(a64, b64, edges, total.get_si());
	} else {
		flow = run_max_flow<Integer>(a, b, edges, total);
	}
	Rational out(flow, l);
	out.canonicalize();
	return out;
}

std::vector<std::vector<Rational>> min_cost_transport(const std::vector<Rational> &supply,
                                                      const std::vector<Rational> &demand,
                                                      const std::vector<std::vector<Rational>> &cost)
{
	std::size_t n = supply.size(), m = demand.size();
	if (cost.size() != n)
		throw std::invalid_argument("cost matrix shape mismatch");
	Integer wl = common_denominator({&supply, &demand});
	std::vector<const std::vector<Rational> *> rows;
	for (const auto &r : cost) {
		if (r.size() != m)
			throw std::invalid_argument("cost matrix shape mismatch");
		rows.push_back(&r);
	}
	Integer cl = common_denominator(rows);

	// Residual network: 0 = source, 1..n supplies, n+1..n+m demands, n+m+1 sink.
	struct Edge {
		std::size_t to;
		Integer cap;
		Integer cost;
	};
	std::size_t s = 0, t = n + m + 1, nodes = n + m + 2;
	std::vector<Edge> edges;
	std::vector<std::vector<std::size_t>> adj(nodes);
	auto add = [&](std::size_t u, std::size_t v, Integer cap, Integer c) {
		adj[u].push_back(edges.size());
		edges.push_back({v, std::move(cap), c});
		adj[v].push_back(edges.size());
		edges.push_back({u, Integer(0), Integer(-c)});
	};
	Integer total = 0, total_b = 0;
	for (std::size_t i = 0; i < n; ++i) {
		Integer a = scaled(supply[i], wl);
		total += a;
		add(s, 1 + i, a, 0);
	}
	for (std::size_t j = 0; j < m; ++j) {
		Integer b = scaled(demand[j], wl);
		total_b += b;
		add(1 + n + j, t, b, 0);
	}
	if (total != total_b)
		throw std::invalid_argument("supplies and demands differ in total mass");
	std::vector<std::vector<std::size_t>> arc(n, std::vector<std::size_t>(m));
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < m; ++j) {
			if (cost[i][j] < 0)
				throw std::invalid_argument("negative transport cost");
			arc[i][j] = edges.size();
			add(1 + i, 1 + n + j, total, scaled(cost[i][j], cl));
		}
	}

	Integer sent = 0;
	while (sent < total) {
		// Bellman-Ford over the residual graph (no negative cycles under
		// successive shortest paths).
		std::vector<std::optional<Integer>> dist(nodes);
		std::vector<std::size_t> via(nodes, SIZE_MAX);
		dist[s] = Integer(0);
		for (std::size_t round = 0; round < nodes; ++round) {
			bool changed = false;
			for (std::size_t u = 0; u < nodes; ++u) {
				if (!dist[u])
					continue;
				for (std::size_t id : adj[u]) {
					const Edge &e = edges[id];
					if (e.cap <= 0)
						continue;
					Integer cand = *dist[u] + e.cost;
					if (!dist[e.to] || cand < *dist[e.to]) {
						dist[e.to] = cand;
						via[e.to] = id;
						changed = true;
					}
				}
			}
			if (!changed)
				break;
		}
		if (!dist[t])
			throw std::logic_error("transport network disconnected");
		Integer push = total - sent;
		for (std::size_t v = t; v != s; v = edges[via[v] ^ 1].to)
			if (edges[via[v]].cap < push)
				push = edges[via[v]].cap;
		for (std::size_t v = t; v != s; v = edges[via[v] ^ 1].to) {
			edges[via[v]].cap -= push;
			edges[via[v] ^ 1].cap += push;
		}
		sent += push;
	}

	std::vector<std::vector<Rational>> flows(n, std::vector<Rational>(m));
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < m; ++j) {
			Rational f(edges[arc[i][j] ^ 1].cap, wl);
			f.canonicalize();
			flows[i][j] = f;
		}
	}
	return flows;
}

} // namespace cps
