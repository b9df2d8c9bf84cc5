#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hamres/graph.hpp"
#include "hamres/rng.hpp"

namespace hamres {

// C(n, 2).
std::uint64_t pair_count(std::size_t n);
// Bijection between unordered pairs and [0, C(n,2)), row-major over u < v.
std::uint64_t pair_index(std::size_t n, Edge e);
Edge pair_from_index(std::size_t n, std::uint64_t index);

// Prefix of a uniformly random ordering of all vertex pairs, i.e. the first
// edges.size() steps of the random graph process.
struct ProcessTrace {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<Edge> edges;
  // hitting[k-1] = min{m : δ(G_m) ≥ k} for k = 1, 2, 3, when reached within the prefix.
  std::array<std::optional<std::size_t>, 3> hitting;

  std::optional<std::size_t> hitting_time(int k) const { return hitting.at(k - 1); }
};

// The first m_max steps of the process. The edge stream depends only on
// (n, seed): a shorter trace is always a prefix of a longer one.
ProcessTrace sample_process(std::size_t n, std::size_t m_max, std::uint64_t seed);

// Runs the same stream as sample_process until δ(G_m) ≥ k (k in 1..3).
ProcessTrace sample_process_until(std::size_t n, int k, std::uint64_t seed);

// G_m: the first m edges of the trace.
Graph graph_at(const ProcessTrace& trace, std::size_t m);

Graph sample_gnp(std::size_t n, double p, std::uint64_t seed);
// Sorted edge list of a G(n, p) sample drawn from an existing stream.
std::vector<Edge> sample_gnp_edges(std::size_t n, double p, Rng& rng);

// G- ~ G(n, p0), G+ = G- ∪ G(n, p'), plus a uniform ordering of E(G+) \ E(G-).
struct SandwichCoupling {
  Graph g_minus;
  Graph g_plus;
  std::vector<Edge> insertion_order;
  double p0 = 0;
  double p_prime = 0;
  double p1 = 0;  // 1 - (1 - p0)(1 - p')
};

SandwichCoupling sample_sandwich(std::size_t n, double p0, double p_prime, std::uint64_t seed);

// G- plus the first m - e(G-) edges of the insertion order. Throws RangeError
// unless e(G-) ≤ m ≤ e(G+).
Graph sandwich_slice(const SandwichCoupling& c, std::size_t m);

// Densities that put [m_lo, (1 + eps/4) m_lo] inside the coupling a.a.s.:
// p0 = (1 - eps/16) m_lo / C(n,2), p' = (eps/2) p0.
struct SandwichDensities {
  double p0 = 0;
  double p_prime = 0;
};
SandwichDensities sandwich_densities(std::size_t n, std::size_t m_lo, double eps);

struct CoveringSandwich {
  SandwichCoupling coupling;
  std::size_t attempts = 0;
  std::uint64_t seed_used = 0;
};

// Resamples (seed_i = derive_seed(seed, i)) until e(G-) ≤ m_lo and
// e(G+) ≥ m_hi. Throws RangeError after max_attempts failures; never clamps.
CoveringSandwich sample_covering_sandwich(std::size_t n, double p0, double p_prime,
                                          std::size_t m_lo, std::size_t m_hi,
                                          std::uint64_t seed, std::size_t max_attempts = 16);

// Trace dump: header "n m_max seed m1 m2" (-1 for an unreached milestone),
// then one "u v" pair per line in process order.
void write_trace(std::ostream& out, const ProcessTrace& trace);
ProcessTrace read_trace(std::istream& in);

}  // namespace hamres
