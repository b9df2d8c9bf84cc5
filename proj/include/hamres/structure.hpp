#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hamres/graph.hpp"
#include "hamres/random_process.hpp"

namespace hamres {

struct CoreResult {
  Graph core;                   // vertex-masked; removed vertices are inactive
  std::vector<Vertex> removed;  // peeling order
};

// Peels vertices of degree ≤ 1 until none remain.
CoreResult two_core(const Graph& g);
// Same core, with the initial candidates visited in `scan_order` (a
// permutation of the vertex ids). The removal order depends on it; the core
// does not.
CoreResult two_core(const Graph& g, std::span<const Vertex> scan_order);

// Masks every active vertex of degree 0.
Graph remove_isolated(const Graph& g);

// e(G) / C(|V|, 2) over active vertices; 0 for fewer than two.
double graph_density(const Graph& g);

// Tiny: deg < delta_t·n·p. Atypical: deg ∉ [(1 - delta_a)np, (1 + delta_a)np].
// n is the active vertex count and p is the supplied density, not g's own.
struct Classification {
  double p = 0;
  double delta_t = 0;
  double delta_a = 0;
  // Density of G+ when the sets are unions over a sandwich (p is then p0).
  std::optional<double> p_upper;
  VertexSet tiny;
  VertexSet atyp;
};

Classification classify(const Graph& g, double p, double delta_t, double delta_a);
// TINY_{p0}(G-) ∪ TINY_{p1}(G+) and ATYP_{p0}(G-) ∪ ATYP_{p1}(G+).
Classification classify_sandwich(const Graph& g_minus, const Graph& g_plus, double p0, double p1,
                                 double delta_t, double delta_a);
// Intersects both sets with `keep` (e.g. the vertices of a 2-core).
Classification restrict_to(const Classification& cls, const VertexSet& keep);

// One finite-n structural predicate with a re-checkable witness.
struct PropertyCheck {
  std::string name;
  bool pass = true;
  std::size_t bound = 0;
  std::size_t observed = 0;      // worst count seen (first violation if failing)
  std::optional<Vertex> center;  // vertex whose neighbourhood violates the bound
  std::vector<Vertex> witness;   // offending members, or a cycle in order
};

// |N^radius(v) ∩ S| ≤ bound for every active v.
PropertyCheck check_neighborhood_bound(const Graph& g, const VertexSet& s, std::size_t radius,
                                       std::size_t bound, std::string name);
// Every cycle with at most max_len vertices holds at most max_members
// vertices of S. Cycles are enumerated by depth-bounded DFS from members of S.
PropertyCheck check_short_cycles(const Graph& g, const VertexSet& s, std::size_t max_len,
                                 std::size_t max_members, std::string name);

// Longest cycle length examined by check_scatter.
inline constexpr std::size_t kMaxScatterCycle = 8;

struct ScatterReport {
  double delta = 0;
  std::size_t k = 0;
  std::size_t L = 0;
  std::size_t cycle_cap = 0;
  PropertyCheck tiny_near;    // |N³(v) ∩ TINY| ≤ k - 1
  PropertyCheck atyp_near;    // |N³(v) ∩ ATYP| ≤ L
  PropertyCheck tiny_cycles;  // cycles with ≤ 2k vertices hold ≤ k - 2 tiny vertices
  VertexSet tiny;
  VertexSet atyp;

  bool pass() const { return tiny_near.pass && atyp_near.pass && tiny_cycles.pass; }
};

// Scatter properties of a sandwich. TINY/ATYP are unions over (G-, p0) and
// (G+, p1) at the single threshold delta; neighbourhoods and cycles live in G+.
ScatterReport check_scatter(const Graph& g_minus, const Graph& g_plus, double p0, double p1,
                            double delta, std::size_t k, std::size_t L);
ScatterReport check_scatter(const SandwichCoupling& c, double delta, std::size_t k, std::size_t L);

// Matching-side scatter: |N²(v) ∩ TINY| ≤ 1 and |N²(v) ∩ ATYP| ≤ L.
std::vector<PropertyCheck> check_matching_scatter(const Graph& g, const Classification& cls,
                                                  std::size_t L);
// Hamiltonicity-side scatter: |N³(v) ∩ TINY| ≤ 2, |N²(v) ∩ ATYP| ≤ L, and
// cycles of at most 6 vertices hold at most one tiny vertex.
std::vector<PropertyCheck> check_hamilton_scatter(const Graph& g, const Classification& cls,
                                                  std::size_t L);

// Default constant for the edge-distribution inequality. No value is known;
// this one is a calibration choice and reports flag it as such.
inline constexpr double kDefaultEdgeDistributionC = 3.0;

struct EdgeDistributionOptions {
  bool singletons = true;
  bool degree_prefixes = true;
  std::size_t random_pairs = 10000;
  std::uint64_t seed = 0;
};

struct EdgeDistributionReport {
  double p = 0;
  double c = 0;
  bool c_is_default = false;
  double max_ratio = 0;
  std::size_t pairs_evaluated = 0;
  std::size_t witness_x = 0;  // |X| of the worst pair
  std::size_t witness_y = 0;  // |Y| of the worst pair
  std::string witness_family;

  bool within_bound() const { return max_ratio <= c; }
};

// |e(X,Y) - |X||Y|p| / sqrt(|X||Y| n p) for one pair; n = active vertex count.
double edge_distribution_ratio(const Graph& g, const VertexSet& x, const VertexSet& y, double p);

// Evaluates the ratio over a witness family instead of all set pairs:
// singleton pairs, degree-sorted prefix sets (against themselves and V), and
// random pairs with log-uniform sizes.
EdgeDistributionReport check_edge_distribution(const Graph& g, double p, double c,
                                               const EdgeDistributionOptions& options = {});

struct CodegreeReport {
  bool pass = true;
  std::size_t bound = 2;
  std::optional<std::pair<Vertex, Vertex>> witness;
};

// |N(u) ∩ N(v)| ≤ bound for all distinct u, v; the witness is the first
// violating pair in ascending order.
CodegreeReport check_codegree(const Graph& g, std::size_t bound = 2);

// Vertices of A ∪ B with fewer than (1/2 + eps/7)|A|p1 neighbours in A or
// fewer than (1/2 + eps/7)|B|p1 neighbours in B.
VertexSet degenerate_set(const Graph& g, const VertexSet& a, const VertexSet& b, double p1, double eps);

// Unordered pairs of degree-1 vertices sharing their neighbour.
std::size_t cherry_count(const Graph& g);
std::optional<std::pair<Vertex, Vertex>> find_cherry(const Graph& g);

}  // namespace hamres
