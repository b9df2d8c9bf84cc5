#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamres/adversary.hpp"
#include "hamres/graph.hpp"
#include "hamres/random_process.hpp"
#include "hamres/structure.hpp"

namespace hamres {

// A path v0..vl. v0 (front) is the free endpoint; vl (back) stays fixed
// during rotations.
struct PathState {
  std::vector<Vertex> seq;

  Vertex front() const { return seq.front(); }
  Vertex back() const { return seq.back(); }
  std::size_t size() const { return seq.size(); }
};

// Consecutive vertices adjacent in g and all vertices distinct.
bool is_path(const Graph& g, std::span<const Vertex> seq);

// Chord {v0, vi} with 2 <= i <= l - 1 turns v0..vl into v_{i-1}..v0 vi..vl.
// Throws InputError if the chord is missing or i is out of range.
PathState rotate(const Graph& g, const PathState& p, std::size_t pivot_index);

// Appends an off-path neighbour at the free endpoint, else at the fixed one.
std::optional<PathState> extend(const PathState& p, const Graph& g);

// How to reach one endpoint from the root path: rotate around these pivot
// vertices in order (each is looked up by position in the current path).
struct ClosureEntry {
  Vertex endpoint = 0;
  std::vector<Vertex> pivots;
};

struct EndpointClosure {
  VertexSet endpoints;
  std::vector<ClosureEntry> transcripts;  // one per endpoint, BFS order
};

// Free endpoints reachable by rotations with vl fixed. A rotation at pivot u
// is admitted only if u and its path neighbours all lie in allowed_pivots.
EndpointClosure endpoint_closure(const Graph& g, const PathState& p, const VertexSet& allowed_pivots);
// Every active vertex admitted as a pivot.
EndpointClosure endpoint_closure(const Graph& g, const PathState& p);

PathState replay(const Graph& g, const PathState& root, std::span<const Vertex> pivots);

enum class BoosterExactness { exact, rotation_derived };

struct BoosterSet {
  Vertex v = 0;
  VertexSet companions;
  BoosterExactness exactness = BoosterExactness::exact;
};

inline constexpr std::size_t kExactBoosterCap = 16;
inline constexpr std::size_t kExactHamiltonCap = 20;

// Non-neighbours u of v such that g + {u, v} is Hamiltonian or has a longer
// longest path than g. Exact subset DP; refuses more than kExactBoosterCap
// active vertices. If g is already Hamiltonian every non-neighbour qualifies.
BoosterSet boosters_exact(const Graph& g, Vertex v);

// A longest path (vertex sequence) by subset DP; at most kExactHamiltonCap
// active vertices.
std::vector<Vertex> longest_path_exact(const Graph& g);

// Hamilton cycle by subset DP with a fixed start; at most kExactHamiltonCap
// active vertices. Graphs with fewer than 3 active vertices have none.
std::optional<std::vector<Vertex>> hamilton_exact(const Graph& g);

// Visits every active vertex once, consecutive pairs (cyclically) are edges,
// and there are at least 3 vertices.
bool verify_hamilton_cycle(const Graph& g, std::span<const Vertex> cycle);

// Pairs {x, vl} for endpoints x of the closure of p, plus pairs {x, y} where
// y is reached by then rotating the other end with x fixed (for the first
// `fanout` endpoints x). Only non-edges are kept. For a longest path of a
// connected graph each pair is a booster.
std::vector<Edge> rotation_booster_pairs(const Graph& g, const PathState& p, std::size_t fanout);
std::vector<BoosterSet> rotation_booster_sets(const Graph& g, const PathState& p, std::size_t fanout);

struct HamParams {
  double eps = 0.1;
  std::size_t K = 4;
  std::size_t L = 2;
  double mu = 0.25;
  std::size_t backbone_resamples = 3;
  std::size_t phase3_fanout = 16;
  std::size_t restarts_per_tier = 2;
  // Random sets per size class in the expansion check.
  std::size_t p5_random_sets = 4;
  // Stop a tier when a structural precondition fails.
  bool strict_preconditions = true;
  // After the backbone tiers, run rotation-extension on G - H directly.
  bool full_fallback = true;
};

// x_uv replaces the tiny path u (- w) - v. Its two edges are {x, u_out} and
// {x, v_out}, standing for {u_out, u} and {v, v_out}.
struct ContractedPath {
  Vertex synthetic = 0;
  Vertex u = 0;
  std::optional<Vertex> mid;
  Vertex v = 0;
  Vertex u_out = 0;
  Vertex v_out = 0;
};

struct ContractionMap {
  std::size_t n_original = 0;
  std::vector<ContractedPath> paths;

  const ContractedPath* find(Vertex synthetic) const;
  bool empty() const { return paths.empty(); }
};

struct BackboneWitness {
  VertexSet u;
  VertexSet w1;
  VertexSet w2;
  double alpha = 0;
  std::size_t K = 0;
  double q = 0;
};

struct Backbone {
  Graph gamma;  // ids [0, n) original, [n, n + |X|) synthetic
  BackboneWitness witness;
  ContractionMap cmap;
  Graph gq;
  Graph hq;
  VertexSet degenerate;
  std::vector<PropertyCheck> checks;  // H1, H2, contraction, P1-P5, max degree of H_q[U]
  bool preconditions_ok = true;
  std::string failure;
  std::size_t gq_samples = 1;

  std::vector<std::string> violations() const;
};

// g: 2-core of the slice; g_minus: the lower sandwich graph (g itself when
// there is none); keep: probability of keeping an edge of G- in G_q; p0:
// density of G-.
Backbone build_backbone(const Graph& g, const Graph& g_minus, const DeletionPlan& plan,
                        const Classification& cls, const HamParams& params, double keep, double p0,
                        std::uint64_t seed);

// Replaces each synthetic vertex by its path. Throws InvariantError if the
// cycle enters a synthetic vertex other than through its two edges.
std::vector<Vertex> expand_cycle(std::span<const Vertex> cycle, const ContractionMap& cmap);

struct SearchReport {
  bool found = false;
  std::string tier;                 // tier that produced the cycle
  std::string certificate;          // non-empty when G - H is provably not Hamiltonian
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::size_t best_path_len = 0;    // vertices on the longest path seen
  std::size_t e_prime_used = 0;
  std::size_t booster_candidates = 0;
  std::size_t boosters_realized = 0;
  std::vector<std::string> backbone_violations;
};

struct SearchResult {
  std::optional<std::vector<Vertex>> cycle;
  SearchReport report;
};

// Rotation-extension search for a Hamilton cycle of g - plan.h. g must be a
// 2-core (InputError otherwise). Tries backbone graphs with keep probability
// mu/4, 1/4 and 1 in turn, sprinkling at most n booster edges from
// G-[U] - H, then (if enabled) plain rotation-extension on G - H. Every
// returned cycle is verified.
SearchResult hamilton_search(const Graph& g, const DeletionPlan& plan, const Classification& cls,
                             const HamParams& params, std::uint64_t seed,
                             const SandwichCoupling* sandwich = nullptr);

// Cheap proofs that g has no Hamilton cycle: a vertex of degree < 2, a vertex
// with three or more degree-2 neighbours, or a disconnected graph. Empty when
// none applies.
std::string hamilton_obstruction(const Graph& g);

}  // namespace hamres
