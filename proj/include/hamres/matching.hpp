#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamres/adversary.hpp"
#include "hamres/graph.hpp"
#include "hamres/structure.hpp"

namespace hamres {

struct Matching {
  std::vector<Edge> edges;  // sorted
  VertexSet saturated;

  std::size_t size() const { return edges.size(); }
};

Matching make_matching(std::vector<Edge> edges);

// Empty string when `m` is a matching of `host` (edges present, pairwise
// disjoint); otherwise a description of the first problem.
std::string matching_problem(const Graph& host, const Matching& m);
// A matching of host that leaves at most one active vertex uncovered.
bool is_perfect_matching(const Graph& host, const Matching& m);

// Maximum-cardinality matching of a general graph (blossom algorithm).
Matching max_matching_exact(const Graph& g);
// Max matching covers all but at most one active vertex.
bool has_perfect_matching(const Graph& g);

// Hopcroft-Karp between disjoint sides a and b; only a-b edges are used.
Matching bipartite_max_matching(const Graph& g, const VertexSet& a, const VertexSet& b);

struct HallViolation {
  VertexSet s;
  VertexSet neighbours;  // N(S) inside the other side; smaller than s
};

// A Hall violator exists iff the bipartite graph between a and b has no
// perfect matching. S lies in the larger side (a when the sizes are equal):
// the vertices reachable from unmatched ones by alternating paths. Throws
// InputError if a and b intersect or an edge of g lies inside a or inside b.
std::optional<HallViolation> find_hall_violation(const Graph& g, const VertexSet& a, const VertexSet& b);

// A cheap certificate that no perfect matching exists: vertices that must stay
// uncovered (isolated ones, and all but one degree-1 neighbour of any vertex)
// outnumber the parity allowance. Empty when nothing is certified.
std::string pm_obstruction(const Graph& g);

enum class PmStage {
  parity_fix,
  tiny_saturation,
  atyp_saturation,
  equipartition,
  degenerate_matching,
  rebalance,
  hall_check,
};

const char* to_string(PmStage stage);

struct PmParams {
  double eps = 0.1;
  std::size_t K = 4;
  std::size_t L = 2;
  double p1 = 0;  // density bound of G+; 0 means use the density of g
  // A failed runtime property check stops the pipeline when set; otherwise it
  // is recorded and the stage carries on while it can.
  bool strict_preconditions = true;
};

struct StageOutcome {
  PmStage stage = PmStage::parity_fix;
  bool ok = true;
  std::string detail;
  std::vector<PropertyCheck> checks;
};

struct PipelineReport {
  bool success = false;
  std::optional<PmStage> failed_stage;
  std::string failure_reason;
  std::vector<Vertex> witness;
  std::optional<HallViolation> hall;
  // Set when G - H provably has no perfect matching (see pm_obstruction).
  std::string obstruction;
  std::vector<StageOutcome> stages;
  Matching matching;
  std::optional<Vertex> removed_vertex;
  std::size_t tiny_count = 0;
  std::size_t atyp_count = 0;
  std::size_t u1_size = 0;
  std::size_t degenerate_count = 0;
  std::size_t moved = 0;

  // The pipeline reached a verdict: a matching, or a certified obstruction.
  bool decided() const { return success || !obstruction.empty(); }
};

// Greedy tiny and atypical saturation, random equipartition, degenerate-vertex
// matching, rebalancing by a 2-independent set, then Hopcroft-Karp. g should
// have its isolated vertices removed. Any returned matching is checked to be a
// perfect matching of g - plan.h.
PipelineReport constructive_pm(const Graph& g, const DeletionPlan& plan, const Classification& cls,
                               const PmParams& params, std::uint64_t seed);

}  // namespace hamres
