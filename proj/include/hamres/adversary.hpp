#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamres/graph.hpp"
#include "hamres/structure.hpp"

namespace hamres {

enum class BudgetMode { simple, refined };

// Per-vertex deletion caps.
//
// simple:  cap(v) = floor(alpha * deg(v))
// refined: cap(v) = deg(v) - k_t for tiny v, deg(v) - k_a for atypical
//          non-tiny v, floor(alpha * deg(v)) otherwise; clamped at 0.
struct Budget {
  BudgetMode mode = BudgetMode::simple;
  double alpha = 0;
  // Refined-mode provenance; zero in simple mode.
  double delta_t = 0;
  double delta_a = 0;
  std::size_t k_t = 0;
  std::size_t k_a = 0;
  double p = 0;
  std::vector<std::size_t> cap;  // indexed by vertex id; 0 for inactive vertices

  std::size_t at(Vertex v) const { return cap.at(v); }
};

// floor(alpha * d), tolerant of alpha values that are not exact binary fractions
// (0.3 * 10 must give 3).
std::size_t alpha_floor(double alpha, std::size_t d);

Budget make_simple_budget(const Graph& g, double alpha);
// cls.p must equal e(G) / C(|V|, 2) (relative tolerance 1e-9).
Budget make_refined_budget(const Graph& g, double alpha, const Classification& cls, std::size_t k_t,
                           std::size_t k_a);

struct BudgetParams {
  BudgetMode mode = BudgetMode::simple;
  double alpha = 0;
  std::size_t k_t = 0;
  std::size_t k_a = 0;
};
// Dispatches on params.mode; refined mode requires cls.
Budget make_budget(const Graph& g, const BudgetParams& params, const Classification* cls = nullptr);

// The set H of deleted edges, with the budget it was built against.
struct DeletionPlan {
  std::vector<Edge> h;  // sorted
  Budget budget;
  std::string strategy;

  // deg_H(v) / deg_G(v), maximised over vertices with deg_G > 0.
  double max_fraction(const Graph& g) const;
};

struct PlanCheck {
  bool ok = true;
  std::optional<Vertex> violator;  // first vertex (ascending id) over its cap
  std::size_t used = 0;
  std::size_t cap = 0;
};

// Throws InputError if a plan edge is missing from g or repeated.
PlanCheck validate_plan(const Graph& g, const DeletionPlan& plan);

// Edges in random order; an edge is deleted iff both endpoints still have
// budget. Never deletes an edge partially.
DeletionPlan adversary_random(const Graph& g, const Budget& budget, std::uint64_t seed);

// Same shuffle as adversary_random, but target edges are offered first.
// Throws InputError if a target edge is not in g.
DeletionPlan adversary_targeted(const Graph& g, const Budget& budget, std::span<const Edge> target,
                                std::uint64_t seed);

// V1 ∪ V2 partitions the active vertices.
struct PartitionWitness {
  VertexSet v1;
  VertexSet v2;
  bool balanced = false;  // |V1| == |V2|
};

struct BipartitionResult {
  PartitionWitness witness;
  DeletionPlan plan;
  std::size_t switches = 0;
  bool unbalancing_attempted = false;
  bool unbalanced_by_move = false;
};

inline constexpr std::size_t kDefaultUnbalanceSlack = 1;

// Local switching from a random partition until every vertex has at least
// half of its neighbours across. If the result is balanced, tries to move one
// vertex with >= ceil(deg/2) - slack neighbours on its own side and re-settles;
// the move is kept only if the settled partition is unbalanced. H is every
// within-part edge, truncated in random order to `cap` when given.
BipartitionResult adversary_bipartition(const Graph& g, const std::optional<Budget>& cap,
                                        std::uint64_t seed,
                                        std::size_t slack = kDefaultUnbalanceSlack);

// First active vertex with fewer than half of its neighbours across.
std::optional<Vertex> cross_majority_violation(const Graph& g, const PartitionWitness& w);

struct ParityCertificate {
  bool bipartite = false;  // every edge of G - H crosses the witness
  std::size_t imbalance = 0;
  bool no_hamilton_cycle = false;     // bipartite, imbalance >= 1, >= 3 active vertices
  bool no_perfect_matching = false;   // bipartite, imbalance >= 2
};

ParityCertificate parity_certificate(const Graph& g_minus_h, const PartitionWitness& w);

// True iff simple.cap(v) <= refined.cap(v) for every v.
bool budget_dominated(const Budget& simple, const Budget& refined);

// Hypotheses under which simple-budget plans are refined-budget plans:
// (1 - alpha) delta_t n p >= k_a >= k_t and d - floor(alpha d) >= k_t with
// d = min degree.
bool refined_implication_holds(const Graph& g, double alpha, const Classification& cls,
                               std::size_t k_t, std::size_t k_a);

}  // namespace hamres
