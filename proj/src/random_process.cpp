#include "hamres/random_process.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include "hamres/error.hpp"

namespace hamres {

std::uint64_t pair_count(std::size_t n) {
  return n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

namespace {

// Index of the first pair in row u.
std::uint64_t row_offset(std::uint64_t n, std::uint64_t u) { return u * (2 * n - u - 1) / 2; }

// Partial Fisher-Yates over [0, C(n,2)) with the permutation stored sparsely:
// only displaced positions live in the map, so m draws cost O(m) memory
// regardless of C(n,2).
class PairStream {
 public:
  PairStream(std::size_t n, std::uint64_t seed) : n_(n), total_(pair_count(n)), rng_(seed) {}

  bool exhausted() const { return drawn_ >= total_; }

  Edge next() {
    std::uint64_t j = drawn_ + rng_.below(total_ - drawn_);
    std::uint64_t value = at(j);
    displaced_[j] = at(drawn_);
    displaced_.erase(drawn_);
    ++drawn_;
    return pair_from_index(n_, value);
  }

 private:
  std::uint64_t at(std::uint64_t i) const {
    auto it = displaced_.find(i);
    return it == displaced_.end() ? i : it->second;
  }

  std::size_t n_;
  std::uint64_t total_;
  std::uint64_t drawn_ = 0;
  Rng rng_;
  std::unordered_map<std::uint64_t, std::uint64_t> displaced_;
};

// Tracks #{v : deg(v) < k} for k = 1..3 while edges arrive.
class MilestoneTracker {
 public:
  explicit MilestoneTracker(std::size_t n) : degree_(n, 0) { below_.fill(n); }

  void add(Edge e, std::size_t step, ProcessTrace& trace) {
    bump(e.u);
    bump(e.v);
    for (int k = 0; k < 3; ++k) {
      if (below_[k] == 0 && !trace.hitting[k]) trace.hitting[k] = step;
    }
  }

  bool reached(int k) const { return below_[k - 1] == 0; }

 private:
  void bump(Vertex v) {
    std::size_t d = ++degree_[v];
    if (d <= 3) --below_[d - 1];
  }

  std::vector<std::size_t> degree_;
  std::array<std::size_t, 3> below_{};
};

}  // namespace

std::uint64_t pair_index(std::size_t n, Edge e) {
  e = make_edge(e.u, e.v);
  if (e.v >= n || e.u == e.v) throw InputError("pair_index: invalid pair");
  return row_offset(n, e.u) + (e.v - e.u - 1);
}

Edge pair_from_index(std::size_t n, std::uint64_t index) {
  if (index >= pair_count(n)) throw InputError("pair_from_index: index out of range");
  const auto nn = static_cast<std::uint64_t>(n);
  long double b = 2.0L * nn - 1.0L;
  long double disc = b * b - 8.0L * static_cast<long double>(index);
  auto u = static_cast<std::uint64_t>(std::max(0.0L, std::floor((b - std::sqrt(std::max(0.0L, disc))) / 2.0L)));
  while (u > 0 && row_offset(nn, u) > index) --u;
  while (u + 1 < nn && row_offset(nn, u + 1) <= index) ++u;
  auto v = static_cast<Vertex>(u + 1 + (index - row_offset(nn, u)));
  return {static_cast<Vertex>(u), v};
}

ProcessTrace sample_process(std::size_t n, std::size_t m_max, std::uint64_t seed) {
  if (n == 0) throw InputError("sample_process: n must be positive");
  if (m_max > pair_count(n)) {
    throw InputError("sample_process: m_max = " + std::to_string(m_max) + " exceeds C(n,2) = " +
                     std::to_string(pair_count(n)));
  }
  ProcessTrace trace;
  trace.n = n;
  trace.seed = seed;
  trace.edges.reserve(m_max);
  PairStream stream(n, seed);
  MilestoneTracker tracker(n);
  for (std::size_t step = 1; step <= m_max; ++step) {
    Edge e = stream.next();
    trace.edges.push_back(e);
    tracker.add(e, step, trace);
  }
  return trace;
}

ProcessTrace sample_process_until(std::size_t n, int k, std::uint64_t seed) {
  if (n < 2) throw InputError("sample_process_until: need n >= 2");
  if (k < 1 || k > 3) throw InputError("sample_process_until: k must be 1, 2 or 3");
  if (static_cast<std::uint64_t>(k) > n - 1) throw InputError("sample_process_until: K_n has δ < k");
  ProcessTrace trace;
  trace.n = n;
  trace.seed = seed;
  PairStream stream(n, seed);
  MilestoneTracker tracker(n);
  std::size_t step = 0;
  while (!tracker.reached(k) && !stream.exhausted()) {
    Edge e = stream.next();
    trace.edges.push_back(e);
    tracker.add(e, ++step, trace);
  }
  return trace;
}

Graph graph_at(const ProcessTrace& trace, std::size_t m) {
  if (m > trace.edges.size()) {
    throw InputError("graph_at: m = " + std::to_string(m) + " beyond trace prefix of " +
                     std::to_string(trace.edges.size()));
  }
  return Graph::from_edges(trace.n, std::span<const Edge>(trace.edges.data(), m));
}

std::vector<Edge> sample_gnp_edges(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("sample_gnp: p must lie in [0, 1]");
  std::vector<Edge> edges;
  const std::uint64_t total = pair_count(n);
  if (p == 0.0 || total == 0) return edges;
  if (p == 1.0) {
    edges.reserve(total);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
    }
    return edges;
  }
  // Geometric skips between successive present pairs.
  const double log_q = std::log1p(-p);
  std::uint64_t next = 0;
  while (true) {
    double skip = std::floor(std::log1p(-rng.uniform01()) / log_q);
    if (skip >= static_cast<double>(total - next)) break;
    next += static_cast<std::uint64_t>(skip);
    edges.push_back(pair_from_index(n, next));
    if (++next >= total) break;
  }
  return edges;
}

Graph sample_gnp(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  auto edges = sample_gnp_edges(n, p, rng);
  return Graph::from_edges(n, edges);
}

SandwichCoupling sample_sandwich(std::size_t n, double p0, double p_prime, std::uint64_t seed) {
  Rng rng(seed);
  auto base = sample_gnp_edges(n, p0, rng);
  auto extra = sample_gnp_edges(n, p_prime, rng);
  std::vector<Edge> fresh;
  std::set_difference(extra.begin(), extra.end(), base.begin(), base.end(), std::back_inserter(fresh));
  std::vector<Edge> all;
  all.reserve(base.size() + fresh.size());
  std::merge(base.begin(), base.end(), fresh.begin(), fresh.end(), std::back_inserter(all));
  rng.shuffle(fresh);

  SandwichCoupling c;
  c.g_minus = Graph::from_edges(n, base);
  c.g_plus = Graph::from_edges(n, all);
  c.insertion_order = std::move(fresh);
  c.p0 = p0;
  c.p_prime = p_prime;
  c.p1 = 1.0 - (1.0 - p0) * (1.0 - p_prime);
  return c;
}

Graph sandwich_slice(const SandwichCoupling& c, std::size_t m) {
  const std::size_t lo = c.g_minus.m();
  const std::size_t hi = c.g_plus.m();
  if (m < lo || m > hi) {
    throw RangeError("sandwich_slice: m = " + std::to_string(m) + " outside [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  }
  std::span<const Edge> added(c.insertion_order.data(), m - lo);
  std::vector<Edge> all = c.g_minus.edges();
  all.insert(all.end(), added.begin(), added.end());
  return Graph::from_edges(c.g_minus.n(), all);
}

SandwichDensities sandwich_densities(std::size_t n, std::size_t m_lo, double eps) {
  double total = static_cast<double>(pair_count(n));
  if (total == 0) throw InputError("sandwich_densities: need n >= 2");
  SandwichDensities d;
  d.p0 = std::min(1.0, (1.0 - eps / 16.0) * static_cast<double>(m_lo) / total);
  d.p_prime = std::min(1.0, (eps / 2.0) * d.p0);
  return d;
}

CoveringSandwich sample_covering_sandwich(std::size_t n, double p0, double p_prime,
                                          std::size_t m_lo, std::size_t m_hi,
                                          std::uint64_t seed, std::size_t max_attempts) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::uint64_t s = derive_seed(seed, attempt);
    auto c = sample_sandwich(n, p0, p_prime, s);
    if (c.g_minus.m() <= m_lo && c.g_plus.m() >= m_hi) {
      return {std::move(c), attempt + 1, s};
    }
  }
  throw RangeError("sandwich coupling failed to cover [" + std::to_string(m_lo) + ", " +
                   std::to_string(m_hi) + "] in " + std::to_string(max_attempts) + " attempts");
}

void write_trace(std::ostream& out, const ProcessTrace& trace) {
  auto milestone = [](const std::optional<std::size_t>& m) {
    return m ? static_cast<long long>(*m) : -1LL;
  };
  out << trace.n << ' ' << trace.edges.size() << ' ' << trace.seed << ' ' << milestone(trace.hitting[0])
      << ' ' << milestone(trace.hitting[1]) << '\n';
  for (const Edge& e : trace.edges) out << e.u << ' ' << e.v << '\n';
}

ProcessTrace read_trace(std::istream& in) {
  long long n = -1;
  long long m_max = -1;
  std::uint64_t seed = 0;
  long long m1 = -1;
  long long m2 = -1;
  if (!(in >> n >> m_max >> seed >> m1 >> m2) || n <= 0 || m_max < 0) {
    throw InputError("trace: bad header");
  }
  ProcessTrace trace;
  trace.n = static_cast<std::size_t>(n);
  trace.seed = seed;
  MilestoneTracker tracker(trace.n);
  for (long long i = 0; i < m_max; ++i) {
    long long a = -1;
    long long b = -1;
    if (!(in >> a >> b) || a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw InputError("trace: bad edge on line " + std::to_string(i + 2));
    }
    Edge e = make_edge(static_cast<Vertex>(a), static_cast<Vertex>(b));
    trace.edges.push_back(e);
    tracker.add(e, static_cast<std::size_t>(i + 1), trace);
  }
  // Reject duplicates and headers that disagree with the recomputed milestones.
  std::vector<Edge> sorted = trace.edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("trace: duplicate edge");
  }
  auto as_ll = [](const std::optional<std::size_t>& m) { return m ? static_cast<long long>(*m) : -1LL; };
  if (as_ll(trace.hitting[0]) != m1 || as_ll(trace.hitting[1]) != m2) {
    throw InputError("trace: header milestones do not match the edge sequence");
  }
  return trace;
}

}  // namespace hamres
