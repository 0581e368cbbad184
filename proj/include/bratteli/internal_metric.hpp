#pragma once

#include <atomic>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "bratteli/cotransition.hpp"
#include "bratteli/graded_graph.hpp"
#include "bratteli/transport.hpp"

namespace bratteli {

enum class ArithmeticMode { Exact, Float };

inline const char* to_string(ArithmeticMode m) {
  return m == ArithmeticMode::Exact ? "exact" : "float";
}

struct MetricIterationOptions {
  ArithmeticMode mode = ArithmeticMode::Exact;
  // exact iteration falls back to doubles once any denominator gets this wide
  std::size_t denominator_bit_cutoff = 4096;
  unsigned jobs = 1;
};

struct MetricProvenance {
  std::string initial_metric = "discrete";
  std::size_t initial_level = 1;
  ArithmeticMode requested_mode = ArithmeticMode::Exact;
  std::size_t denominator_bit_cutoff = 4096;
  std::optional<std::size_t> float_switch_level;  // first level stored as doubles
};

// One iterate rho_n of the internal metric: a symmetric distance matrix on
// the vertices of level n, stored exactly or in doubles.
class LevelMetric {
 public:
  LevelMetric(std::size_t level, std::size_t n, std::vector<Rat> d)
      : level_(level), n_(n), d_(std::move(d)) {}
  LevelMetric(std::size_t level, std::size_t n, std::vector<double> d)
      : level_(level), n_(n), d_(std::move(d)) {}

  static LevelMetric from_ground(std::size_t level, const GroundMetric<Rat>& g) {
    std::vector<Rat> d(g.size() * g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) d[i * g.size() + j] = g(i, j);
    return LevelMetric(level, g.size(), std::move(d));
  }

  std::size_t level() const { return level_; }
  std::size_t size() const { return n_; }
  bool exact() const { return std::holds_alternative<std::vector<Rat>>(d_); }

  const Rat& exact_at(std::size_t i, std::size_t j) const {
    return std::get<std::vector<Rat>>(d_).at(i * n_ + j);
  }
  double at(std::size_t i, std::size_t j) const {
    if (exact()) return to_double(std::get<std::vector<Rat>>(d_)[i * n_ + j]);
    return std::get<std::vector<double>>(d_)[i * n_ + j];
  }

  GroundMetric<Rat> ground_exact() const {
    GroundMetric<Rat> g(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) g.set(i, j, exact_at(i, j));
    return g;
  }
  GroundMetric<double> ground_float() const {
    GroundMetric<double> g(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) g.set(i, j, at(i, j));
    return g;
  }

  double max_entry() const {
    double m = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, at(i, j));
    return m;
  }

  std::size_t max_denominator_bits() const {
    std::size_t b = 1;
    for (const Rat& v : std::get<std::vector<Rat>>(d_)) b = std::max(b, denominator_bits(v));
    return b;
  }

 private:
  std::size_t level_, n_;
  std::variant<std::vector<Rat>, std::vector<double>> d_;
};

// The iterated family {rho_n}, first_level..last, plus the cocycle that
// produced it. Levels before a recorded float switch are exact.
struct InternalMetricSequence {
  std::size_t first_level = 1;
  std::vector<LevelMetric> levels;
  std::shared_ptr<const CotransitionKernel> kernel;
  MetricProvenance provenance;

  std::size_t last_level() const { return first_level + levels.size() - 1; }
  bool has_level(std::size_t n) const { return n >= first_level && n <= last_level(); }
  const LevelMetric& at_level(std::size_t n) const {
    if (!has_level(n)) throw std::out_of_range("metric sequence: level " + std::to_string(n));
    return levels[n - first_level];
  }
};

namespace detail {

// Runs fn(i) for i in [0, count), on up to `jobs` threads. Work items write
// to disjoint slots, so scheduling cannot change results.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  unsigned nthreads = std::min<unsigned>(jobs, std::thread::hardware_concurrency());
  for (unsigned t = 1; t < std::max(1u, nthreads); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

template <typename T>
std::vector<std::vector<std::pair<std::size_t, T>>> level_projections(
    const CotransitionKernel& kernel, std::size_t level) {
  std::vector<std::vector<std::pair<std::size_t, T>>> proj(kernel.level_size(level));
  for (std::size_t v = 0; v < proj.size(); ++v)
    for (const auto& [u, w] : kernel.row(level, v)) {
      if constexpr (std::is_same_v<T, Rat>)
        proj[v].emplace_back(u, w);
      else
        proj[v].emplace_back(u, to_double(w));
    }
  return proj;
}

// rho_{n+1}(u, v) = K(p delta_u, p delta_v, rho_n) for all pairs of the
// next level; pair solves are independent and run in parallel.
template <typename T>
std::vector<T> iterate_one_level(const CotransitionKernel& kernel, std::size_t next_level,
                                 const GroundMetric<T>& prev, unsigned jobs) {
  auto proj = level_projections<T>(kernel, next_level);
  const std::size_t nv = proj.size();
  std::vector<T> d(nv * nv, T(0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < nv; ++u)
    for (std::size_t v = u + 1; v < nv; ++v) pairs.emplace_back(u, v);
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    auto [u, v] = pairs[k];
    T val = kantorovich_sparse<T>(proj[u], proj[v],
                                  [&](std::size_t i, std::size_t j) { return prev(i, j); });
    d[u * nv + v] = val;
    d[v * nv + u] = std::move(val);
  });
  return d;
}

}  // namespace detail

// Iterates the Kantorovich extension along the graph: the initial metric
// lives on the vertices of `initial_level`, and each following level gets
// the transport distance between the projections of its vertex deltas.
inline InternalMetricSequence iterate_metric(const GradedGraph& graph,
                                             std::shared_ptr<const CotransitionKernel> kernel,
                                             const GroundMetric<Rat>& initial,
                                             std::size_t initial_level, std::size_t up_to,
                                             MetricIterationOptions opts = {},
                                             std::string initial_name = "custom") {
  if (initial_level < 1 || up_to > graph.depth() || initial_level > up_to)
    throw ValidationError("iterate_metric: level range out of bounds");
  if (initial.size() != graph.level_size(initial_level))
    throw ValidationError("iterate_metric: initial metric has wrong dimension");
  if (auto err = initial.check())
    throw ValidationError("iterate_metric: initial metric invalid: " + *err);

  InternalMetricSequence seq;
  seq.first_level = initial_level;
  seq.kernel = kernel;
  seq.provenance = {std::move(initial_name), initial_level, opts.mode,
                    opts.denominator_bit_cutoff, std::nullopt};

  bool exact = opts.mode == ArithmeticMode::Exact;
  if (exact) {
    seq.levels.push_back(LevelMetric::from_ground(initial_level, initial));
  } else {
    seq.provenance.float_switch_level = initial_level;
    std::vector<double> d(initial.size() * initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i)
      for (std::size_t j = 0; j < initial.size(); ++j)
        d[i * initial.size() + j] = to_double(initial(i, j));
    seq.levels.emplace_back(initial_level, initial.size(), std::move(d));
  }

  for (std::size_t n = initial_level; n < up_to; ++n) {
    const LevelMetric& prev = seq.levels.back();
    if (exact) {
      auto d = detail::iterate_one_level<Rat>(*kernel, n + 1, prev.ground_exact(), opts.jobs);
      LevelMetric lm(n + 1, graph.level_size(n + 1), std::move(d));
      if (lm.max_denominator_bits() > opts.denominator_bit_cutoff) {
        // denominators compound multiplicatively; continue in doubles
        exact = false;
        seq.provenance.float_switch_level = n + 1;
        std::vector<double> fd(lm.size() * lm.size(), 0.0);
        for (std::size_t i = 0; i < lm.size(); ++i)
          for (std::size_t j = 0; j < lm.size(); ++j) fd[i * lm.size() + j] = lm.at(i, j);
        seq.levels.emplace_back(n + 1, lm.size(), std::move(fd));
      } else {
        seq.levels.push_back(std::move(lm));
      }
    } else {
      auto d = detail::iterate_one_level<double>(*kernel, n + 1, prev.ground_float(), opts.jobs);
      seq.levels.emplace_back(n + 1, graph.level_size(n + 1), std::move(d));
    }
  }
  return seq;
}

// Distance between a vertex at level n and a vertex at level m > n: one
// transport step against the projection for m == n+1, otherwise the minimum
// over chains of intermediate vertices, accumulated level by level.
// Computed in doubles.
inline double cross_level_distance(const InternalMetricSequence& seq, std::size_t n,
                                   std::size_t e, std::size_t m, std::size_t f) {
  if (n >= m) throw ValidationError("cross_level_distance: need n < m");
  if (!seq.has_level(n) || !seq.has_level(m))
    throw std::out_of_range("cross_level_distance: level outside sequence");
  const CotransitionKernel& k = *seq.kernel;
  if (e >= k.level_size(n) || f >= k.level_size(m))
    throw std::out_of_range("cross_level_distance: vertex index");

  // best[w] = min over chains e = e_n, ..., e_l = w of the step sums
  std::vector<double> best(k.level_size(n), std::numeric_limits<double>::infinity());
  best[e] = 0.0;
  for (std::size_t l = n; l < m; ++l) {
    const LevelMetric& rho = seq.at_level(l);
    std::vector<double> next(k.level_size(l + 1), std::numeric_limits<double>::infinity());
    for (std::size_t w = 0; w < next.size(); ++w) {
      // step(u, w) = sum_j lambda(j|w) rho_l(u, j)
      const auto& row = k.row(l + 1, w);
      for (std::size_t u = 0; u < best.size(); ++u) {
        if (best[u] == std::numeric_limits<double>::infinity()) continue;
        double step = 0.0;
        for (const auto& [j, wgt] : row) step += to_double(wgt) * rho.at(u, j);
        next[w] = std::min(next[w], best[u] + step);
      }
    }
    best = std::move(next);
  }
  return best[f];
}

struct NearestVertex {
  std::size_t vertex = 0;
  double distance = 0.0;
  std::optional<Rat> exact_distance;  // present when the level metric is exact
};

// min over vertices g of K(dist, delta_g, rho_n); ties to the smaller index.
inline NearestVertex distance_to_vertices(const LevelDistribution& dist, const LevelMetric& rho) {
  if (dist.level != rho.level() || dist.p.size() != rho.size())
    throw ValidationError("distance_to_vertices: level mismatch");
  NearestVertex out;
  if (rho.exact()) {
    std::optional<Rat> best;
    for (std::size_t g = 0; g < rho.size(); ++g) {
      Rat s(0);
      for (std::size_t j = 0; j < rho.size(); ++j)
        if (dist.p[j] != 0) s += dist.p[j] * rho.exact_at(g, j);
      if (!best || s < *best) {
        best = std::move(s);
        out.vertex = g;
      }
    }
    out.exact_distance = best;
    out.distance = to_double(*best);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < rho.size(); ++g) {
      double s = 0;
      for (std::size_t j = 0; j < rho.size(); ++j)
        if (dist.p[j] != 0) s += to_double(dist.p[j]) * rho.at(g, j);
      if (s < best) {
        best = s;
        out.vertex = g;
      }
    }
    out.distance = best;
  }
  return out;
}

struct MetricComparisonLevel {
  std::size_t level;
  Rat max_ratio_ab;  // max over pairs of rho^A / rho^B
  Rat max_ratio_ba;
};

struct MetricComparisonReport {
  Rat r_ab;  // initial-level bound: rho_A <= r_ab * rho_B entrywise
  Rat r_ba;
  std::vector<MetricComparisonLevel> levels;
  bool dominance_preserved = true;  // ratios never exceeded the initial bounds
};

// Iterates two initial metrics side by side and reports the entrywise
// ratio range per level; the initial bounds must propagate unchanged.
inline MetricComparisonReport compare_initial_metrics(
    const GradedGraph& graph, std::shared_ptr<const CotransitionKernel> kernel,
    const GroundMetric<Rat>& rho_a, const GroundMetric<Rat>& rho_b, std::size_t initial_level,
    std::size_t up_to, unsigned jobs = 1) {
  if (rho_a.size() != rho_b.size()) throw ValidationError("compare_initial_metrics: sizes differ");
  if (!rho_a.nondegenerate() || !rho_b.nondegenerate())
    throw ValidationError("compare_initial_metrics: degenerate initial metric");

  MetricIterationOptions opts;
  opts.jobs = jobs;
  opts.denominator_bit_cutoff = SIZE_MAX;  // comparisons are exact-only
  auto seq_a = iterate_metric(graph, kernel, rho_a, initial_level, up_to, opts, "A");
  auto seq_b = iterate_metric(graph, kernel, rho_b, initial_level, up_to, opts, "B");

  MetricComparisonReport rep;
  auto ratios = [](const LevelMetric& a, const LevelMetric& b) {
    Rat rab(0), rba(0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j) {
        const Rat& x = a.exact_at(i, j);
        const Rat& y = b.exact_at(i, j);
        if (y != 0) rab = std::max(rab, Rat(x / y));
        if (x != 0) rba = std::max(rba, Rat(y / x));
      }
    return std::make_pair(rab, rba);
  };
  std::tie(rep.r_ab, rep.r_ba) = ratios(seq_a.at_level(initial_level), seq_b.at_level(initial_level));
  for (std::size_t n = initial_level; n <= up_to; ++n) {
    auto [rab, rba] = ratios(seq_a.at_level(n), seq_b.at_level(n));
    rep.levels.push_back({n, rab, rba});
    if (rab > rep.r_ab || rba > rep.r_ba) rep.dominance_preserved = false;
  }
  return rep;
}

}  // namespace bratteli
