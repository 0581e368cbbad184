#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/compactness.hpp"
#include "bratteli/internal_metric.hpp"

namespace bratteli {

// Forward Markov kernel Prob(v at n+1 | u at n), one sparse row per vertex.
struct ForwardKernel {
  using Row = std::vector<std::pair<std::size_t, Rat>>;  // (successor, prob)
  std::vector<std::vector<Row>> rows;                    // rows[n][u], n = 0..N-1

  std::size_t depth() const { return rows.size(); }
  const Row& row(std::size_t n, std::size_t u) const { return rows.at(n).at(u); }
};

// A coherent sequence of level distributions: one point of the projective
// limit of the level simplices. Kept exact; immutable once built.
class CentralMeasure {
 public:
  CentralMeasure(std::vector<LevelDistribution> levels, std::optional<ForwardKernel> fwd = {})
      : levels_(std::move(levels)), fwd_(std::move(fwd)) {}

  std::size_t depth() const { return levels_.size() - 1; }
  const LevelDistribution& at(std::size_t n) const { return levels_.at(n); }
  const std::vector<LevelDistribution>& levels() const { return levels_; }
  bool has_forward_kernel() const { return fwd_.has_value(); }
  const ForwardKernel& forward_kernel() const { return *fwd_; }

 private:
  std::vector<LevelDistribution> levels_;
  std::optional<ForwardKernel> fwd_;
};

namespace detail {

inline void check_forward_kernel_shape(const GradedGraph& g, const ForwardKernel& fwd) {
  if (fwd.depth() != g.depth()) throw ValidationError("forward kernel: wrong depth");
  for (std::size_t n = 0; n < g.depth(); ++n) {
    if (fwd.rows[n].size() != g.level_size(n))
      throw ValidationError("forward kernel: wrong row count at level " + std::to_string(n));
    for (std::size_t u = 0; u < g.level_size(n); ++u) {
      Rat sum = 0;
      for (const auto& [v, p] : fwd.rows[n][u]) {
        if (v >= g.level_size(n + 1) || p < 0)
          throw ValidationError("forward kernel: bad entry at level " + std::to_string(n));
        if (p > 0 && g.mult(n + 1, u, v) == 0)
          throw ValidationError("forward kernel: support outside adjacency on edge (" +
                                std::to_string(u) + " -> " + std::to_string(v) + ") at level " +
                                std::to_string(n));
        sum += p;
      }
      if (sum != 1)
        throw ValidationError("forward kernel: row " + std::to_string(u) + " at level " +
                              std::to_string(n) + " sums to " + format_fraction(sum));
    }
  }
}

}  // namespace detail

// Builds mu_n by forward propagation from the root and verifies the
// centrality identity mu_n(u) fwd(v|u) = mu_{n+1}(v) lambda(u|v) on every
// edge; a violating kernel is rejected with the edge and both sides named.
inline CentralMeasure from_forward_kernel(const GradedGraph& g, const CotransitionKernel& lambda,
                                          ForwardKernel fwd) {
  detail::check_forward_kernel_shape(g, fwd);

  std::vector<LevelDistribution> mu(g.depth() + 1);
  mu[0].level = 0;
  mu[0].p.assign(g.level_size(0), Rat(1));
  for (std::size_t n = 0; n < g.depth(); ++n) {
    mu[n + 1].level = n + 1;
    mu[n + 1].p.assign(g.level_size(n + 1), Rat(0));
    for (std::size_t u = 0; u < g.level_size(n); ++u) {
      if (mu[n].p[u] == 0) continue;
      for (const auto& [v, p] : fwd.rows[n][u]) mu[n + 1].p[v] += mu[n].p[u] * p;
    }
  }

  for (std::size_t n = 0; n < g.depth(); ++n)
    for (std::size_t u = 0; u < g.level_size(n); ++u) {
      // dense row view to cover edges missing from the sparse row
      std::vector<Rat> fu(g.level_size(n + 1), Rat(0));
      for (const auto& [v, p] : fwd.rows[n][u]) fu[v] = p;
      for (const auto& [v, m] : g.successors(n, u)) {
        Rat lhs = mu[n].p[u] * fu[v];
        Rat rhs = mu[n + 1].p[v] * lambda.lambda(n + 1, u, v);
        if (lhs != rhs)
          throw IncoherentMeasureError(
              "forward kernel is not central on edge (" + std::to_string(u) + " -> " +
              std::to_string(v) + ") between levels " + std::to_string(n) + " and " +
              std::to_string(n + 1) + ": mu_n(u)*fwd(v|u) = " + format_fraction(lhs) +
              " but mu_{n+1}(v)*lambda(u|v) = " + format_fraction(rhs));
      }
    }
  return CentralMeasure(std::move(mu), std::move(fwd));
}

// Accepts explicit level distributions after checking exact coherence
// project(mu_n) == mu_{n-1}; incoherent inputs are rejected, not repaired.
inline CentralMeasure measure_from_levels(const CotransitionKernel& lambda,
                                          std::vector<LevelDistribution> mu) {
  if (mu.empty()) throw ValidationError("measure_from_levels: empty");
  for (std::size_t n = 0; n < mu.size(); ++n) {
    if (mu[n].level != n || mu[n].p.size() != lambda.level_size(n))
      throw ValidationError("measure_from_levels: level " + std::to_string(n) + " malformed");
    if (!mu[n].is_probability())
      throw IncoherentMeasureError("measure_from_levels: level " + std::to_string(n) +
                                   " is not a probability vector");
  }
  for (std::size_t n = mu.size() - 1; n >= 1; --n) {
    LevelDistribution down = project(mu[n], lambda);
    if (down.p != mu[n - 1].p)
      throw IncoherentMeasureError("measure_from_levels: project(mu_" + std::to_string(n) +
                                   ") != mu_" + std::to_string(n - 1));
  }
  return CentralMeasure(std::move(mu));
}

// Pointwise convex combination; coherence is preserved by linearity of the
// projections. The forward kernels of the parts do not mix, so the result
// carries none.
inline CentralMeasure mixture(const std::vector<CentralMeasure>& parts,
                              const std::vector<Rat>& weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw ValidationError("mixture: need matching parts and weights");
  Rat wsum = 0;
  for (const Rat& w : weights) {
    if (w < 0) throw ValidationError("mixture: negative weight");
    wsum += w;
  }
  if (wsum != 1) throw ValidationError("mixture: weights must sum to 1");
  const std::size_t depth = parts[0].depth();
  for (const auto& p : parts)
    if (p.depth() != depth) throw ValidationError("mixture: mismatched level ranges");

  std::vector<LevelDistribution> mu(depth + 1);
  for (std::size_t n = 0; n <= depth; ++n) {
    mu[n].level = n;
    mu[n].p.assign(parts[0].at(n).p.size(), Rat(0));
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].at(n).p.size() != mu[n].p.size())
        throw ValidationError("mixture: level size mismatch");
      for (std::size_t v = 0; v < mu[n].p.size(); ++v)
        mu[n].p[v] += weights[k] * parts[k].at(n).p[v];
    }
  }
  return CentralMeasure(std::move(mu));
}

// Bayes inversion of the cocycle: fwd(v|u) = mu_{n+1}(v) lambda(u|v) / mu_n(u).
// Defined on the support of mu; rows off the support fall back to an
// arbitrary fixed successor so the kernel stays stochastic.
inline ForwardKernel derive_forward_bayes(const GradedGraph& g, const CotransitionKernel& lambda,
                                          const CentralMeasure& m) {
  ForwardKernel fwd;
  fwd.rows.resize(g.depth());
  for (std::size_t n = 0; n < g.depth(); ++n) {
    fwd.rows[n].resize(g.level_size(n));
    for (std::size_t u = 0; u < g.level_size(n); ++u) {
      const Rat& mu_u = m.at(n).p[u];
      if (mu_u == 0) {
        fwd.rows[n][u].emplace_back(g.successors(n, u).front().first, Rat(1));
        continue;
      }
      for (const auto& [v, mult] : g.successors(n, u)) {
        Rat p = m.at(n + 1).p[v] * lambda.lambda(n + 1, u, v) / mu_u;
        if (p != 0) fwd.rows[n][u].emplace_back(v, std::move(p));
      }
    }
  }
  return fwd;
}

enum class SimplexDistance { TotalVariation, InternalKantorovich };

struct ExtremalityRow {
  std::size_t n, m;
  Rat eps;
  Rat mass_tv;        // mu_m-mass of vertices whose projection lands within
  Rat mass_internal;  // eps of x_n, in each of the two simplex distances
};

struct ExtremalityVerdict {
  std::size_t n;
  Rat eps;
  bool tv_trend_to_one = false;
  bool internal_trend_to_one = false;
};

struct ExtremalityReport {
  std::vector<ExtremalityRow> rows;
  std::vector<ExtremalityVerdict> verdicts;
  // overall call on the TV basis; finite-horizon rule: mass at the largest
  // tested m within `threshold` of 1 for every (n, eps)
  bool consistent_with_extremality = false;
  bool consistent_with_extremality_internal = false;
  Rat threshold = Rat(1, 20);
};

// Extremality criterion at finite horizon: decompose x_m by the vertices of
// level m, push each vertex delta down to level n, and measure how much
// mu_m-mass lands within eps of x_n = mu_n.
inline ExtremalityReport extremality_check(const CentralMeasure& measure,
                                           const InternalMetricSequence& seq,
                                           const std::vector<Rat>& epsilons,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  ExtremalityReport rep;
  const CotransitionKernel& lambda = *seq.kernel;
  for (auto [n, m] : pairs) {
    if (n >= m || m > measure.depth() || !seq.has_level(n))
      throw ValidationError("extremality_check: invalid level pair (" + std::to_string(n) + "," +
                            std::to_string(m) + ")");
    const LevelDistribution& x_n = measure.at(n);
    const LevelDistribution& mu_m = measure.at(m);
    const LevelMetric& rho = seq.at_level(n);

    // distance of each projected vertex delta from x_n, in both senses
    std::vector<Rat> tv_dist(mu_m.p.size(), Rat(0));
    std::vector<Rat> k_dist_exact(mu_m.p.size(), Rat(0));
    std::vector<double> k_dist_float(mu_m.p.size(), 0.0);
    for (std::size_t g = 0; g < mu_m.p.size(); ++g) {
      if (mu_m.p[g] == 0) continue;
      LevelDistribution proj = project_to(delta_distribution(lambda, m, g), lambda, n);
      Rat tv = 0;
      for (std::size_t j = 0; j < proj.p.size(); ++j) tv += abs(proj.p[j] - x_n.p[j]);
      tv_dist[g] = tv / 2;
      if (rho.exact()) {
        k_dist_exact[g] =
            kantorovich<Rat>(proj.p, x_n.p, rho.ground_exact()).value;
      } else {
        std::vector<double> pd(proj.p.size()), xd(x_n.p.size());
        for (std::size_t j = 0; j < proj.p.size(); ++j) pd[j] = to_double(proj.p[j]);
        for (std::size_t j = 0; j < x_n.p.size(); ++j) xd[j] = to_double(x_n.p[j]);
        k_dist_float[g] = kantorovich<double>(pd, xd, rho.ground_float()).value;
      }
    }

    for (const Rat& eps : epsilons) {
      ExtremalityRow row{n, m, eps, Rat(0), Rat(0)};
      for (std::size_t g = 0; g < mu_m.p.size(); ++g) {
        if (mu_m.p[g] == 0) continue;
        if (tv_dist[g] <= eps) row.mass_tv += mu_m.p[g];
        bool close = rho.exact() ? k_dist_exact[g] <= eps : k_dist_float[g] <= to_double(eps);
        if (close) row.mass_internal += mu_m.p[g];
      }
      rep.rows.push_back(std::move(row));
    }
  }

  // verdicts per (n, eps): the row with the largest m decides
  rep.consistent_with_extremality = true;
  rep.consistent_with_extremality_internal = true;
  for (const auto& row : rep.rows) {
    bool is_final = true;
    for (const auto& other : rep.rows)
      if (other.n == row.n && other.eps == row.eps && other.m > row.m) is_final = false;
    if (!is_final) continue;
    ExtremalityVerdict v{row.n, row.eps, row.mass_tv >= 1 - rep.threshold,
                         row.mass_internal >= 1 - rep.threshold};
    rep.consistent_with_extremality &= v.tv_trend_to_one;
    rep.consistent_with_extremality_internal &= v.internal_trend_to_one;
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

struct StandardnessPoint {
  std::size_t level;
  double distance;
  std::optional<Rat> exact_distance;
  std::size_t argmin_vertex;
};

struct StandardnessProfile {
  std::vector<StandardnessPoint> series;
  VertexSequence argmin_sequence;  // candidate regular sequence
  bool decreasing_evidence = false;  // last value below the first
  bool trend_to_zero = false;        // last value within 0.05 of zero
};

// rho_n(mu_n, Ex(Sigma_n)) per level, with the argmin vertices; the argmin
// sequence is the natural candidate regular sequence of the measure.
inline StandardnessProfile standardness_distance_profile(const CentralMeasure& measure,
                                                         const InternalMetricSequence& seq) {
  StandardnessProfile prof;
  prof.argmin_sequence.first_level = seq.first_level;
  const std::size_t last = std::min(measure.depth(), seq.last_level());
  for (std::size_t n = seq.first_level; n <= last; ++n) {
    NearestVertex nv = distance_to_vertices(measure.at(n), seq.at_level(n));
    prof.series.push_back({n, nv.distance, nv.exact_distance, nv.vertex});
    prof.argmin_sequence.vertices.push_back(nv.vertex);
  }
  if (!prof.series.empty()) {
    prof.decreasing_evidence = prof.series.back().distance < prof.series.front().distance;
    prof.trend_to_zero = prof.series.back().distance <= 0.05;
  }
  return prof;
}

struct ConcentrationRow {
  std::size_t level;
  Rat eps;
  Rat mass;  // mu_n of the internal eps-ball around the argmin vertex
};

struct ConcentrationProfile {
  std::vector<ConcentrationRow> rows;
  bool trend_to_one = false;  // for every eps, final mass within 0.05 of 1
};

inline ConcentrationProfile concentration_profile(const CentralMeasure& measure,
                                                  const InternalMetricSequence& seq,
                                                  const std::vector<Rat>& epsilons) {
  StandardnessProfile sp = standardness_distance_profile(measure, seq);
  ConcentrationProfile prof;
  prof.trend_to_one = true;
  for (const Rat& eps : epsilons) {
    Rat final_mass = 0;
    for (std::size_t k = 0; k < sp.series.size(); ++k) {
      const std::size_t n = sp.series[k].level;
      const std::size_t center = sp.series[k].argmin_vertex;
      const LevelMetric& rho = seq.at_level(n);
      const LevelDistribution& mu = measure.at(n);
      Rat mass = 0;
      for (std::size_t v = 0; v < mu.p.size(); ++v) {
        if (mu.p[v] == 0) continue;
        bool inside = rho.exact() ? rho.exact_at(center, v) <= eps
                                  : rho.at(center, v) <= to_double(eps);
        if (inside) mass += mu.p[v];
      }
      prof.rows.push_back({n, eps, mass});
      final_mass = mass;
    }
    prof.trend_to_one &= final_mass >= Rat(19, 20);
  }
  return prof;
}

enum class MartingaleComparand {
  PairwiseConditional,   // E rho-K(lambda(.|g), lambda(.|g')) over independent draws
  AgainstUnconditional,  // E rho-K(lambda(.|g), mu_n)
};

struct MartingaleRow {
  std::size_t level;  // n; conditioning happens at n+1
  double value;
  bool exact_summation;
};

struct MartingaleProfile {
  std::vector<MartingaleRow> rows;
  MartingaleComparand comparand;
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
  bool decreasing_evidence = false;
};

// Martingale-style diagnostic: how far apart the conditional distributions
// on level n sit, conditioning on the level-(n+1) vertex.
inline MartingaleProfile martingale_profile(const CentralMeasure& measure,
                                            const InternalMetricSequence& seq,
                                            MartingaleComparand comparand =
                                                MartingaleComparand::PairwiseConditional,
                                            std::size_t pair_sample_size = 2000,
                                            std::uint64_t seed = 12345,
                                            std::size_t exact_pair_limit = 20000) {
  MartingaleProfile prof;
  prof.comparand = comparand;
  prof.seed = seed;
  prof.sample_size = pair_sample_size;
  const CotransitionKernel& lambda = *seq.kernel;
  std::mt19937_64 rng(seed);

  const std::size_t last = std::min(measure.depth(), seq.last_level() + 1);
  for (std::size_t n = seq.first_level; n + 1 <= last; ++n) {
    if (!seq.has_level(n)) continue;
    const LevelMetric& rho = seq.at_level(n);
    const LevelDistribution& mu_next = measure.at(n + 1);
    GroundMetric<double> ground = rho.ground_float();

    std::vector<std::size_t> support;
    for (std::size_t v = 0; v < mu_next.p.size(); ++v)
      if (mu_next.p[v] != 0) support.push_back(v);

    auto cond = [&](std::size_t v) {
      std::vector<std::pair<std::size_t, double>> row;
      for (const auto& [u, w] : lambda.row(n + 1, v)) row.emplace_back(u, to_double(w));
      return row;
    };
    auto dist_pair = [&](std::size_t a, std::size_t b) {
      return detail::kantorovich_sparse<double>(
          cond(a), cond(b), [&](std::size_t i, std::size_t j) { return ground(i, j); });
    };
    auto dist_uncond = [&](std::size_t a) {
      std::vector<std::pair<std::size_t, double>> mu_row;
      for (std::size_t u = 0; u < measure.at(n).p.size(); ++u)
        if (measure.at(n).p[u] != 0) mu_row.emplace_back(u, to_double(measure.at(n).p[u]));
      return detail::kantorovich_sparse<double>(
          cond(a), mu_row, [&](std::size_t i, std::size_t j) { return ground(i, j); });
    };

    double value = 0;
    bool exact_sum = comparand == MartingaleComparand::AgainstUnconditional
                         ? support.size() <= exact_pair_limit
                         : support.size() * support.size() <= exact_pair_limit;
    if (exact_sum) {
      if (comparand == MartingaleComparand::PairwiseConditional) {
        for (std::size_t ia = 0; ia < support.size(); ++ia)
          for (std::size_t ib = ia + 1; ib < support.size(); ++ib) {
            double w = 2 * to_double(mu_next.p[support[ia]]) * to_double(mu_next.p[support[ib]]);
            value += w * dist_pair(support[ia], support[ib]);
          }
      } else {
        for (std::size_t v : support) value += to_double(mu_next.p[v]) * dist_uncond(v);
      }
    } else {
      // inverse-CDF sampling keeps the draw reproducible across platforms
      std::vector<double> cdf;
      double acc = 0;
      for (std::size_t v : support) {
        acc += to_double(mu_next.p[v]);
        cdf.push_back(acc);
      }
      auto draw = [&] {
        double u = std::uniform_real_distribution<double>(0.0, acc)(rng);
        std::size_t k = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        return support[std::min(k, support.size() - 1)];
      };
      for (std::size_t s = 0; s < pair_sample_size; ++s) {
        std::size_t a = draw();
        value += comparand == MartingaleComparand::PairwiseConditional ? dist_pair(a, draw())
                                                                       : dist_uncond(a);
      }
      value /= static_cast<double>(pair_sample_size);
    }
    prof.rows.push_back({n, value, exact_sum});
  }
  if (prof.rows.size() >= 2)
    prof.decreasing_evidence = prof.rows.back().value < prof.rows.front().value;
  return prof;
}

}  // namespace bratteli
