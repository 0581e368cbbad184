#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bratteli/internal_metric.hpp"

namespace bratteli {

enum class NetMethod {
  GreedyFarthest,   // farthest-point traversal from vertex 0; upper bound
  GreedySetCover,   // max-coverage greedy; usually tighter upper bound
  ExactMinimal,     // exhaustive; only for small levels
};

inline const char* to_string(NetMethod m) {
  switch (m) {
    case NetMethod::GreedyFarthest: return "greedy-farthest";
    case NetMethod::GreedySetCover: return "greedy-setcover";
    case NetMethod::ExactMinimal: return "exact";
  }
  return "?";
}

struct CoveringResult {
  std::size_t count = 0;
  std::vector<std::size_t> net;
  NetMethod method = NetMethod::GreedyFarthest;
};

// Size (and witness) of an epsilon-net of the level under closed balls of
// radius eps. Greedy methods give upper bounds on the covering number;
// ExactMinimal enumerates subsets and is limited to `exact_limit` vertices.
inline CoveringResult covering_number(const LevelMetric& rho, const Rat& eps,
                                      NetMethod method = NetMethod::GreedyFarthest,
                                      std::size_t exact_limit = 20) {
  if (eps <= 0) throw ValidationError("covering_number: epsilon must be positive");
  const std::size_t n = rho.size();
  const double eps_d = to_double(eps);
  auto covered = [&](std::size_t center, std::size_t v) {
    if (rho.exact()) return rho.exact_at(center, v) <= eps;
    return rho.at(center, v) <= eps_d;
  };

  CoveringResult res;
  res.method = method;
  if (n == 0) return res;

  if (method == NetMethod::GreedyFarthest) {
    std::vector<std::size_t> centers{0};
    std::vector<char> cov(n, 0);
    for (std::size_t v = 0; v < n; ++v) cov[v] = covered(0, v);
    while (true) {
      // farthest uncovered vertex from the current centers, lowest index on ties
      std::size_t best_v = n;
      double best_d = -1;
      for (std::size_t v = 0; v < n; ++v) {
        if (cov[v]) continue;
        double dmin = rho.at(v, centers[0]);
        for (std::size_t c : centers) dmin = std::min(dmin, rho.at(v, c));
        if (dmin > best_d) {
          best_d = dmin;
          best_v = v;
        }
      }
      if (best_v == n) break;  // everything covered
      centers.push_back(best_v);
      for (std::size_t v = 0; v < n; ++v) cov[v] |= covered(best_v, v);
    }
    res.net = std::move(centers);
    res.count = res.net.size();
    return res;
  }

  // ball membership lists, used by both remaining methods
  std::vector<std::vector<std::size_t>> ball(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t v = 0; v < n; ++v)
      if (covered(c, v)) ball[c].push_back(v);

  if (method == NetMethod::GreedySetCover) {
    std::vector<char> done(n, 0);
    std::size_t remaining = n;
    while (remaining > 0) {
      std::size_t best_c = 0, best_gain = 0;
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t gain = 0;
        for (std::size_t v : ball[c]) gain += !done[v];
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
        }
      }
      res.net.push_back(best_c);
      for (std::size_t v : ball[best_c])
        if (!done[v]) {
          done[v] = 1;
          --remaining;
        }
    }
    res.count = res.net.size();
    return res;
  }

  if (n > exact_limit)
    throw ResourceBoundError("covering_number: exact method limited to " +
                             std::to_string(exact_limit) + " vertices");
  std::vector<std::uint64_t> mask(n, 0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t v : ball[c]) mask[c] |= std::uint64_t(1) << v;
  const std::uint64_t full = n == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1;

  std::vector<std::size_t> chosen;
  auto dfs = [&](auto&& self, std::size_t start, std::uint64_t cov, std::size_t left) -> bool {
    if (cov == full) return true;
    if (left == 0) return false;
    for (std::size_t c = start; c < n; ++c) {
      if ((mask[c] | cov) == cov) continue;
      chosen.push_back(c);
      if (self(self, c + 1, cov | mask[c], left - 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  for (std::size_t k = 1; k <= n; ++k) {
    chosen.clear();
    if (dfs(dfs, 0, 0, k)) {
      res.net = chosen;
      res.count = k;
      return res;
    }
  }
  throw std::logic_error("covering_number: no cover found");  // unreachable
}

struct CoveringRow {
  Rat eps;
  std::size_t level;
  std::size_t n_cover;
  NetMethod method;
};

struct EpsilonVerdict {
  Rat eps;
  // finite-horizon heuristic, not a proof: the max over the computed levels
  // is already attained before the last third begins, so the tail shows no
  // growth; tail_min/tail_max bracket the values seen there
  bool uniformly_bounded_within_horizon = false;
  bool stable_tail = false;  // the tail is literally constant
  std::size_t tail_min = 0, tail_max = 0;
};

struct CoveringReport {
  std::vector<CoveringRow> rows;
  std::vector<EpsilonVerdict> verdicts;
  std::size_t first_level = 0, last_level = 0;  // the computed horizon
  NetMethod method = NetMethod::GreedyFarthest;
};

inline CoveringReport compactness_profile(const InternalMetricSequence& seq,
                                          const std::vector<Rat>& epsilons,
                                          NetMethod method = NetMethod::GreedyFarthest) {
  CoveringReport rep;
  rep.first_level = seq.first_level;
  rep.last_level = seq.last_level();
  rep.method = method;
  for (const Rat& eps : epsilons) {
    std::vector<std::size_t> ns;
    for (const LevelMetric& lm : seq.levels) {
      auto cov = covering_number(lm, eps, method);
      rep.rows.push_back({eps, lm.level(), cov.count, method});
      ns.push_back(cov.count);
    }
    EpsilonVerdict v;
    v.eps = eps;
    const std::size_t L = ns.size();
    const std::size_t tail_start = L - std::max<std::size_t>(1, L / 3);
    v.tail_min = v.tail_max = ns[tail_start];
    for (std::size_t i = tail_start; i < L; ++i) {
      v.tail_min = std::min(v.tail_min, ns[i]);
      v.tail_max = std::max(v.tail_max, ns[i]);
    }
    v.stable_tail = v.tail_min == v.tail_max;
    const std::size_t max_n = *std::max_element(ns.begin(), ns.end());
    const std::size_t first_max = std::find(ns.begin(), ns.end(), max_n) - ns.begin();
    v.uniformly_bounded_within_horizon = first_max < tail_start || L == 1;
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

struct WidthRow {
  std::size_t level;
  std::size_t width;
  double max_distance;
};

struct WidthReport {
  std::vector<WidthRow> rows;
  std::size_t max_width = 0;
  double initial_diameter = 0;
  double final_max_distance = 0;
  double decay_ratio = 0;       // final / initial diameter
  bool distances_decay = false; // trend diagnostic: final within 5% of zero
};

// Trend diagnostic: on bounded-width graphs the pairwise internal
// distances should shrink toward zero along the levels.
inline WidthReport bounded_width_check(const GradedGraph& graph,
                                       const InternalMetricSequence& seq) {
  WidthReport rep;
  for (const LevelMetric& lm : seq.levels) {
    WidthRow row{lm.level(), graph.level_size(lm.level()), lm.max_entry()};
    rep.max_width = std::max(rep.max_width, row.width);
    rep.rows.push_back(row);
  }
  rep.initial_diameter = rep.rows.front().max_distance;
  rep.final_max_distance = rep.rows.back().max_distance;
  rep.decay_ratio =
      rep.initial_diameter > 0 ? rep.final_max_distance / rep.initial_diameter : 0.0;
  rep.distances_decay = rep.initial_diameter == 0 || rep.decay_ratio <= 0.05;
  return rep;
}

// One vertex per level over a contiguous range.
struct VertexSequence {
  std::size_t first_level = 1;
  std::vector<std::size_t> vertices;

  std::size_t length() const { return vertices.size(); }
  std::size_t level_at(std::size_t k) const { return first_level + k; }
};

struct CauchyCandidateReport {
  // modulus[M] = sup over m, m' >= first_level + M of the chain distance
  std::vector<double> modulus;
  bool cauchy_at_horizon = false;
};

struct CauchyClassReport {
  double delta = 0;
  std::vector<CauchyCandidateReport> candidates;
  std::vector<std::vector<double>> tail_distance;  // pairwise, last-third max
  std::vector<std::size_t> cluster;                // cluster id per candidate
  std::size_t n_clusters = 0;
};

namespace detail {

// Double-precision snapshot of the sequence, so the chain sweeps below do
// not convert rationals inside their inner loops.
struct DenseSeq {
  std::size_t first_level;
  std::vector<std::size_t> sizes;                 // per level
  std::vector<std::vector<double>> metric;        // dense, row-major
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> rows;  // cotransitions

  explicit DenseSeq(const InternalMetricSequence& seq) : first_level(seq.first_level) {
    const CotransitionKernel& k = *seq.kernel;
    for (std::size_t n = seq.first_level; n <= seq.last_level(); ++n) {
      const LevelMetric& lm = seq.at_level(n);
      sizes.push_back(lm.size());
      std::vector<double> d(lm.size() * lm.size());
      for (std::size_t i = 0; i < lm.size(); ++i)
        for (std::size_t j = 0; j < lm.size(); ++j) d[i * lm.size() + j] = lm.at(i, j);
      metric.push_back(std::move(d));
      if (n > seq.first_level) {
        std::vector<std::vector<std::pair<std::size_t, double>>> lvl(k.level_size(n));
        for (std::size_t v = 0; v < k.level_size(n); ++v)
          for (const auto& [u, w] : k.row(n, v)) lvl[v].emplace_back(u, to_double(w));
        rows.push_back(std::move(lvl));
      }
    }
  }

  double dist(std::size_t level, std::size_t i, std::size_t j) const {
    std::size_t k = level - first_level;
    return metric[k][i * sizes[k] + j];
  }
};

// Projects the delta of (level, vertex) downward through the cocycle and
// returns the dense distribution at every level of [first_level, level].
// The regular-sequence distance d(e at n, f at m) is the transport cost
// between delta_e and this projection under rho_n; unlike chain sums it
// does not accumulate the per-step transport costs, so Cauchy moduli of
// concentrating sequences actually shrink.
inline std::vector<std::vector<double>> projection_sweep(const DenseSeq& ds, std::size_t level,
                                                         std::size_t vertex) {
  const std::size_t top = level - ds.first_level;
  std::vector<std::vector<double>> proj(top + 1);
  proj[top].assign(ds.sizes[top], 0.0);
  proj[top][vertex] = 1.0;
  for (std::size_t k = top; k > 0; --k) {
    proj[k - 1].assign(ds.sizes[k - 1], 0.0);
    const auto& rows = ds.rows[k - 1];  // cotransitions of level first+k
    for (std::size_t v = 0; v < proj[k].size(); ++v) {
      if (proj[k][v] == 0.0) continue;
      for (const auto& [u, w] : rows[v]) proj[k - 1][u] += proj[k][v] * w;
    }
  }
  return proj;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(std::size_t a, std::size_t b) { parent[find(b)] = find(a); }
};

}  // namespace detail

// Verifies the Cauchy modulus of each candidate sequence and single-links
// candidates whose mutual tail distances fall below delta. Each resulting
// cluster is a finite-horizon stand-in for one boundary point.
inline CauchyClassReport cauchy_classes(const InternalMetricSequence& seq,
                                        const std::vector<VertexSequence>& candidates,
                                        double delta) {
  if (candidates.empty()) throw ValidationError("cauchy_classes: no candidates");
  const std::size_t L = candidates.front().length();
  const std::size_t first = candidates.front().first_level;
  for (const auto& c : candidates)
    if (c.length() != L || c.first_level != first)
      throw ValidationError("cauchy_classes: candidates span mismatched ranges");
  if (L == 0 || !seq.has_level(first) || !seq.has_level(first + L - 1))
    throw ValidationError("cauchy_classes: range outside metric sequence");

  CauchyClassReport rep;
  rep.delta = delta;
  const std::size_t last = first + L - 1;
  const std::size_t tail_start = L - std::max<std::size_t>(1, L / 3);
  detail::DenseSeq ds(seq);

  for (const auto& cand : candidates) {
    // pairwise distances D(a, b), a < b: project the upper vertex down and
    // integrate the lower vertex's metric row, one sweep per upper point
    std::vector<std::vector<double>> d(L, std::vector<double>(L, 0.0));
    for (std::size_t b = 1; b < L; ++b) {
      auto proj = detail::projection_sweep(ds, first + b, cand.vertices[b]);
      for (std::size_t a = 0; a < b; ++a) {
        const auto& q = proj[a];
        const std::size_t stride = ds.sizes[a];
        const auto& dmat = ds.metric[a];
        double sum = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j)
          if (q[j] != 0.0) sum += q[j] * dmat[cand.vertices[a] * stride + j];
        d[a][b] = sum;
      }
    }
    CauchyCandidateReport cr;
    cr.modulus.assign(L, 0.0);
    for (std::size_t m = L; m-- > 0;) {
      double v = m + 1 < L ? cr.modulus[m + 1] : 0.0;
      for (std::size_t b = m + 1; b < L; ++b) v = std::max(v, d[m][b]);
      cr.modulus[m] = v;
    }
    cr.cauchy_at_horizon = cr.modulus[tail_start] <= delta;
    rep.candidates.push_back(std::move(cr));
  }

  const std::size_t nc = candidates.size();
  rep.tail_distance.assign(nc, std::vector<double>(nc, 0.0));
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = a + 1; b < nc; ++b) {
      double t = 0;
      for (std::size_t k = tail_start; k < L; ++k) {
        const LevelMetric& rho = seq.at_level(first + k);
        t = std::max(t, rho.at(candidates[a].vertices[k], candidates[b].vertices[k]));
      }
      rep.tail_distance[a][b] = rep.tail_distance[b][a] = t;
    }

  detail::UnionFind uf(nc);
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = a + 1; b < nc; ++b)
      if (rep.tail_distance[a][b] <= delta) uf.unite(a, b);
  rep.cluster.assign(nc, 0);
  std::vector<std::size_t> label(nc, SIZE_MAX);
  for (std::size_t a = 0; a < nc; ++a) {
    std::size_t root = uf.find(a);
    if (label[root] == SIZE_MAX) label[root] = rep.n_clusters++;
    rep.cluster[a] = label[root];
  }
  return rep;
}

}  // namespace bratteli
