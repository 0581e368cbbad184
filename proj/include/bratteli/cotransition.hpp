#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bratteli/graded_graph.hpp"

namespace bratteli {

// Backward transition probabilities: for every vertex v of level n >= 1,
// a sparse probability vector over its predecessors at level n-1.
class CotransitionKernel {
 public:
  using Row = std::vector<std::pair<std::size_t, Rat>>;  // (pred index, weight)

  CotransitionKernel(std::vector<std::size_t> level_sizes,
                     std::vector<std::vector<Row>> rows)
      : level_sizes_(std::move(level_sizes)), rows_(std::move(rows)) {}

  std::size_t depth() const { return rows_.size(); }
  std::size_t level_size(std::size_t n) const { return level_sizes_.at(n); }

  // Cotransition row of vertex v at level n (n >= 1).
  const Row& row(std::size_t n, std::size_t v) const { return rows_.at(n - 1).at(v); }

  // lambda(u | v) with dense lookup; zero off the support.
  Rat lambda(std::size_t n, std::size_t u, std::size_t v) const {
    for (const auto& [p, w] : row(n, v))
      if (p == u) return w;
    return Rat(0);
  }

 private:
  std::vector<std::size_t> level_sizes_;       // sizes of levels 0..depth
  std::vector<std::vector<Row>> rows_;         // rows_[n-1][v]
};

// Central cocycle: lambda(u|v) = m(u,v) * dim(u) / dim(v). If `user_cocycle`
// is given it is validated against the graph (support must match the
// adjacency, each row must sum to exactly 1) and returned unchanged; this is
// the hook for quasi-invariant (non-central) measures.
inline CotransitionKernel cotransitions(const GradedGraph& g, const DimTable& dt,
                                        std::optional<CotransitionKernel> user_cocycle = {}) {
  if (dt.depth() < g.depth())
    throw ValidationError("cotransitions: dim table shallower than graph");
  std::vector<std::size_t> sizes;
  for (std::size_t n = 0; n <= g.depth(); ++n) sizes.push_back(g.level_size(n));

  if (user_cocycle) {
    const CotransitionKernel& k = *user_cocycle;
    if (k.depth() != g.depth()) throw ValidationError("cotransition override: wrong depth");
    for (std::size_t n = 1; n <= g.depth(); ++n) {
      if (k.level_size(n) != g.level_size(n))
        throw ValidationError("cotransition override: wrong level size at level " +
                              std::to_string(n));
      for (std::size_t v = 0; v < g.level_size(n); ++v) {
        Rat sum = 0;
        std::vector<bool> seen(g.level_size(n - 1), false);
        for (const auto& [u, w] : k.row(n, v)) {
          if (u >= g.level_size(n - 1) || seen[u])
            throw ValidationError("cotransition override: bad predecessor index at level " +
                                  std::to_string(n));
          seen[u] = true;
          if (w <= 0 || g.mult(n, u, v) == 0)
            throw ValidationError("cotransition override: support mismatch on edge (" +
                                  std::to_string(u) + " -> " + std::to_string(v) + ") at level " +
                                  std::to_string(n));
          sum += w;
        }
        for (const auto& [u, m] : g.predecessors(n, v))
          if (!seen[u])
            throw ValidationError("cotransition override: missing edge (" + std::to_string(u) +
                                  " -> " + std::to_string(v) + ") at level " + std::to_string(n));
        if (sum != 1)
          throw ValidationError("cotransition override: row of vertex " + std::to_string(v) +
                                " at level " + std::to_string(n) + " sums to " +
                                format_fraction(sum) + ", not 1");
      }
    }
    return k;
  }

  std::vector<std::vector<CotransitionKernel::Row>> rows(g.depth());
  for (std::size_t n = 1; n <= g.depth(); ++n) {
    rows[n - 1].resize(g.level_size(n));
    for (std::size_t v = 0; v < g.level_size(n); ++v) {
      const Int& dv = dt.at(n, v);
      if (dv == 0) throw ValidationError("cotransitions: vertex with dim 0 (zero column?)");
      for (const auto& [u, m] : g.predecessors(n, v))
        rows[n - 1][v].emplace_back(u, Rat(Int(m) * dt.at(n - 1, u), dv));
    }
  }
  return CotransitionKernel(std::move(sizes), std::move(rows));
}

// An exact probability vector on the vertices of one level.
struct LevelDistribution {
  std::size_t level = 0;
  std::vector<Rat> p;

  Rat sum() const {
    Rat s = 0;
    for (const Rat& x : p) s += x;
    return s;
  }
  bool is_probability() const {
    for (const Rat& x : p)
      if (x < 0) return false;
    return sum() == 1;
  }
};

// One application of the projection p_{n,n-1}: the image of `dist` under
// the convex-combination map sending each vertex to its cotransition row.
inline LevelDistribution project(const LevelDistribution& dist, const CotransitionKernel& k) {
  if (dist.level == 0) throw ValidationError("project: level 0 has no predecessor level");
  if (dist.level > k.depth() || dist.p.size() != k.level_size(dist.level))
    throw ValidationError("project: distribution does not match kernel levels");
  LevelDistribution out;
  out.level = dist.level - 1;
  out.p.assign(k.level_size(dist.level - 1), Rat(0));
  for (std::size_t v = 0; v < dist.p.size(); ++v) {
    if (dist.p[v] == 0) continue;
    for (const auto& [u, w] : k.row(dist.level, v)) out.p[u] += dist.p[v] * w;
  }
  return out;
}

inline LevelDistribution delta_distribution(const CotransitionKernel& k, std::size_t level,
                                            std::size_t v) {
  LevelDistribution d;
  d.level = level;
  d.p.assign(k.level_size(level), Rat(0));
  d.p.at(v) = 1;
  return d;
}

// p_{n,m} = product of the one-step projections, m < n.
inline LevelDistribution project_to(LevelDistribution dist, const CotransitionKernel& k,
                                    std::size_t target_level) {
  if (target_level > dist.level) throw ValidationError("project_to: target above source level");
  while (dist.level > target_level) dist = project(dist, k);
  return dist;
}

}  // namespace bratteli
