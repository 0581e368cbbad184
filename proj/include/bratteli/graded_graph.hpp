#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/errors.hpp"
#include "bratteli/rational.hpp"

namespace bratteli {

// Integer matrix of edge multiplicities between two consecutive levels.
// Rows index the lower level (n-1), columns the upper level (n).
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  AdjacencyMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), m_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::int64_t operator()(std::size_t r, std::size_t c) const { return m_[r * cols_ + c]; }
  std::int64_t& at(std::size_t r, std::size_t c) { return m_[r * cols_ + c]; }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::int64_t> m_;
};

// A finite truncation of a graded graph (Bratteli diagram): one root at
// level 0 and multiplicity matrices M_1, ..., M_N between consecutive
// levels. Immutable after construction; safe to share across threads.
class GradedGraph {
 public:
  GradedGraph(std::vector<std::vector<std::string>> labels,
              std::vector<AdjacencyMatrix> adjacency)
      : labels_(std::move(labels)), adjacency_(std::move(adjacency)) {
    if (labels_.empty()) throw ValidationError("graph needs at least level 0");
    if (adjacency_.size() + 1 != labels_.size())
      throw ValidationError("graph needs one adjacency matrix per level transition");
    for (std::size_t n = 0; n < adjacency_.size(); ++n) {
      if (adjacency_[n].rows() != labels_[n].size() || adjacency_[n].cols() != labels_[n + 1].size())
        throw ValidationError("adjacency matrix M_" + std::to_string(n + 1) + " has wrong shape");
    }
    build_neighbor_lists();
  }

  // Highest level index N (levels are 0..N).
  std::size_t depth() const { return labels_.size() - 1; }
  std::size_t level_size(std::size_t n) const { return labels_.at(n).size(); }
  const std::string& label(std::size_t n, std::size_t v) const { return labels_.at(n).at(v); }
  const std::vector<std::vector<std::string>>& labels() const { return labels_; }

  // M_n, the matrix between levels n-1 and n (n >= 1).
  const AdjacencyMatrix& matrix(std::size_t n) const { return adjacency_.at(n - 1); }
  const std::vector<AdjacencyMatrix>& matrices() const { return adjacency_; }

  // Multiplicity of the edge u(level n-1) -> v(level n).
  std::int64_t mult(std::size_t n, std::size_t u, std::size_t v) const {
    return matrix(n)(u, v);
  }

  // (index, multiplicity) pairs, ascending by index.
  const std::vector<std::pair<std::size_t, std::int64_t>>& predecessors(std::size_t n,
                                                                        std::size_t v) const {
    return preds_.at(n - 1).at(v);
  }
  const std::vector<std::pair<std::size_t, std::int64_t>>& successors(std::size_t n,
                                                                      std::size_t u) const {
    return succs_.at(n).at(u);
  }

 private:
  void build_neighbor_lists() {
    preds_.resize(adjacency_.size());
    succs_.resize(adjacency_.size());
    for (std::size_t k = 0; k < adjacency_.size(); ++k) {
      const auto& m = adjacency_[k];
      preds_[k].resize(m.cols());
      succs_[k].resize(m.rows());
      for (std::size_t u = 0; u < m.rows(); ++u)
        for (std::size_t v = 0; v < m.cols(); ++v)
          if (m(u, v) != 0) {
            preds_[k][v].emplace_back(u, m(u, v));
            succs_[k][u].emplace_back(v, m(u, v));
          }
    }
  }

  std::vector<std::vector<std::string>> labels_;
  std::vector<AdjacencyMatrix> adjacency_;
  std::vector<std::vector<std::vector<std::pair<std::size_t, std::int64_t>>>> preds_, succs_;
};

struct Violation {
  enum class Kind { RootNotSingleton, ZeroRow, ZeroColumn, NegativeMultiplicity, IdenticalColumns };
  Kind kind;
  std::size_t level;  // index n of the matrix M_n involved (0 = level structure)
  std::string message;
};

// validate() is diagnostic: hard invariant failures land in `violations`,
// the identical-predecessor-column condition only in `warnings`.
struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  // We check columns of M_n: column v lists the predecessor multiplicities
  // of vertex v, so "two vertices with the same set of predecessors" means
  // two identical columns in this layout.
  std::string orientation = "identical-predecessor check ran on columns of M_n";

  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const GradedGraph& g) {
  ValidationReport rep;
  if (g.level_size(0) != 1)
    rep.violations.push_back({Violation::Kind::RootNotSingleton, 0,
                              "level 0 must contain exactly the root vertex"});
  for (std::size_t n = 1; n <= g.depth(); ++n) {
    const auto& m = g.matrix(n);
    for (std::size_t u = 0; u < m.rows(); ++u)
      for (std::size_t v = 0; v < m.cols(); ++v)
        if (m(u, v) < 0)
          rep.violations.push_back({Violation::Kind::NegativeMultiplicity, n,
                                    "M_" + std::to_string(n) + "(" + std::to_string(u) + "," +
                                        std::to_string(v) + ") is negative"});
    for (std::size_t u = 0; u < m.rows(); ++u) {
      bool any = false;
      for (std::size_t v = 0; v < m.cols(); ++v) any |= m(u, v) != 0;
      if (!any)
        rep.violations.push_back({Violation::Kind::ZeroRow, n,
                                  "row " + std::to_string(u) + " of M_" + std::to_string(n) +
                                      " is zero (vertex has no successors)"});
    }
    for (std::size_t v = 0; v < m.cols(); ++v) {
      bool any = false;
      for (std::size_t u = 0; u < m.rows(); ++u) any |= m(u, v) != 0;
      if (!any)
        rep.violations.push_back({Violation::Kind::ZeroColumn, n,
                                  "column " + std::to_string(v) + " of M_" + std::to_string(n) +
                                      " is zero (vertex has no predecessors)"});
    }
    // Level 1 is exempt: every vertex there descends from the single root,
    // and the metric iteration starts at level 1 anyway.
    if (n >= 2)
      for (std::size_t v = 0; v < m.cols(); ++v)
        for (std::size_t w = v + 1; w < m.cols(); ++w) {
          bool same = true;
          for (std::size_t u = 0; u < m.rows() && same; ++u) same = m(u, v) == m(u, w);
          if (same)
            rep.warnings.push_back({Violation::Kind::IdenticalColumns, n,
                                    "vertices " + std::to_string(v) + " and " + std::to_string(w) +
                                        " of level " + std::to_string(n) +
                                        " have identical predecessor columns in M_" +
                                        std::to_string(n)});
        }
  }
  return rep;
}

// dim(v) = number of multiplicity-weighted paths from the root, per level.
struct DimTable {
  std::vector<std::vector<Int>> dims;  // dims[n][v]

  const Int& at(std::size_t n, std::size_t v) const { return dims.at(n).at(v); }
  std::size_t depth() const { return dims.size() - 1; }
  Int level_total(std::size_t n) const {
    Int s = 0;
    for (const Int& d : dims.at(n)) s += d;
    return s;
  }
};

inline DimTable dims(const GradedGraph& g, std::size_t up_to_level) {
  if (up_to_level > g.depth()) throw std::out_of_range("dims: level beyond graph depth");
  DimTable t;
  t.dims.resize(up_to_level + 1);
  t.dims[0].assign(g.level_size(0), 1);
  for (std::size_t n = 1; n <= up_to_level; ++n) {
    t.dims[n].assign(g.level_size(n), 0);
    for (std::size_t v = 0; v < g.level_size(n); ++v)
      for (const auto& [u, m] : g.predecessors(n, v)) t.dims[n][v] += Int(m) * t.dims[n - 1][u];
  }
  return t;
}

// Drops the levels not listed in `kept_levels`; the new multiplicities are
// the integer matrix products over the omitted levels, so path counts of
// kept vertices are preserved.
inline GradedGraph rarefy(const GradedGraph& g, const std::vector<std::size_t>& kept_levels) {
  if (kept_levels.empty()) throw ValidationError("rarefy: empty level list");
  if (kept_levels.front() != 0) throw ValidationError("rarefy: kept levels must contain 0");
  if (!std::is_sorted(kept_levels.begin(), kept_levels.end()) ||
      std::adjacent_find(kept_levels.begin(), kept_levels.end()) != kept_levels.end())
    throw ValidationError("rarefy: kept levels must be strictly increasing");
  if (kept_levels.back() > g.depth()) throw ValidationError("rarefy: kept level beyond depth");

  std::vector<std::vector<std::string>> labels;
  for (std::size_t n : kept_levels) labels.push_back(g.labels()[n]);

  std::vector<AdjacencyMatrix> adj;
  for (std::size_t k = 0; k + 1 < kept_levels.size(); ++k) {
    std::size_t lo = kept_levels[k], hi = kept_levels[k + 1];
    // product M_{lo+1} * ... * M_{hi} in arbitrary precision, then narrowed
    std::vector<std::vector<Int>> prod(g.level_size(lo), std::vector<Int>(g.level_size(lo + 1), 0));
    for (std::size_t u = 0; u < g.level_size(lo); ++u)
      for (std::size_t v = 0; v < g.level_size(lo + 1); ++v) prod[u][v] = g.mult(lo + 1, u, v);
    for (std::size_t n = lo + 2; n <= hi; ++n) {
      std::vector<std::vector<Int>> next(g.level_size(lo), std::vector<Int>(g.level_size(n), 0));
      for (std::size_t u = 0; u < g.level_size(lo); ++u)
        for (std::size_t w = 0; w < g.level_size(n); ++w)
          for (const auto& [mid, m] : g.predecessors(n, w)) next[u][w] += prod[u][mid] * m;
      prod = std::move(next);
    }
    AdjacencyMatrix m(g.level_size(lo), g.level_size(hi));
    for (std::size_t u = 0; u < g.level_size(lo); ++u)
      for (std::size_t v = 0; v < g.level_size(hi); ++v) {
        if (prod[u][v] > std::numeric_limits<std::int64_t>::max())
          throw ResourceBoundError("rarefy: composed multiplicity exceeds 64-bit range");
        m.at(u, v) = prod[u][v].template convert_to<std::int64_t>();
      }
    adj.push_back(std::move(m));
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

}  // namespace bratteli
