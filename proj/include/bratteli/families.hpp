#pragma once

#include <map>
#include <string>
#include <vector>

#include "bratteli/central_measure.hpp"
#include "bratteli/graded_graph.hpp"

namespace bratteli::families {

// Compositions of n into d nonnegative parts, lexicographically descending
// in the first coordinate. Shared by pascal() and the Bernoulli measures.
inline std::vector<std::vector<int>> pascal_compositions(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(d, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int k = left; k >= 0; --k) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, n);
  return out;
}

inline std::string tuple_label(const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

// Pascal graph of dimension d: the lattice of d-part compositions graded by
// the coordinate sum, one edge per coordinate increment.
inline GradedGraph pascal(int d, int depth) {
  if (d < 2 || depth < 1) throw ValidationError("pascal: need d >= 2, depth >= 1");
  std::vector<std::vector<std::string>> labels;
  std::vector<AdjacencyMatrix> adj;
  std::vector<std::vector<int>> prev = pascal_compositions(d, 0);
  labels.push_back({tuple_label(prev[0])});
  for (int n = 1; n <= depth; ++n) {
    auto cur = pascal_compositions(d, n);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < cur.size(); ++i) index[cur[i]] = i;
    AdjacencyMatrix m(prev.size(), cur.size());
    for (std::size_t u = 0; u < prev.size(); ++u)
      for (int c = 0; c < d; ++c) {
        auto t = prev[u];
        ++t[c];
        m.at(u, index.at(t)) = 1;
      }
    std::vector<std::string> ls;
    for (const auto& t : cur) ls.push_back(tuple_label(t));
    labels.push_back(std::move(ls));
    adj.push_back(std::move(m));
    prev = std::move(cur);
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

// Integer partitions of n, descending parts, enumerated in descending
// lexicographic order ([4] before [3,1] before [2,2] ...).
inline std::vector<std::vector<int>> partitions_of(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left, int maxpart) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = std::min(left, maxpart); k >= 1; --k) {
      cur.push_back(k);
      self(self, left - k, k);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

inline std::string partition_label(const std::vector<int>& p) {
  if (p.empty()) return "[]";
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + "]";
}

// The Young graph: partitions graded by size, an edge when one box is added.
inline GradedGraph young(int depth) {
  if (depth < 1) throw ValidationError("young: need depth >= 1");
  std::vector<std::vector<std::string>> labels;
  std::vector<AdjacencyMatrix> adj;
  std::vector<std::vector<int>> prev = partitions_of(0);
  labels.push_back({partition_label(prev[0])});
  for (int n = 1; n <= depth; ++n) {
    auto cur = partitions_of(n);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < cur.size(); ++i) index[cur[i]] = i;
    AdjacencyMatrix m(prev.size(), cur.size());
    for (std::size_t u = 0; u < prev.size(); ++u) {
      const auto& p = prev[u];
      for (std::size_t row = 0; row <= p.size(); ++row) {
        // add one box to row `row` when the result is still a partition
        std::vector<int> q = p;
        if (row == p.size()) {
          q.push_back(1);
        } else {
          if (row > 0 && p[row] + 1 > p[row - 1]) continue;
          ++q[row];
        }
        m.at(u, index.at(q)) = 1;
      }
    }
    std::vector<std::string> ls;
    for (const auto& p : cur) ls.push_back(partition_label(p));
    labels.push_back(std::move(ls));
    adj.push_back(std::move(m));
    prev = std::move(cur);
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

// Graph of unordered pairs: level n+1 consists of the pairs of level-n
// vertices ({a,a} allowed only with include_equal, entering with edge
// multiplicity 2). Level sizes explode; level_size_bound guards the blowup.
inline GradedGraph unordered_pairs(int seed_size, int depth, bool include_equal = false,
                                   std::size_t level_size_bound = 20000) {
  if (seed_size < 2 || depth < 1)
    throw ValidationError("unordered_pairs: need seed >= 2, depth >= 1");
  std::vector<std::vector<std::string>> labels{{"*"}};
  std::vector<AdjacencyMatrix> adj;

  std::vector<std::string> level1;
  for (int i = 0; i < seed_size; ++i) level1.push_back("p" + std::to_string(i));
  AdjacencyMatrix m1(1, seed_size);
  for (int i = 0; i < seed_size; ++i) m1.at(0, i) = 1;
  labels.push_back(level1);
  adj.push_back(std::move(m1));

  std::size_t prev_size = seed_size;
  for (int n = 2; n <= depth; ++n) {
    std::size_t next_size = include_equal ? prev_size * (prev_size + 1) / 2
                                          : prev_size * (prev_size - 1) / 2;
    if (next_size > level_size_bound)
      throw ResourceBoundError("unordered_pairs: level " + std::to_string(n) + " would have " +
                               std::to_string(next_size) + " vertices (bound " +
                               std::to_string(level_size_bound) + ")");
    if (next_size == 0)
      throw ValidationError("unordered_pairs: level collapses; use include_equal");
    AdjacencyMatrix m(prev_size, next_size);
    std::vector<std::string> ls;
    std::size_t idx = 0;
    for (std::size_t a = 0; a < prev_size; ++a)
      for (std::size_t b = include_equal ? a : a + 1; b < prev_size; ++b) {
        if (a == b) {
          m.at(a, idx) = 2;
        } else {
          m.at(a, idx) = 1;
          m.at(b, idx) = 1;
        }
        ls.push_back("{" + labels.back()[a] + "," + labels.back()[b] + "}");
        ++idx;
      }
    labels.push_back(std::move(ls));
    adj.push_back(std::move(m));
    prev_size = next_size;
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

// One vertex per level, single edges: the trivial fixture.
inline GradedGraph chain(int depth) {
  if (depth < 1) throw ValidationError("chain: need depth >= 1");
  std::vector<std::vector<std::string>> labels;
  std::vector<AdjacencyMatrix> adj;
  for (int n = 0; n <= depth; ++n) labels.push_back({"c" + std::to_string(n)});
  for (int n = 1; n <= depth; ++n) {
    AdjacencyMatrix m(1, 1);
    m.at(0, 0) = 1;
    adj.push_back(std::move(m));
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

// Stationary graph: every level carries the same vertex set, with the given
// square multiplicity matrix repeated; the root joins every level-1 vertex.
inline GradedGraph stationary(const std::vector<std::vector<std::int64_t>>& kernel, int depth) {
  const std::size_t w = kernel.size();
  if (w == 0 || depth < 1) throw ValidationError("stationary: need a matrix and depth >= 1");
  for (const auto& row : kernel)
    if (row.size() != w) throw ValidationError("stationary: matrix must be square");
  for (std::size_t i = 0; i < w; ++i) {
    bool row_ok = false, col_ok = false;
    for (std::size_t j = 0; j < w; ++j) {
      row_ok |= kernel[i][j] != 0;
      col_ok |= kernel[j][i] != 0;
      if (kernel[i][j] < 0) throw ValidationError("stationary: negative multiplicity");
    }
    if (!row_ok || !col_ok) throw ValidationError("stationary: matrix has a zero row or column");
  }

  std::vector<std::vector<std::string>> labels{{"*"}};
  std::vector<AdjacencyMatrix> adj;
  std::vector<std::string> lvl;
  for (std::size_t i = 0; i < w; ++i) lvl.push_back("s" + std::to_string(i));
  AdjacencyMatrix m1(1, w);
  for (std::size_t i = 0; i < w; ++i) m1.at(0, i) = 1;
  labels.push_back(lvl);
  adj.push_back(std::move(m1));
  for (int n = 2; n <= depth; ++n) {
    AdjacencyMatrix m(w, w);
    for (std::size_t i = 0; i < w; ++i)
      for (std::size_t j = 0; j < w; ++j) m.at(i, j) = kernel[i][j];
    labels.push_back(lvl);
    adj.push_back(std::move(m));
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

// Product measure on pascal(d): every step increments coordinate i with
// probability probs[i]. For d = 2 this is the Bernoulli(p) family.
inline CentralMeasure pascal_bernoulli(const GradedGraph& g, int d,
                                       const CotransitionKernel& lambda,
                                       const std::vector<Rat>& probs) {
  if (static_cast<int>(probs.size()) != d)
    throw ValidationError("pascal_bernoulli: need one probability per coordinate");
  Rat sum = 0;
  for (const Rat& p : probs) {
    if (p < 0) throw ValidationError("pascal_bernoulli: negative probability");
    sum += p;
  }
  if (sum != 1) throw ValidationError("pascal_bernoulli: probabilities must sum to 1");

  ForwardKernel fwd;
  fwd.rows.resize(g.depth());
  for (std::size_t n = 0; n < g.depth(); ++n) {
    auto cur = pascal_compositions(d, static_cast<int>(n));
    auto nxt = pascal_compositions(d, static_cast<int>(n) + 1);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < nxt.size(); ++i) index[nxt[i]] = i;
    fwd.rows[n].resize(cur.size());
    for (std::size_t u = 0; u < cur.size(); ++u)
      for (int c = 0; c < d; ++c) {
        if (probs[c] == 0) continue;
        auto t = cur[u];
        ++t[c];
        fwd.rows[n][u].emplace_back(index.at(t), probs[c]);
      }
  }
  return from_forward_kernel(g, lambda, std::move(fwd));
}

}  // namespace bratteli::families
