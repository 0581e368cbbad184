#pragma once

// Shared oracles and generators for the test suites. The oracles here are
// deliberately independent of the library's computation routes: path counts
// walk the graph top-down edge by edge, tableaux are counted by checking
// raw fillings, and transport optima come from brute_force_oracle or closed
// forms, never from the solver under test.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "bratteli/bratteli.hpp"

namespace testsupport {

using namespace bratteli;

// Multiplicity-weighted root-to-target path count by exhaustive walk.
inline Int count_paths_walk(const GradedGraph& g, std::size_t target_level, std::size_t target) {
  auto rec = [&](auto&& self, std::size_t level, std::size_t v) -> Int {
    if (level == target_level) return v == target ? 1 : 0;
    Int total = 0;
    for (const auto& [w, m] : g.successors(level, v)) total += Int(m) * self(self, level + 1, w);
    return total;
  };
  return rec(rec, 0, 0);
}

// Standard Young tableaux of a shape, counted by checking every filling.
// Factorial enumeration; keep |shape| small.
inline Int count_tableaux_bruteforce(const std::vector<int>& shape) {
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < static_cast<int>(shape.size()); ++r)
    for (int c = 0; c < shape[r]; ++c) cells.emplace_back(r, c);
  const int n = static_cast<int>(cells.size());
  std::vector<int> value(n);
  std::iota(value.begin(), value.end(), 1);
  Int count = 0;
  do {
    auto at = [&](int r, int c) {
      for (int k = 0; k < n; ++k)
        if (cells[k] == std::make_pair(r, c)) return value[k];
      return -1;
    };
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      auto [r, c] = cells[k];
      if (c > 0 && at(r, c - 1) > value[k]) ok = false;
      if (r > 0 && at(r - 1, c) > value[k]) ok = false;
    }
    if (ok) ++count;
  } while (std::next_permutation(value.begin(), value.end()));
  return count;
}

inline Int factorial(int n) {
  Int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Hook length formula: n! / product of hook lengths.
inline Int hook_length_dim(const std::vector<int>& shape) {
  int n = 0;
  for (int part : shape) n += part;
  Int hooks = 1;
  for (int r = 0; r < static_cast<int>(shape.size()); ++r)
    for (int c = 0; c < shape[r]; ++c) {
      int arm = shape[r] - c - 1;
      int leg = 0;
      for (int rr = r + 1; rr < static_cast<int>(shape.size()); ++rr)
        if (shape[rr] > c) ++leg;
      hooks *= arm + leg + 1;
    }
  return factorial(n) / hooks;
}

inline Int multinomial(const std::vector<int>& parts) {
  int n = 0;
  for (int p : parts) n += p;
  Int v = factorial(n);
  for (int p : parts) v /= factorial(p);
  return v;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

// Exact probability vector with denominator `denom`: a random composition.
inline std::vector<Rat> random_probability(Rng& rng, std::size_t k, int denom = 16) {
  std::vector<int> counts(k, 0);
  for (int i = 0; i < denom; ++i) ++counts[rng.uniform(0, static_cast<int>(k) - 1)];
  std::vector<Rat> p;
  for (int c : counts) p.emplace_back(c, denom);
  return p;
}

// Entries in [1, 2] (denominators <= 16) satisfy the triangle inequality
// automatically; an occasional scale keeps magnitudes varied.
inline GroundMetric<Rat> random_metric(Rng& rng, std::size_t n, bool scaled = true) {
  GroundMetric<Rat> m(n);
  Rat scale = scaled ? Rat(rng.uniform(1, 8), 4) : Rat(1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, Rat(rng.uniform(16, 32), 16) * scale);
  return m;
}

// Random graded graph with bounded widths; zero rows/columns are repaired
// so the result always validates.
inline GradedGraph random_graph(Rng& rng, std::size_t max_width, std::size_t depth) {
  std::vector<std::vector<std::string>> labels{{"*"}};
  std::vector<AdjacencyMatrix> adj;
  std::size_t prev = 1;
  for (std::size_t n = 1; n <= depth; ++n) {
    std::size_t width = rng.uniform(1, static_cast<int>(max_width));
    AdjacencyMatrix m(prev, width);
    for (std::size_t u = 0; u < prev; ++u)
      for (std::size_t v = 0; v < width; ++v) {
        int roll = rng.uniform(0, 5);
        m.at(u, v) = roll < 3 ? 0 : (roll == 5 ? 2 : 1);
      }
    for (std::size_t u = 0; u < prev; ++u) {
      bool any = false;
      for (std::size_t v = 0; v < width; ++v) any |= m(u, v) != 0;
      if (!any) m.at(u, rng.uniform(0, static_cast<int>(width) - 1)) = 1;
    }
    for (std::size_t v = 0; v < width; ++v) {
      bool any = false;
      for (std::size_t u = 0; u < prev; ++u) any |= m(u, v) != 0;
      if (!any) m.at(rng.uniform(0, static_cast<int>(prev) - 1), v) = 1;
    }
    std::vector<std::string> ls;
    for (std::size_t v = 0; v < width; ++v)
      ls.push_back("v" + std::to_string(n) + "_" + std::to_string(v));
    labels.push_back(std::move(ls));
    adj.push_back(std::move(m));
    prev = width;
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

inline LevelDistribution random_distribution(Rng& rng, std::size_t level, std::size_t size,
                                             int denom = 16) {
  LevelDistribution d;
  d.level = level;
  d.p = random_probability(rng, size, denom);
  return d;
}

inline std::vector<double> to_doubles(const std::vector<Rat>& v) {
  std::vector<double> out;
  for (const Rat& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace testsupport
