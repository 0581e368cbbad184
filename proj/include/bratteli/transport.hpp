#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/errors.hpp"
#include "bratteli/rational.hpp"

namespace bratteli {

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static Rat pivot_tol() { return Rat(0); }
  static Rat prob_tol() { return Rat(0); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double pivot_tol() { return 1e-13; }
  // declared float-mode tolerance of the solver on [0,1]-scaled costs
  static double prob_tol() { return 1e-9; }
};

// Symmetric distance matrix over a finite point set. kantorovich() assumes
// its cost really is a metric (the common-mass reduction relies on the
// triangle inequality); call check() on untrusted input.
template <typename T>
class GroundMetric {
 public:
  GroundMetric() = default;
  explicit GroundMetric(std::size_t n) : n_(n), d_(n * n, T(0)) {}

  static GroundMetric discrete(std::size_t n) {
    GroundMetric m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) m.d_[i * n + j] = T(1);
    return m;
  }

  std::size_t size() const { return n_; }
  const T& operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, T v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = std::move(v);
  }

  // First metric-axiom violation, if any: nonnegativity, zero diagonal,
  // symmetry, triangle inequality over all triples.
  std::optional<std::string> check() const {
    const T tol = scalar_traits<T>::exact ? T(0) : T(1e-12);
    for (std::size_t i = 0; i < n_; ++i) {
      if ((*this)(i, i) != T(0))
        return "nonzero diagonal at " + std::to_string(i);
      for (std::size_t j = 0; j < n_; ++j) {
        if ((*this)(i, j) < T(0)) return "negative distance at (" + std::to_string(i) + "," + std::to_string(j) + ")";
        if ((*this)(i, j) != (*this)(j, i))
          return "asymmetry at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t k = 0; k < n_; ++k)
          if ((*this)(i, j) > (*this)(i, k) + (*this)(k, j) + tol)
            return "triangle violation at (" + std::to_string(i) + "," + std::to_string(j) + "," +
                   std::to_string(k) + ")";
    return std::nullopt;
  }

  bool nondegenerate() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(i, j) <= T(0)) return false;
    return true;
  }

  T max_entry() const {
    T m(0);
    for (const T& v : d_)
      if (v > m) m = v;
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<T> d_;
};

template <typename T>
struct TransportPlan {
  struct Entry {
    std::size_t i, j;
    T mass;
  };
  std::vector<Entry> entries;  // sorted by (i, j); positive masses only
};

template <typename T>
struct TransportResult {
  T value{};
  TransportPlan<T> plan;
};

template <typename T>
struct DualResult {
  T value{};
  std::vector<T> potential;  // 1-Lipschitz function on the full point set
};

namespace detail {

template <typename T>
struct TransportSolution {
  T value{};
  struct Cell {
    std::size_t i, j;
    T mass;
  };
  std::vector<Cell> cells;
  std::vector<T> alpha, beta;  // optimal duals: alpha_i + beta_j <= c_ij
};

// Transportation simplex on a dense tableau. Supplies and demands must be
// positive with equal totals. Deterministic: northwest-corner start, then
// Bland's rule (lexicographically first entering cell with negative reduced
// cost, lexicographically first leaving cell among the min-ratio ties).
template <typename T, typename Cost>
TransportSolution<T> solve_transport(const std::vector<T>& supply, const std::vector<T>& demand,
                                     Cost cost) {
  const std::size_t n = supply.size(), m = demand.size();
  std::vector<T> f(n * m, T(0));
  std::vector<char> basic(n * m, 0);

  {
    std::vector<T> r = supply, d = demand;
    std::size_t i = 0, j = 0;
    while (true) {
      T t = std::min(r[i], d[j]);
      f[i * m + j] = t;
      basic[i * m + j] = 1;
      r[i] -= t;
      d[j] -= t;
      if (i == n - 1 && j == m - 1) break;
      if (r[i] == T(0) && i < n - 1)
        ++i;
      else
        ++j;
    }
  }

  std::vector<T> alpha(n), beta(m);
  std::vector<std::vector<std::size_t>> row_cells(n), col_cells(m);
  const T tol = scalar_traits<T>::pivot_tol();

  auto compute_duals = [&] {
    for (auto& rc : row_cells) rc.clear();
    for (auto& cc : col_cells) cc.clear();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (basic[i * m + j]) {
          row_cells[i].push_back(j);
          col_cells[j].push_back(i);
        }
    std::vector<char> row_done(n, 0), col_done(m, 0);
    // nodes: rows are [0,n), columns are [n, n+m)
    std::vector<std::size_t> stack{0};
    alpha[0] = T(0);
    row_done[0] = 1;
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      if (node < n) {
        for (std::size_t j : row_cells[node])
          if (!col_done[j]) {
            beta[j] = cost(node, j) - alpha[node];
            col_done[j] = 1;
            stack.push_back(n + j);
          }
      } else {
        std::size_t j = node - n;
        for (std::size_t i : col_cells[j])
          if (!row_done[i]) {
            alpha[i] = cost(i, j) - beta[j];
            row_done[i] = 1;
            stack.push_back(i);
          }
      }
    }
  };

  const std::size_t max_pivots = 1000 + 50 * (n + m) * (n + m);
  std::size_t pivots = 0;
  while (true) {
    if (++pivots > max_pivots) throw std::runtime_error("solve_transport: pivot limit exceeded");
    compute_duals();

    std::size_t ei = n, ej = m;
    for (std::size_t i = 0; i < n && ei == n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!basic[i * m + j] && cost(i, j) - alpha[i] - beta[j] < -tol) {
          ei = i;
          ej = j;
          break;
        }
    if (ei == n) break;  // optimal

    // unique tree path from row node ei to column node n+ej
    std::vector<std::size_t> parent(n + m, SIZE_MAX);
    std::vector<std::size_t> queue{ei};
    parent[ei] = ei;
    for (std::size_t qi = 0; qi < queue.size() && parent[n + ej] == SIZE_MAX; ++qi) {
      std::size_t node = queue[qi];
      if (node < n) {
        for (std::size_t j : row_cells[node])
          if (parent[n + j] == SIZE_MAX) {
            parent[n + j] = node;
            queue.push_back(n + j);
          }
      } else {
        for (std::size_t i : col_cells[node - n])
          if (parent[i] == SIZE_MAX) {
            parent[i] = node;
            queue.push_back(i);
          }
      }
    }
    if (parent[n + ej] == SIZE_MAX)
      throw std::runtime_error("solve_transport: basis tree disconnected");

    // path cells from ei to ej; alternating signs, entering cell is '+'
    std::vector<std::pair<std::size_t, std::size_t>> minus_cells, plus_cells;
    {
      std::vector<std::size_t> path;  // node sequence ej-side back to ei
      for (std::size_t node = n + ej; node != ei; node = parent[node]) path.push_back(node);
      path.push_back(ei);
      std::reverse(path.begin(), path.end());  // ei ... n+ej
      for (std::size_t p = 0; p + 1 < path.size(); ++p) {
        std::size_t a = path[p], b = path[p + 1];
        std::size_t ci = a < n ? a : b, cj = a < n ? b - n : a - n;
        if (p % 2 == 0)
          minus_cells.emplace_back(ci, cj);
        else
          plus_cells.emplace_back(ci, cj);
      }
    }

    T theta = f[minus_cells[0].first * m + minus_cells[0].second];
    std::pair<std::size_t, std::size_t> leaving = minus_cells[0];
    for (const auto& c : minus_cells) {
      const T& fc = f[c.first * m + c.second];
      if (fc < theta || (fc == theta && c < leaving)) {
        theta = fc;
        leaving = c;
      }
    }

    f[ei * m + ej] += theta;
    basic[ei * m + ej] = 1;
    for (const auto& c : plus_cells) f[c.first * m + c.second] += theta;
    for (const auto& c : minus_cells) f[c.first * m + c.second] -= theta;
    f[leaving.first * m + leaving.second] = T(0);
    basic[leaving.first * m + leaving.second] = 0;
  }

  TransportSolution<T> sol;
  sol.alpha = alpha;
  sol.beta = beta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (f[i * m + j] > T(0)) {
        sol.value += f[i * m + j] * cost(i, j);
        sol.cells.push_back({i, j, f[i * m + j]});
      }
  return sol;
}

// Shared-index mass cancellation; valid whenever the cost is a metric
// (the optimum depends only on mu - nu). Inputs sorted by index.
template <typename T>
void cancel_common_mass(std::vector<std::pair<std::size_t, T>>& a,
                        std::vector<std::pair<std::size_t, T>>& b,
                        std::vector<std::pair<std::size_t, T>>* common = nullptr) {
  std::size_t ia = 0, ib = 0;
  for (; ia < a.size() && ib < b.size();) {
    if (a[ia].first < b[ib].first)
      ++ia;
    else if (b[ib].first < a[ia].first)
      ++ib;
    else {
      T c = std::min(a[ia].second, b[ib].second);
      if (common) common->emplace_back(a[ia].first, c);
      a[ia].second -= c;
      b[ib].second -= c;
      ++ia;
      ++ib;
    }
  }
  std::erase_if(a, [](const auto& e) { return e.second == T(0); });
  std::erase_if(b, [](const auto& e) { return e.second == T(0); });
}

// Value-only sparse entry point used by the metric iteration.
template <typename T, typename Cost>
T kantorovich_sparse(std::vector<std::pair<std::size_t, T>> a,
                     std::vector<std::pair<std::size_t, T>> b, Cost cost) {
  cancel_common_mass(a, b);
  if (a.empty()) return T(0);
  std::vector<T> supply, demand;
  std::vector<std::size_t> si, sj;
  for (auto& [idx, mass] : a) {
    si.push_back(idx);
    supply.push_back(std::move(mass));
  }
  for (auto& [idx, mass] : b) {
    sj.push_back(idx);
    demand.push_back(std::move(mass));
  }
  return solve_transport<T>(supply, demand,
                            [&](std::size_t i, std::size_t j) { return cost(si[i], sj[j]); })
      .value;
}

template <typename T>
std::vector<std::pair<std::size_t, T>> support_of(std::span<const T> v) {
  std::vector<std::pair<std::size_t, T>> s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != T(0)) s.emplace_back(i, v[i]);
  return s;
}

template <typename T>
void check_probability(std::span<const T> v, std::size_t n, const char* who) {
  if (v.size() != n) throw ValidationError(std::string(who) + ": dimension mismatch");
  T sum(0);
  for (const T& x : v) {
    if (x < T(0)) throw ValidationError(std::string(who) + ": negative mass");
    sum += x;
  }
  if constexpr (scalar_traits<T>::exact) {
    if (sum != T(1)) throw ValidationError(std::string(who) + ": masses do not sum to 1");
  } else {
    if (sum < 1 - scalar_traits<T>::prob_tol() || sum > 1 + scalar_traits<T>::prob_tol())
      throw ValidationError(std::string(who) + ": masses do not sum to 1");
  }
}

}  // namespace detail

// Minimum of sum psi_ij rho(e_i, e_j) over the transportation polytope with
// marginals mu, nu, plus one optimal (basic) plan. Exact rational optimum
// for T = Rat; within the declared tolerance for T = double.
template <typename T>
TransportResult<T> kantorovich(std::span<const T> mu, std::span<const T> nu,
                               const GroundMetric<T>& rho) {
  detail::check_probability<T>(mu, rho.size(), "kantorovich(mu)");
  detail::check_probability<T>(nu, rho.size(), "kantorovich(nu)");

  auto a = detail::support_of<T>(mu), b = detail::support_of<T>(nu);
  std::vector<std::pair<std::size_t, T>> common;
  detail::cancel_common_mass(a, b, &common);

  TransportResult<T> res;
  for (auto& [i, c] : common) res.plan.entries.push_back({i, i, std::move(c)});
  if (!a.empty()) {
    std::vector<T> supply, demand;
    std::vector<std::size_t> si, sj;
    for (auto& [idx, mass] : a) {
      si.push_back(idx);
      supply.push_back(std::move(mass));
    }
    for (auto& [idx, mass] : b) {
      sj.push_back(idx);
      demand.push_back(std::move(mass));
    }
    auto sol = detail::solve_transport<T>(
        supply, demand, [&](std::size_t i, std::size_t j) { return rho(si[i], sj[j]); });
    res.value = std::move(sol.value);
    for (auto& c : sol.cells) res.plan.entries.push_back({si[c.i], sj[c.j], std::move(c.mass)});
  }
  std::sort(res.plan.entries.begin(), res.plan.entries.end(),
            [](const auto& x, const auto& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
  return res;
}

template <typename T>
TransportResult<T> kantorovich(const std::vector<T>& mu, const std::vector<T>& nu,
                               const GroundMetric<T>& rho) {
  return kantorovich(std::span<const T>(mu), std::span<const T>(nu), rho);
}

// Closed form of the transport cost against a delta target:
// sum_j mu_j rho(vertex, j). Equals kantorovich(mu, delta_vertex, rho).
template <typename T>
T kantorovich_to_delta(std::span<const T> mu, std::size_t vertex, const GroundMetric<T>& rho) {
  detail::check_probability<T>(mu, rho.size(), "kantorovich_to_delta");
  if (vertex >= rho.size()) throw std::out_of_range("kantorovich_to_delta: vertex index");
  T s(0);
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (mu[j] != T(0)) s += mu[j] * rho(vertex, j);
  return s;
}

template <typename T>
T kantorovich_to_delta(const std::vector<T>& mu, std::size_t vertex, const GroundMetric<T>& rho) {
  return kantorovich_to_delta(std::span<const T>(mu), vertex, rho);
}

// Dual problem: maximize sum u d(mu - nu) over 1-Lipschitz u. The optimal
// potential is recovered from the simplex duals by a c-transform, so in
// exact mode the returned value is certified equal to the primal optimum.
template <typename T>
DualResult<T> dual_lipschitz(std::span<const T> mu, std::span<const T> nu,
                             const GroundMetric<T>& rho) {
  detail::check_probability<T>(mu, rho.size(), "dual_lipschitz(mu)");
  detail::check_probability<T>(nu, rho.size(), "dual_lipschitz(nu)");

  auto a = detail::support_of<T>(mu), b = detail::support_of<T>(nu);
  detail::cancel_common_mass(a, b);

  DualResult<T> res;
  res.potential.assign(rho.size(), T(0));
  if (a.empty()) return res;  // mu == nu

  std::vector<T> supply, demand;
  std::vector<std::size_t> si, sj;
  for (auto& [idx, mass] : a) {
    si.push_back(idx);
    supply.push_back(std::move(mass));
  }
  for (auto& [idx, mass] : b) {
    sj.push_back(idx);
    demand.push_back(std::move(mass));
  }
  auto sol = detail::solve_transport<T>(
      supply, demand, [&](std::size_t i, std::size_t j) { return rho(si[i], sj[j]); });

  // c-transform of the column duals: u(x) = min_j (rho(x, e_j) - beta_j).
  // A minimum of 1-Lipschitz functions, hence 1-Lipschitz on all points.
  for (std::size_t x = 0; x < rho.size(); ++x) {
    T best = rho(x, sj[0]) - sol.beta[0];
    for (std::size_t j = 1; j < sj.size(); ++j) {
      T cand = rho(x, sj[j]) - sol.beta[j];
      if (cand < best) best = std::move(cand);
    }
    res.potential[x] = std::move(best);
  }

  T dual_value(0);
  for (std::size_t x = 0; x < rho.size(); ++x) dual_value += res.potential[x] * (mu[x] - nu[x]);
  if constexpr (scalar_traits<T>::exact) {
    if (dual_value != sol.value)
      throw std::logic_error("dual_lipschitz: duality gap in exact mode");
  }
  res.value = std::move(sol.value);
  return res;
}

template <typename T>
DualResult<T> dual_lipschitz(const std::vector<T>& mu, const std::vector<T>& nu,
                             const GroundMetric<T>& rho) {
  return dual_lipschitz(std::span<const T>(mu), std::span<const T>(nu), rho);
}

// Kantorovich-Rubinshtein norm of c - c' for two nonnegative vectors with
// equal totals, via transport between the renormalized positive and
// negative parts of the difference.
template <typename T>
T kr_norm(std::span<const T> c, std::span<const T> cprime, const GroundMetric<T>& rho) {
  if (c.size() != rho.size() || cprime.size() != rho.size())
    throw ValidationError("kr_norm: dimension mismatch");
  std::vector<std::pair<std::size_t, T>> pos, neg;
  T spos(0), sneg(0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    T d = c[i] - cprime[i];
    if (d > T(0)) {
      spos += d;
      pos.emplace_back(i, std::move(d));
    } else if (d < T(0)) {
      sneg -= d;
      neg.emplace_back(i, -std::move(d));
    }
  }
  if constexpr (scalar_traits<T>::exact) {
    if (spos != sneg) throw ValidationError("kr_norm: difference does not sum to zero");
  }
  if (pos.empty()) return T(0);
  return detail::kantorovich_sparse<T>(std::move(pos), std::move(neg),
                                       [&](std::size_t i, std::size_t j) { return rho(i, j); });
}

// Independent test oracle: exact minimum over all vertices of the
// transportation polytope, enumerated by recursive cell saturation
// (every spanning-forest basic solution arises this way). Masses and costs
// are rescaled to integer units first, so the memoized recursion works in
// plain big-integer arithmetic.
inline Rat brute_force_oracle(std::span<const Rat> mu, std::span<const Rat> nu,
                              const GroundMetric<Rat>& rho, std::size_t support_bound = 5) {
  detail::check_probability<Rat>(mu, rho.size(), "brute_force_oracle(mu)");
  detail::check_probability<Rat>(nu, rho.size(), "brute_force_oracle(nu)");
  auto as = detail::support_of<Rat>(mu), bs = detail::support_of<Rat>(nu);
  if (as.size() > support_bound || bs.size() > support_bound)
    throw ResourceBoundError("brute_force_oracle: support larger than bound " +
                             std::to_string(support_bound));

  Int mass_scale = 1, cost_scale = 1;
  for (const auto& [i, x] : as) mass_scale = lcm(mass_scale, denominator(x));
  for (const auto& [j, x] : bs) mass_scale = lcm(mass_scale, denominator(x));
  for (const auto& [i, xi] : as)
    for (const auto& [j, xj] : bs) cost_scale = lcm(cost_scale, denominator(rho(i, j)));

  using State = std::vector<std::pair<std::size_t, Int>>;
  State a, b;
  for (const auto& [i, x] : as) a.emplace_back(i, Int(numerator(x) * (mass_scale / denominator(x))));
  for (const auto& [j, x] : bs) b.emplace_back(j, Int(numerator(x) * (mass_scale / denominator(x))));
  std::vector<std::vector<Int>> cost(as.size(), std::vector<Int>(bs.size()));
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < bs.size(); ++j) {
      const Rat& c = rho(as[i].first, bs[j].first);
      cost[i][j] = numerator(c) * (cost_scale / denominator(c));
    }
  // positions survive erasure via the original support indices
  std::vector<std::size_t> apos(rho.size(), 0), bpos(rho.size(), 0);
  for (std::size_t i = 0; i < as.size(); ++i) apos[as[i].first] = i;
  for (std::size_t j = 0; j < bs.size(); ++j) bpos[bs[j].first] = j;

  // small instances run entirely in int64; the generic path covers wide
  // denominators (total = mass_units * cost_units * #cells must fit)
  Int worst = mass_scale;
  for (const auto& row : cost)
    for (const Int& c : row) worst = std::max(worst, Int(mass_scale * c * 32));
  if (worst < Int(std::numeric_limits<std::int64_t>::max())) {
    using S64 = std::vector<std::pair<std::size_t, std::int64_t>>;
    S64 a64, b64;
    for (auto& [i, x] : a) a64.emplace_back(i, x.template convert_to<std::int64_t>());
    for (auto& [j, x] : b) b64.emplace_back(j, x.template convert_to<std::int64_t>());
    std::vector<std::vector<std::int64_t>> c64(cost.size());
    for (std::size_t i = 0; i < cost.size(); ++i)
      for (const Int& c : cost[i]) c64[i].push_back(c.template convert_to<std::int64_t>());
    std::map<std::pair<S64, S64>, std::int64_t> memo;
    auto rec = [&](auto&& self, const S64& r, const S64& d) -> std::int64_t {
      if (r.empty()) return 0;
      auto key = std::make_pair(r, d);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) {
          std::int64_t t = std::min(r[i].second, d[j].second);
          S64 r2 = r, d2 = d;
          r2[i].second -= t;
          d2[j].second -= t;
          std::erase_if(r2, [](const auto& e) { return e.second == 0; });
          std::erase_if(d2, [](const auto& e) { return e.second == 0; });
          std::int64_t c = t * c64[apos[r[i].first]][bpos[d[j].first]] + self(self, r2, d2);
          best = std::min(best, c);
        }
      memo.emplace(std::move(key), best);
      return best;
    };
    return Rat(Int(rec(rec, a64, b64)), mass_scale * cost_scale);
  }

  std::map<std::pair<State, State>, Int> memo;
  auto rec = [&](auto&& self, const State& r, const State& d) -> Int {
    if (r.empty()) return Int(0);
    auto key = std::make_pair(r, d);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::optional<Int> best;
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) {
        Int t = std::min(r[i].second, d[j].second);
        State r2 = r, d2 = d;
        r2[i].second -= t;
        d2[j].second -= t;
        std::erase_if(r2, [](const auto& e) { return e.second == 0; });
        std::erase_if(d2, [](const auto& e) { return e.second == 0; });
        Int c = t * cost[apos[r[i].first]][bpos[d[j].first]] + self(self, r2, d2);
        if (!best || c < *best) best = std::move(c);
      }
    auto [it, inserted] = memo.emplace(std::move(key), std::move(*best));
    return it->second;
  };
  return Rat(rec(rec, a, b), mass_scale * cost_scale);
}

inline Rat brute_force_oracle(const std::vector<Rat>& mu, const std::vector<Rat>& nu,
                              const GroundMetric<Rat>& rho, std::size_t support_bound = 5) {
  return brute_force_oracle(std::span<const Rat>(mu), std::span<const Rat>(nu), rho,
                            support_bound);
}

}  // namespace bratteli
