#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bratteli/central_measure.hpp"
#include "bratteli/compactness.hpp"
#include "bratteli/graded_graph.hpp"
#include "bratteli/internal_metric.hpp"

namespace bratteli::io {

using nlohmann::json;

// ---- graph JSON ----------------------------------------------------------
// { "levels": [["*"], ["a","b"], ...],
//   "edges":  [ [ {"from":0,"to":0,"mult":1}, ... ],  // edges[n-1] is M_n
//               ... ] }
// Unknown keys (e.g. generator metadata) are ignored on load.

inline json graph_to_json(const GradedGraph& g) {
  json j;
  j["levels"] = g.labels();
  json edges = json::array();
  for (std::size_t n = 1; n <= g.depth(); ++n) {
    json block = json::array();
    const auto& m = g.matrix(n);
    for (std::size_t u = 0; u < m.rows(); ++u)
      for (std::size_t v = 0; v < m.cols(); ++v)
        if (m(u, v) != 0) block.push_back({{"from", u}, {"to", v}, {"mult", m(u, v)}});
    edges.push_back(std::move(block));
  }
  j["edges"] = std::move(edges);
  return j;
}

inline GradedGraph graph_from_json(const json& j) {
  if (!j.contains("levels") || !j.contains("edges"))
    throw ValidationError("graph json: missing 'levels' or 'edges'");
  std::vector<std::vector<std::string>> labels;
  for (const auto& lvl : j.at("levels")) {
    std::vector<std::string> ls;
    for (const auto& s : lvl) ls.push_back(s.get<std::string>());
    labels.push_back(std::move(ls));
  }
  if (labels.empty()) throw ValidationError("graph json: no levels");
  const auto& edges = j.at("edges");
  if (edges.size() + 1 != labels.size())
    throw ValidationError("graph json: need one edge block per level transition");
  std::vector<AdjacencyMatrix> adj;
  for (std::size_t n = 1; n < labels.size(); ++n) {
    AdjacencyMatrix m(labels[n - 1].size(), labels[n].size());
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges.at(n - 1)) {
      std::size_t from = e.at("from").get<std::size_t>();
      std::size_t to = e.at("to").get<std::size_t>();
      std::int64_t mult = e.at("mult").get<std::int64_t>();
      if (from >= m.rows() || to >= m.cols())
        throw ValidationError("graph json: edge index out of range at level " + std::to_string(n));
      if (mult < 0)
        throw ValidationError("graph json: negative multiplicity at level " + std::to_string(n));
      if (!seen.emplace(from, to).second)
        throw ValidationError("graph json: duplicate edge (" + std::to_string(from) + "," +
                              std::to_string(to) + ") at level " + std::to_string(n));
      m.at(from, to) = mult;
    }
    adj.push_back(std::move(m));
  }
  return GradedGraph(std::move(labels), std::move(adj));
}

inline void save_graph(const GradedGraph& g, const std::string& path, json extra = {}) {
  json j = graph_to_json(g);
  for (auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline GradedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  in >> j;
  return graph_from_json(j);
}

// ---- measure JSON --------------------------------------------------------
// { "levels": [["1"], ["1/2","1/2"], ...],
//   "forward_kernel": [ [ [{"to":0,"p":"1/2"}, ...], ... ], ... ] }  (optional)

inline json measure_to_json(const CentralMeasure& m) {
  json j;
  json levels = json::array();
  for (const auto& lvl : m.levels()) {
    json row = json::array();
    for (const Rat& x : lvl.p) row.push_back(format_fraction(x));
    levels.push_back(std::move(row));
  }
  j["levels"] = std::move(levels);
  if (m.has_forward_kernel()) {
    json fk = json::array();
    for (const auto& level_rows : m.forward_kernel().rows) {
      json lvl = json::array();
      for (const auto& row : level_rows) {
        json r = json::array();
        for (const auto& [to, p] : row) r.push_back({{"to", to}, {"p", format_fraction(p)}});
        lvl.push_back(std::move(r));
      }
      fk.push_back(std::move(lvl));
    }
    j["forward_kernel"] = std::move(fk);
  }
  return j;
}

// Parses and validates against the graph's cocycle: with a forward kernel
// present the measure is rebuilt through the centrality check; otherwise
// the explicit levels are checked for exact coherence.
inline CentralMeasure measure_from_json(const json& j, const GradedGraph& g,
                                        const CotransitionKernel& lambda) {
  if (j.contains("forward_kernel")) {
    ForwardKernel fwd;
    for (const auto& lvl : j.at("forward_kernel")) {
      std::vector<ForwardKernel::Row> rows;
      for (const auto& r : lvl) {
        ForwardKernel::Row row;
        for (const auto& e : r)
          row.emplace_back(e.at("to").get<std::size_t>(),
                           parse_fraction(e.at("p").get<std::string>()));
        rows.push_back(std::move(row));
      }
      fwd.rows.push_back(std::move(rows));
    }
    return from_forward_kernel(g, lambda, std::move(fwd));
  }
  if (!j.contains("levels")) throw ValidationError("measure json: missing 'levels'");
  std::vector<LevelDistribution> mu;
  std::size_t n = 0;
  for (const auto& lvl : j.at("levels")) {
    LevelDistribution d;
    d.level = n++;
    for (const auto& s : lvl) d.p.push_back(parse_fraction(s.get<std::string>()));
    mu.push_back(std::move(d));
  }
  return measure_from_levels(lambda, std::move(mu));
}

inline CentralMeasure load_measure(const std::string& path, const GradedGraph& g,
                                   const CotransitionKernel& lambda) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  in >> j;
  return measure_from_json(j, g, lambda);
}

// ---- CSV writers ---------------------------------------------------------

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

inline std::string dim_table_csv(const DimTable& t) {
  std::ostringstream os;
  os << "level,vertex,value\n";
  for (std::size_t n = 0; n < t.dims.size(); ++n)
    for (std::size_t v = 0; v < t.dims[n].size(); ++v)
      os << n << "," << v << "," << t.dims[n][v].str() << "\n";
  return os.str();
}

// One row per (level, vertex, predecessor); `value` keeps the fraction form.
inline std::string kernel_csv(const CotransitionKernel& k) {
  std::ostringstream os;
  os << "level,vertex,pred,value\n";
  for (std::size_t n = 1; n <= k.depth(); ++n)
    for (std::size_t v = 0; v < k.level_size(n); ++v)
      for (const auto& [u, w] : k.row(n, v))
        os << n << "," << v << "," << u << "," << format_fraction(w) << "\n";
  return os.str();
}

inline std::string level_metric_csv(const LevelMetric& m) {
  std::ostringstream os;
  os << "level,u,v,distance\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      os << m.level() << "," << i << "," << j << ",";
      if (m.exact())
        os << format_fraction(m.exact_at(i, j));
      else
        os << format_double(m.at(i, j));
      os << "\n";
    }
  return os.str();
}

inline json level_metric_json(const LevelMetric& m, const MetricProvenance& prov) {
  json j;
  j["provenance"] = {{"initial_metric", prov.initial_metric},
                     {"initial_level", prov.initial_level},
                     {"requested_mode", to_string(prov.requested_mode)},
                     {"denominator_bit_cutoff", prov.denominator_bit_cutoff}};
  if (prov.float_switch_level)
    j["provenance"]["float_switch_level"] = *prov.float_switch_level;
  j["level"] = m.level();
  j["mode"] = m.exact() ? "exact" : "float";
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.size(); ++k)
      row.push_back(m.exact() ? format_fraction(m.exact_at(i, k)) : format_double(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

template <typename T>
std::string plan_csv(const TransportPlan<T>& plan) {
  std::ostringstream os;
  os << "i,j,mass\n";
  for (const auto& e : plan.entries) {
    os << e.i << "," << e.j << ",";
    if constexpr (scalar_traits<T>::exact)
      os << format_fraction(e.mass);
    else
      os << format_double(e.mass);
    os << "\n";
  }
  return os.str();
}

inline std::string covering_csv(const CoveringReport& rep) {
  std::ostringstream os;
  os << "epsilon,level,N,method\n";
  for (const auto& r : rep.rows)
    os << format_fraction(r.eps) << "," << r.level << "," << r.n_cover << ","
       << to_string(r.method) << "\n";
  return os.str();
}

// level-vs-N series per epsilon, for external plotting
inline std::string covering_plot_csv(const CoveringReport& rep) {
  std::ostringstream os;
  os << "level,epsilon,N\n";
  for (const auto& r : rep.rows)
    os << r.level << "," << format_fraction(r.eps) << "," << r.n_cover << "\n";
  return os.str();
}

inline std::string distribution_csv(const LevelDistribution& d) {
  std::ostringstream os;
  os << "level,vertex,value\n";
  for (std::size_t v = 0; v < d.p.size(); ++v)
    os << d.level << "," << v << "," << format_fraction(d.p[v]) << "\n";
  return os.str();
}

inline std::string extremality_csv(const ExtremalityReport& rep) {
  std::ostringstream os;
  os << "n,m,epsilon,mass_tv,mass_internal\n";
  for (const auto& r : rep.rows)
    os << r.n << "," << r.m << "," << format_fraction(r.eps) << ","
       << format_double(to_double(r.mass_tv)) << "," << format_double(to_double(r.mass_internal))
       << "\n";
  return os.str();
}

inline std::string standardness_csv(const StandardnessProfile& p) {
  std::ostringstream os;
  os << "level,distance,argmin_vertex\n";
  for (const auto& s : p.series)
    os << s.level << "," << format_double(s.distance) << "," << s.argmin_vertex << "\n";
  return os.str();
}

inline std::string concentration_csv(const ConcentrationProfile& p) {
  std::ostringstream os;
  os << "level,epsilon,mass\n";
  for (const auto& r : p.rows)
    os << r.level << "," << format_fraction(r.eps) << "," << format_double(to_double(r.mass))
       << "\n";
  return os.str();
}

inline std::string martingale_csv(const MartingaleProfile& p) {
  std::ostringstream os;
  os << "level,value,exact_summation\n";
  for (const auto& r : p.rows)
    os << r.level << "," << format_double(r.value) << "," << (r.exact_summation ? 1 : 0) << "\n";
  return os.str();
}

inline std::string width_csv(const WidthReport& rep) {
  std::ostringstream os;
  os << "level,width,max_distance\n";
  for (const auto& r : rep.rows)
    os << r.level << "," << r.width << "," << format_double(r.max_distance) << "\n";
  return os.str();
}

}  // namespace bratteli::io
