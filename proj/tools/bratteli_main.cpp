// Batch CLI over the library: generate or load a graded graph, iterate the
// internal metric, run the compactness profile, and run measure diagnostics.
// All reports are plain CSV/JSON files; identical configs (and seeds)
// produce byte-identical outputs in exact mode.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bratteli/bratteli.hpp"

namespace fs = std::filesystem;
using namespace bratteli;
using nlohmann::json;

namespace {

struct GraphOptions {
  std::string family;
  std::string graph_file;
  int depth = 8;
  int pascal_d = 2;
  int pair_seed = 4;
  bool include_equal = false;
  std::string stationary_kernel = "1,1,0;0,1,1;1,0,1";
  std::size_t level_bound = 20000;
};

void add_graph_options(CLI::App* cmd, GraphOptions& g) {
  cmd->add_option("--family", g.family,
                  "graph family: pascal | young | unordered-pairs | chain | stationary");
  cmd->add_option("--graph", g.graph_file, "path of a graph JSON file");
  cmd->add_option("--depth", g.depth, "number of levels to generate")->check(CLI::PositiveNumber);
  cmd->add_option("--d", g.pascal_d, "pascal dimension (d >= 2)");
  cmd->add_option("--pair-seed", g.pair_seed, "unordered-pairs: size of level 1");
  cmd->add_flag("--include-equal", g.include_equal, "unordered-pairs: allow {a,a} vertices");
  cmd->add_option("--stationary-kernel", g.stationary_kernel,
                  "stationary: rows of the square matrix, e.g. \"1,1;1,1\"");
  cmd->add_option("--level-bound", g.level_bound, "maximum vertices per generated level");
}

std::vector<std::vector<std::int64_t>> parse_matrix(const std::string& s) {
  std::vector<std::vector<std::int64_t>> m;
  std::stringstream rows(s);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::vector<std::int64_t> r;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) r.push_back(std::stoll(cell));
    m.push_back(std::move(r));
  }
  return m;
}

GradedGraph make_graph(const GraphOptions& o) {
  if (!o.graph_file.empty()) {
    GradedGraph g = io::load_graph(o.graph_file);
    auto rep = validate(g);
    if (!rep.ok()) {
      std::string msg = "graph file fails validation:";
      for (const auto& v : rep.violations) msg += " [" + v.message + "]";
      throw ValidationError(msg);
    }
    return g;
  }
  if (o.family == "pascal") return families::pascal(o.pascal_d, o.depth);
  if (o.family == "young") return families::young(o.depth);
  if (o.family == "unordered-pairs")
    return families::unordered_pairs(o.pair_seed, o.depth, o.include_equal, o.level_bound);
  if (o.family == "chain") return families::chain(o.depth);
  if (o.family == "stationary")
    return families::stationary(parse_matrix(o.stationary_kernel), o.depth);
  throw ValidationError("unknown family '" + o.family + "' (and no --graph given)");
}

json graph_config_json(const GraphOptions& o) {
  json j;
  j["family"] = o.family;
  j["graph_file"] = o.graph_file;
  j["depth"] = o.depth;
  if (o.family == "pascal") j["d"] = o.pascal_d;
  if (o.family == "unordered-pairs") {
    j["pair_seed"] = o.pair_seed;
    j["include_equal"] = o.include_equal;
    j["level_bound"] = o.level_bound;
  }
  if (o.family == "stationary") j["kernel"] = o.stationary_kernel;
  return j;
}

std::vector<Rat> parse_eps_list(const std::string& s) {
  std::vector<Rat> eps;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    Rat e = parse_fraction(tok);
    if (e <= 0) throw ValidationError("epsilon values must be positive");
    eps.push_back(e);
  }
  if (eps.empty()) throw ValidationError("empty epsilon list");
  return eps;
}

std::string out_dir(std::string opt) {
  if (opt.empty()) {
    if (const char* env = std::getenv("BRATTELI_OUT_DIR")) opt = env;
  }
  if (opt.empty()) opt = ".";
  fs::create_directories(opt);
  return opt;
}

unsigned jobs_value(unsigned opt) {
  if (const char* env = std::getenv("BRATTELI_JOBS")) return std::max(1, std::atoi(env));
  return std::max(1u, opt);
}

json base_report(const std::string& command, const json& config, ArithmeticMode mode,
                 std::size_t horizon, std::uint64_t seed) {
  json j;
  j["tool_version"] = BRATTELI_VERSION;
  j["command"] = command;
  j["config"] = config;
  j["arithmetic_mode"] = to_string(mode);
  j["horizon"] = horizon;
  j["seed"] = seed;
  return j;
}

InternalMetricSequence run_iteration(const GradedGraph& graph,
                                     std::shared_ptr<const CotransitionKernel> kernel,
                                     ArithmeticMode mode, std::size_t bit_cutoff, unsigned jobs,
                                     std::size_t up_to) {
  MetricIterationOptions opts;
  opts.mode = mode;
  opts.denominator_bit_cutoff = bit_cutoff;
  opts.jobs = jobs;
  // start at the first level that actually carries a nontrivial metric
  std::size_t init = 1;
  for (std::size_t n = 1; n <= up_to; ++n)
    if (graph.level_size(n) >= 2) {
      init = n;
      break;
    }
  return iterate_metric(graph, kernel, GroundMetric<Rat>::discrete(graph.level_size(init)), init,
                        up_to, opts, "discrete");
}

int run(int argc, char** argv) {
  CLI::App app{"internal (iterated Kantorovich) metrics on graded graphs"};
  app.require_subcommand(1);

  // ---- metric ----
  auto* metric_cmd = app.add_subcommand("metric", "iterate the internal metric, write CSVs");
  GraphOptions mg;
  add_graph_options(metric_cmd, mg);
  bool m_exact = false, m_float = false;
  std::string m_out;
  std::size_t m_cutoff = 4096;
  unsigned m_jobs = 1;
  metric_cmd->add_flag("--exact", m_exact, "exact rational iteration (default)");
  metric_cmd->add_flag("--float", m_float, "double-precision iteration");
  metric_cmd->add_option("--bit-cutoff", m_cutoff, "denominator bits before the float fallback");
  metric_cmd->add_option("--out", m_out, "output directory");
  metric_cmd->add_option("--jobs", m_jobs, "worker threads for the pair solves");

  // ---- compactness ----
  auto* comp_cmd = app.add_subcommand("compactness", "covering-number profile per level");
  GraphOptions cg;
  add_graph_options(comp_cmd, cg);
  std::string c_eps = "1/10", c_out, c_method = "farthest";
  bool c_exact = false, c_float = false;
  std::size_t c_cutoff = 4096;
  unsigned c_jobs = 1;
  comp_cmd->add_option("--eps", c_eps, "comma-separated epsilon list (fractions or decimals)");
  comp_cmd->add_option("--net-method", c_method, "farthest | setcover | exact");
  comp_cmd->add_flag("--exact", c_exact, "exact iteration before covering");
  comp_cmd->add_flag("--float", c_float, "float iteration (default)");
  comp_cmd->add_option("--bit-cutoff", c_cutoff, "denominator bits before the float fallback");
  comp_cmd->add_option("--out", c_out, "output directory");
  comp_cmd->add_option("--jobs", c_jobs, "worker threads");

  // ---- measure ----
  auto* meas_cmd = app.add_subcommand("measure", "extremality / standardness diagnostics");
  GraphOptions sg;
  add_graph_options(meas_cmd, sg);
  std::string s_measure_file, s_bernoulli, s_eps = "1/10", s_pairs, s_out, s_comparand = "pairwise";
  std::uint64_t s_seed = 12345;
  std::size_t s_sample = 2000;
  bool s_exact = false, s_float = false;
  std::size_t s_cutoff = 4096;
  unsigned s_jobs = 1;
  meas_cmd->add_option("--measure-file", s_measure_file, "measure JSON path");
  meas_cmd->add_option("--bernoulli", s_bernoulli,
                       "pascal only: success probabilities, e.g. \"1/2\" or \"1/3,1/3,1/3\"");
  meas_cmd->add_option("--eps", s_eps, "comma-separated epsilon list");
  meas_cmd->add_option("--pairs", s_pairs, "extremality (n:m) pairs, e.g. \"2:40,3:40\"");
  meas_cmd->add_option("--sample-size", s_sample, "martingale sample size when not exact");
  meas_cmd->add_option("--seed", s_seed, "seed for sampled profiles");
  meas_cmd->add_option("--martingale-comparand", s_comparand, "pairwise | unconditional");
  meas_cmd->add_flag("--exact", s_exact, "exact iteration (default)");
  meas_cmd->add_flag("--float", s_float, "float iteration");
  meas_cmd->add_option("--bit-cutoff", s_cutoff, "denominator bits before the float fallback");
  meas_cmd->add_option("--out", s_out, "output directory");
  meas_cmd->add_option("--jobs", s_jobs, "worker threads");

  // ---- family ----
  auto* fam_cmd = app.add_subcommand("family", "generate a graph file");
  GraphOptions fg;
  add_graph_options(fam_cmd, fg);
  std::string f_out_graph = "graph.json";
  fam_cmd->add_option("--out-graph", f_out_graph, "output graph JSON path");

  // ---- rarefy ----
  auto* rar_cmd = app.add_subcommand("rarefy", "drop levels, composing multiplicities");
  GraphOptions rg;
  add_graph_options(rar_cmd, rg);
  std::string r_keep, r_out_graph = "rarefied.json";
  rar_cmd->add_option("--keep", r_keep, "comma-separated kept levels, must start at 0")
      ->required();
  rar_cmd->add_option("--out-graph", r_out_graph, "output graph JSON path");

  CLI11_PARSE(app, argc, argv);

  if (metric_cmd->parsed()) {
    ArithmeticMode mode = m_float ? ArithmeticMode::Float : ArithmeticMode::Exact;
    GradedGraph graph = make_graph(mg);
    auto dt = dims(graph, graph.depth());
    auto kernel = std::make_shared<CotransitionKernel>(cotransitions(graph, dt));
    unsigned jobs = jobs_value(m_jobs);
    auto seq = run_iteration(graph, kernel, mode, m_cutoff, jobs, graph.depth());

    std::string dir = out_dir(m_out);
    for (const LevelMetric& lm : seq.levels) {
      char name[64];
      std::snprintf(name, sizeof(name), "metric_level_%03zu.csv", lm.level());
      io::write_file(dir + "/" + name, io::level_metric_csv(lm));
    }
    json config = graph_config_json(mg);
    config["bit_cutoff"] = m_cutoff;
    json prov = base_report("metric", config, mode, graph.depth(), 0);
    prov["initial_metric"] = seq.provenance.initial_metric;
    prov["initial_level"] = seq.provenance.initial_level;
    if (seq.provenance.float_switch_level)
      prov["float_switch_level"] = *seq.provenance.float_switch_level;
    io::write_file(dir + "/provenance.json", prov.dump(2) + "\n");
    std::cout << "wrote " << seq.levels.size() << " metric files to " << dir << "\n";
    return 0;
  }

  if (comp_cmd->parsed()) {
    ArithmeticMode mode = c_exact ? ArithmeticMode::Exact : ArithmeticMode::Float;
    NetMethod method = NetMethod::GreedyFarthest;
    if (c_method == "setcover") method = NetMethod::GreedySetCover;
    else if (c_method == "exact") method = NetMethod::ExactMinimal;
    else if (c_method != "farthest") throw ValidationError("unknown net method " + c_method);

    GradedGraph graph = make_graph(cg);
    auto dt = dims(graph, graph.depth());
    auto kernel = std::make_shared<CotransitionKernel>(cotransitions(graph, dt));
    auto seq = run_iteration(graph, kernel, mode, c_cutoff, jobs_value(c_jobs), graph.depth());
    auto eps = parse_eps_list(c_eps);
    CoveringReport rep = compactness_profile(seq, eps, method);

    std::string dir = out_dir(c_out);
    io::write_file(dir + "/covering.csv", io::covering_csv(rep));
    io::write_file(dir + "/covering_plot.csv", io::covering_plot_csv(rep));
    json config = graph_config_json(cg);
    config["eps"] = c_eps;
    config["net_method"] = to_string(method);
    json summary = base_report("compactness", config, mode, graph.depth(), 0);
    json verdicts = json::array();
    for (const auto& v : rep.verdicts)
      verdicts.push_back({{"eps", format_fraction(v.eps)},
                          {"uniformly_bounded_within_horizon", v.uniformly_bounded_within_horizon},
                          {"stable_tail", v.stable_tail},
                          {"tail_min", v.tail_min},
                          {"tail_max", v.tail_max},
                          {"note", "finite-horizon heuristic, not a proof"}});
    summary["verdicts"] = std::move(verdicts);
    io::write_file(dir + "/covering_summary.json", summary.dump(2) + "\n");
    std::cout << "wrote covering profile to " << dir << "\n";
    return 0;
  }

  if (meas_cmd->parsed()) {
    ArithmeticMode mode = s_float ? ArithmeticMode::Float : ArithmeticMode::Exact;
    GradedGraph graph = make_graph(sg);
    auto dt = dims(graph, graph.depth());
    auto kernel = std::make_shared<CotransitionKernel>(cotransitions(graph, dt));

    CentralMeasure measure = [&] {
      if (!s_measure_file.empty()) return io::load_measure(s_measure_file, graph, *kernel);
      if (!s_bernoulli.empty()) {
        if (sg.family != "pascal")
          throw ValidationError("--bernoulli requires --family pascal");
        std::vector<Rat> probs;
        std::stringstream ss(s_bernoulli);
        std::string tok;
        while (std::getline(ss, tok, ',')) probs.push_back(parse_fraction(tok));
        if (probs.size() == 1 && sg.pascal_d == 2) probs.push_back(Rat(1) - probs[0]);
        return families::pascal_bernoulli(graph, sg.pascal_d, *kernel, probs);
      }
      throw ValidationError("measure: need --measure-file or --bernoulli");
    }();

    auto seq = run_iteration(graph, kernel, mode, s_cutoff, jobs_value(s_jobs), graph.depth());
    auto eps = parse_eps_list(s_eps);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (s_pairs.empty()) {
      std::size_t n = std::min<std::size_t>(2, graph.depth() - 1);
      pairs.emplace_back(std::max<std::size_t>(1, n), graph.depth());
    } else {
      std::stringstream ss(s_pairs);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw ValidationError("pairs: expected n:m");
        pairs.emplace_back(std::stoull(tok.substr(0, colon)), std::stoull(tok.substr(colon + 1)));
      }
    }

    MartingaleComparand comparand = s_comparand == "unconditional"
                                        ? MartingaleComparand::AgainstUnconditional
                                        : MartingaleComparand::PairwiseConditional;

    ExtremalityReport ext = extremality_check(measure, seq, eps, pairs);
    StandardnessProfile sp = standardness_distance_profile(measure, seq);
    ConcentrationProfile cp = concentration_profile(measure, seq, eps);
    MartingaleProfile mp = martingale_profile(measure, seq, comparand, s_sample, s_seed);

    std::string dir = out_dir(s_out);
    io::write_file(dir + "/extremality.csv", io::extremality_csv(ext));
    io::write_file(dir + "/standardness_profile.csv", io::standardness_csv(sp));
    io::write_file(dir + "/concentration_profile.csv", io::concentration_csv(cp));
    io::write_file(dir + "/martingale_profile.csv", io::martingale_csv(mp));

    json config = graph_config_json(sg);
    config["measure_file"] = s_measure_file;
    config["bernoulli"] = s_bernoulli;
    config["eps"] = s_eps;
    config["pairs"] = s_pairs;
    config["martingale_comparand"] = s_comparand;
    config["sample_size"] = s_sample;
    json verdict = base_report("measure", config, mode, graph.depth(), s_seed);
    verdict["note"] =
        "all verdicts are finite-horizon diagnostics at the stated depth, not limit statements";
    verdict["consistent_with_extremality"] = ext.consistent_with_extremality;
    verdict["consistent_with_extremality_internal"] = ext.consistent_with_extremality_internal;
    verdict["standardness_evidence"] = {
        {"distance_profile_decreasing", sp.decreasing_evidence},
        {"distance_trend_to_zero", sp.trend_to_zero},
        {"concentration_trend_to_one", cp.trend_to_one},
        {"martingale_decreasing", mp.decreasing_evidence}};
    io::write_file(dir + "/verdict.json", verdict.dump(2) + "\n");
    std::cout << "wrote measure diagnostics to " << dir << "\n";
    return 0;
  }

  if (fam_cmd->parsed()) {
    GradedGraph graph = make_graph(fg);
    json meta;
    meta["family"] = graph_config_json(fg);
    meta["tool_version"] = BRATTELI_VERSION;
    io::save_graph(graph, f_out_graph, meta);
    std::cout << "wrote " << f_out_graph << "\n";
    return 0;
  }

  if (rar_cmd->parsed()) {
    GradedGraph graph = make_graph(rg);
    std::vector<std::size_t> keep;
    std::stringstream ss(r_keep);
    std::string tok;
    while (std::getline(ss, tok, ',')) keep.push_back(std::stoull(tok));
    GradedGraph out = rarefy(graph, keep);
    json meta;
    meta["rarefied_from"] = graph_config_json(rg);
    meta["kept_levels"] = keep;
    meta["tool_version"] = BRATTELI_VERSION;
    io::save_graph(out, r_out_graph, meta);
    std::cout << "wrote " << r_out_graph << "\n";
    return 0;
  }
  return 0;
}

json error_json(int code, const std::string& kind, const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IncoherentMeasureError& e) {
    std::cout << error_json(3, "incoherent-measure", e.what()).dump(2) << "\n";
    return 3;
  } catch (const ResourceBoundError& e) {
    std::cout << error_json(4, "resource-bound", e.what()).dump(2) << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cout << error_json(2, "validation", e.what()).dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << error_json(2, "validation", e.what()).dump(2) << "\n";
    return 2;
  }
}
