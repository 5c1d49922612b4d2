// twoforest: command-line front end.
//
//   twoforest stats   --input G --boundary b [--format csv] [--strict-paper]
//   twoforest verify  --input G --boundary b [--tolerance 1e-9] [--samples N]
//   twoforest sample  --input G --boundary b --stat mean_size [--args ...] --samples N --seed S
//   twoforest lattice --family square --n 16 --quantity ell-star
//   twoforest dual    --input map.json
//
// Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 verification failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twoforest/twoforest.hpp"

namespace {

using namespace twoforest;
using io::Json;

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kNumericalError = 3;
constexpr int kVerificationFailed = 4;

struct RunConfig {
  std::string command;
  std::string input;
  std::string boundary;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t workers = 0;
  std::string format = "json";
  bool strict_paper = false;
  double tolerance = 1e-9;
  // lattice
  std::string family = "square";
  std::size_t dim = 2;
  std::size_t n = 8;
  std::string quantity = "ell-star";
  std::vector<double> sides{1.0, 1.0};
  std::size_t truncation = 2001;
  std::vector<double> z{0.25, 0.5};
  std::vector<double> zp{0.75, 0.5};
  std::string map_out;
  // sample
  std::string stat = "mean_size";
  std::vector<std::string> args;
  std::string mode = "rejection";
  std::string emit = "summary";
  std::string output;
};

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (c.command == "lattice") {
    j["family"] = c.family;
    j["dim"] = c.dim;
    j["n"] = c.n;
    j["quantity"] = c.quantity;
    j["sides"] = c.sides;
    j["truncation"] = c.truncation;
    j["z"] = c.z;
    j["zp"] = c.zp;
  } else {
    j["input"] = c.input;
    j["boundary"] = c.boundary;
  }
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["workers"] = c.workers;
  j["format"] = c.format;
  j["strict_paper"] = c.strict_paper;
  j["tolerance"] = c.tolerance;
  if (c.command == "sample") {
    j["stat"] = c.stat;
    j["args"] = c.args;
    j["mode"] = c.mode;
    j["emit"] = c.emit;
  }
  return j;
}

ForestOptions forest_options(const RunConfig& c) {
  ForestOptions o;
  o.rule = c.strict_paper ? RatioRule::StrictPaper : RatioRule::Weighted;
  o.solver.workers = c.workers;
  return o;
}

Vertex resolve_vertex(const WeightedGraph& g, const std::string& name) {
  if (auto v = g.find_label(name)) return *v;
  throw Error(ErrorKind::InvalidVertex, "no vertex named '" + name + "'");
}

std::size_t parse_index(const std::string& text, const char* what) {
  std::size_t used = 0;
  std::size_t value = 0;
  try {
    value = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw Error(ErrorKind::ParseError, std::string("bad ") + what + " '" + text + "'");
  return value;
}

/// Writes either the JSON document or, for CSV, a config comment line
/// followed by the table.
class Output {
 public:
  explicit Output(const RunConfig& c) : config_(c) {}

  std::ostream& csv() { return table_; }

  int finish(const Json& results, int code = kOk) {
    std::string text;
    if (config_.format == "csv") {
      text = "# config: " + io::dump(config_json(config_), 0);
      text += table_.str();
    } else {
      Json doc;
      doc["config"] = config_json(config_);
      doc["results"] = results;
      text = io::dump(doc);
    }
    if (config_.output.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(config_.output, std::ios::binary);
      if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + config_.output + "'");
      out << text;
    }
    return code;
  }

 private:
  const RunConfig& config_;
  std::ostringstream table_;
};

// ---------------------------------------------------------------------------

int cmd_stats(const RunConfig& c) {
  const WeightedGraph g = io::load_graph(c.input, c.boundary);
  const ForestAnalyzer a(g, forest_options(c));
  const ForestStatistics s = a.statistics();
  Output out(c);

  Json stats{{"vertices", g.vertex_count()},
             {"edges", g.edge_count()},
             {"boundary", g.label(g.boundary())},
             {"ratio_k2_k", s.ratio_k2_k},
             {"log_kappa", s.log_kappa},
             {"log_kappa2", s.log_kappa2},
             {"ell_star", s.ell_star},
             {"mean_size", s.mean_size},
             {"second_moment", s.second_moment},
             {"mean_resistance", s.mean_resistance},
             {"hitting_sum", s.hitting_sum}};
  Json records = Json::array();
  auto record = [&](const char* quantity, double value, const char* formula) {
    records.push_back({{"quantity", quantity}, {"value", value}, {"formula_id", formula}});
  };
  record("ratio_k2_k", s.ratio_k2_k, c.strict_paper ? "potential_kernel_sum_unweighted" : "potential_kernel_sum");
  record("log_kappa", s.log_kappa, "cholesky_log_det");
  record("ell_star", s.ell_star, "vertices_minus_one_over_ratio");
  record("mean_size", s.mean_size, "green_trace_over_ratio");
  record("second_moment", s.second_moment, "green_sum_over_ratio");
  record("mean_resistance", s.mean_resistance, "green_trace_over_vertices");
  record("hitting_sum", s.hitting_sum, "green_sum_over_vertices");

  Json vertices = Json::array();
  out.csv() << "vertex,label,prob_in_sigma,pinned_mean_size\n";
  io::CsvWriter csv(out.csv());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (v == g.boundary()) {
      vertices.push_back({{"id", v}, {"label", g.label(v)}, {"prob_in_sigma", 0.0}, {"pinned_mean_size", nullptr}});
      csv.row(v, g.label(v), 0.0, std::string());
      continue;
    }
    const double p = a.prob_in_sigma(v);
    const double pinned = a.pinned_mean_size(v);
    vertices.push_back({{"id", v}, {"label", g.label(v)}, {"prob_in_sigma", p}, {"pinned_mean_size", pinned}});
    csv.row(v, g.label(v), p, pinned);
  }
  Json edges = Json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    edges.push_back({{"id", e},
                     {"u", g.label(edge.u)},
                     {"v", g.label(edge.v)},
                     {"c", edge.c},
                     {"transfer_current", a.edge_transfer(e)},
                     {"prob_edge_separates", a.prob_edge_separates(e)}});
  }
  return out.finish({{"statistics", stats}, {"records", records}, {"vertices", vertices}, {"edges", edges}});
}

// ---------------------------------------------------------------------------

int cmd_verify(const RunConfig& c) {
  const WeightedGraph g = io::load_graph(c.input, c.boundary);
  const ExactCensus census = enumerate(g);
  const ForestAnalyzer a(g, forest_options(c));
  Output out(c);
  io::CsvWriter csv(out.csv());
  csv.header({"statistic", "args", "formula", "oracle", "abs_error", "pass"});

  Json rows = Json::array();
  bool all_pass = true;
  auto compare = [&](StatisticId id, std::vector<std::size_t> args) {
    const double formula = formula_statistic(a, id, args);
    const double oracle = to_double(exact_statistic(census, id, args));
    const double error = std::abs(formula - oracle);
    const bool pass = error <= c.tolerance * std::max(1.0, std::abs(oracle));
    all_pass = all_pass && pass;
    std::string label;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const bool edge_arg = id == StatisticId::ProbEdgeSeparates;
      label += (i ? " " : "") + (edge_arg ? "e" + std::to_string(args[i]) : g.label(args[i]));
    }
    rows.push_back({{"statistic", std::string(to_string(id))},
                    {"args", label},
                    {"formula", formula},
                    {"oracle", oracle},
                    {"abs_error", error},
                    {"pass", pass}});
    csv.row(std::string(to_string(id)), label, formula, oracle, error, std::string(pass ? "true" : "false"));
  };

  const Vertex b = g.boundary();
  for (StatisticId id : kAllStatistics) {
    switch (statistic_arity(id)) {
      case 0: compare(id, {}); break;
      case 1:
        if (id == StatisticId::ProbEdgeSeparates) {
          for (EdgeId e = 0; e < g.edge_count(); ++e) compare(id, {e});
        } else {
          for (Vertex u = 0; u < g.vertex_count(); ++u)
            if (u != b) compare(id, {u});
        }
        break;
      case 2:
        for (Vertex u = 0; u < g.vertex_count(); ++u) {
          if (u == b) continue;
          if (id == StatisticId::ProbPair) {
            for (Vertex v = u; v < g.vertex_count(); ++v)
              if (v != b) compare(id, {u, v});
          } else {
            for (Vertex v = 0; v < g.vertex_count(); ++v) compare(id, {v, u});
          }
        }
        break;
    }
  }

  Json sampler = Json::array();
  if (c.samples > 0 && g.vertex_count() >= 2) {
    SamplerOptions options{c.seed, c.workers};
    std::map<std::vector<EdgeId>, std::size_t> forest_index;
    std::vector<double> forest_probs;
    for (const CensusForest& f : census.two_forests) {
      forest_index.emplace(f.edges, forest_probs.size());
      forest_probs.push_back(to_double(f.weight / census.kappa2));
    }
    std::vector<std::size_t> which(c.samples);
    for_each_two_forest(g, c.samples, options,
                        [&](std::size_t i, const TwoForest& f, std::size_t) { which[i] = forest_index.at(f.edges); });
    std::vector<std::size_t> forest_counts(forest_probs.size(), 0);
    for (std::size_t k : which) ++forest_counts[k];

    std::map<std::vector<EdgeId>, std::size_t> tree_index;
    std::vector<double> tree_probs;
    for (const CensusTree& t : census.trees) {
      tree_index.emplace(t.edges, tree_probs.size());
      tree_probs.push_back(to_double(t.weight / census.kappa));
    }
    const std::size_t blocks = (c.samples + kSampleBlock - 1) / kSampleBlock;
    detail::parallel_for(blocks, c.workers, [&](std::size_t block) {
      WilsonSampler sampler(g);
      Rng rng = make_stream(c.seed ^ 0x7ee5u, block);
      for (std::size_t i = block * kSampleBlock; i < std::min(c.samples, (block + 1) * kSampleBlock); ++i)
        which[i] = tree_index.at(sampler.sample_tree(rng).edges);
    });
    std::vector<std::size_t> tree_counts(tree_probs.size(), 0);
    for (std::size_t k : which) ++tree_counts[k];

    auto add = [&](const char* name, const ChiSquareResult& r) {
      const bool pass = r.p_value >= 1e-3;
      all_pass = all_pass && pass;
      sampler.push_back({{"test", name},
                         {"chi_square", r.statistic},
                         {"dof", r.dof},
                         {"p_value", r.p_value},
                         {"pass", pass}});
      csv.row(std::string(name), std::string("chi2 dof=") + std::to_string(r.dof), r.statistic, r.p_value, 0.0,
              std::string(pass ? "true" : "false"));
    };
    add("two_forest_distribution", chi_square_gof(forest_counts, forest_probs));
    add("spanning_tree_distribution", chi_square_gof(tree_counts, tree_probs));
  }

  Json results{{"trees", census.trees.size()},
               {"two_forests", census.two_forests.size()},
               {"kappa_exact", census.kappa.str()},
               {"kappa2_exact", census.kappa2.str()},
               {"all_pass", all_pass},
               {"rows", rows}};
  if (!sampler.empty()) results["sampler"] = sampler;
  return out.finish(results, all_pass ? kOk : kVerificationFailed);
}

// ---------------------------------------------------------------------------

int cmd_sample(const RunConfig& c) {
  const WeightedGraph g = io::load_graph(c.input, c.boundary);
  if (c.samples == 0) throw Error(ErrorKind::ParseError, "--samples must be at least 1");
  SampleRequest req{parse_sample_statistic(c.stat), {}};
  for (const std::string& arg : c.args) {
    if (req.kind == SampleStatistic::SizeMoment) req.args.push_back(parse_index(arg, "moment order"));
    else if (req.kind == SampleStatistic::EdgeSeparates) req.args.push_back(parse_index(arg, "edge id"));
    else req.args.push_back(resolve_vertex(g, arg));
  }
  validate(g, req);
  if (c.mode != "rejection" && c.mode != "importance")
    throw Error(ErrorKind::ParseError, "--mode must be rejection or importance");
  const EstimatorMode mode = c.mode == "importance" ? EstimatorMode::Importance : EstimatorMode::Rejection;
  const SamplerOptions options{c.seed, c.workers};
  Output out(c);

  if (c.emit == "samples") {
    struct Row {
      std::size_t size;
      double boundary;
      std::size_t attempts;
      double weight;
      double value;
    };
    std::vector<Row> rows(c.samples);
    if (mode == EstimatorMode::Rejection) {
      for_each_two_forest(g, c.samples, options, [&](std::size_t i, const TwoForest& f, std::size_t attempts) {
        rows[i] = {f.floating.size(), f.boundary_conductance, attempts, 1.0, evaluate(req, f)};
      });
    } else {
      for_each_proposal(g, c.samples, options, [&](std::size_t i, const TwoForest& f) {
        rows[i] = {f.floating.size(), f.boundary_conductance, 1, 1.0 / f.boundary_conductance, evaluate(req, f)};
      });
    }
    io::CsvWriter csv(out.csv());
    csv.header({"sample", "sigma_size", "boundary_conductance", "attempts", "weight", "value"});
    Json list = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      csv.row(i, r.size, r.boundary, r.attempts, r.weight, r.value);
      list.push_back({r.size, r.boundary, r.attempts, r.weight, r.value});
    }
    return out.finish({{"columns", {"sigma_size", "boundary_conductance", "attempts", "weight", "value"}},
                       {"samples", list}});
  }
  if (c.emit != "summary") throw Error(ErrorKind::ParseError, "--emit must be summary or samples");

  const Estimate e = estimate(g, req, c.samples, options, mode);
  io::CsvWriter csv(out.csv());
  csv.header({"stat", "mean", "stderr", "samples", "proposals", "acceptance_rate"});
  csv.row(c.stat, e.mean, e.stderr_, e.samples, e.proposals, e.acceptance_rate);
  return out.finish({{"stat", c.stat},
                     {"mean", e.mean},
                     {"stderr", e.stderr_},
                     {"samples", e.samples},
                     {"proposals", e.proposals},
                     {"acceptance_rate", e.acceptance_rate}});
}

// ---------------------------------------------------------------------------

int cmd_lattice(const RunConfig& c) {
  Output out(c);
  io::CsvWriter csv(out.csv());
  SolverOptions solver;
  solver.workers = c.workers;
  const std::string& q = c.quantity;
  Json r;

  if (q == "ell-star" || q == "ell-star-limit") {
    const LatticeFamily family = parse_family(c.family);
    const Rational limit = ell_star_periodic(family, c.dim);
    r["family"] = c.family;
    r["ell_star_limit"] = to_double(limit);
    r["ell_star_limit_exact"] = limit.str();
    if (q == "ell-star") {
      const Lattice lattice = build_lattice({family, c.dim, c.n});
      r["vertices"] = lattice.graph.vertex_count();
      r["ell_star"] = ell_star_finite(lattice.graph, solver);
    }
  } else if (q == "ratio") {
    r["n"] = c.n;
    r["ratio_over_n2"] = grid_ratio_check(c.n, solver);
    r["limit"] = 0.125;
  } else if (q == "Rn") {
    r["dim"] = c.dim;
    r["n"] = c.n;
    r["R_n"] = R_n_eigensum(c.dim, c.n);
  } else if (q == "Rstar") {
    const QuadratureResult rs = R_star(c.dim);
    r["dim"] = c.dim;
    r["R_star"] = rs.value;
    r["error_estimate"] = rs.error_estimate;
  } else if (q == "wired-trace") {
    const std::size_t side = 2 * c.n - 1;
    r["dim"] = c.dim;
    r["n"] = c.n;
    r["side"] = side;
    r["mean_trace"] = wired_box_mean_trace(c.dim, side);
  } else if (q == "CD") {
    const SeriesResult s = C_of_D(c.sides, c.truncation);
    r["sides"] = c.sides;
    r["truncation"] = c.truncation;
    r["C"] = s.value;
    r["tail_bound"] = s.tail_bound;
  } else if (q == "green-scaling") {
    if (c.z.size() != 2 || c.zp.size() != 2) throw Error(ErrorKind::ParseError, "--z and --zp take two coordinates");
    const ScalingCheck s = green_scaling_check(c.n, {c.z[0], c.z[1]}, {c.zp[0], c.zp[1]}, solver);
    r["n"] = c.n;
    r["lhs"] = s.lhs;
    r["rhs"] = s.rhs;
    r["ratio"] = s.lhs / s.rhs;
  } else if (q == "moments") {
    const Lattice box = build_domain_box(c.sides, c.n);
    const SizeMoments m = ForestAnalyzer(box.graph, {RatioRule::Weighted, solver}).size_moments();
    double area = 1.0;
    for (double a : c.sides) area *= a;
    const double d = static_cast<double>(c.sides.size());
    const double cd = C_of_D(c.sides, c.truncation).value;
    const double n2 = static_cast<double>(c.n) * static_cast<double>(c.n);
    r["n"] = c.n;
    r["mean_size"] = m.mean;
    r["second_moment"] = m.second_moment;
    r["C"] = cd;
    r["second_moment_over_C_area_n2"] = m.second_moment / (cd * area * n2);
    r["predicted_limit"] = 4.0 * d;
    if (c.sides.size() == 2) r["mean_over_4logn_over_pi"] = m.mean / (4.0 * std::log(double(c.n)) / std::numbers::pi);
  } else if (q == "map" || q == "grid-map") {
    const Lattice lattice = q == "map" ? build_lattice({parse_family(c.family), 2, c.n}) : build_grid_map(c.n);
    if (!lattice.map) throw Error(ErrorKind::UnsupportedFamily, "no planar map for this lattice");
    const Json map = io::map_to_json(*lattice.map);
    if (!c.map_out.empty()) {
      std::ofstream f(c.map_out, std::ios::binary);
      if (!f) throw Error(ErrorKind::ParseError, "cannot write '" + c.map_out + "'");
      f << io::dump(map);
    }
    r["vertices"] = lattice.graph.vertex_count();
    r["edges"] = lattice.graph.edge_count();
    r["faces"] = lattice.map->face_count();
    r["map"] = map;
  } else {
    throw Error(ErrorKind::ParseError, "unknown quantity '" + q + "'");
  }

  csv.header({"quantity", "value"});
  for (auto it = r.begin(); it != r.end(); ++it)
    if (it.value().is_number()) csv.row(it.key(), it.value().get<double>());
  return out.finish(r);
}

// ---------------------------------------------------------------------------

int cmd_dual(const RunConfig& c) {
  const PlanarEmbedding map = io::load_map(c.input);
  SolverOptions solver;
  solver.workers = c.workers;
  const UnicycleAnalyzer analyzer(map, solver);
  const UnicycleStatistics s = analyzer.statistics();
  const WeightedGraph& g = map.graph();
  Output out(c);
  io::CsvWriter csv(out.csv());
  csv.header({"face", "outer", "enclosure_probability"});

  Json faces = Json::array();
  for (std::size_t f = 0; f < map.face_count(); ++f) {
    const bool outer = f == map.outer_face();
    faces.push_back({{"face", f}, {"outer", outer}, {"darts", map.face(f)}, {"enclosure_probability", s.face_enclosure[f]}});
    csv.row(f, std::string(outer ? "true" : "false"), s.face_enclosure[f]);
  }
  Json edges = Json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    edges.push_back({{"edge", e},
                     {"u", g.edge(e).u},
                     {"v", g.edge(e).v},
                     {"c", g.edge(e).c},
                     {"cycle_probability", s.cycle_edge_prob[e]},
                     {"cycle_probability_primal", s.cycle_edge_prob_primal[e]}});
  }
  return out.finish({{"vertices", g.vertex_count()},
                     {"edges_count", g.edge_count()},
                     {"faces_count", map.face_count()},
                     {"outer_face", map.outer_face()},
                     {"log_kappa", s.log_kappa},
                     {"log_lambda", s.log_lambda},
                     {"mean_area", s.mean_area},
                     {"second_moment_area", s.second_moment_area},
                     {"faces", faces},
                     {"edges", edges}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact statistics and sampling of two-component spanning forests"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", c.workers, "worker threads (0 = all cores)");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", c.output, "write to this file instead of stdout");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--samples", c.samples, "Monte Carlo sample count");
    sub->add_flag("--strict-paper", c.strict_paper, "use the unweighted kernel sum for kappa2/kappa");
    sub->add_option("--tolerance", c.tolerance, "relative tolerance for verification");
  };
  auto add_graph = [&](CLI::App* sub) {
    sub->add_option("--input", c.input, "edge list or JSON graph")->required();
    sub->add_option("--boundary", c.boundary, "boundary vertex (label; vertex id for JSON input)");
  };

  auto* stats = app.add_subcommand("stats", "closed-form forest statistics");
  add_graph(stats);
  add_common(stats);
  auto* verify = app.add_subcommand("verify", "closed forms against brute-force enumeration");
  add_graph(verify);
  add_common(verify);
  auto* sample = app.add_subcommand("sample", "Monte Carlo estimates from exact forest samples");
  add_graph(sample);
  add_common(sample);
  sample->add_option("--stat", c.stat, "statistic to estimate");
  sample->add_option("--args", c.args, "statistic arguments (vertex labels, edge id or moment order)");
  sample->add_option("--mode", c.mode, "rejection or importance");
  sample->add_option("--emit", c.emit, "summary or samples");
  auto* lattice = app.add_subcommand("lattice", "lattice generators and asymptotic constants");
  add_common(lattice);
  lattice->add_option("--family", c.family, "cubic, square, triangular, hexagonal");
  lattice->add_option("--dim", c.dim, "dimension (cubic family, R_n, R*)");
  lattice->add_option("--n", c.n, "size");
  lattice->add_option("--quantity", c.quantity,
                      "ell-star, ell-star-limit, ratio, Rn, Rstar, wired-trace, CD, green-scaling, moments, map, grid-map");
  lattice->add_option("--sides", c.sides, "cuboid side lengths");
  lattice->add_option("--truncation", c.truncation, "largest odd index in the cuboid series");
  lattice->add_option("--z", c.z, "first point in the unit square");
  lattice->add_option("--zp", c.zp, "second point in the unit square");
  lattice->add_option("--map-out", c.map_out, "also write the planar map JSON here");
  auto* dual = app.add_subcommand("dual", "spanning-unicycle statistics of a planar map");
  dual->add_option("--input", c.input, "planar map JSON")->required();
  add_common(dual);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.workers == 0) c.workers = detail::default_workers();

  try {
    if (c.command == "stats") return cmd_stats(c);
    if (c.command == "verify") return cmd_verify(c);
    if (c.command == "sample") return cmd_sample(c);
    if (c.command == "lattice") return cmd_lattice(c);
    if (c.command == "dual") return cmd_dual(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical(e.kind()) ? kNumericalError : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kInputError;
}
