// eda-lab: command-line front end for the transforms, simulators, oracle,
// calibration and experiment runner.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "eda/calibrate.hpp"
#include "eda/experiment.hpp"
#include "eda/infsim.hpp"
#include "eda/oracle.hpp"
#include "eda/tergm.hpp"
#include "eda/transforms.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace eda;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 1;
  bool seed_given = false;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in, nullptr, true, true);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

// Writes to --out when given, otherwise to stdout.
void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  std::ofstream(out) << text;
}

DyadTyper typer_from(const json& cfg, std::size_t nodes) {
  if (!cfg.contains("dyad_types")) return DyadTyper::homogeneous();
  const auto& t = cfg.at("dyad_types");
  auto labels = t.at("labels").get<std::vector<int>>();
  if (labels.size() != nodes) throw std::invalid_argument("dyad_types.labels needs one label per node");
  const auto kind = t.value("kind", std::string("match"));
  if (kind == "match") return DyadTyper::by_match(std::move(labels));
  if (kind == "pair") return DyadTyper::by_pair(std::move(labels));
  throw std::invalid_argument("dyad_types.kind must be match or pair");
}

Network initial_from(const json& cfg, std::size_t nodes, std::uint64_t seed) {
  Network net(nodes);
  if (cfg.contains("initial_edgelist")) {
    std::ifstream in(cfg.at("initial_edgelist").get<std::string>());
    if (!in) throw std::runtime_error("cannot open initial edge list");
    net = read_edgelist(in);
  } else if (cfg.contains("initial_density")) {
    Rng rng(derive_seed(seed, 99));
    net = bernoulli_network(nodes, cfg.at("initial_density").get<double>(), rng);
  }
  if (cfg.contains("attributes"))
    for (const auto& [name, values] : cfg.at("attributes").items()) net.set_attribute(name, values.get<std::vector<int>>());
  return net;
}

Model model_from(const json& cfg) {
  Model m(parse_terms(cfg.at("terms").get<std::string>()), cfg.at("coefs").get<std::vector<double>>());
  if (m.terms.size() != m.coefs.size()) throw std::invalid_argument("terms and coefs differ in length");
  return m;
}

std::vector<Term> monitored_from(const json& cfg, const Model& model) {
  if (cfg.contains("monitored")) return parse_terms(cfg.at("monitored").get<std::string>());
  return model.terms;
}

json summarize(const SimulationRecord& rec, const json& cfg, double duration_scale) {
  json means = json::object(), ses = json::object(), rel = json::object();
  std::vector<double> targets;
  if (cfg.contains("targets")) targets = cfg.at("targets").get<std::vector<double>>();
  for (std::size_t k = 0; k < rec.stat_names.size(); ++k) {
    const Estimate e = rec.estimate(k);
    means[rec.stat_names[k]] = e.mean;
    ses[rec.stat_names[k]] = e.se;
    if (k < targets.size() && targets[k] != 0) rel[rec.stat_names[k]] = (e.mean - targets[k]) / targets[k];
  }
  json durations = json::array();
  const auto report = mean_duration_estimates(rec);
  for (const auto& d : report.by_type)
    durations.push_back({{"type", d.type},
                         {"completed_mean", d.completed_mean / duration_scale},
                         {"hazard_inverse", d.hazard_inverse / duration_scale},
                         {"completed", d.completed},
                         {"censored", d.censored}});
  return {{"seed", rec.seed},
          {"means", means},
          {"standard_errors", ses},
          {"relative_errors", rel},
          {"durations", durations},
          {"duration_warnings", report.warnings},
          {"diagnostics", rec.diagnostics},
          {"config", cfg}};
}

void write_run(const fs::path& dir, const SimulationRecord& rec, const json& summary) {
  fs::create_directories(dir);
  std::ofstream stats(dir / "stats.csv");
  write_stats_csv(stats, rec);
  std::ofstream spells(dir / "spells.csv");
  write_spells_csv(spells, rec);
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
}

int cmd_transform(double theta, double duration, const std::string& variant_name, const Globals& g) {
  const Variant v = parse_variant(variant_name);
  const CoefficientPair c = transform(v, theta, duration);
  const json out{{"variant", to_string(v)},
                 {"theta", theta},
                 {"duration", duration},
                 {"theta_plus", c.theta_plus},
                 {"theta_minus", c.theta_minus},
                 {"formation_prob", expit(c.theta_plus)},
                 {"equilibrium_prob", approx_equilibrium(expit(theta), duration, v)}};
  emit(g.out, out.dump(2) + "\n");
  return 0;
}

int cmd_error_table(double duration, double step, const Globals& g) {
  std::ostringstream csv;
  csv.precision(12);
  csv << "p,err_old,err_new,crossover\n";
  const double cross = crossover_threshold(duration);
  const auto count = static_cast<int>(std::floor(1.0 / step - 1e-9));
  for (int i = 1; i <= count; ++i) {
    const double p = i * step;
    if (p >= 1.0) break;
    csv << p << "," << relative_error(p, duration, Variant::kOld) << ","
        << relative_error(p, duration, Variant::kNew) << "," << cross << "\n";
  }
  emit(g.out, csv.str());
  return 0;
}

int cmd_simulate_tergm(const std::string& config_path, const Globals& g) {
  json cfg = read_json(config_path);
  const auto nodes = cfg.at("nodes").get<std::size_t>();
  const Model model = model_from(cfg);
  const auto durations = cfg.at("durations").get<std::vector<double>>();
  const Variant v = parse_variant(cfg.value("variant", std::string("new")));
  const DyadTyper typer = typer_from(cfg, nodes);
  const Constraint constraint = Constraint::parse(cfg.value("constraint", std::string("none")));
  TergmSpec spec = v == Variant::kExact
                       ? TergmSpec::eda_exact(model, durations, cfg.at("type_logodds").get<std::vector<double>>(),
                                              typer, constraint)
                       : TergmSpec::eda(model, durations, v, typer, constraint);
  spec.proposals_per_phase = cfg.value("proposals_per_phase", std::size_t{0});
  const std::uint64_t seed = g.seed_given ? g.seed : cfg.value("seed", g.seed);
  const auto rec = simulate_tergm(spec, initial_from(cfg, nodes, seed), cfg.value("burn_in", std::size_t{0}),
                                  cfg.at("steps").get<std::size_t>(), monitored_from(cfg, model), seed);
  write_run(g.out.empty() ? fs::path("tergm-out") : fs::path(g.out), rec, summarize(rec, cfg, 1.0));
  return 0;
}

int cmd_simulate_r(const std::string& config_path, const Globals& g) {
  json cfg = read_json(config_path);
  const auto nodes = cfg.at("nodes").get<std::size_t>();
  const std::uint64_t seed = g.seed_given ? g.seed : cfg.value("seed", g.seed);
  RSpec spec;
  spec.model = model_from(cfg);
  spec.typer = typer_from(cfg, nodes);
  spec.constraint = Constraint::parse(cfg.value("constraint", std::string("none")));
  spec.duration_base = cfg.at("duration_base").get<std::vector<double>>();
  spec.proposal = parse_proposal(cfg.value("proposal", std::string("random_toggle")));
  if (cfg.contains("edge_bound")) spec.edge_bound = cfg.at("edge_bound").get<std::size_t>();
  Network initial = initial_from(cfg, nodes, seed);
  if (spec.proposal == ProposalKind::kTntAnalogue && !spec.edge_bound)
    throw std::invalid_argument("the tnt_analogue proposal needs edge_bound in the config");
  if (cfg.contains("odds_bound"))
    spec.odds_bound = cfg.at("odds_bound").get<double>();
  else if (spec.proposal == ProposalKind::kTntAnalogue)
    spec.odds_bound = estimate_odds_bound(spec.model, spec.constraint, initial,
                                          cfg.value("pilot_proposals", std::size_t{200000}), derive_seed(seed, 7));
  spec.lambda = cfg.contains("lambda") ? cfg.at("lambda").get<double>()
                                       : auto_lambda(spec, nodes, cfg.value("lambda_safety", 1.0));
  const auto rec = simulate_R(spec, std::move(initial), cfg.at("steps").get<std::size_t>(), monitored_from(cfg, spec.model),
                              seed, cfg.value("thin", std::size_t{1}), cfg.value("burn_in", std::size_t{0}));
  const fs::path dir = g.out.empty() ? fs::path("r-out") : fs::path(g.out);
  write_run(dir, rec, summarize(rec, cfg, spec.lambda));
  const json lambda{{"lambda", spec.lambda},
                    {"odds_bound", spec.odds_bound},
                    {"edge_bound", spec.edge_bound ? json(*spec.edge_bound) : json(nullptr)},
                    {"proposal", to_string(spec.proposal)},
                    {"max_acceptance_ratio", rec.diagnostics.at("max_acceptance_ratio")},
                    {"bound_hit_fraction", rec.diagnostics.at("bound_hit_fraction")}};
  std::ofstream(dir / "lambda.json") << lambda.dump(2) << "\n";
  return 0;
}

int cmd_oracle(const std::string& model_path, std::size_t nodes, const std::string& constraint,
               const std::string& lambdas, double duration_base, const Globals& g) {
  std::ifstream in(model_path);
  if (!in) throw std::runtime_error("cannot open " + model_path);
  const Model model = read_model(in);
  const StateSpace space(nodes, Constraint::parse(constraint));
  const json report =
      oracle_report(space, model, DurationSpec{{duration_base}, 1.0, DyadTyper::homogeneous()}, parse_list(lambdas));
  emit(g.out.empty() ? "report.json" : g.out, report.dump(2) + "\n");
  return 0;
}

int cmd_calibrate(const std::string& terms_text, const std::string& targets_text, std::size_t nodes, bool exact,
                  const std::string& constraint, const Globals& g) {
  const auto terms = parse_terms(terms_text);
  const auto targets = parse_list(targets_text);
  json out{{"terms", format_terms(terms)}, {"targets", targets}, {"nodes", nodes}, {"method", exact ? "exact" : "stochastic"}};
  try {
    if (exact) {
      const StateSpace space(nodes, Constraint::parse(constraint));
      const auto res = calibrate_exact(space, terms, targets);
      out["coefs"] = res.coefs;
      out["iterations"] = res.iterations;
      out["residual"] = res.residual;
    } else {
      StochasticOptions opt;
      opt.constraint = Constraint::parse(constraint);
      const auto res = calibrate_stochastic(terms, targets, nodes, opt, g.seed);
      out["coefs"] = res.coefs;
      out["iterations"] = res.iterations;
      out["kept_start"] = res.kept_start;
      out["rel_gaps"] = res.rel_gaps;
      json est = json::array();
      for (const auto& e : res.confirmation) est.push_back({{"mean", e.mean}, {"se", e.se}});
      out["confirmation"] = est;
    }
  } catch (const NonConvergence& e) {
    out["error"] = e.what();
    out["residual"] = e.residual;
    out["trace"] = e.trace;
    emit(g.out.empty() ? "coefs.json" : g.out, out.dump(2) + "\n");
    std::cerr << "calibration failed: " << e.what() << "\n";
    return 1;
  }
  emit(g.out.empty() ? "coefs.json" : g.out, out.dump(2) + "\n");
  return 0;
}

int cmd_experiment(const std::string& config_path, bool full_scale, const Globals& g, bool workers_given) {
  json j = config_path.empty() ? json::object() : read_json(config_path);
  ExperimentConfig cfg = config_from_json(j);
  if (full_scale) cfg.full_scale = true;
  if (g.seed_given) cfg.seed = g.seed;
  if (workers_given) cfg.workers = g.workers;
  const ErrorTable table = run_experiment(cfg);
  emit_plotdata(table, g.out.empty() ? fs::path("experiment-out") : fs::path(g.out));
  for (const auto& c : table.cells)
    if (c.failed) std::cerr << "failed cell (" << to_string(c.design) << ", " << c.variant << "): " << c.error << "\n";
  return table.any_failed() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edges dissolution approximation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--out", g.out, "Output file or directory");
  auto* workers_opt = app.add_option("--workers", g.workers, "Worker threads for experiment grids")->check(CLI::PositiveNumber);

  double theta = 0, duration = 0, step = 0.01, duration_base = 1.0;
  std::string variant = "new", config, model, constraint = "none", lambdas = "16,32,64,128", terms, targets;
  std::size_t nodes = 0;
  bool exact = false, full_scale = false, print_defaults = false;

  auto* transform_cmd = app.add_subcommand("transform", "EDA coefficients for one dyad");
  transform_cmd->add_option("--theta", theta, "Cross-sectional log-odds")->required();
  transform_cmd->add_option("--duration", duration, "Mean edge duration D")->required();
  transform_cmd->add_option("--variant", variant, "old, new or exact")->check(CLI::IsMember({"old", "new", "exact"}));

  auto* table_cmd = app.add_subcommand("error-table", "Relative equilibrium errors over a grid of p");
  table_cmd->add_option("--duration", duration, "Mean edge duration D")->required();
  table_cmd->add_option("--step", step, "Grid spacing in p")->check(CLI::Range(1e-6, 0.5));

  auto* tergm_cmd = app.add_subcommand("simulate-tergm", "Simulate a discrete-time EDA tergm");
  tergm_cmd->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);

  auto* r_cmd = app.add_subcommand("simulate-r", "Simulate the infinitesimal-time chain R");
  r_cmd->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);

  auto* oracle_cmd = app.add_subcommand("oracle", "Exact matrices and certificates on a small state space");
  oracle_cmd->add_option("--model", model, "Model file (term=<spec>, coef=<value> lines)")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--nodes", nodes, "Node count (2 to 6)")->required();
  oracle_cmd->add_option("--constraint", constraint, "none, max-degree(b) or min-degree(b)");
  oracle_cmd->add_option("--lambdas", lambdas, "Comma-separated ascending lambdas");
  oracle_cmd->add_option("--duration-base", duration_base, "Mean duration in natural units");

  auto* cal_cmd = app.add_subcommand("calibrate", "Fit coefficients to target statistics");
  cal_cmd->add_option("--terms", terms, "Terms, e.g. edges+degree(1)")->required();
  cal_cmd->add_option("--targets", targets, "Comma-separated targets")->required();
  cal_cmd->add_option("--nodes", nodes, "Node count")->required();
  cal_cmd->add_option("--constraint", constraint, "none, max-degree(b) or min-degree(b)");
  cal_cmd->add_flag("--exact", exact, "Newton on the enumerated state space (nodes <= 6)");

  auto* exp_cmd = app.add_subcommand("experiment", "Run a simulation design");
  exp_cmd->add_option("--config", config, "JSON config (defaults when omitted)")->check(CLI::ExistingFile);
  exp_cmd->add_flag("--full-scale", full_scale, "1000-node network with unscaled targets");

  auto* config_cmd = app.add_subcommand("config", "Experiment configuration helpers");
  config_cmd->add_flag("--print-defaults", print_defaults, "Print the default experiment config")->required();

  CLI11_PARSE(app, argc, argv);
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*transform_cmd) return cmd_transform(theta, duration, variant, g);
    if (*table_cmd) return cmd_error_table(duration, step, g);
    if (*tergm_cmd) return cmd_simulate_tergm(config, g);
    if (*r_cmd) return cmd_simulate_r(config, g);
    if (*oracle_cmd) return cmd_oracle(model, nodes, constraint, lambdas, duration_base, g);
    if (*cal_cmd) return cmd_calibrate(terms, targets, nodes, exact, constraint, g);
    if (*exp_cmd) return cmd_experiment(config, full_scale, g, workers_opt->count() > 0);
    if (*config_cmd) {
      emit(g.out, to_json(ExperimentConfig{}).dump(2) + "\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
