#include "hybridode/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "hybridode/errors.hpp"
#include "hybridode/format.hpp"
#include "hybridode/hybrid.hpp"
#include "hybridode/kernels.hpp"
#include "hybridode/neuralnet.hpp"
#include "hybridode/problems.hpp"

#ifndef HYBRIDODE_VERSION
#define HYBRIDODE_VERSION "dev"
#endif

namespace hybridode::cli {

namespace {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "decay";
  std::optional<double> dt;
  std::optional<double> horizon;
  std::string method = "euler";
  std::uint64_t seed = 0;
  std::string out = "-";
  bool no_cfl_check = false;
  std::size_t paths = 1;
  HeatConfig heat;
  double sigma = 0.1;

  // train
  std::string trainer = "es";
  EsConfig es;
  SgdConfig sgd;
  std::string train_source = "euler";
  std::string target = "state";
  std::size_t hidden = kDefaultHiddenWidth;
  std::string history;

  // rollout / hybrid / compare
  std::string model;
  std::string reference = "euler";
  std::string mode = "net";
};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double default_dt(const std::string& problem) { return problem == "sde" ? 0.01 : 0.05; }

double step_of(const RunConfig& cfg) { return cfg.dt.value_or(default_dt(cfg.problem)); }

IvpProblem make_problem(const RunConfig& cfg) {
  IvpProblem p = [&] {
    if (cfg.problem == "decay") return linear_decay_forced();
    if (cfg.problem == "heat") return heat_mol(cfg.heat);
    if (cfg.problem == "sde") return scalar_sde(kDecayRate, cfg.sigma, 1.0, 1.0).base;
    throw ConfigError("unknown problem '" + cfg.problem + "' (expected decay, heat or sde)");
  }();
  if (cfg.horizon) {
    if (!(*cfg.horizon > 0.0)) throw ConfigError("--horizon must be positive");
    p.horizon = *cfg.horizon;
  }
  return p;
}

Provenance base_provenance(const RunConfig& cfg, const std::string& command, const std::string& method) {
  Provenance prov{{"seed", std::to_string(cfg.seed)},
                  {"dt", shortest(step_of(cfg))},
                  {"method", method},
                  {"version", HYBRIDODE_VERSION},
                  {"command", command},
                  {"problem", cfg.problem}};
  if (cfg.horizon) prov.emplace_back("horizon", shortest(*cfg.horizon));
  if (cfg.problem == "heat") {
    prov.emplace_back("D", shortest(cfg.heat.diffusivity));
    prov.emplace_back("dx", shortest(cfg.heat.dx));
    prov.emplace_back("domain", shortest(cfg.heat.x_lo) + ":" + shortest(cfg.heat.x_hi));
  }
  return prov;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("failed writing '" + path + "'");
}

FeedForwardNet read_model(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open model file '" + path + "'");
  return load_net(f);
}

void check_model_for(const FeedForwardNet& net, const IvpProblem& p) {
  const std::size_t in = p.dim() + p.input_dim();
  if (net.input_dim() != in || net.output_dim() != p.dim()) {
    throw DimensionError("model maps " + std::to_string(net.input_dim()) + " -> " + std::to_string(net.output_dim()) +
                         " but problem " + p.name + " needs " + std::to_string(in) + " -> " +
                         std::to_string(p.dim()));
  }
}

Trajectory reference_trajectory(const IvpProblem& p, const RunConfig& cfg, const std::string& kind) {
  if (kind == "euler") {
    return integrate(p, StepConfig{.dt = step_of(cfg), .method = Method::euler, .cfl_check = !cfg.no_cfl_check});
  }
  if (kind == "analytic") return exact_trajectory(p, step_of(cfg));
  throw ConfigError("unknown reference '" + kind + "' (expected euler or analytic)");
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Method method = parse_method(cfg.method);
  const StepConfig step{.dt = step_of(cfg), .method = method, .cfl_check = !cfg.no_cfl_check, .seed = cfg.seed};
  Provenance prov = base_provenance(cfg, "solve", std::string(method_name(method)));
  std::ostringstream os;

  if (method == Method::euler_maruyama) {
    if (cfg.problem != "sde") throw ConfigError("method em needs --problem sde");
    SdeProblem sde = scalar_sde(kDecayRate, cfg.sigma, 1.0, cfg.horizon.value_or(1.0));
    prov.emplace_back("sigma", shortest(cfg.sigma));
    prov.emplace_back("paths", std::to_string(cfg.paths));
    if (cfg.paths == 0) throw ConfigError("--paths must be at least 1");
    if (cfg.paths == 1) {
      write_trajectory_csv(os, integrate(sde, step), prov);
    } else {
      const auto paths = kernels::em_paths_parallel(sde, step, cfg.paths);
      write_ensemble_csv(os, ensemble_moments(paths), prov);
    }
  } else {
    if (cfg.problem == "sde") throw ConfigError("problem sde is solved with --method em");
    const IvpProblem p = make_problem(cfg);
    const Trajectory traj = integrate(p, step);
    write_trajectory_csv(os, traj, prov);
    if (p.exact) {
      const double exact_end = p.exact(traj.times.back()).front();
      err << "endpoint error vs closed form (component 1): "
          << std::abs(traj.states.back().front() - exact_end) << '\n';
    }
  }
  emit(cfg.out, os.str(), out);
  return kOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out.empty() || cfg.out == "-") throw ConfigError("train needs --out <model file>");
  const IvpProblem p = make_problem(cfg);
  const double dt = step_of(cfg);
  const Trajectory traj = reference_trajectory(p, cfg, cfg.train_source);
  const DataSource source = cfg.train_source == "analytic" ? DataSource::analytic : DataSource::numerical;

  Dataset ds;
  if (cfg.target == "state") {
    ds = make_dataset(traj, p.input, source);
  } else if (cfg.target == "residual") {
    ds = make_residual_dataset(p, traj, dt, source);
  } else {
    throw ConfigError("unknown --target '" + cfg.target + "' (expected state or residual)");
  }
  const std::vector<std::size_t> dims{ds.input_dim(), cfg.hidden, ds.target_dim()};

  Provenance prov = base_provenance(cfg, "train", cfg.trainer);
  prov.emplace_back("train_source", cfg.train_source);
  prov.emplace_back("target", cfg.target);
  prov.emplace_back("hidden", std::to_string(cfg.hidden));

  FeedForwardNet net = make_net(dims);
  std::vector<double> history;
  if (cfg.trainer == "es") {
    EsConfig es = cfg.es;
    es.seed = cfg.seed;
    prov.emplace_back("population", std::to_string(es.population));
    prov.emplace_back("iters", std::to_string(es.iterations));
    prov.emplace_back("noise", shortest(es.noise_scale));
    EsResult r = train_es(ds, dims, es);
    net = std::move(r.best);
    history = std::move(r.history);
  } else if (cfg.trainer == "sgd") {
    SgdConfig sgd = cfg.sgd;
    sgd.seed = cfg.seed;
    prov.emplace_back("lr", shortest(sgd.learning_rate));
    prov.emplace_back("epochs", std::to_string(sgd.epochs));
    SgdResult r = train_sgd(ds, init_weights(dims, cfg.seed), sgd);
    net = std::move(r.net);
    history = std::move(r.history);
  } else {
    throw ConfigError("unknown --trainer '" + cfg.trainer + "' (expected es or sgd)");
  }

  emit(cfg.out, to_text(net), out);
  if (!cfg.history.empty()) {
    std::ostringstream os;
    write_history_csv(os, history, prov);
    emit(cfg.history, os.str(), out);
  }
  err << "trained " << cfg.trainer << " on " << ds.size() << " samples, final mse " << format_real(mse(net, ds))
      << '\n';
  return kOk;
}

int cmd_rollout(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const IvpProblem p = make_problem(cfg);
  const FeedForwardNet net = read_model(cfg.model);
  check_model_for(net, p);
  const Trajectory traj = rollout(net, p.y0, p.input, step_of(cfg), p.horizon);
  std::ostringstream os;
  write_trajectory_csv(os, traj, base_provenance(cfg, "rollout", "net"));
  emit(cfg.out, os.str(), out);
  return kOk;
}

int cmd_hybrid(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const IvpProblem p = make_problem(cfg);
  const HybridStepper h = HybridStepper::for_problem(p, read_model(cfg.model), step_of(cfg));
  const Trajectory traj = hybrid_rollout(h, p.y0, p.input, p.horizon);
  std::ostringstream os;
  write_trajectory_csv(os, traj, base_provenance(cfg, "hybrid", "hybrid"));
  emit(cfg.out, os.str(), out);
  return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const IvpProblem p = make_problem(cfg);
  const FeedForwardNet net = read_model(cfg.model);
  check_model_for(net, p);
  const double dt = step_of(cfg);

  StepReport report;
  if (cfg.mode == "net") {
    Trajectory reference = cfg.reference == "self" ? rollout(net, p.y0, p.input, dt, p.horizon)
                                                   : reference_trajectory(p, cfg, cfg.reference);
    report = validate(net, reference, p.input);
  } else if (cfg.mode == "hybrid") {
    const HybridStepper h = HybridStepper::for_problem(p, net, dt);
    const Trajectory predicted = hybrid_rollout(h, p.y0, p.input, p.horizon);
    const Trajectory reference = cfg.reference == "self" ? predicted : reference_trajectory(p, cfg, cfg.reference);
    report = compare_trajectories(reference, predicted);
  } else {
    throw ConfigError("unknown --mode '" + cfg.mode + "' (expected net or hybrid)");
  }

  Provenance prov = base_provenance(cfg, "compare", cfg.mode);
  prov.emplace_back("reference", cfg.reference);
  std::ostringstream os;
  write_report_csv(os, report, prov);
  emit(cfg.out, os.str(), out);
  err << "mse " << format_real(report.mse) << ", max error " << format_real(report.max_error) << ", runtime "
      << report.runtime_ms << " ms\n";
  return kOk;
}

void add_problem_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--problem", cfg.problem, "decay | heat | sde")->check(CLI::IsMember({"decay", "heat", "sde"}));
  sub->add_option("--dt", cfg.dt, "time step (default 0.05; 0.01 for sde)");
  sub->add_option("--horizon", cfg.horizon, "override the problem's final time");
  sub->add_option("--seed", cfg.seed, "seed for every random draw");
  sub->add_option("--out", cfg.out, "output file ('-' for stdout)");
  sub->add_option("--diffusivity", cfg.heat.diffusivity, "heat: D");
  sub->add_option("--x-lo", cfg.heat.x_lo, "heat: left domain end");
  sub->add_option("--x-hi", cfg.heat.x_hi, "heat: right domain end");
  sub->add_option("--dx", cfg.heat.dx, "heat: spatial step");
  sub->add_option("--sigma", cfg.sigma, "sde: noise amplitude");
  sub->add_flag("--no-cfl-check", cfg.no_cfl_check, "skip the explicit-Euler step bound check");
}

}  // namespace

std::string provenance_line(const Provenance& fields) {
  std::string line = "#";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    line += i ? ", " : " ";
    line += fields[i].first + "=" + fields[i].second;
  }
  return line;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Provenance& prov) {
  os << provenance_line(prov) << '\n' << 't';
  for (std::size_t i = 0; i < traj.dim(); ++i) os << ",y_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_real(traj.times[k]);
    for (double v : traj.states[k]) os << ',' << format_real(v);
    os << '\n';
  }
}

void write_ensemble_csv(std::ostream& os, const EnsembleMoments& moments, const Provenance& prov) {
  os << provenance_line(prov) << '\n' << 't';
  const std::size_t m = moments.mean.dim();
  for (std::size_t i = 0; i < m; ++i) os << ",mean_" << i + 1;
  for (std::size_t i = 0; i < m; ++i) os << ",std_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < moments.mean.size(); ++k) {
    os << format_real(moments.mean.times[k]);
    for (double v : moments.mean.states[k]) os << ',' << format_real(v);
    for (double v : moments.stddev.states[k]) os << ',' << format_real(v);
    os << '\n';
  }
}

void write_history_csv(std::ostream& os, const std::vector<double>& history, const Provenance& prov) {
  os << provenance_line(prov) << "\niteration,best_mse\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << i + 1 << ',' << format_real(history[i]) << '\n';
}

void write_report_csv(std::ostream& os, const StepReport& report, const Provenance& prov) {
  os << provenance_line(prov) << '\n' << 't';
  const std::size_t m = report.rows.empty() ? 0 : report.rows.front().reference.size();
  for (std::size_t i = 0; i < m; ++i) os << ",ref_" << i + 1;
  for (std::size_t i = 0; i < m; ++i) os << ",pred_" << i + 1;
  os << ",abs_err\n";
  for (const auto& row : report.rows) {
    os << format_real(row.t);
    for (double v : row.reference) os << ',' << format_real(v);
    for (double v : row.predicted) os << ',' << format_real(v);
    os << ',' << format_real(row.abs_error) << '\n';
  }
  os << "# summary mse=" << format_real(report.mse) << ", max_err=" << format_real(report.max_error) << '\n';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid classical / neural ODE solvers and experiments", "hybridode"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* solve = app.add_subcommand("solve", "integrate a problem with a classical scheme");
  add_problem_flags(solve, cfg);
  solve->add_option("--method", cfg.method, "euler | exp-split | strang | em")
      ->check(CLI::IsMember({"euler", "exp-split", "strang", "em"}));
  solve->add_option("--paths", cfg.paths, "em: ensemble size (writes mean/std when > 1)");

  auto* train = app.add_subcommand("train", "train a network surrogate and write the model");
  add_problem_flags(train, cfg);
  train->add_option("--trainer", cfg.trainer, "es | sgd")->check(CLI::IsMember({"es", "sgd"}));
  train->add_option("--population", cfg.es.population, "ES population size");
  train->add_option("--iters", cfg.es.iterations, "ES iterations");
  train->add_option("--noise", cfg.es.noise_scale, "ES noise scale");
  train->add_option("--lr", cfg.sgd.learning_rate, "SGD learning rate");
  train->add_option("--epochs", cfg.sgd.epochs, "SGD epochs");
  train->add_option("--train-source", cfg.train_source, "euler | analytic")
      ->check(CLI::IsMember({"euler", "analytic"}));
  train->add_option("--target", cfg.target, "state (next state) | residual (hybrid correction)")
      ->check(CLI::IsMember({"state", "residual"}));
  train->add_option("--hidden", cfg.hidden, "hidden layer width");
  train->add_option("--history", cfg.history, "write the training history CSV here");

  auto* roll = app.add_subcommand("rollout", "free-running network prediction");
  add_problem_flags(roll, cfg);
  roll->add_option("--model", cfg.model, "model file")->required();

  auto* hybrid = app.add_subcommand("hybrid", "exponential propagator plus learned correction");
  add_problem_flags(hybrid, cfg);
  hybrid->add_option("--model", cfg.model, "correction model file")->required();

  auto* compare = app.add_subcommand("compare", "score a model rollout against a reference");
  add_problem_flags(compare, cfg);
  compare->add_option("--model", cfg.model, "model file")->required();
  compare->add_option("--reference", cfg.reference, "euler | analytic | self")
      ->check(CLI::IsMember({"euler", "analytic", "self"}));
  compare->add_option("--mode", cfg.mode, "net | hybrid")->check(CLI::IsMember({"net", "hybrid"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, out, err);
    if (train->parsed()) return cmd_train(cfg, out, err);
    if (roll->parsed()) return cmd_rollout(cfg, out, err);
    if (hybrid->parsed()) return cmd_hybrid(cfg, out, err);
    return cmd_compare(cfg, out, err);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace hybridode::cli
