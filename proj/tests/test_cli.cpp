#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "hybridode/cli.hpp"
#include "hybridode/format.hpp"
#include "hybridode/neuralnet.hpp"
#include "hybridode/training.hpp"

using namespace hybridode;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path tmp(const std::string& name) {
  const std::filesystem::path dir = HYBRIDODE_TEST_TMPDIR;
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> r;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) r.push_back(l);
  return r;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> r;
  for (const auto& l : lines(csv))
    if (!l.empty() && l.front() != '#') r.push_back(l);
  return r;  // header first
}

double summary_field(const std::string& csv, const std::string& key) {
  const auto all = lines(csv);
  const std::string& last = all.back();
  REQUIRE(last.rfind("# summary", 0) == 0);
  const auto at = last.find(key + "=");
  REQUIRE(at != std::string::npos);
  const auto start = at + key.size() + 1;
  return parse_real(last.substr(start, last.find(',', start) - start));
}

}  // namespace

TEST_CASE("solve decay writes the documented trajectory CSV") {
  const Result r = run({"solve", "--problem", "decay", "--method", "euler", "--dt", "0.05"});
  REQUIRE(r.code == 0);
  const auto all = lines(r.out);
  REQUIRE(all.size() == 23);
  CHECK(all[0].rfind("# ", 0) == 0);
  CHECK(all[0].find("seed=0") != std::string::npos);
  CHECK(all[0].find("dt=0.05") != std::string::npos);
  CHECK(all[0].find("method=euler") != std::string::npos);
  CHECK(all[0].find("version=") != std::string::npos);
  CHECK(all[1] == "t,y_1");
  CHECK(all[2] == "0,1");
  CHECK(all.back().rfind("1,", 0) == 0);
}

TEST_CASE("heat at dt=0.06 is rejected with exit code 3") {
  const Result r = run({"solve", "--problem", "heat", "--dt", "0.06"});
  CHECK(r.code == cli::kNumerical);
  CHECK(r.err.find("CFL") != std::string::npos);
  CHECK(r.out.empty());

  const Result forced = run({"solve", "--problem", "heat", "--dt", "0.06", "--horizon", "1.2", "--no-cfl-check"});
  CHECK(forced.code == 0);
}

TEST_CASE("refining dt shrinks the endpoint error") {
  auto endpoint_error = [](const std::string& dt) {
    const Result r = run({"solve", "--problem", "decay", "--dt", dt});
    REQUIRE(r.code == 0);
    const std::string& tail = r.err;
    const auto colon = tail.rfind(": ");
    REQUIRE(colon != std::string::npos);
    return parse_real(tail.substr(colon + 2, tail.find('\n', colon) - colon - 2));
  };
  const double coarse = endpoint_error("0.05");
  const double fine = endpoint_error("0.005");
  CHECK(fine < coarse);
  CHECK(coarse / fine > 5.0);
}

TEST_CASE("every method name is accepted") {
  for (const char* m : {"euler", "exp-split", "strang"}) {
    CHECK(run({"solve", "--problem", "decay", "--method", m}).code == 0);
  }
  CHECK(run({"solve", "--problem", "sde", "--method", "em", "--paths", "50"}).code == 0);
  CHECK(run({"solve", "--problem", "decay", "--method", "em"}).code == cli::kUsage);
  CHECK(run({"solve", "--problem", "decay", "--method", "rk4"}).code == cli::kUsage);
}

TEST_CASE("ensemble output has mean and std columns") {
  const Result r = run({"solve", "--problem", "sde", "--method", "em", "--paths", "200", "--seed", "5"});
  REQUIRE(r.code == 0);
  const auto rows = data_rows(r.out);
  CHECK(rows.front() == "t,mean_1,std_1");
  CHECK(rows.size() == 102);
  CHECK(rows[1] == "0,1,0");
  CHECK(run({"solve", "--problem", "sde", "--method", "em", "--paths", "200", "--seed", "5"}).out == r.out);
}

TEST_CASE("train is byte-reproducible and its ES history never increases") {
  const auto m1 = tmp("cli_es_1.model"), m2 = tmp("cli_es_2.model"), h1 = tmp("cli_es_1.csv"), h2 = tmp("cli_es_2.csv");
  const std::vector<std::string> base{"train", "--problem", "decay", "--trainer", "es", "--seed", "42", "--population", "40",
                                      "--iters", "25"};
  auto with = [&](const std::filesystem::path& m, const std::filesystem::path& h) {
    auto a = base;
    a.insert(a.end(), {"--out", m.string(), "--history", h.string()});
    return run(a);
  };
  REQUIRE(with(m1, h1).code == 0);
  REQUIRE(with(m2, h2).code == 0);
  CHECK(slurp(m1) == slurp(m2));
  CHECK(slurp(h1) == slurp(h2));

  const auto rows = data_rows(slurp(h1));
  REQUIRE(rows.size() == 26);
  CHECK(rows.front() == "iteration,best_mse");
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = parse_real(rows[i].substr(rows[i].find(',') + 1));
    CHECK(v <= prev);
    prev = v;
  }

  const FeedForwardNet net = from_text(slurp(m1));
  CHECK(net.layer_dims == std::vector<std::size_t>{2, 10, 1});
}

TEST_CASE("compare against its own rollout reports zero error") {
  const auto model = tmp("cli_self.model");
  REQUIRE(run({"train", "--problem", "decay", "--trainer", "sgd", "--seed", "3", "--epochs", "20", "--out",
               model.string()})
              .code == 0);
  const Result r = run({"compare", "--problem", "decay", "--model", model.string(), "--reference", "self"});
  REQUIRE(r.code == 0);
  CHECK(summary_field(r.out, "mse") == 0.0);
  CHECK(summary_field(r.out, "max_err") == 0.0);
  CHECK(r.out.find("runtime") == std::string::npos);
}

TEST_CASE("compare summary matches validate") {
  const auto model = tmp("cli_validate.model");
  REQUIRE(run({"train", "--problem", "decay", "--trainer", "es", "--seed", "8", "--population", "30", "--iters",
               "10", "--out", model.string()})
              .code == 0);
  const Result r = run({"compare", "--problem", "decay", "--model", model.string(), "--reference", "euler"});
  REQUIRE(r.code == 0);
  const IvpProblem p = linear_decay_forced();
  const StepReport rep = validate(from_text(slurp(model)), integrate(p, StepConfig{}), p.input);
  CHECK(summary_field(r.out, "mse") == rep.mse);
  CHECK(summary_field(r.out, "max_err") == rep.max_error);
  CHECK(data_rows(r.out).front() == "t,ref_1,pred_1,abs_err");
}

TEST_CASE("rollout and hybrid write trajectories on the solver grid") {
  const auto state = tmp("cli_state.model"), resid = tmp("cli_resid.model");
  REQUIRE(run({"train", "--problem", "decay", "--trainer", "sgd", "--epochs", "5", "--out", state.string()}).code == 0);
  REQUIRE(run({"train", "--problem", "decay", "--trainer", "sgd", "--epochs", "5", "--target", "residual", "--out",
               resid.string()})
              .code == 0);
  const Result roll = run({"rollout", "--problem", "decay", "--model", state.string()});
  const Result hyb = run({"hybrid", "--problem", "decay", "--model", resid.string()});
  REQUIRE(roll.code == 0);
  REQUIRE(hyb.code == 0);
  CHECK(data_rows(roll.out).size() == 22);
  CHECK(data_rows(hyb.out).size() == 22);
  CHECK(data_rows(hyb.out)[1] == "0,1");
}

TEST_CASE("a model of the wrong shape is a usage error") {
  const auto model = tmp("cli_wrong.model");
  std::ofstream(model) << to_text(make_net({3, 4, 1}));
  const Result r = run({"rollout", "--problem", "decay", "--model", model.string()});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("3") != std::string::npos);
  CHECK(run({"hybrid", "--problem", "decay", "--model", model.string()}).code == cli::kUsage);
}

TEST_CASE("exit codes for usage and I/O failures") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"solve", "--dt", "abc"}).code == cli::kUsage);
  CHECK(run({"solve", "--dt", "0.03"}).code == cli::kUsage);  // 1/0.03 is not an integer
  CHECK(run({"rollout", "--problem", "decay"}).code == cli::kUsage);
  CHECK(run({"solve", "--help"}).code == cli::kOk);

  const Result missing = run({"rollout", "--model", tmp("does_not_exist.model").string()});
  CHECK(missing.code == cli::kIo);
  const Result unwritable = run({"solve", "--out", tmp("no_such_dir/x.csv").string()});
  CHECK(unwritable.code == cli::kIo);

  const auto garbage = tmp("cli_garbage.model");
  std::ofstream(garbage) << "layer_dims 2 1\n\nnot numbers\n";
  CHECK(run({"rollout", "--model", garbage.string()}).code == cli::kUsage);
}

TEST_CASE("heat ES surrogate stays within its pinned bound") {
  // Pilot run of exactly these commands: max_err = 5.2008057748860752.
  const double pilot = 5.2008057748860752;
  const auto model = tmp("cli_heat.model");
  REQUIRE(run({"train", "--problem", "heat", "--trainer", "es", "--seed", "42", "--out", model.string()}).code == 0);
  const Result r = run({"compare", "--problem", "heat", "--model", model.string(), "--reference", "analytic"});
  REQUIRE(r.code == 0);
  const double max_err = summary_field(r.out, "max_err");
  CHECK(max_err <= 1.2 * pilot);
  CHECK(max_err == doctest::Approx(pilot).epsilon(1e-9));
  CHECK(data_rows(r.out).front().rfind("t,ref_1,ref_2", 0) == 0);
}
