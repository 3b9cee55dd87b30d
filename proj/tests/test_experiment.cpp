#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "wgibbs/error.hpp"
#include "wgibbs/experiment.hpp"

using namespace wgibbs;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("wgibbs_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorKind kind_of_parse(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Numeric;  // sentinel: no error
}

ExperimentConfig small(ExperimentKind kind, const fs::path& out) {
  auto c = ExperimentConfig::defaults_for(kind);
  c.output = out.string();
  switch (kind) {
    case ExperimentKind::Gaussian:
      c.dimension = 5;
      c.rank = 2;
      c.iterations = 300;
      c.burn_in = 50;
      c.max_lag = 10;
      c.esjd_max_lag = 5;
      break;
    case ExperimentKind::Ising:
      c.image_size = 16;
      c.iterations = 15;
      break;
    case ExperimentKind::Lda:
      c.documents = 60;
      c.document_length = 30;
      c.heldout_documents = 10;
      c.iterations = 8;
      c.perplexity_every = 4;
      c.fold_in_sweeps = 5;
      break;
    case ExperimentKind::Validate:
      break;
  }
  return c;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = ss.str();
  }
  return files;
}

}  // namespace

TEST_CASE("config round trip for every kind") {
  for (auto kind : {ExperimentKind::Gaussian, ExperimentKind::Ising, ExperimentKind::Lda,
                    ExperimentKind::Validate}) {
    auto c = ExperimentConfig::defaults_for(kind);
    CHECK(parse_experiment_kind(to_string(kind)) == kind);
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
  auto c = ExperimentConfig::defaults_for(ExperimentKind::Lda);
  c.alpha = 0.1 + 0.2;  // not exactly representable in short form
  c.lambda = 1e-3;
  c.schedulers = {"weighted", "random"};
  c.heldout = "held out.txt";
  c.adapt_after_burn_in = false;
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "[chain]\n"
      "iterations = 500 ; trailing comment\n"
      "seed=9\n"
      "\n"
      "[experiment]\n"
      "kind = ising\n"
      "[scheduler]\n"
      "list = weighted, systematic\n"
      "lambda = 0.25\n");
  CHECK(c.kind == ExperimentKind::Ising);
  CHECK(c.iterations == 500);
  CHECK(c.seed == 9);
  CHECK(c.schedulers == std::vector<std::string>{"weighted", "systematic"});
  REQUIRE(c.lambda.has_value());
  CHECK(*c.lambda == 0.25);
  // untouched keys keep the kind's defaults
  CHECK(c.burn_in == ExperimentConfig::defaults_for(ExperimentKind::Ising).burn_in);
}

TEST_CASE("config errors are Config errors") {
  CHECK(kind_of_parse("[experiment]\nkind = gaussian\nbogus = 1\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[nowhere]\nseed = 1\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[chain]\nseed = 1\nseed = 2\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[chain]\nseed = many\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[chain]\nseed\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[experiment]\nkind = quantum\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[chain]\niterations = -5\n") == ErrorKind::Config);
  CHECK(kind_of_parse("[experiment]\nkind = gaussian\n") == ErrorKind::Numeric);
}

TEST_CASE("set and get by key") {
  auto c = ExperimentConfig::defaults_for(ExperimentKind::Gaussian);
  set_config_value(c, "chain.seed", "77");
  set_config_value(c, "sigma", "0.5");
  set_config_value(c, "scheduler.lambda", "auto");
  CHECK(c.seed == 77);
  CHECK(c.sigma == 0.5);
  CHECK_FALSE(c.lambda.has_value());
  CHECK(get_config_value(c, "chain.seed") == "77");
  CHECK(get_config_value(c, "kind") == "gaussian");
  CHECK_THROWS_AS(set_config_value(c, "chain.nothing", "1"), Error);
  CHECK_THROWS_AS(get_config_value(c, "nothing"), Error);
}

TEST_CASE("validate_config") {
  auto c = ExperimentConfig::defaults_for(ExperimentKind::Gaussian);
  CHECK_NOTHROW(validate_config(c));
  auto bad = c;
  bad.burn_in = bad.iterations;
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = c;
  bad.schedulers = {"random", "random"};
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = c;
  bad.schedulers = {"herded"};
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = c;
  bad.dimension = 0;
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = ExperimentConfig::defaults_for(ExperimentKind::Ising);
  bad.sigma = 0.0;
  CHECK_THROWS_AS(validate_config(bad), Error);
}

TEST_CASE("gaussian experiment writes its artifacts and compares") {
  const auto dir = scratch_dir("gaussian");
  const auto cfg = small(ExperimentKind::Gaussian, dir / "out");
  const auto result = run_and_write(cfg);
  REQUIRE(result.runs.size() == 3);
  for (const char* s : {"systematic", "random", "weighted"}) {
    for (const char* f : {"config.ini", "trace.csv", "autocorrelation.csv", "ess.csv", "esjd.csv",
                          "summary.json", "pca_trace.csv"})
      CHECK(fs::exists(dir / "out" / s / f));
  }
  CHECK(fs::exists(dir / "out" / "weighted" / "weights.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "random" / "weights.csv"));
  CHECK(result.runs[0].trace.samples.rows() == 300);

  const auto table = compare_outputs({dir / "out"});
  std::istringstream lines(table);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "lag,systematic,random,weighted");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 11);

  const auto esjd = compare_outputs({dir / "out" / "random", dir / "out" / "weighted"}, "esjd");
  CHECK(esjd.rfind("lag,random,weighted\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("compare refuses mismatched experiments") {
  const auto dir = scratch_dir("mismatch");
  auto a = small(ExperimentKind::Ising, dir / "a");
  a.schedulers = {"systematic"};
  auto b = a;
  b.output = (dir / "b").string();
  b.sigma = 0.5;
  run_and_write(a);
  run_and_write(b);
  try {
    compare_outputs({dir / "a" / "systematic", dir / "b" / "systematic"});
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  auto g = small(ExperimentKind::Gaussian, dir / "g");
  g.schedulers = {"random"};
  run_and_write(g);
  CHECK_THROWS_AS(compare_outputs({dir / "a" / "systematic", dir / "g" / "random"}), Error);
  CHECK_THROWS_AS(compare_outputs({dir / "a" / "systematic"}), Error);
  fs::remove_all(dir);
}

TEST_CASE("ising experiment artifacts") {
  const auto dir = scratch_dir("ising");
  const auto result = run_and_write(small(ExperimentKind::Ising, dir));
  for (const char* f : {"clean.pgm", "noisy.pgm", "noisy.f32", "recovered.pgm", "error.csv",
                        "posterior_variance.csv"})
    CHECK(fs::exists(dir / "weighted" / f));
  for (const auto& run : result.runs) {
    CHECK(run.error.size() == 15);
    CHECK(run.recovered.size() == 256);
    for (double v : run.posterior_variance) REQUIRE((v >= 0.0 && v <= 1.0));
  }
  const auto table = compare_outputs({dir});
  CHECK(table.rfind("sweep,systematic,random,weighted\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("lda experiment artifacts") {
  const auto dir = scratch_dir("lda");
  const auto result = run_and_write(small(ExperimentKind::Lda, dir));
  for (const char* f : {"loglik.csv", "perplexity.csv", "topics.csv"}) CHECK(fs::exists(dir / "random" / f));
  for (const auto& run : result.runs) {
    CHECK(run.log_likelihood.size() == 8);
    CHECK(run.topics.rows() == 8);
    CHECK(run.topic_distance.size() == 8);
    REQUIRE_FALSE(run.perplexity.empty());
    CHECK(run.perplexity.back().first == 8);
  }
  const auto table = compare_outputs({dir});
  CHECK(table.rfind("sweep,systematic,random,weighted\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical output trees") {
  const auto dir = scratch_dir("repro");
  for (auto kind : {ExperimentKind::Gaussian, ExperimentKind::Ising, ExperimentKind::Lda}) {
    const auto out = dir / std::string(to_string(kind));
    const auto cfg = small(kind, out);
    run_and_write(cfg);
    const auto first = read_tree(out);
    fs::remove_all(out);
    run_and_write(cfg);
    const auto second = read_tree(out);
    CHECK(first.size() > 5);
    CHECK(first == second);
  }
  fs::remove_all(dir);
}

TEST_CASE("validation suite passes and validate kind is not a run") {
  std::ostringstream log;
  const auto summary = run_validation(10, 20, 3, &log);
  CHECK(summary.passed);
  CHECK(summary.theorem_trials == 10);
  CHECK(summary.max_stationarity_residual <= 1e-10);
  CHECK(summary.max_weight_error <= 1e-6);
  CHECK(summary.max_objective_relative_error <= 1e-9);
  CHECK(log.str().find("PASS") != std::string::npos);
  CHECK_THROWS_AS(run_experiment(ExperimentConfig::defaults_for(ExperimentKind::Validate)), Error);
}
