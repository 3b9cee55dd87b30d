// wgibbs command line: run experiments from config files, join their metrics,
// and run the randomised validation suites. Talks to the library only
// through the C API.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgibbs/wgibbs.h"

namespace {

void print_line(const char* line, void*) { std::printf("%s\n", line); }

int report(wg_status status) {
  if (status != WG_OK) std::fprintf(stderr, "wgibbs: %s\n", wg_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs sampling with adaptive weighted scan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wg_version()));

  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  run->add_option("config", config_path, "Experiment config (key = value with [sections])")->required();
  run->add_option("--seed", seed, "Override chain.seed");
  run->add_option("--out", out, "Output directory (overrides experiment.output)");
  run->add_option("--set", overrides, "Override a config value, section.key=value (repeatable)");

  auto* compare = app.add_subcommand("compare", "Join one metric across scheduler output directories");
  std::vector<std::string> dirs;
  std::string metric;
  compare->add_option("dirs", dirs, "Scheduler output directories or experiment roots")->required();
  compare->add_option("--metric", metric, "autocorrelation | error | perplexity | loglik | esjd");
  compare->add_option("--out", out, "Write the table here instead of stdout");

  auto* validate = app.add_subcommand("validate", "Randomised stationarity and optimal-weight checks");
  std::size_t trials = 50;
  std::size_t lemma_trials = 100;
  validate->add_option("--trials", trials, "Random finite chains to check")->check(CLI::PositiveNumber);
  validate->add_option("--lemma-trials", lemma_trials, "Random variance vectors to check")->check(CLI::PositiveNumber);
  validate->add_option("--seed", seed, "Seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : WG_ERR_CONFIG;
  }

  if (*run) {
    wg_config* config = nullptr;
    wg_status status = wg_config_load(config_path.c_str(), &config);
    if (status != WG_OK) return report(status);
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "wgibbs: --set expects section.key=value, got '%s'\n", item.c_str());
        wg_config_free(config);
        return WG_ERR_CONFIG;
      }
      status = wg_config_set(config, item.substr(0, eq).c_str(), item.substr(eq + 1).c_str());
      if (status != WG_OK) break;
    }
    if (status == WG_OK && seed) status = wg_config_set(config, "chain.seed", std::to_string(*seed).c_str());
    if (status == WG_OK) {
      // A relative output directory is resolved against WGIBBS_OUTPUT_ROOT.
      const char* root = std::getenv("WGIBBS_OUTPUT_ROOT");
      if (out.empty() && root && *root) {
        char* current = nullptr;
        status = wg_config_get(config, "experiment.output", &current);
        if (status == WG_OK && std::filesystem::path(current).is_relative())
          out = (std::filesystem::path(root) / current).string();
        wg_string_free(current);
      }
      if (!out.empty()) status = wg_config_set(config, "experiment.output", out.c_str());
    }
    if (status == WG_OK) status = wg_experiment_run(config, print_line, nullptr);
    wg_config_free(config);
    return report(status);
  }

  if (*compare) {
    std::vector<const char*> ptrs;
    for (const auto& d : dirs) ptrs.push_back(d.c_str());
    char* csv = nullptr;
    const wg_status status = wg_compare(ptrs.data(), ptrs.size(), metric.empty() ? nullptr : metric.c_str(), &csv);
    if (status != WG_OK) return report(status);
    if (out.empty()) {
      std::fputs(csv, stdout);
    } else {
      std::ofstream file(out, std::ios::binary);
      file << csv;
      if (!file) {
        wg_string_free(csv);
        std::fprintf(stderr, "wgibbs: cannot write %s\n", out.c_str());
        return WG_ERR_IO;
      }
    }
    wg_string_free(csv);
    return 0;
  }

  if (*validate) {
    wg_validation_summary summary{};
    return report(wg_validate(trials, lemma_trials, seed.value_or(1), print_line, nullptr, &summary));
  }
  return 0;
}
