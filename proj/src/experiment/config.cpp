#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "wgibbs/error.hpp"
#include "wgibbs/experiment.hpp"

namespace wgibbs {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw_config("config: " + std::string(key) + " expects a nonnegative integer, got '" +
                 std::string(text) + "'");
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string copy(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size() || errno == ERANGE || !std::isfinite(v))
    throw_config("config: " + std::string(key) + " expects a number, got '" + copy + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw_config("config: " + std::string(key) + " expects true/false, got '" + std::string(text) + "'");
}

std::vector<std::string> parse_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

template <class T>
Field size_field(const char* section, const char* key, T ExperimentConfig::*member) {
  return {section, key, [member](const ExperimentConfig& c) { return std::to_string(c.*member); },
          [member, key](ExperimentConfig& c, std::string_view v) {
            c.*member = static_cast<T>(parse_unsigned(key, v));
          }};
}

Field double_field(const char* section, const char* key, double ExperimentConfig::*member) {
  return {section, key, [member](const ExperimentConfig& c) { return format_double(c.*member); },
          [member, key](ExperimentConfig& c, std::string_view v) { c.*member = parse_double(key, v); }};
}

Field string_field(const char* section, const char* key, std::string ExperimentConfig::*member) {
  return {section, key, [member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, std::string_view v) { c.*member = std::string(v); }};
}

Field bool_field(const char* section, const char* key, bool ExperimentConfig::*member) {
  return {section, key, [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member, key](ExperimentConfig& c, std::string_view v) { c.*member = parse_bool(key, v); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      {"experiment", "kind", [](const C& c) { return std::string(to_string(c.kind)); },
       [](C& c, std::string_view v) { c.kind = parse_experiment_kind(v); }},
      string_field("experiment", "output", &C::output),

      size_field("model", "dimension", &C::dimension),
      size_field("model", "rank", &C::rank),
      double_field("model", "epsilon", &C::epsilon),
      double_field("model", "lambda_cov", &C::lambda_cov),
      double_field("model", "coupling", &C::coupling),
      double_field("model", "sigma", &C::sigma),
      string_field("model", "image", &C::image),
      size_field("model", "image_size", &C::image_size),
      size_field("model", "topics", &C::topics),
      double_field("model", "alpha", &C::alpha),
      double_field("model", "beta", &C::beta),
      string_field("model", "corpus", &C::corpus),
      size_field("model", "documents", &C::documents),
      size_field("model", "document_length", &C::document_length),
      string_field("model", "heldout", &C::heldout),
      size_field("model", "heldout_documents", &C::heldout_documents),
      string_field("model", "vocab", &C::vocab),

      size_field("chain", "iterations", &C::iterations),
      size_field("chain", "burn_in", &C::burn_in),
      size_field("chain", "thinning", &C::thinning),
      size_field("chain", "seed", &C::seed),
      size_field("chain", "initial_sweeps", &C::initial_sweeps),

      {"scheduler", "list",
       [](const C& c) {
         std::string out;
         for (std::size_t i = 0; i < c.schedulers.size(); ++i) out += (i ? "," : "") + c.schedulers[i];
         return out;
       },
       [](C& c, std::string_view v) { c.schedulers = parse_list(v); }},
      {"scheduler", "lambda", [](const C& c) { return c.lambda ? format_double(*c.lambda) : std::string("auto"); },
       [](C& c, std::string_view v) {
         if (v == "auto")
           c.lambda.reset();
         else
           c.lambda = parse_double("lambda", v);
       }},
      double_field("scheduler", "relative_lambda", &C::relative_lambda),
      size_field("scheduler", "update_period", &C::update_period),
      bool_field("scheduler", "adapt_after_burn_in", &C::adapt_after_burn_in),
      double_field("scheduler", "forgetting", &C::forgetting),

      size_field("diagnostics", "max_lag", &C::max_lag),
      size_field("diagnostics", "esjd_max_lag", &C::esjd_max_lag),
      bool_field("diagnostics", "write_trace", &C::write_trace),
      size_field("diagnostics", "perplexity_every", &C::perplexity_every),
      size_field("diagnostics", "fold_in_sweeps", &C::fold_in_sweeps),

      size_field("validate", "trials", &C::trials),
      size_field("validate", "lemma_trials", &C::lemma_trials),
  };
  return table;
}

const Field& find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return f;
  throw_config("config: unknown key '" + std::string(section) + "." + std::string(key) + "'");
}

struct Entry {
  std::string section, key, value;
  std::size_t line;
};

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Gaussian: return "gaussian";
    case ExperimentKind::Ising: return "ising";
    case ExperimentKind::Lda: return "lda";
    case ExperimentKind::Validate: return "validate";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  if (text == "gaussian") return ExperimentKind::Gaussian;
  if (text == "ising") return ExperimentKind::Ising;
  if (text == "lda") return ExperimentKind::Lda;
  if (text == "validate") return ExperimentKind::Validate;
  throw_config("config: unknown experiment kind '" + std::string(text) + "'");
}

ExperimentConfig ExperimentConfig::defaults_for(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::Gaussian:
    case ExperimentKind::Validate:
      break;
    case ExperimentKind::Ising:
      c.iterations = 100;
      c.burn_in = 0;
      c.initial_sweeps = 1;
      c.max_lag = 20;
      c.esjd_max_lag = 10;
      break;
    case ExperimentKind::Lda:
      c.iterations = 1000;
      c.burn_in = 0;
      c.initial_sweeps = 2;
      c.max_lag = 20;
      c.esjd_max_lag = 10;
      break;
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    // '#' or ';' opens a comment at line start or after whitespace
    for (std::size_t i = 0; i < raw.size(); ++i)
      if ((raw[i] == '#' || raw[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1])))) {
        raw.resize(i);
        break;
      }
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw_config("config line " + std::to_string(line_no) + ": malformed section");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::set<std::string> known{"experiment", "model", "chain", "scheduler",
                                               "diagnostics", "validate"};
      if (!known.count(section))
        throw_config("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw_config("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw_config("config line " + std::to_string(line_no) + ": key outside a section");
    Entry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
            line_no};
    find_field(e.section, e.key);
    for (const auto& prior : entries)
      if (prior.section == e.section && prior.key == e.key)
        throw_config("config line " + std::to_string(line_no) + ": duplicate key " + e.section + "." + e.key);
    entries.push_back(std::move(e));
  }

  ExperimentKind kind = ExperimentKind::Gaussian;
  for (const auto& e : entries)
    if (e.section == "experiment" && e.key == "kind") kind = parse_experiment_kind(e.value);
  ExperimentConfig config = ExperimentConfig::defaults_for(kind);
  for (const auto& e : entries) find_field(e.section, e.key).set(config, e.value);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += '\n';
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

namespace {

const Field& resolve(std::string_view key) {
  const auto dot = key.find('.');
  if (dot != std::string_view::npos) return find_field(key.substr(0, dot), key.substr(dot + 1));
  const Field* match = nullptr;
  for (const auto& f : fields()) {
    if (f.key != key) continue;
    if (match) throw_config("config: key '" + std::string(key) + "' is ambiguous; use section.key");
    match = &f;
  }
  if (!match) throw_config("config: unknown key '" + std::string(key) + "'");
  return *match;
}

}  // namespace

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  resolve(key).set(config, trim(value));
}

std::string get_config_value(const ExperimentConfig& config, std::string_view key) {
  return resolve(key).get(config);
}

void validate_config(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw_config("config: " + what);
  };
  require(!c.output.empty(), "experiment.output must not be empty");
  if (c.kind == ExperimentKind::Validate) {
    require(c.trials > 0 && c.lemma_trials > 0, "validate trials must be positive");
    return;
  }
  require(c.iterations > 0, "chain.iterations must be positive");
  require(c.burn_in < c.iterations, "chain.burn_in must be smaller than chain.iterations");
  require(c.thinning > 0, "chain.thinning must be positive");
  require(c.initial_sweeps <= c.iterations, "chain.initial_sweeps exceeds chain.iterations");
  require(!c.schedulers.empty(), "scheduler.list must name at least one scheduler");
  std::set<std::string> seen;
  for (const auto& s : c.schedulers) {
    require(s == "systematic" || s == "random" || s == "weighted", "unknown scheduler '" + s + "'");
    require(seen.insert(s).second, "scheduler '" + s + "' listed twice");
  }
  require(!c.lambda || *c.lambda >= 0.0, "scheduler.lambda must be nonnegative");
  require(c.relative_lambda >= 0.0, "scheduler.relative_lambda must be nonnegative");
  require(c.forgetting > 0.0 && c.forgetting <= 1.0, "scheduler.forgetting must be in (0, 1]");
  switch (c.kind) {
    case ExperimentKind::Gaussian:
      require(c.dimension >= 1 && c.rank >= 1, "model.dimension and model.rank must be positive");
      require(c.lambda_cov > 0.0 && c.epsilon >= 0.0, "model.lambda_cov > 0 and model.epsilon >= 0 required");
      break;
    case ExperimentKind::Ising:
      require(c.sigma > 0.0, "model.sigma must be positive");
      require(c.image != "synthetic" || c.image_size >= 2, "model.image_size must be at least 2");
      break;
    case ExperimentKind::Lda:
      require(c.topics >= 1, "model.topics must be positive");
      require(c.alpha > 0.0 && c.beta > 0.0, "model.alpha and model.beta must be positive");
      require(c.corpus != "bars" || (c.documents > 0 && c.document_length > 0),
              "bars corpus needs positive documents and document_length");
      require(c.perplexity_every > 0, "diagnostics.perplexity_every must be positive");
      break;
    case ExperimentKind::Validate:
      break;
  }
}

WeightedSchedulerConfig weighted_config(const ExperimentConfig& c) {
  WeightedSchedulerConfig w;
  w.update_period = c.update_period;
  w.regularization = c.lambda;
  w.relative_regularization = c.relative_lambda;
  w.adapt_after_burn_in = c.adapt_after_burn_in;
  w.forgetting = c.forgetting;
  return w;
}

}  // namespace wgibbs
