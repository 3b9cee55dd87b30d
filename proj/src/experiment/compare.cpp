#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "wgibbs/error.hpp"
#include "wgibbs/experiment.hpp"

namespace wgibbs {
namespace {

namespace fs = std::filesystem;

struct Column {
  std::string name;
  std::string key_header;
  std::vector<std::pair<std::string, std::string>> rows;
};

// Lines of one [section] from canonical config text.
std::string section_text(const std::string& canonical, std::string_view section) {
  std::istringstream in(canonical);
  std::string line, out;
  bool inside = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '[') {
      inside = line == "[" + std::string(section) + "]";
      continue;
    }
    if (inside) out += line + "\n";
  }
  return out;
}

std::string default_metric(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Gaussian: return "autocorrelation";
    case ExperimentKind::Ising: return "error";
    case ExperimentKind::Lda: return "perplexity";
    case ExperimentKind::Validate: break;
  }
  throw_config("compare: validate runs have no comparable metric");
}

Column read_metric(const fs::path& file, std::string name) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw_io("compare: cannot read " + file.string());
  Column col{std::move(name), {}, {}};
  std::string line;
  if (!std::getline(in, line)) throw_io("compare: empty file " + file.string());
  col.key_header = line.substr(0, line.find(','));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(',');
    if (a == std::string::npos) throw_io("compare: malformed row in " + file.string());
    const auto b = line.find(',', a + 1);
    col.rows.emplace_back(line.substr(0, a), line.substr(a + 1, b == std::string::npos ? b : b - a - 1));
  }
  return col;
}

std::vector<fs::path> expand(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& dir : inputs) {
    if (fs::exists(dir / "config.ini")) {
      out.push_back(dir);
      continue;
    }
    if (!fs::is_directory(dir)) throw_io("compare: not a directory: " + dir.string());
    std::vector<fs::path> subs;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_directory() && fs::exists(entry.path() / "config.ini")) subs.push_back(entry.path());
    if (subs.empty()) throw_io("compare: no scheduler output under " + dir.string());
    // systematic, random, weighted first, anything else by name
    auto rank = [](const fs::path& p) {
      static const std::vector<std::string> order{"systematic", "random", "weighted"};
      const auto it = std::find(order.begin(), order.end(), p.filename().string());
      return static_cast<std::size_t>(it - order.begin());
    };
    std::sort(subs.begin(), subs.end(), [&](const fs::path& a, const fs::path& b) {
      return std::pair(rank(a), a.filename()) < std::pair(rank(b), b.filename());
    });
    out.insert(out.end(), subs.begin(), subs.end());
  }
  return out;
}

}  // namespace

std::string compare_outputs(const std::vector<fs::path>& directories, std::string_view metric) {
  const auto dirs = expand(directories);
  if (dirs.size() < 2) throw_config("compare: need at least two scheduler outputs");

  std::optional<ExperimentConfig> reference;
  std::string ref_model, ref_chain;
  std::vector<Column> columns;
  std::string chosen(metric);
  for (const auto& dir : dirs) {
    const auto config = load_config(dir / "config.ini");
    const auto canonical = serialize_config(config);
    if (!reference) {
      reference = config;
      ref_model = section_text(canonical, "model");
      ref_chain = section_text(canonical, "chain");
      if (chosen.empty()) chosen = default_metric(config.kind);
    } else {
      if (config.kind != reference->kind)
        throw_config("compare: experiment kinds differ (" + std::string(to_string(reference->kind)) + " vs " +
                     std::string(to_string(config.kind)) + ")");
      if (section_text(canonical, "model") != ref_model)
        throw_config("compare: model settings differ in " + dir.string());
      if (section_text(canonical, "chain") != ref_chain)
        throw_config("compare: chain settings differ in " + dir.string());
    }
    std::string name = config.schedulers.size() == 1 ? config.schedulers[0] : dir.filename().string();
    for (const auto& c : columns)
      if (c.name == name) name = dir.filename().string();
    columns.push_back(read_metric(dir / (chosen + ".csv"), name));
  }

  std::vector<std::string> keys;
  std::map<std::string, std::size_t> position;
  for (const auto& col : columns)
    for (const auto& [key, value] : col.rows)
      if (position.emplace(key, keys.size()).second) keys.push_back(key);

  std::vector<std::vector<std::string>> table(keys.size(), std::vector<std::string>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (const auto& [key, value] : columns[c].rows) table[position[key]][c] = value;

  std::string out = columns.front().key_header;
  for (const auto& col : columns) out += "," + col.name;
  out += "\n";
  for (std::size_t r = 0; r < keys.size(); ++r) {
    out += keys[r];
    for (const auto& cell : table[r]) out += "," + cell;
    out += "\n";
  }
  return out;
}

}  // namespace wgibbs
