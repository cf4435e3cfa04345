#include "mfbog/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mfbog {

namespace {

using nlohmann::json;

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first occurrence of "key" in the text; 0 when absent.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : line_at(text, pos);
}

class Reader {
 public:
  Reader(const std::string& text, std::string source, json root)
      : text_(text), source_(std::move(source)), root_(std::move(root)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    std::string where = source_;
    if (const int line = line_of_key(text_, key); line > 0) {
      where += ":" + std::to_string(line);
    }
    throw ConfigError(where + ": key '" + key + "': " + message);
  }

  bool has(const std::string& key) const { return root_.contains(key); }
  const json& at(const std::string& key) const { return root_.at(key); }

  long long integer(const std::string& key, long long fallback, bool required) const {
    if (!has(key)) {
      if (required) fail(key, "missing required key");
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }

  double positive(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!(x > 0.0)) fail(key, "must be positive");
    return x;
  }

 private:
  const std::string& text_;
  std::string source_;
  json root_;
};

Label parse_label(const Reader& r, const json& n, int dimension) {
  Label label;
  if (n.is_number_integer()) {
    label.push_back(n.get<int>());
  } else if (n.is_array()) {
    for (const json& c : n) {
      if (!c.is_number_integer()) r.fail("w_hat", "mode labels must be integers");
      label.push_back(c.get<int>());
    }
  } else {
    r.fail("w_hat", "mode label must be an integer or an integer list");
  }
  if (static_cast<int>(label.size()) != dimension) {
    r.fail("w_hat", "mode label has " + std::to_string(label.size()) +
                        " components, dimension is " + std::to_string(dimension));
  }
  return label;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ":" + std::to_string(line_at(text, e.byte)) +
                      ": malformed JSON: " + e.what());
  }
  if (!root.is_object()) throw ConfigError(source + ": top level must be an object");

  static const std::vector<std::string> known = {
      "dimension", "n_max",    "w_hat",   "N",          "excitation_cutoff", "eigensolver_tol",
      "expm_tol",  "rng_seed", "full_space", "cutoff_list"};
  const Reader r(text, source, root);
  for (const auto& item : root.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      r.fail(item.key(), "unknown key");
    }
  }

  const long long dimension = r.integer("dimension", 1, true);
  if (dimension < 1 || dimension > 3) r.fail("dimension", "must be 1, 2 or 3");
  const long long n_max = r.integer("n_max", 1, true);
  if (n_max < 0 || n_max > 8) r.fail("n_max", "must be in 0..8");

  RunConfig out;
  ModelConfig& m = out.model;
  m.modes = build_mode_set(static_cast<int>(dimension), static_cast<int>(n_max));

  std::vector<std::pair<Label, double>> pairs;
  if (r.has("w_hat")) {
    const json& w = r.at("w_hat");
    if (!w.is_array()) r.fail("w_hat", "expected a list of [n, value] pairs");
    for (const json& entry : w) {
      if (!entry.is_array() || entry.size() != 2 || !entry[1].is_number()) {
        r.fail("w_hat", "each entry must be [n, value]");
      }
      pairs.emplace_back(parse_label(r, entry[0], static_cast<int>(dimension)),
                         entry[1].get<double>());
    }
  }
  try {
    m.potential = Potential::from_pairs(m.modes, pairs);
  } catch (const std::invalid_argument& e) {
    r.fail("w_hat", e.what());
  }

  if (!r.has("N")) r.fail("N", "missing required key");
  const json& n = r.at("N");
  if (n.is_number_integer()) {
    out.particle_list.push_back(n.get<int>());
  } else if (n.is_array() && !n.empty()) {
    for (const json& v : n) {
      if (!v.is_number_integer()) r.fail("N", "list entries must be integers");
      out.particle_list.push_back(v.get<int>());
    }
  } else {
    r.fail("N", "expected an integer or a nonempty integer list");
  }
  for (std::size_t i = 0; i < out.particle_list.size(); ++i) {
    if (out.particle_list[i] < 2) r.fail("N", "every N must be >= 2");
    if (i > 0 && out.particle_list[i] <= out.particle_list[i - 1]) {
      r.fail("N", "list must be strictly ascending");
    }
  }
  m.particles = out.particle_list.front();

  const long long cutoff = r.integer("excitation_cutoff", 1, true);
  if (cutoff < 1 || cutoff > 64) r.fail("excitation_cutoff", "must be in 1..64");
  m.excitation_cutoff = static_cast<int>(cutoff);
  m.eigensolver_tol = r.positive("eigensolver_tol", m.eigensolver_tol);
  m.expm_tol = r.positive("expm_tol", m.expm_tol);
  const long long seed = r.integer("rng_seed", 0, false);
  if (seed < 0) r.fail("rng_seed", "must be nonnegative");
  m.rng_seed = static_cast<std::uint64_t>(seed);
  if (r.has("full_space")) {
    if (!r.at("full_space").is_boolean()) r.fail("full_space", "expected true or false");
    m.full_space = r.at("full_space").get<bool>();
  }

  if (r.has("cutoff_list")) {
    const json& c = r.at("cutoff_list");
    if (!c.is_array() || c.empty()) r.fail("cutoff_list", "expected a nonempty integer list");
    for (const json& v : c) {
      if (!v.is_number_integer() || v.get<int>() < 1) {
        r.fail("cutoff_list", "entries must be integers >= 1");
      }
      out.cutoff_list.push_back(v.get<int>());
    }
  } else {
    out.cutoff_list.push_back(m.excitation_cutoff);
  }

  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string config_to_json(const RunConfig& config) {
  const ModelConfig& m = config.model;
  json w = json::array();
  for (std::size_t i = 0; i < m.modes.size(); ++i) {
    if (m.potential[i] != 0.0) w.push_back({m.modes.label(i), m.potential[i]});
  }
  json out = {{"dimension", m.modes.dimension()},
              {"n_max", m.modes.n_max()},
              {"w_hat", w},
              {"N", config.particle_list},
              {"excitation_cutoff", m.excitation_cutoff},
              {"eigensolver_tol", m.eigensolver_tol},
              {"expm_tol", m.expm_tol},
              {"rng_seed", m.rng_seed},
              {"full_space", m.full_space},
              {"cutoff_list", config.cutoff_list}};
  return out.dump(2);
}

}  // namespace mfbog
