#include "lsmc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lsmc/error.hpp"

namespace lsmc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  const std::string t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || std::isnan(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& v) {
  T out = 0;
  const std::string t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_double(v[i]);
  return out;
}

std::string join(const std::vector<std::pair<double, double>>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + fmt_double(v[i].first) + ":" + fmt_double(v[i].second);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::pair<double, double>> parse_ranges(const std::string& key, const std::string& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(v, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(key + ": ranges are written lower:upper, got '" + item + "'");
    out.emplace_back(parse_double(key, item.substr(0, colon)), parse_double(key, item.substr(colon + 1)));
  }
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define STR_FIELD(name) \
  Field{#name, [](const RunConfig& c) { return c.name; }, [](RunConfig& c, const std::string& v) { c.name = trim(v); }}
#define LIST_FIELD(name)                                                  \
  Field{#name, [](const RunConfig& c) { return join(c.name); },           \
        [](RunConfig& c, const std::string& v) { c.name = split(v, ','); }}
#define BOOL_FIELD(name)                                                                \
  Field{#name, [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }}
#define DOUBLE_FIELD(name)                                       \
  Field{#name, [](const RunConfig& c) { return fmt_double(c.name); }, \
        [](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); }}
#define UINT_FIELD(name)                                                 \
  Field{#name, [](const RunConfig& c) { return std::to_string(c.name); }, \
        [](RunConfig& c, const std::string& v) { c.name = parse_unsigned<decltype(c.name)>(#name, v); }}
#define DOUBLES_FIELD(name)                                      \
  Field{#name, [](const RunConfig& c) { return join(c.name); }, \
        [](RunConfig& c, const std::string& v) { c.name = parse_doubles(#name, v); }}
#define RANGES_FIELD(name)                                       \
  Field{#name, [](const RunConfig& c) { return join(c.name); }, \
        [](RunConfig& c, const std::string& v) { c.name = parse_ranges(#name, v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      STR_FIELD(data),
      UINT_FIELD(data_seed),
      UINT_FIELD(data_periods),
      LIST_FIELD(columns),
      LIST_FIELD(price_columns),
      BOOL_FIELD(all_prices),
      BOOL_FIELD(returns_log),
      BOOL_FIELD(drop_gaps),
      LIST_FIELD(investable),
      DOUBLE_FIELD(annual_rf),
      UINT_FIELD(horizon),
      UINT_FIELD(paths),
      DOUBLE_FIELD(mesh),
      DOUBLE_FIELD(cost),
      Field{"objective", [](const RunConfig& c) { return to_string(c.objective); },
            [](RunConfig& c, const std::string& v) { c.objective = objective_kind_from_string(trim(v)); }},
      DOUBLE_FIELD(lower),
      DOUBLE_FIELD(upper),
      DOUBLE_FIELD(gamma),
      STR_FIELD(benchmark),
      Field{"mode", [](const RunConfig& c) { return to_string(c.mode); },
            [](RunConfig& c, const std::string& v) {
              try {
                c.mode = regression_mode_from_string(trim(v));
              } catch (const Error& e) {
                throw ConfigError(e.what());
              }
            }},
      Field{"degree", [](const RunConfig& c) { return std::to_string(c.degree); },
            [](RunConfig& c, const std::string& v) { c.degree = parse_unsigned<int>("degree", v); }},
      LIST_FIELD(predictors),
      BOOL_FIELD(cross_terms),
      BOOL_FIELD(include_wealth),
      BOOL_FIELD(stop_profit),
      UINT_FIELD(seed),
      UINT_FIELD(oos_seed),
      BOOL_FIELD(oos),
      UINT_FIELD(workers),
      STR_FIELD(out),
      DOUBLES_FIELD(percentiles),
      UINT_FIELD(histogram_bins),
      DOUBLES_FIELD(sweep_upper),
      DOUBLES_FIELD(sweep_lower),
      RANGES_FIELD(frontier_ranges),
      DOUBLES_FIELD(frontier_gammas),
      RANGES_FIELD(validate_ranges),
      DOUBLES_FIELD(validate_gammas),
  };
  return f;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return serialize_config(*this) == serialize_config(o) && base_dir == o.base_dir;
}

Objective RunConfig::objective_descriptor() const {
  Objective obj;
  obj.kind = objective;
  obj.range = {lower, upper, objective == ObjectiveKind::Crra ? ObjectiveKind::Strs : objective};
  obj.crra.gamma = gamma;
  obj.benchmark = benchmark;
  return obj;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    try {
      it->second->set(c, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  try {
    c = parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  c.base_dir = path.parent_path();
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(c) + "\n";
  return out;
}

std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void validate_config(const RunConfig& c) {
  if (c.data.empty()) throw ConfigError("data must name a file or a synthetic preset");
  if (c.data.rfind("synthetic:", 0) == 0) {
    synthetic_preset_from_string(c.data.substr(10));
    if (c.data_periods < 24) throw ConfigError("data_periods must be at least 24");
  }
  if (c.investable.empty()) throw ConfigError("investable must list at least one series");
  if (std::set<std::string>(c.investable.begin(), c.investable.end()).size() != c.investable.size()) {
    throw ConfigError("investable lists a series twice");
  }
  if (!(c.annual_rf > -1.0) || !std::isfinite(c.annual_rf)) throw ConfigError("annual_rf must be finite and > -1");
  if (c.horizon == 0) throw ConfigError("horizon must be positive");
  if (c.paths < 2) throw ConfigError("paths must be at least 2");
  enumerate_grid(c.investable.size(), c.mesh);
  if (!(c.cost >= 0.0) || !std::isfinite(c.cost)) throw ConfigError("cost must be a finite nonnegative rate");
  c.objective_descriptor().validate();
  if (c.degree < 1 || c.degree > 6) throw ConfigError("degree must lie in 1..6");
  for (double q : c.percentiles) {
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("percentiles must lie in [0, 1]");
  }
  if (c.histogram_bins == 0) throw ConfigError("histogram_bins must be positive");
  for (const auto& [lo, hi] : c.frontier_ranges) TargetRange{lo, hi, ObjectiveKind::Strs}.validate();
  for (const auto& [lo, hi] : c.validate_ranges) TargetRange{lo, hi, ObjectiveKind::Strs}.validate();
  for (double g : c.frontier_gammas) CrraParams{g}.validate();
  for (double g : c.validate_gammas) CrraParams{g}.validate();
  for (double u : c.sweep_upper) TargetRange{c.lower, u, ObjectiveKind::Strs}.validate();
  for (double l : c.sweep_lower) TargetRange{l, c.upper, ObjectiveKind::Strs}.validate();
  if (c.out.empty()) throw ConfigError("out must name a directory");
}

}  // namespace lsmc
