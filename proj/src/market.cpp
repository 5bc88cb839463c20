#include "lsmc/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "lsmc/error.hpp"
#include "lsmc/parallel.hpp"
#include "lsmc/rng.hpp"

namespace lsmc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// YYYY-MM or YYYY-MM-DD.
bool valid_period(const std::string& s) {
  if (s.size() != 7 && s.size() != 10) return false;
  if (!all_digits(std::string_view(s).substr(0, 4)) || s[4] != '-' ||
      !all_digits(std::string_view(s).substr(5, 2))) {
    return false;
  }
  const int month = std::stoi(s.substr(5, 2));
  if (month < 1 || month > 12) return false;
  if (s.size() == 10) {
    if (s[7] != '-' || !all_digits(std::string_view(s).substr(8, 2))) return false;
    const int day = std::stoi(s.substr(8, 2));
    if (day < 1 || day > 31) return false;
  }
  return true;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && std::isfinite(out);
}

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("scenario file truncated");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const auto n = read_pod<std::uint32_t>(in);
  if (n > (1u << 20)) throw IoError("scenario file has an implausible name length");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw IoError("scenario file truncated");
  return s;
}

// One month before a YYYY-MM or YYYY-MM-DD token.
std::string previous_period(const std::string& s) {
  int year = std::stoi(s.substr(0, 4));
  int month = std::stoi(s.substr(5, 2)) - 1;
  if (month == 0) {
    month = 12;
    --year;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return std::string(buf) + s.substr(7);
}

constexpr char kScenarioMagic[8] = {'L', 'S', 'M', 'C', 'S', 'C', 'N', '1'};

}  // namespace

std::size_t ReturnsTable::column(const std::string& name) const {
  const auto it = std::find(series_names.begin(), series_names.end(), name);
  if (it == series_names.end()) throw DataError("unknown series '" + name + "'");
  return static_cast<std::size_t>(it - series_names.begin());
}

ReturnsTable parse_returns_csv(std::istream& in, const IngestOptions& options, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto where = [&] { return source + ":" + std::to_string(line_no); };

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.size() < 2) throw DataError(source + ": header must name a period column and at least one series");
  std::vector<std::string> file_names(header.begin() + 1, header.end());
  {
    std::set<std::string> seen;
    for (const auto& n : file_names) {
      if (n.empty()) throw DataError(source + ": empty series name in header");
      if (!seen.insert(n).second) throw DataError(source + ": duplicate series name '" + n + "'");
    }
  }

  std::vector<std::string> selected = options.columns.empty() ? file_names : options.columns;
  std::vector<std::size_t> file_col;
  for (const auto& name : selected) {
    const auto it = std::find(file_names.begin(), file_names.end(), name);
    if (it == file_names.end()) throw DataError(source + ": unknown column '" + name + "'");
    file_col.push_back(static_cast<std::size_t>(it - file_names.begin()));
  }
  for (const auto& name : options.price_columns) {
    if (std::find(selected.begin(), selected.end(), name) == selected.end()) {
      throw DataError(source + ": unknown price column '" + name + "'");
    }
  }
  std::vector<bool> is_price(selected.size());
  for (std::size_t k = 0; k < selected.size(); ++k) {
    is_price[k] = options.all_prices || std::find(options.price_columns.begin(), options.price_columns.end(),
                                                  selected[k]) != options.price_columns.end();
  }

  // Raw cells; NaN marks a gap.
  std::vector<std::string> dates;
  std::vector<std::vector<double>> raw;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(where() + ": expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    if (!valid_period(cells[0])) throw DataError(where() + ": bad period token '" + cells[0] + "'");
    if (!dates.empty()) {
      if (cells[0] == dates.back()) throw DataError(where() + ": duplicate date " + cells[0]);
      if (cells[0] < dates.back()) throw DataError(where() + ": dates are not increasing at " + cells[0]);
    }
    std::vector<double> row(selected.size());
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const std::string& cell = cells[file_col[k] + 1];
      if (cell.empty() || cell == "NA" || cell == "NaN") {
        row[k] = NAN;
        continue;
      }
      if (!parse_double(cell, row[k])) {
        throw DataError(where() + ": non-numeric cell '" + cell + "' in column " + selected[k]);
      }
      if (is_price[k] && row[k] <= 0) throw DataError(where() + ": nonpositive price in column " + selected[k]);
      if (!is_price[k] && !options.returns_are_log && row[k] <= -1) {
        throw DataError(where() + ": simple return <= -100% in column " + selected[k]);
      }
    }
    dates.push_back(cells[0]);
    raw.push_back(std::move(row));
  }

  // Convert to log returns. A price return needs this and the previous row.
  std::vector<std::string> out_dates;
  std::vector<std::vector<double>> out_rows;
  const bool any_price = std::find(is_price.begin(), is_price.end(), true) != is_price.end();
  for (std::size_t t = any_price ? 1 : 0; t < raw.size(); ++t) {
    std::vector<double> r(selected.size());
    bool gap = false;
    for (std::size_t k = 0; k < selected.size(); ++k) {
      if (is_price[k]) {
        r[k] = std::log(raw[t][k] / raw[t - 1][k]);
      } else {
        r[k] = options.returns_are_log ? raw[t][k] : std::log1p(raw[t][k]);
      }
      gap = gap || std::isnan(r[k]);
    }
    if (gap) {
      if (!options.drop_gaps) throw DataError(source + ": missing value at " + dates[t]);
      continue;
    }
    out_dates.push_back(dates[t]);
    out_rows.push_back(std::move(r));
  }

  const std::size_t min_rows = selected.size() + 2;
  if (out_rows.size() < min_rows) {
    throw DataError(source + ": " + std::to_string(out_rows.size()) + " usable rows, need at least " +
                    std::to_string(min_rows));
  }
  ReturnsTable table;
  table.dates = std::move(out_dates);
  table.series_names = selected;
  table.log_returns.resize(static_cast<Eigen::Index>(out_rows.size()), static_cast<Eigen::Index>(selected.size()));
  for (std::size_t t = 0; t < out_rows.size(); ++t) {
    for (std::size_t k = 0; k < selected.size(); ++k) {
      table.log_returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = out_rows[t][k];
    }
  }
  return table;
}

ReturnsTable ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_returns_csv(in, options, path.string());
}

void write_price_csv(const ReturnsTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "date";
  for (const auto& n : table.series_names) out << ',' << n;
  out << '\n';
  const Eigen::Index s = table.log_returns.cols();
  std::vector<double> level(static_cast<std::size_t>(s), 100.0);
  char buf[64];
  out << previous_period(table.dates.front());
  for (Eigen::Index k = 0; k < s; ++k) out << ",100";
  out << '\n';
  for (Eigen::Index t = 0; t < table.log_returns.rows(); ++t) {
    out << table.dates[static_cast<std::size_t>(t)];
    for (Eigen::Index k = 0; k < s; ++k) {
      level[static_cast<std::size_t>(k)] *= std::exp(table.log_returns(t, k));
      std::snprintf(buf, sizeof buf, "%.17g", level[static_cast<std::size_t>(k)]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> VarModel::investable_names() const {
  std::vector<std::string> out;
  for (std::size_t i : investable_index) out.push_back(series_names[i]);
  return out;
}

VarModel calibrate_var1(const ReturnsTable& table, const std::vector<std::string>& investable) {
  const Eigen::Index t = table.log_returns.rows();
  const Eigen::Index s = table.log_returns.cols();
  if (t < s + 2) throw CalibrationError("calibration needs at least series + 2 rows");
  if (investable.empty()) throw CalibrationError("no investable series given");

  VarModel model;
  model.series_names = table.series_names;
  for (const auto& name : investable) {
    const auto it = std::find(table.series_names.begin(), table.series_names.end(), name);
    if (it == table.series_names.end()) throw CalibrationError("investable series '" + name + "' not in data");
    const auto idx = static_cast<std::size_t>(it - table.series_names.begin());
    if (std::find(model.investable_index.begin(), model.investable_index.end(), idx) !=
        model.investable_index.end()) {
      throw CalibrationError("investable series '" + name + "' listed twice");
    }
    model.investable_index.push_back(idx);
  }

  Eigen::MatrixXd x(t - 1, s + 1);
  x.col(0).setOnes();
  x.rightCols(s) = table.log_returns.topRows(t - 1);
  const Eigen::MatrixXd y = table.log_returns.bottomRows(t - 1);

  // Constant series first: they duplicate the intercept.
  std::vector<std::string> offending;
  for (Eigen::Index k = 0; k < s; ++k) {
    const auto col = x.col(k + 1);
    if (col.maxCoeff() - col.minCoeff() == 0.0) offending.push_back(table.series_names[static_cast<std::size_t>(k)]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (offending.empty() && qr.rank() < s + 1) {
    const auto perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < perm.size(); ++i) {
      offending.push_back(perm(i) == 0 ? std::string("intercept")
                                       : table.series_names[static_cast<std::size_t>(perm(i) - 1)]);
    }
  }
  if (!offending.empty()) {
    std::string names;
    for (const auto& n : offending) names += (names.empty() ? "" : ", ") + n;
    throw CalibrationError("lagged regressors are rank deficient; offending columns: " + names);
  }
  const Eigen::MatrixXd b = qr.solve(y);  // (S+1) x S
  model.intercept = b.row(0).transpose();
  model.coefficient = b.bottomRows(s).transpose();
  model.residuals = y - x * b;
  model.initial_state = table.log_returns.row(t - 1).transpose();

  if (!model.coefficient.allFinite()) throw CalibrationError("VAR coefficients are not finite");
  const Eigen::VectorXcd eig = model.coefficient.eigenvalues();
  model.spectral_radius = eig.cwiseAbs().maxCoeff();
  if (model.spectral_radius >= 1.0) {
    model.warnings.push_back("VAR spectral radius " + std::to_string(model.spectral_radius) +
                             " >= 1: simulated dynamics are not stationary");
  }
  return model;
}

double monthly_rf_gross(double annual_rf) { return std::pow(1.0 + annual_rf, 1.0 / 12.0); }

ScenarioSet simulate_paths(const VarModel& model, std::size_t m_paths, std::size_t n_periods,
                           double annual_rf, std::uint64_t seed, unsigned workers) {
  if (m_paths == 0 || n_periods == 0) throw DomainError("simulate_paths needs at least one path and period");
  if (model.residuals.rows() == 0) throw DomainError("simulate_paths: model has no residual rows");
  ScenarioSet out;
  out.paths = m_paths;
  out.periods = n_periods;
  out.series = model.series_count();
  out.assets = model.investable_index.size();
  out.rf_gross = monthly_rf_gross(annual_rf);
  out.seed = seed;
  out.series_names = model.series_names;
  out.investable_index = model.investable_index;
  out.excess_returns.assign(m_paths * n_periods * out.assets, 0.0);
  out.predictors.assign(m_paths * (n_periods + 1) * out.series, 0.0);

  const auto s = static_cast<Eigen::Index>(out.series);
  const auto rows = static_cast<std::uint64_t>(model.residuals.rows());
  parallel_for(m_paths, workers, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd x(s), next(s);
    for (std::size_t m = begin; m < end; ++m) {
      auto rng = substream(seed, Stream::Scenarios, m);
      x = model.initial_state;
      std::copy(x.data(), x.data() + s, out.state_mut(m, 0).begin());
      for (std::size_t n = 0; n < n_periods; ++n) {
        const auto r = static_cast<Eigen::Index>(uniform_below(rng, rows));
        next.noalias() = model.intercept + model.coefficient * x;
        next += model.residuals.row(r).transpose();
        x = next;
        std::copy(x.data(), x.data() + s, out.state_mut(m, n + 1).begin());
        auto ex = out.excess_mut(m, n);
        for (std::size_t i = 0; i < out.assets; ++i) {
          ex[i] = std::exp(x(static_cast<Eigen::Index>(model.investable_index[i]))) - out.rf_gross;
        }
      }
    }
  });
  return out;
}

std::vector<double> benchmark_paths(const ScenarioSet& s, const std::string& benchmark) {
  const std::size_t stride = s.periods + 1;
  std::vector<double> b(s.paths * stride, 1.0);
  if (benchmark == "equal_weight") {
    for (std::size_t m = 0; m < s.paths; ++m) {
      for (std::size_t n = 0; n < s.periods; ++n) {
        double avg = 0.0;
        for (double r : s.excess(m, n)) avg += r;
        avg /= static_cast<double>(s.assets);
        b[m * stride + n + 1] = b[m * stride + n] * (s.rf_gross + avg);
      }
    }
    return b;
  }
  const auto it = std::find(s.series_names.begin(), s.series_names.end(), benchmark);
  if (it == s.series_names.end()) throw ConfigError("unknown benchmark '" + benchmark + "'");
  const auto k = static_cast<std::size_t>(it - s.series_names.begin());
  for (std::size_t m = 0; m < s.paths; ++m) {
    for (std::size_t n = 0; n < s.periods; ++n) {
      b[m * stride + n + 1] = b[m * stride + n] * std::exp(s.state(m, n + 1)[k]);
    }
  }
  return b;
}

void save_scenarios(const ScenarioSet& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kScenarioMagic, sizeof kScenarioMagic);
  write_pod(out, static_cast<std::uint64_t>(s.paths));
  write_pod(out, static_cast<std::uint64_t>(s.periods));
  write_pod(out, static_cast<std::uint64_t>(s.assets));
  write_pod(out, static_cast<std::uint64_t>(s.series));
  write_pod(out, s.seed);
  write_pod(out, s.rf_gross);
  for (const auto& n : s.series_names) write_string(out, n);
  for (std::size_t i : s.investable_index) write_pod(out, static_cast<std::uint64_t>(i));
  out.write(reinterpret_cast<const char*>(s.excess_returns.data()),
            static_cast<std::streamsize>(s.excess_returns.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(s.predictors.data()),
            static_cast<std::streamsize>(s.predictors.size() * sizeof(double)));
  if (!out) throw IoError("write failed for " + path.string());
}

ScenarioSet load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kScenarioMagic, sizeof magic) != 0) {
    throw IoError(path.string() + " is not a scenario file");
  }
  ScenarioSet s;
  s.paths = read_pod<std::uint64_t>(in);
  s.periods = read_pod<std::uint64_t>(in);
  s.assets = read_pod<std::uint64_t>(in);
  s.series = read_pod<std::uint64_t>(in);
  s.seed = read_pod<std::uint64_t>(in);
  s.rf_gross = read_pod<double>(in);
  if (s.series > 4096 || s.assets > s.series || s.paths > (1ull << 32) || s.periods > 100000) {
    throw IoError(path.string() + ": implausible scenario shape");
  }
  for (std::size_t k = 0; k < s.series; ++k) s.series_names.push_back(read_string(in));
  for (std::size_t i = 0; i < s.assets; ++i) s.investable_index.push_back(read_pod<std::uint64_t>(in));
  s.excess_returns.resize(s.paths * s.periods * s.assets);
  s.predictors.resize(s.paths * (s.periods + 1) * s.series);
  in.read(reinterpret_cast<char*>(s.excess_returns.data()),
          static_cast<std::streamsize>(s.excess_returns.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(s.predictors.data()),
          static_cast<std::streamsize>(s.predictors.size() * sizeof(double)));
  if (!in) throw IoError(path.string() + ": scenario file truncated");
  return s;
}

SyntheticPreset synthetic_preset_from_string(const std::string& name) {
  if (name == "default") return SyntheticPreset::Default;
  if (name == "calm") return SyntheticPreset::Calm;
  throw ConfigError("unknown synthetic preset '" + name + "'");
}

std::vector<std::string> synthetic_investable() { return {"BOND", "US_EQ", "EM_EQ"}; }

SyntheticSpec synthetic_spec(SyntheticPreset preset) {
  SyntheticSpec spec;
  spec.names = {"BOND", "US_EQ", "EM_EQ", "GOLD", "USD"};
  Eigen::VectorXd mean(5), vol(5);
  if (preset == SyntheticPreset::Default) {
    mean << 0.0030, 0.0070, 0.0080, 0.0030, 0.0000;
    vol << 0.010, 0.040, 0.060, 0.045, 0.020;
  } else {
    mean << 0.0030, 0.0060, 0.0070, 0.0020, 0.0000;
    vol << 0.005, 0.020, 0.030, 0.020, 0.010;
  }
  Eigen::MatrixXd corr(5, 5);
  corr << 1.00, -0.10, -0.05, 0.10, 0.05,
         -0.10, 1.00, 0.70, 0.05, -0.20,
         -0.05, 0.70, 1.00, 0.15, -0.35,
          0.10, 0.05, 0.15, 1.00, -0.40,
          0.05, -0.20, -0.35, -0.40, 1.00;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a(0, 0) = 0.10;
  a(1, 1) = 0.05;
  a(2, 2) = 0.08;
  a(3, 3) = 0.05;
  a(4, 4) = 0.10;
  a(1, 4) = -0.15;  // dollar strength weighs on equities next month
  a(2, 4) = -0.25;
  a(2, 3) = 0.10;   // gold momentum spills into emerging markets
  a(1, 0) = 0.20;
  spec.coefficient = a;
  spec.intercept = (Eigen::MatrixXd::Identity(5, 5) - a) * mean;
  const Eigen::MatrixXd cov = vol.asDiagonal() * corr * vol.asDiagonal();
  spec.innovation_chol = cov.llt().matrixL();
  return spec;
}

ReturnsTable synthetic_returns(SyntheticPreset preset, std::size_t periods, std::uint64_t seed) {
  const SyntheticSpec spec = synthetic_spec(preset);
  const Eigen::Index s = spec.intercept.size();
  ReturnsTable table;
  table.series_names = spec.names;
  table.log_returns.resize(static_cast<Eigen::Index>(periods), s);
  auto rng = substream(seed, Stream::Synthetic, static_cast<std::uint64_t>(preset));
  // Start at the stationary mean and discard a burn-in.
  const Eigen::MatrixXd ia = Eigen::MatrixXd::Identity(s, s) - spec.coefficient;
  Eigen::VectorXd x = ia.lu().solve(spec.intercept);
  Eigen::VectorXd eps(s);
  for (std::size_t t = 0; t < periods + 100; ++t) {
    for (Eigen::Index k = 0; k < s; ++k) eps(k) = standard_normal(rng);
    x = spec.intercept + spec.coefficient * x + spec.innovation_chol * eps;
    if (t >= 100) table.log_returns.row(static_cast<Eigen::Index>(t - 100)) = x.transpose();
  }
  for (std::size_t t = 0; t < periods; ++t) {
    const int year = 1990 + static_cast<int>(t / 12);
    const int month = 1 + static_cast<int>(t % 12);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    table.dates.emplace_back(buf);
  }
  return table;
}

}  // namespace lsmc
