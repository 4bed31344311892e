#include "spectest/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace spectest {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& text, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw InvalidArgument("non-numeric cell '" + text + "' at row " + std::to_string(row) +
                          ", column '" + column + "'");
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

nlohmann::ordered_json crit_json(const std::map<double, double>& crit) {
  auto j = nlohmann::ordered_json::object();
  for (const auto& [level, value] : crit) {
    std::ostringstream key;
    key << level;
    j[key.str()] = value;
  }
  return j;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& response_column) {
  std::string line;
  while (std::getline(in, line) && trim(line).empty()) {
  }
  if (trim(line).empty()) throw InvalidArgument("CSV input is empty");
  const std::vector<std::string> header = split_row(line);
  std::size_t response = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == response_column) response = j;
  }
  if (response == header.size()) {
    throw InvalidArgument("response column '" + response_column + "' not found in header");
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != header.size()) {
      throw InvalidArgument("row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(header.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) values[j] = parse_cell(cells[j], row_no, header[j]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidArgument("CSV has a header but no data rows");

  const auto n = static_cast<Index>(rows.size());
  const auto q = static_cast<Index>(header.size() - 1);
  Dataset d;
  d.X.resize(n, q);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    Index c = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == response) {
        d.y(i) = r[j];
      } else {
        d.X(i, c++) = r[j];
      }
    }
  }
  return d;
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_csv(in, response_column);
}

void write_csv(std::ostream& out, const Dataset& data, const std::string& response_column) {
  for (Index j = 0; j < data.q(); ++j) out << 'x' << (j + 1) << ',';
  out << response_column << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.q(); ++j) out << fmt(data.X(i, j)) << ',';
    out << fmt(data.y(i)) << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& data, const std::string& response_column) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write_csv(out, data, response_column);
}

nlohmann::ordered_json to_json(const TestResult& r) {
  nlohmann::ordered_json j;
  j["t_stat"] = r.t_stat;
  j["chi_sq"] = r.chi_sq;
  j["p_analytic"] = r.p_analytic;
  j["p_bootstrap"] = r.p_bootstrap ? nlohmann::ordered_json(*r.p_bootstrap) : nullptr;
  j["boot_crit"] = crit_json(r.boot_crit);
  j["n_test"] = r.n_test;
  j["support_size"] = r.support_size;
  j["variant"] = to_string(r.variant);
  j["estimator"] = to_string(r.estimator);
  j["sigma"] = r.sigma;
  j["nu"] = r.nu;
  j["seed"] = r.seed;
  j["B"] = r.B;
  j["mu_hat"] = r.mu_hat;
  j["sigma_hat"] = r.sigma_hat;
  j["eta_l1"] = r.eta_l1;
  j["rho"] = r.rho;
  j["singleton_fallback"] = r.singleton_fallback;
  j["projector_ridge"] = r.projector_ridge;
  return j;
}

nlohmann::ordered_json to_json(const VStatResult& r) {
  nlohmann::ordered_json j;
  j["t_stat"] = r.stat;
  j["chi_sq"] = nullptr;
  j["p_analytic"] = nullptr;
  j["p_bootstrap"] = r.p_bootstrap;
  j["boot_crit"] = crit_json(r.boot_crit);
  j["n_test"] = r.n;
  j["support_size"] = nullptr;
  j["variant"] = to_string(r.kind);
  j["estimator"] = to_string(r.estimator);
  j["sigma"] = r.sigma;
  j["nu"] = nullptr;
  j["seed"] = r.seed;
  j["B"] = r.B;
  j["residual_mode"] = to_string(r.residual_mode);
  return j;
}

nlohmann::ordered_json to_json(const McReport& report) {
  nlohmann::ordered_json j;
  const McConfig& c = report.config;
  auto& cfg = j["config"];
  cfg["R"] = c.R;
  cfg["B"] = c.B;
  cfg["levels"] = c.levels;
  cfg["estimator"] = to_string(c.estimator);
  cfg["base_seed"] = c.base_seed;
  cfg["nu"] = c.nu;
  cfg["sigma"] = c.bandwidth ? nlohmann::ordered_json(*c.bandwidth) : nlohmann::ordered_json("median");
  cfg["icm_sigma"] = c.icm_bandwidth;
  cfg["train_fraction"] = c.train_fraction;
  cfg["multiplier"] = to_string(c.multiplier);
  cfg["bootstrap_residuals"] = to_string(c.bootstrap_residuals);
  auto cells = nlohmann::ordered_json::array();
  for (const McCell& m : report.cells) {
    nlohmann::ordered_json e;
    e["test"] = m.test;
    e["dgp"] = m.dgp;
    e["q"] = m.q;
    e["n"] = m.n;
    e["estimator"] = to_string(m.estimator);
    e["level"] = m.level;
    e["mode"] = m.mode;
    e["rate"] = m.rate;
    e["mc_se"] = m.mc_se;
    e["reps"] = m.reps;
    e["failures"] = m.failures;
    e["flagged"] = m.flagged;
    e["seconds"] = m.seconds;
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  return j;
}

nlohmann::ordered_json to_json(const TimeProfile& profile) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const TimingRow& r : profile.rows) {
    rows.push_back({{"test", r.test},
                    {"n", r.n},
                    {"bootstrap_seconds", r.bootstrap_seconds},
                    {"total_seconds", r.total_seconds},
                    {"reps", r.reps}});
  }
  j["rows"] = std::move(rows);
  j["exponent"] = profile.exponent;
  return j;
}

void write_csv(std::ostream& out, const McReport& report) {
  out << "test,dgp,q,n,estimator,level,mode,rate,mc_se,reps,seconds\n";
  for (const McCell& m : report.cells) {
    out << m.test << ',' << m.dgp << ',' << m.q << ',' << m.n << ',' << to_string(m.estimator) << ','
        << m.level << ',' << m.mode << ',' << fmt(m.rate) << ',' << fmt(m.mc_se) << ','
        << m.reps << ',' << m.seconds << '\n';
  }
}

void write_csv(std::ostream& out, const TimeProfile& profile) {
  out << "test,n,bootstrap_seconds,total_seconds,reps\n";
  for (const TimingRow& r : profile.rows) {
    out << r.test << ',' << r.n << ',' << r.bootstrap_seconds << ',' << r.total_seconds << ','
        << r.reps << '\n';
  }
  for (const auto& [test, slope] : profile.exponent) out << test << ",exponent," << slope << ",,\n";
}

}  // namespace spectest
