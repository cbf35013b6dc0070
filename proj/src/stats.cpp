#include "patentkb/stats.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "patentkb/io.hpp"

namespace patentkb {

// ---------------------------------------------------------------------------
// Binning

BinAssignment exponential_bins(std::span<const double> values, double base) {
  if (!(base > 1.0) || !std::isfinite(base))
    throw ValidationError(fmt::format("exponential bins: base must be > 1, got {}", base));

  // Exponent j of bin [base^-(j+1), base^-j); j = 0 is the closed top bin.
  std::vector<long> exponent(values.size());
  long deepest = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v > 0.0 && v <= 1.0))
      throw ValidationError(fmt::format("exponential bins: value {} outside (0, 1]", v));
    long j = static_cast<long>(std::floor(-std::log(v) / std::log(base)));
    if (j < 0) j = 0;
    // Settle rounding at the edges against the same pow() values used for the edges.
    while (j > 0 && v >= std::pow(base, -static_cast<double>(j))) --j;
    while (v < std::pow(base, -static_cast<double>(j + 1))) ++j;
    exponent[i] = j;
    deepest = std::max(deepest, j);
  }

  BinAssignment out;
  const long bins = deepest + 1;
  out.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (long k = 0; k <= bins; ++k)
    out.edges[static_cast<std::size_t>(k)] = std::pow(base, -static_cast<double>(bins - k));
  out.bin.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out.bin[i] = static_cast<std::size_t>(bins - 1 - exponent[i]);
  return out;
}

BinAssignment constant_bins(std::span<const double> values, double width) {
  if (!(width > 0.0 && width <= 1.0))
    throw ValidationError(fmt::format("constant bins: width must lie in (0, 1], got {}", width));
  const auto bins = static_cast<std::size_t>(std::llround(1.0 / width));
  if (std::abs(static_cast<double>(bins) * width - 1.0) > 1e-9)
    throw ValidationError(fmt::format("constant bins: width {} does not divide 1", width));

  BinAssignment out;
  out.edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) out.edges[i] = static_cast<double>(i) * width;
  out.edges[bins] = 1.0;
  out.bin.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError(fmt::format("constant bins: value {} outside [0, 1]", v));
    auto b = std::min(static_cast<std::size_t>(std::floor(v / width)), bins - 1);
    while (b + 1 < bins && v >= out.edges[b + 1]) ++b;
    while (b > 0 && v < out.edges[b]) --b;
    out.bin[i] = b;
  }
  return out;
}

BinSeries bin_response(const BinAssignment& assignment,
                       std::span<const std::optional<double>> responses) {
  if (assignment.bin.size() != responses.size())
    throw ValidationError("bin response: assignments and responses differ in length");
  const std::size_t bins = assignment.bin_count();
  BinSeries s;
  s.edges = assignment.edges;
  s.counts.assign(bins, 0);
  s.means.assign(bins, std::nullopt);
  std::vector<double> sums(bins, 0.0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (!responses[i]) continue;
    const auto b = assignment.bin[i];
    ++s.counts[b];
    sums[b] += *responses[i];
    ++total;
  }
  if (total == 0) throw ValidationError("bin response: no value has a defined response");
  s.cumulative_fraction.resize(bins);
  std::size_t running = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (s.counts[b] > 0) s.means[b] = sums[b] / static_cast<double>(s.counts[b]);
    running += s.counts[b];
    s.cumulative_fraction[b] = static_cast<double>(running) / static_cast<double>(total);
  }
  return s;
}

void write_bin_csv(std::ostream& out, const BinSeries& s) {
  out << "bin_low,bin_high,count,mean_rd_km,cumulative_fraction\n";
  for (std::size_t b = 0; b < s.bin_count(); ++b) {
    out << format_number(s.edges[b]) << ',' << format_number(s.edges[b + 1]) << ',' << s.counts[b]
        << ',' << (s.means[b] ? format_number(*s.means[b]) : std::string()) << ','
        << format_number(s.cumulative_fraction[b]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Correlation

std::string_view to_string(Tails tails) { return tails == Tails::Two ? "two-sided" : "one-sided"; }

Tails parse_tails(std::string_view text) {
  if (text == "two" || text == "two-sided") return Tails::Two;
  if (text == "one" || text == "one-sided") return Tails::One;
  throw ValidationError(fmt::format("unknown tails '{}' (two, one)", text));
}

Eigen::Index DataTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<Eigen::Index>(i);
  throw ValidationError(fmt::format("unknown column '{}'", name));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

DataTable read_data_table(std::istream& in) {
  DataTable t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("table: empty input");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw ValidationError("table: need a name column and at least one value column");
  t.columns.assign(header.begin() + 1, header.end());

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ValidationError(fmt::format("table line {}: expected {} cells, got {}", line_no,
                                        header.size(), cells.size()),
                            line_no);
    t.row_names.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cells[c], &used));
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError(fmt::format("table line {}: '{}' in column '{}' is not a number",
                                          line_no, cells[c], header[c]),
                              line_no, header[c]);
      }
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return t;
}

DataTable read_data_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open table '{}'", path));
  try {
    return read_data_table(in);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()), e.line().value_or(0), e.field());
  }
}

CorrelationMatrix correlation_matrix(const DataTable& table, const std::vector<std::string>& columns,
                                     const std::vector<std::string>& exclude, double alpha,
                                     Tails tails) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  if (columns.empty()) throw ValidationError("correlation: no columns selected");

  std::vector<Eigen::Index> rows;
  CorrelationMatrix m;
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    if (std::find(exclude.begin(), exclude.end(), table.row_names[r]) != exclude.end()) continue;
    rows.push_back(static_cast<Eigen::Index>(r));
    m.rows_used.push_back(table.row_names[r]);
  }
  if (rows.size() < 3)
    throw ValidationError(
        fmt::format("correlation: need at least 3 rows after exclusion, have {}", rows.size()));

  const auto k = static_cast<Eigen::Index>(columns.size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd data(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto src = table.column_index(columns[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double v = table.values(rows[static_cast<std::size_t>(r)], src);
      if (std::isnan(v))
        throw ValidationError(fmt::format("correlation: missing value in column '{}' for '{}'",
                                          columns[static_cast<std::size_t>(c)],
                                          m.rows_used[static_cast<std::size_t>(r)]));
      data(r, c) = v;
    }
  }

  m.labels = columns;
  m.n = n;
  m.alpha = alpha;
  m.tails = tails;
  m.r = Eigen::MatrixXd::Identity(k, k);
  m.p = Eigen::MatrixXd::Zero(k, k);
  m.significant.setConstant(k, k, true);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const auto test = pearson_test(data.col(a), data.col(b), alpha, tails);
      m.r(a, b) = m.r(b, a) = test.r;
      m.p(a, b) = m.p(b, a) = test.p;
      m.significant(a, b) = m.significant(b, a) = test.significant;
    }
  }
  return m;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
  out << "row,column,r,p,significant,n,alpha,tails\n";
  const auto k = static_cast<Eigen::Index>(m.labels.size());
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      out << m.labels[static_cast<std::size_t>(a)] << ',' << m.labels[static_cast<std::size_t>(b)]
          << ',' << format_number(m.r(a, b)) << ',' << format_number(m.p(a, b)) << ','
          << (m.significant(a, b) ? 1 : 0) << ',' << m.n << ',' << format_number(m.alpha) << ','
          << to_string(m.tails) << '\n';
}

// ---------------------------------------------------------------------------
// Regression output

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

std::string format_regression_table(const RegressionResult<double>& r, const std::string& dependent) {
  constexpr int kLabel = 24;
  constexpr int kValue = 26;
  const std::string rule(kLabel + kValue, '=');
  const std::string thin(kLabel + kValue, '-');
  std::string s;
  auto row = [&](const std::string& label, const std::string& value) {
    s += fmt::format("{:<{}}{:>{}}\n", label, kLabel, value, kValue);
  };
  s += rule + "\n";
  row("", "Dependent variable:");
  row("", dependent);
  s += thin + "\n";
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    row(r.names[i], format_number(r.coefficients(idx)) + significance_stars(r.p_values(idx)));
    row("", "(" + format_number(r.std_errors(idx)) + ")");
    row("", "");
  }
  s += thin + "\n";
  row("Observations", std::to_string(r.n));
  row("R2", fmt::format("{:.2f}", r.r_squared));
  row("Adjusted R2", fmt::format("{:.2f}", r.adjusted_r_squared));
  row("Residual Std. Error",
      fmt::format("{} (df = {})", format_number(r.residual_std_error), r.df_residual));
  row("F Statistic", fmt::format("{}{} (df = {}; {})", format_number(r.f_statistic),
                                 significance_stars(r.f_p_value), r.f_df1, r.f_df2));
  s += rule + "\n";
  row("Note:", "*p<0.1; **p<0.05; ***p<0.01");
  return s;
}

std::string regression_to_json(const RegressionResult<double>& r, const std::string& dependent) {
  // Infinite F (exact fit) is emitted as null, JSON has no infinity.
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["dependent"] = dependent;
  j["coefficients"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    j["coefficients"].push_back({{"name", r.names[i]},
                                 {"estimate", num(r.coefficients(idx))},
                                 {"std_error", num(r.std_errors(idx))},
                                 {"t", num(r.t_values(idx))},
                                 {"p", num(r.p_values(idx))},
                                 {"stars", significance_stars(r.p_values(idx))}});
  }
  j["n"] = r.n;
  j["r_squared"] = num(r.r_squared);
  j["adjusted_r_squared"] = num(r.adjusted_r_squared);
  j["residual_std_error"] = num(r.residual_std_error);
  j["df_residual"] = r.df_residual;
  j["f_statistic"] = num(r.f_statistic);
  j["f_df"] = {r.f_df1, r.f_df2};
  j["f_p_value"] = num(r.f_p_value);
  return j.dump(2) + "\n";
}

}  // namespace patentkb
