#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "patentkb/error.hpp"

namespace patentkb {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Binning

/// Bin index per input value plus ascending bin edges (edges.size() == bins + 1).
struct BinAssignment {
  std::vector<double> edges;
  std::vector<std::size_t> bin;

  std::size_t bin_count() const { return edges.size() - 1; }
};

/// Edges 1, 1/base, 1/base^2, ... down to the first edge at or below the
/// smallest value. Bins are half-open [low, high) except the top one, which
/// is closed at 1. Values must lie in (0, 1].
BinAssignment exponential_bins(std::span<const double> values, double base);

/// Bins [i*width, (i+1)*width) over [0, 1]; 1.0 goes to the last bin.
/// `width` must divide 1 to within 1e-9.
BinAssignment constant_bins(std::span<const double> values, double width);

struct BinSeries {
  std::vector<double> edges;
  std::vector<std::size_t> counts;           // contributors per bin
  std::vector<std::optional<double>> means;  // absent for empty bins
  std::vector<double> cumulative_fraction;   // ascending bins, ends at 1

  std::size_t bin_count() const { return counts.size(); }
};

/// Per-bin mean of the defined responses. Throws ValidationError when nothing contributes.
BinSeries bin_response(const BinAssignment& assignment,
                       std::span<const std::optional<double>> responses);

/// bin_low,bin_high,count,mean_rd_km,cumulative_fraction
void write_bin_csv(std::ostream& out, const BinSeries& series);

// ---------------------------------------------------------------------------
// Correlation

enum class Tails { Two, One };

std::string_view to_string(Tails tails);
Tails parse_tails(std::string_view text);

/// Pearson correlation coefficient. Throws ValidationError for constant input.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson_r(const Eigen::MatrixBase<DerivedX>& x,
                                    const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw ValidationError("pearson: x and y differ in length");
  if (x.size() < 2) throw ValidationError("pearson: need at least 2 observations");
  const Vector<Scalar> xc = x.array() - x.mean();
  const Vector<Scalar> yc = y.array() - y.mean();
  const Scalar sxx = xc.squaredNorm();
  const Scalar syy = yc.squaredNorm();
  if (sxx == Scalar(0) || syy == Scalar(0)) throw ValidationError("pearson: constant input");
  const Scalar r = xc.dot(yc) / std::sqrt(sxx * syy);
  return std::clamp(r, Scalar(-1), Scalar(1));
}

template <typename Scalar>
struct PearsonTest {
  Scalar r{};
  Scalar t{};
  Scalar p{};  // two-sided, or one-sided in the direction of r
  bool significant = false;
  Eigen::Index n = 0;
  Tails tails = Tails::Two;
};

/// p-value of a correlation r observed over n pairs (Student t, n - 2 df).
template <typename Scalar>
Scalar correlation_p_value(Scalar r, Eigen::Index n, Tails tails) {
  if (std::abs(r) >= Scalar(1)) return Scalar(0);
  const Scalar df = static_cast<Scalar>(n - 2);
  const Scalar t = r * std::sqrt(df / (Scalar(1) - r * r));
  const boost::math::students_t_distribution<Scalar> dist(df);
  const Scalar upper = boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return tails == Tails::Two ? Scalar(2) * upper : upper;
}

template <typename DerivedX, typename DerivedY>
PearsonTest<typename DerivedX::Scalar> pearson_test(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedY>& y,
                                                    typename DerivedX::Scalar alpha,
                                                    Tails tails = Tails::Two) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() < 3) throw ValidationError("pearson test: need at least 3 observations");
  PearsonTest<Scalar> out;
  out.n = x.size();
  out.tails = tails;
  out.r = pearson_r(x, y);
  const Scalar df = static_cast<Scalar>(out.n - 2);
  const Scalar one_minus = Scalar(1) - out.r * out.r;
  out.t = one_minus > Scalar(0) ? out.r * std::sqrt(df / one_minus)
                                : std::copysign(std::numeric_limits<Scalar>::infinity(), out.r);
  out.p = correlation_p_value(out.r, out.n, tails);
  out.significant = out.p < alpha;
  return out;
}

/// Technologies-by-indicators table as read from a summary CSV.
struct DataTable {
  std::vector<std::string> row_names;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // NaN marks an empty cell

  /// Throws ValidationError for unknown names.
  Eigen::Index column_index(std::string_view name) const;
};

/// First column holds the row name; other columns are numeric or empty.
DataTable read_data_table(std::istream& in);
DataTable read_data_table_file(const std::string& path);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::string> rows_used;
  Eigen::MatrixXd r;
  Eigen::MatrixXd p;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> significant;
  Eigen::Index n = 0;
  double alpha = 0.1;
  Tails tails = Tails::Two;
};

/// Pairwise Pearson tests between the named columns over all rows not in
/// `exclude`. Needs at least 3 rows and no missing cells in the chosen columns.
CorrelationMatrix correlation_matrix(const DataTable& table, const std::vector<std::string>& columns,
                                     const std::vector<std::string>& exclude, double alpha,
                                     Tails tails = Tails::Two);

/// Long format: row,column,r,p,significant,n,alpha,tails
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);

// ---------------------------------------------------------------------------
// Least squares

enum class FitKind { Linear, LogX };

template <typename Scalar>
struct FitResult {
  FitKind kind = FitKind::Linear;
  Scalar slope{};
  Scalar intercept{};
  Scalar r_squared{};
  Eigen::Index n = 0;
};

/// Ordinary least squares of y on x (Linear) or on ln x (LogX).
template <typename DerivedX, typename DerivedY>
FitResult<typename DerivedX::Scalar> fit(const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedY>& y, FitKind kind) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw ValidationError("fit: x and y differ in length");
  if (x.size() < 3) throw ValidationError("fit: need at least 3 points");
  if (kind == FitKind::LogX && (x.array() <= Scalar(0)).any())
    throw ValidationError("fit: logarithmic fit needs x > 0");

  const Vector<Scalar> u = kind == FitKind::LogX ? Vector<Scalar>(x.array().log()) : Vector<Scalar>(x);
  const Scalar u_mean = u.mean();
  const Scalar y_mean = y.mean();
  const Vector<Scalar> uc = u.array() - u_mean;
  const Vector<Scalar> yc = y.array() - y_mean;
  const Scalar suu = uc.squaredNorm();
  if (suu == Scalar(0)) throw ValidationError("fit: x has zero variance");

  FitResult<Scalar> out;
  out.kind = kind;
  out.n = x.size();
  out.slope = uc.dot(yc) / suu;
  out.intercept = y_mean - out.slope * u_mean;
  const Scalar syy = yc.squaredNorm();
  if (syy == Scalar(0)) {
    out.r_squared = Scalar(1);
  } else if (out.slope == Scalar(0)) {
    out.r_squared = Scalar(0);
  } else {
    const Vector<Scalar> fitted = (out.slope * u.array() + out.intercept).matrix();
    const Scalar r = pearson_r(fitted, y);
    out.r_squared = r * r;
  }
  return out;
}

template <typename Scalar>
struct RegressionResult {
  std::vector<std::string> names;  // predictors, then "Constant"
  Vector<Scalar> coefficients;
  Vector<Scalar> std_errors;
  Vector<Scalar> t_values;
  Vector<Scalar> p_values;
  Scalar r_squared{};
  Scalar adjusted_r_squared{};
  Scalar residual_std_error{};
  Eigen::Index df_residual = 0;
  Scalar f_statistic{};
  Eigen::Index f_df1 = 0;
  Eigen::Index f_df2 = 0;
  Scalar f_p_value{};
  Eigen::Index n = 0;
};

/// OLS with intercept and classical standard errors.
///
/// Solved by column-pivoted QR; (X'X)^-1 for the standard errors comes from
/// the same factorisation. Throws ValidationError on rank deficiency,
/// n <= k + 1, or a constant response.
template <typename DerivedY, typename DerivedX>
RegressionResult<typename DerivedY::Scalar> regress(const Eigen::MatrixBase<DerivedY>& y,
                                                    const Eigen::MatrixBase<DerivedX>& X,
                                                    const std::vector<std::string>& names) {
  using Scalar = typename DerivedY::Scalar;
  const Eigen::Index n = y.size();
  const Eigen::Index k = X.cols();
  if (X.rows() != n) throw ValidationError("regress: predictors and response differ in length");
  if (static_cast<Eigen::Index>(names.size()) != k)
    throw ValidationError("regress: one name per predictor required");
  if (n <= k + 1)
    throw ValidationError("regress: need more observations than predictors + 1");

  Matrix<Scalar> design(n, k + 1);
  design.leftCols(k) = X;
  design.col(k).setOnes();

  const Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(design);
  if (qr.rank() < k + 1) throw ValidationError("regress: predictor matrix is rank deficient");

  RegressionResult<Scalar> out;
  out.names = names;
  out.names.emplace_back("Constant");
  out.n = n;
  out.coefficients = qr.solve(Vector<Scalar>(y));

  const Vector<Scalar> residuals = y - design * out.coefficients;
  const Scalar rss = residuals.squaredNorm();
  const Scalar tss = (y.array() - y.mean()).matrix().squaredNorm();
  if (tss == Scalar(0)) throw ValidationError("regress: response is constant");

  out.df_residual = n - k - 1;
  const auto df = static_cast<Scalar>(out.df_residual);
  const Scalar sigma2 = rss / df;
  out.residual_std_error = std::sqrt(sigma2);
  out.r_squared = std::clamp(Scalar(1) - rss / tss, Scalar(0), Scalar(1));
  out.adjusted_r_squared =
      Scalar(1) - (Scalar(1) - out.r_squared) * static_cast<Scalar>(n - 1) / df;

  // (X'X)^-1 = P R^-1 R^-T P^T for X P = Q R.
  const auto p = k + 1;
  const Matrix<Scalar> r_upper = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Matrix<Scalar> r_inv =
      r_upper.template triangularView<Eigen::Upper>().solve(Matrix<Scalar>::Identity(p, p));
  const Matrix<Scalar> permuted = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Matrix<Scalar> xtx_inv = perm * permuted * perm.transpose();

  out.std_errors = (sigma2 * xtx_inv.diagonal().array()).sqrt();
  out.t_values.resize(p);
  out.p_values.resize(p);
  const boost::math::students_t_distribution<Scalar> t_dist(df);
  for (Eigen::Index i = 0; i < p; ++i) {
    const Scalar b = out.coefficients(i);
    const Scalar se = out.std_errors(i);
    if (se == Scalar(0)) {
      out.t_values(i) = b == Scalar(0) ? Scalar(0) : std::copysign(std::numeric_limits<Scalar>::infinity(), b);
      out.p_values(i) = b == Scalar(0) ? Scalar(1) : Scalar(0);
    } else {
      out.t_values(i) = b / se;
      out.p_values(i) =
          Scalar(2) * boost::math::cdf(boost::math::complement(t_dist, std::abs(out.t_values(i))));
    }
  }

  out.f_df1 = k;
  out.f_df2 = out.df_residual;
  if (rss == Scalar(0)) {
    out.f_statistic = std::numeric_limits<Scalar>::infinity();
    out.f_p_value = Scalar(0);
  } else {
    out.f_statistic = ((tss - rss) / static_cast<Scalar>(k)) / sigma2;
    const boost::math::fisher_f_distribution<Scalar> f_dist(static_cast<Scalar>(k), df);
    out.f_p_value = boost::math::cdf(boost::math::complement(f_dist, out.f_statistic));
  }
  return out;
}

/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.1.
std::string significance_stars(double p);

/// Stargazer-style text block: coefficients with standard errors, then
/// observations, R2, adjusted R2, residual std. error and F statistic.
std::string format_regression_table(const RegressionResult<double>& result,
                                    const std::string& dependent);
std::string regression_to_json(const RegressionResult<double>& result, const std::string& dependent);

}  // namespace patentkb
