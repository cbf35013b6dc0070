#pragma once
// Brute-force reference implementations. Deliberately naive and independent of
// the library: regex matching, linear id lookups, chord distances, normal
// equations with a hand-rolled inverse, quadrature for the t distribution.

#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "patentkb/corpus.hpp"

namespace oracle {

inline std::string collapse(const std::string& code) {
  std::string up;
  for (char c : code) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  up = std::regex_replace(up, std::regex(R"(\s+)"), " ");
  return std::regex_replace(up, std::regex(R"(^ | $)"), "");
}

inline std::regex prefix_regex(const std::vector<std::string>& prefixes) {
  std::string alt;
  for (const auto& p : prefixes) {
    if (!alt.empty()) alt += '|';
    alt += std::regex_replace(collapse(p), std::regex(R"([.^$|()\[\]{}*+?\\/])"), R"(\$&)");
  }
  return std::regex("^(?:" + alt + ")");
}

inline bool matches(const patentkb::PatentRecord& r, const std::regex& re) {
  for (const auto& c : r.cpc_codes)
    if (std::regex_search(collapse(c), re)) return true;
  return false;
}

inline const patentkb::PatentRecord* lookup(const std::vector<patentkb::PatentRecord>& recs,
                                            const std::string& id) {
  for (const auto& r : recs)
    if (r.family_id == id) return &r;
  return nullptr;
}

inline constexpr double kRadius = 6371.0088;

/// Great-circle distance from the straight-line chord between unit vectors.
inline double chord_km(double lat1, double lon1, double lat2, double lon2) {
  const double d = std::numbers::pi / 180.0;
  const double x1 = std::cos(lat1 * d) * std::cos(lon1 * d), y1 = std::cos(lat1 * d) * std::sin(lon1 * d),
               z1 = std::sin(lat1 * d);
  const double x2 = std::cos(lat2 * d) * std::cos(lon2 * d), y2 = std::cos(lat2 * d) * std::sin(lon2 * d),
               z2 = std::sin(lat2 * d);
  const double chord = std::sqrt((x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2) + (z1 - z2) * (z1 - z2));
  return 2.0 * kRadius * std::asin(std::min(1.0, chord / 2.0));
}

inline double chord_km(const patentkb::PatentRecord& a, const patentkb::PatentRecord& b) {
  const auto& p = a.inventor_locations.front();
  const auto& q = b.inventor_locations.front();
  return chord_km(p.lat, p.lon, q.lat, q.lon);
}

struct Indicators {
  std::size_t n = 0;
  double sd = 0, uf = 0, id = 0, rid = 0;
  std::optional<double> sdf, idf, ipd, rd, rd_home;
};

inline std::optional<double> mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Everything recomputed from the raw records by nested loops.
inline Indicators indicators(const std::vector<patentkb::PatentRecord>& recs,
                             const std::vector<std::string>& prefixes,
                             const std::set<std::string>& home_countries) {
  const auto re = prefix_regex(prefixes);
  std::vector<const patentkb::PatentRecord*> ms;
  for (const auto& r : recs)
    if (matches(r, re)) ms.push_back(&r);

  Indicators out;
  out.n = ms.size();
  double sci = 0, uni = 0, internal = 0;
  std::vector<double> sdf, idf, rd, rd_home;
  for (const auto* p : ms) {
    sci += p->npl_scientific;
    if (p->sectors.count("UNIVERSITY")) uni += 1;
    const std::set<std::string> cited(p->cited_family_ids.begin(), p->cited_family_ids.end());
    const double denom = static_cast<double>(cited.size() + p->npl_total);
    if (denom > 0) sdf.push_back(p->npl_scientific / denom);

    double in_corpus = 0, inside = 0;
    std::vector<double> dist;
    for (const auto& id : cited) {
      const auto* t = lookup(recs, id);
      if (!t) continue;
      in_corpus += 1;
      if (matches(*t, re)) inside += 1;
      if (!p->inventor_locations.empty() && !t->inventor_locations.empty())
        dist.push_back(chord_km(*p, *t));
    }
    internal += inside;
    if (in_corpus > 0) idf.push_back(inside / in_corpus);
    if (auto m = mean(dist)) {
      rd.push_back(*m);
      bool home = false;
      for (const auto& l : p->inventor_locations) home = home || home_countries.count(l.country);
      if (home) rd_home.push_back(*m);
    }
  }
  const double n = static_cast<double>(out.n);
  out.sd = sci / n;
  out.uf = uni / n;
  out.id = internal / n;
  out.rid = out.id / n;
  out.sdf = mean(sdf);
  out.idf = mean(idf);
  out.rd = mean(rd);
  out.rd_home = mean(rd_home);

  double total = 0, pairs = 0;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j)
      if (!ms[i]->inventor_locations.empty() && !ms[j]->inventor_locations.empty()) {
        total += chord_km(*ms[i], *ms[j]);
        pairs += 1;
      }
  if (pairs > 0) out.ipd = total / pairs;
  return out;
}

// Least squares ---------------------------------------------------------------

using Mat = std::vector<std::vector<double>>;

inline Mat invert(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

struct Ols {
  std::vector<double> beta, se;  // predictors then intercept
  double r2 = 0, adj_r2 = 0, rse = 0, f = 0;
  std::size_t df = 0;
};

/// `cols` holds one vector per predictor.
inline Ols ols(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  const std::size_t n = y.size(), k = cols.size(), p = k + 1;
  auto x = [&](std::size_t i, std::size_t j) { return j < k ? cols[j][i] : 1.0; };
  Mat xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += x(i, a) * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += x(i, a) * x(i, b);
    }
  const Mat inv = invert(xtx);
  Ols out;
  out.beta.assign(p, 0.0);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) out.beta[a] += inv[a][b] * xty[b];

  double ybar = 0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(n);
  double rss = 0, tss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = 0;
    for (std::size_t a = 0; a < p; ++a) fitted += out.beta[a] * x(i, a);
    rss += (y[i] - fitted) * (y[i] - fitted);
    tss += (y[i] - ybar) * (y[i] - ybar);
  }
  out.df = n - p;
  const double s2 = rss / static_cast<double>(out.df);
  for (std::size_t a = 0; a < p; ++a) out.se.push_back(std::sqrt(s2 * inv[a][a]));
  out.r2 = 1.0 - rss / tss;
  out.adj_r2 = 1.0 - (1.0 - out.r2) * static_cast<double>(n - 1) / static_cast<double>(out.df);
  out.rse = std::sqrt(s2);
  out.f = ((tss - rss) / static_cast<double>(k)) / s2;
  return out;
}

// Student t ---------------------------------------------------------------------

/// P(T > t) for t >= 0, by composite Simpson integration of the density.
inline double t_upper_tail(double t, int df) {
  const double nu = df;
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * std::numbers::pi);
  auto f = [&](double u) { return c * std::pow(1.0 + u * u / nu, -(nu + 1) / 2); };
  const int steps = 20000;
  const double h = t / steps;
  double s = f(0) + f(t);
  for (int i = 1; i < steps; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return 0.5 - s * h / 3.0;
}

/// Two-sided critical |t| at level alpha.
inline double t_critical(double alpha, int df) {
  double lo = 0.0, hi = 50.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (2.0 * t_upper_tail(mid, df) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// |r| at which the two-sided test flips, n observations.
inline double r_critical(double alpha, int n) {
  const double t = t_critical(alpha, n - 2);
  return t / std::sqrt(n - 2 + t * t);
}

}  // namespace oracle
