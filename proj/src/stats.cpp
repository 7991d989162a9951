#include "chatlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"

namespace chatlens::stats {

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ArgumentError("incomplete beta needs positive shape parameters");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0)) throw ArgumentError("t distribution needs positive degrees of freedom");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

double student_t_cdf(double t, double dof) {
  const double tail = student_t_two_sided(t, dof) / 2.0;
  return t < 0 ? tail : 1.0 - tail;
}

double f_sf(double f, double dof1, double dof2) {
  if (!(dof1 > 0) || !(dof2 > 0)) throw ArgumentError("F distribution needs positive degrees of freedom");
  if (f <= 0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(dof2 / 2.0, dof1 / 2.0, dof2 / (dof2 + dof1 * f));
}

double f_cdf(double f, double dof1, double dof2) {
  if (!(dof1 > 0) || !(dof2 > 0)) throw ArgumentError("F distribution needs positive degrees of freedom");
  if (f <= 0) return 0.0;
  if (std::isinf(f)) return 1.0;
  return incomplete_beta(dof1 / 2.0, dof2 / 2.0, dof1 * f / (dof1 * f + dof2));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw UndefinedError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw UndefinedError("variance needs at least two observations");
  const double m = mean(x);
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("pearson: samples differ in length");
  if (x.size() < 3) throw UndefinedError("pearson needs at least three pairs");
  require_finite(x, "pearson x");
  require_finite(y, "pearson y");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw UndefinedError("pearson undefined for a zero-variance sample");
  PearsonResult res;
  res.n = x.size();
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(x.size() - 2);
  const double r2 = res.r * res.r;
  res.p = r2 >= 1.0 ? 0.0 : student_t_two_sided(res.r * std::sqrt(dof / (1.0 - r2)), dof);
  return res;
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw UndefinedError("welch t-test needs two observations per sample");
  require_finite(a, "welch sample a");
  require_finite(b, "welch sample b");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = variance(a) / na, vb = variance(b) / nb;
  WelchResult res;
  res.mean_a = mean(a);
  res.mean_b = mean(b);
  if (va + vb == 0) throw UndefinedError("welch t-test undefined when both samples are constant");
  res.t = (res.mean_a - res.mean_b) / std::sqrt(va + vb);
  res.dof = (va + vb) * (va + vb) / (va * va / (na - 1) + vb * vb / (nb - 1));
  res.p = student_t_two_sided(res.t, res.dof);
  return res;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw UndefinedError("anova needs at least two groups");
  std::size_t n = 0;
  double grand = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw UndefinedError("anova needs two observations per group");
    require_finite(g, "anova group");
    n += g.size();
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= static_cast<double>(n);
  double between = 0, within = 0;
  for (const auto& g : groups) {
    const double m = mean(g);
    between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) within += (v - m) * (v - m);
  }
  AnovaResult res;
  res.dof1 = static_cast<double>(groups.size() - 1);
  res.dof2 = static_cast<double>(n - groups.size());
  if (within == 0) throw UndefinedError("anova undefined with zero within-group variance");
  res.f = (between / res.dof1) / (within / res.dof2);
  res.p = f_sf(res.f, res.dof1, res.dof2);
  return res;
}

double OlsFit::coefficient(std::string_view term) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == term) return coefficients[i];
  }
  throw ArgumentError("no term '" + std::string(term) + "' in fit");
}

OlsFit ols(const std::vector<Regressor>& columns, std::span<const double> y, bool intercept) {
  const std::size_t n = y.size();
  const std::size_t p = columns.size() + (intercept ? 1 : 0);
  if (p == 0) throw ArgumentError("ols needs at least one term");
  if (n <= p) throw UndefinedError("ols needs more observations than terms");
  require_finite(y, "ols response");

  OlsFit fit;
  Eigen::MatrixXd x(n, p);
  std::size_t col = 0;
  if (intercept) {
    x.col(col++).setOnes();
    fit.terms.push_back("(intercept)");
  }
  for (const auto& c : columns) {
    if (c.values.size() != n) throw ArgumentError("column '" + c.name + "' length differs from response");
    require_finite(c.values, c.name.c_str());
    x.col(col++) = Eigen::Map<const Eigen::VectorXd>(c.values.data(), static_cast<Eigen::Index>(n));
    fit.terms.push_back(c.name);
  }
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));

  // Detect collinearity column by column so the error can name the culprit.
  for (std::size_t j = 1; j <= p; ++j) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.leftCols(static_cast<Eigen::Index>(j)));
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) < j) {
      throw UndefinedError("design matrix is rank deficient: column '" + fit.terms[j - 1] +
                           "' is collinear with earlier columns");
    }
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::VectorXd beta = qr.solve(yv);
  Eigen::VectorXd resid = yv - x * beta;
  Eigen::MatrixXd r = qr.matrixQR().topRows(static_cast<Eigen::Index>(p)).triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                                                         static_cast<Eigen::Index>(p)));
  Eigen::MatrixXd cov_unscaled = r_inv * r_inv.transpose();

  fit.n = n;
  fit.dof = n - p;
  const double rss = resid.squaredNorm();
  const double sigma2 = rss / static_cast<double>(fit.dof);
  double tss = 0;
  if (intercept) {
    const double my = yv.mean();
    tss = (yv.array() - my).square().sum();
  } else {
    tss = yv.squaredNorm();
  }
  fit.r_squared = tss == 0 ? 1.0 : std::clamp(1.0 - rss / tss, 0.0, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double coef = beta(jj);
    const double se = std::sqrt(sigma2 * cov_unscaled(jj, jj));
    fit.coefficients.push_back(coef);
    fit.std_errors.push_back(se);
    if (se == 0) {
      fit.t_values.push_back(coef == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), coef));
      fit.p_values.push_back(coef == 0 ? 1.0 : 0.0);
    } else {
      const double t = coef / se;
      fit.t_values.push_back(t);
      fit.p_values.push_back(student_t_two_sided(t, static_cast<double>(fit.dof)));
    }
  }
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  return fit;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Formula parse_formula(std::string_view text) {
  auto tilde = text.find('~');
  if (tilde == std::string_view::npos) throw ArgumentError("formula needs '~': " + std::string(text));
  Formula f;
  f.response = trim(text.substr(0, tilde));
  if (f.response.empty()) throw ArgumentError("formula has no response: " + std::string(text));
  std::string_view rhs = text.substr(tilde + 1);
  char sign = '+';
  std::size_t start = 0;
  auto take = [&](std::string_view term, char s) {
    std::string t = trim(term);
    if (t.empty()) throw ArgumentError("empty term in formula: " + std::string(text));
    if ((s == '-' && t == "1") || (s == '+' && t == "0")) {
      f.intercept = false;
    } else if (s == '+' && t == "1") {
      f.intercept = true;
    } else if (s == '+') {
      f.regressors.push_back(t);
    } else {
      throw ArgumentError("unsupported term '-" + t + "' in formula");
    }
  };
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (rhs[i] == '+' || rhs[i] == '-') {
      if (start > 0 || !trim(rhs.substr(start, i - start)).empty()) take(rhs.substr(start, i - start), sign);
      sign = rhs[i];
      start = i + 1;
    }
  }
  take(rhs.substr(start), sign);
  return f;
}

void write_ols_csv(std::ostream& out, const OlsFit& fit) {
  csv::Writer w(out);
  w.header({"term", "coef", "se", "t", "p", "n", "dof", "r_squared"});
  for (std::size_t j = 0; j < fit.terms.size(); ++j) {
    w << fit.terms[j] << fit.coefficients[j] << fit.std_errors[j] << fit.t_values[j] << fit.p_values[j] << fit.n
      << fit.dof << fit.r_squared;
    w.end_row();
  }
}

}  // namespace chatlens::stats
