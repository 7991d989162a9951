#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chatlens::stats {

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double dof);
/// P(|T| >= |t|).
double student_t_two_sided(double t, double dof);
double f_cdf(double f, double dof1, double dof2);
/// P(F >= f).
double f_sf(double f, double dof1, double dof2);

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> x);

struct PearsonResult {
  double r = 0;
  double p = 1;
  std::size_t n = 0;
};
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct WelchResult {
  double t = 0;
  double dof = 0;
  double p = 1;
  double mean_a = 0;
  double mean_b = 0;
};
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

struct AnovaResult {
  double f = 0;
  double dof1 = 0;
  double dof2 = 0;
  double p = 1;
};
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

struct Regressor {
  std::string name;
  std::vector<double> values;
};

struct OlsFit {
  std::vector<std::string> terms;  // "(intercept)" first when fitted
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  std::vector<double> residuals;
  double r_squared = 0;
  std::size_t n = 0;
  std::size_t dof = 0;

  double coefficient(std::string_view term) const;
};

/// Least squares via Householder QR with homoskedastic standard errors. Throws
/// UndefinedError naming the first column that is a linear combination of the
/// columns before it.
OlsFit ols(const std::vector<Regressor>& columns, std::span<const double> y, bool intercept = true);

struct Formula {
  std::string response;
  std::vector<std::string> regressors;
  bool intercept = true;
};

/// `y ~ x1 + x2`; a `- 1` or `+ 0` term drops the intercept.
Formula parse_formula(std::string_view text);

void write_ols_csv(std::ostream& out, const OlsFit& fit);

}  // namespace chatlens::stats
