#pragma once

// Scalar special functions shared by the copula, margin and diagnostics code.

namespace fcsv::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Logistic function, overflow-safe for any finite x.
double sigmoid(double x);
/// ln(1 + exp(x)) without overflow.
double softplus(double x);
/// ln(p / (1 - p)).
double logit(double p);

double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

// Student t with 4 degrees of freedom has closed-form cdf and quantile.
double t4_pdf(double x);
double t4_log_pdf(double x);
double t4_cdf(double x);
double t4_quantile(double p);

// Student t with 5 degrees of freedom (conditional distribution of the t4 copula).
double t5_cdf(double x);
double t5_quantile(double p);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi2_sf(double x, double dof);

}  // namespace fcsv::special
