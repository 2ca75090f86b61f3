#pragma once

namespace didipw {

// Standard normal distribution, double precision throughout.
//
// The CDF uses the Hart rational approximation (algorithm 5666 for erf) with
// a continued-fraction tail, absolute error below 1e-14 on the real line.
// Inputs must be finite; non-finite arguments throw std::domain_error.

double std_normal_cdf(double x);
double std_normal_pdf(double x);

// Evaluates Phi(x) and phi(x) together; the probit inner loop needs both and
// the density falls out of the CDF computation for free.
void std_normal_cdf_pdf(double x, double& cdf, double& pdf);

// Inverse CDF. p must lie in (0,1). Rational initial guess refined by one
// Halley step against std_normal_cdf; relative error ~1e-15.
double std_normal_quantile(double p);

// CDF of Student's t with df > 0 degrees of freedom, via the regularized
// incomplete beta function. Used by the Welch two-sample test.
double student_t_cdf(double t, double df);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

} // namespace didipw
