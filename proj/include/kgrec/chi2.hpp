#pragma once

namespace kgrec {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Chi-square CDF at x with df degrees of freedom: P(df/2, x/2). Absolute
// accuracy better than 1e-8 across [0, 10*df]. Throws DomainError on df < 1
// or x < 0.
double chi_square_cdf(double x, unsigned df);

// Smallest x with chi_square_cdf(x, df) >= p, for p in (0, 1). Bisection on
// the CDF; used for critical values.
double chi_square_quantile(double p, unsigned df);

}  // namespace kgrec
