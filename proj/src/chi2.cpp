#include "kgrec/chi2.hpp"

#include <cmath>

#include "kgrec/error.hpp"

namespace kgrec {

namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-15;

// Series: P(a, x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n)).
// Converges quickly for x below roughly a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x) = 1 - P(a, x); fast for larger x.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0)) throw DomainError("regularized_gamma_p: a must be > 0");
  if (x < 0) throw DomainError("regularized_gamma_p: x must be >= 0");
  if (x == 0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_cdf(double x, unsigned df) {
  if (df < 1) throw DomainError("chi_square_cdf: df must be >= 1");
  if (x < 0) throw DomainError("chi_square_cdf: x must be >= 0");
  if (x == 0) return 0.0;
  double a = 0.5 * static_cast<double>(df);
  double half_x = 0.5 * x;
  // split at x = df + 1: series to the left of the bulk, fraction to the right
  if (x < static_cast<double>(df) + 1.0) return gamma_p_series(a, half_x);
  return 1.0 - gamma_q_continued_fraction(a, half_x);
}

double chi_square_quantile(double p, unsigned df) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("chi_square_quantile: p must be in (0, 1)");
  double lo = 0.0;
  double hi = static_cast<double>(df);
  while (chi_square_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace kgrec
