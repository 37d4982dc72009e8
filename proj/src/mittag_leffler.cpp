#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fodof/errors.hpp"
#include "fodof/fosim.hpp"

namespace fodof {
namespace {

// Largest series term tolerated before the rounding error of the alternating
// sum (about 10 ulp of long double per unit of term size) exceeds ~1e-12.
constexpr long double kMaxSeriesTerm = 1e6L;

struct SeriesResult {
  long double value = 0.0L;
  long double max_term = 0.0L;
};

// Neumaier-compensated power series.
SeriesResult ml_series(long double alpha, long double z) {
  SeriesResult out;
  long double sum = 1.0L;
  long double comp = 0.0L;
  out.max_term = 1.0L;
  const long double log_abs_z = std::log(std::abs(z));
  long double prev_log = 0.0L;
  for (int k = 1; k < 20000; ++k) {
    const long double log_term = k * log_abs_z - std::lgamma(alpha * k + 1.0L);
    if (log_term > 11000.0L) throw Error(Errc::kDomainTooLarge, "Mittag-Leffler series overflows");
    const long double mag = std::exp(log_term);
    const long double term = (z < 0 && (k % 2 == 1)) ? -mag : mag;
    const long double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    out.max_term = std::max(out.max_term, mag);
    const bool decreasing = log_term < prev_log;
    prev_log = log_term;
    if (decreasing && mag < 1e-20L * std::max(std::abs(sum + comp), 1e-300L)) break;
  }
  out.value = sum + comp;
  return out;
}

// E_alpha(-x), x > 0, alpha != 1, from the inverse Laplace transform of
// s^(alpha-1) / (s^alpha + 1): a branch-cut integral, plus the pair of poles
// exp(i*pi/alpha) that lie on the principal sheet when alpha > 1. With
// u = r^alpha the cut integrand is smooth:
//   sin(alpha*pi)/(alpha*pi) * exp(-t u^(1/alpha)) / (u^2 + 2u cos(alpha*pi) + 1).
double ml_negative_integral(double alpha, double x) {
  const double t = std::pow(x, 1.0 / alpha);
  const double c = std::cos(alpha * std::numbers::pi);
  const double s = std::sin(alpha * std::numbers::pi);
  auto integrand = [&](double u) {
    const double denom = u * u + 2.0 * u * c + 1.0;
    return std::exp(-t * std::pow(u, 1.0 / alpha)) / denom;
  };
  const double peak = std::max(0.0, -c);
  double cut = 0.0;
  if (peak > 0.0) {
    boost::math::quadrature::tanh_sinh<double> inner;
    cut += inner.integrate(integrand, 0.0, peak);
  }
  boost::math::quadrature::exp_sinh<double> outer;
  cut += outer.integrate([&](double v) { return integrand(peak + v); });
  double value = s / (alpha * std::numbers::pi) * cut;
  if (alpha > 1.0) {
    const double re = std::cos(std::numbers::pi / alpha);
    const double im = std::sin(std::numbers::pi / alpha);
    value += 2.0 / alpha * std::exp(t * re) * std::cos(t * im);
  }
  return value;
}

}  // namespace

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error(Errc::kAlphaOutOfRange, "alpha must lie in (0, 2)");
  if (!(std::abs(z) <= kMittagLefflerDomain)) {
    throw Error(Errc::kDomainTooLarge, "|z| = " + std::to_string(std::abs(z)) + " exceeds " +
                                           std::to_string(kMittagLefflerDomain));
  }
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);

  const SeriesResult series = ml_series(alpha, z);
  if (z > 0.0 || series.max_term <= kMaxSeriesTerm) {
    const long double v = series.value;
    if (!(std::abs(v) <= std::numeric_limits<double>::max())) {
      throw Error(Errc::kDomainTooLarge, "Mittag-Leffler value overflows double");
    }
    return static_cast<double>(v);
  }
  return ml_negative_integral(alpha, -z);
}

}  // namespace fodof
