#pragma once

// Poisson-type kernels and their convolution with the square-wave phi_n.
//
// Production evaluation uses closed forms where available (geometric Poisson
// kernel, sawtooth) and relative-tail-truncated series otherwise.  A
// Gauss-Legendre quadrature oracle provides an independent evaluation of the
// convolution for cross-validation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"

namespace kwidths {

// Parameters (q, beta) of the kernel sum_{k>=1} q^k cos(k t - beta*pi/2).
struct KernelParams {
  double q;
  double beta;

  KernelParams(double q_, double beta_) : q(q_), beta(beta_) {
    if (!(q > 0.0) || !(q < 1.0)) {
      throw std::invalid_argument("KernelParams: q must lie strictly in (0,1), got " +
                                  std::to_string(q_));
    }
    if (!std::isfinite(beta)) {
      throw std::invalid_argument("KernelParams: beta must be finite");
    }
  }
};

// Truncation policy for all infinite series: stop when the geometric tail
// bound falls below rel_tol times the accumulated magnitude.
struct SeriesPolicy {
  double rel_tol = 1e-16;
  std::int64_t max_terms = 1000000;
};

namespace detail {

[[noreturn]] inline void truncation_failure(const char* what) {
  throw TruncationError(std::string(what) + ": max_terms reached before tail criterion");
}

}  // namespace detail

// P_{q,beta}(t) = sum_{k>=1} q^k cos(k t - beta*pi/2), via the closed form
//   cos(b)(q cos t - q^2)/D + sin(b)(q sin t)/D,  D = 1 - 2 q cos t + q^2.
inline double eval_poisson(const KernelParams& p, double t) {
  double u = reduce_angle(t);
  double b = p.beta * (kPi / 2.0);
  double ct = std::cos(u);
  double st = std::sin(u);
  double den = std::fma(-2.0 * p.q, ct, 1.0 + p.q * p.q);
  double re = (p.q * ct - p.q * p.q) / den;
  double im = (p.q * st) / den;
  return std::cos(b) * re + std::sin(b) * im;
}

namespace detail {

// Long-double closed form, used by the quadrature path and the determinant
// escalation so their entry error stays well below binary64 rounding.
inline long double eval_poisson_l(double q, double beta, long double t) {
  long double u = reduce_angle_l(t);
  long double qq = static_cast<long double>(q);
  long double b = static_cast<long double>(beta) * (kPiL / 2.0L);
  long double ct = std::cos(u);
  long double st = std::sin(u);
  long double den = 1.0L - 2.0L * qq * ct + qq * qq;
  return std::cos(b) * (qq * ct - qq * qq) / den + std::sin(b) * (qq * st) / den;
}

}  // namespace detail

// Bernoulli kernel B1(t) = sum_{k>=1} sin(k t)/k: the sawtooth (pi - u)/2 on
// (0, 2*pi), with the series' principal value 0 at the lattice t == 0 mod 2*pi.
inline double eval_bernoulli(double t) {
  long double u = reduce_angle_l(static_cast<long double>(t));
  if (u == 0.0L) return 0.0;
  return static_cast<double>((kPiL - u) * 0.5L);
}

namespace detail {

// Series core for P_{q,beta,1}(t) = sum_{k>=1} (q^k/k) cos(k t - (beta+1)pi/2),
// templated so the spline assembly can run it in long double.
template <typename Real>
Real poisson_integrated_series(double q, double beta, Real t, const SeriesPolicy& policy) {
  const Real qq = static_cast<Real>(q);
  const long double phase = static_cast<long double>(beta + 1.0) * (kPiL / 2.0L);
  const long double tl = static_cast<long double>(t);
  Real acc = 0;
  Real comp = 0;  // Neumaier compensation
  Real abs_acc = 0;
  Real pw = 1;
  for (std::int64_t k = 1; k <= policy.max_terms; ++k) {
    pw *= qq;
    long double ang = reduce_angle_l(static_cast<long double>(k) * tl - phase);
    Real term = pw / static_cast<Real>(k) * static_cast<Real>(std::cos(ang));
    Real s = acc + term;
    if (std::abs(acc) >= std::abs(term))
      comp += (acc - s) + term;
    else
      comp += (term - s) + acc;
    acc = s;
    abs_acc += std::abs(term);
    // Remaining tail is below q^{k+1}/((k+1)(1-q)).
    Real tail = pw * qq / (static_cast<Real>(k + 1) * (1 - qq));
    if (tail <= static_cast<Real>(policy.rel_tol) *
                    (abs_acc + std::numeric_limits<Real>::min())) {
      return acc + comp;
    }
  }
  truncation_failure("eval_poisson_integrated");
}

}  // namespace detail

// P_{q,beta,1}(t) = sum_{k>=1} (q^k/k) cos(k t - (beta+1)*pi/2).
inline double eval_poisson_integrated(const KernelParams& p, double t,
                                      const SeriesPolicy& policy = {}) {
  return detail::poisson_integrated_series<double>(p.q, p.beta, t, policy);
}

// Heat-equation Poisson kernel  1/2 + 2 sum_{j>=1} cos(j t)/(q^j + q^{-j}).
inline double eval_heat_poisson(double q, double t, const SeriesPolicy& policy = {}) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument("eval_heat_poisson: q must lie in (0,1)");
  }
  const long double tl = static_cast<long double>(t);
  NeumaierSum acc;
  acc.add(0.5);
  double abs_acc = 0.5;
  double pw = 1.0;
  for (std::int64_t j = 1; j <= policy.max_terms; ++j) {
    pw *= q;
    double c = static_cast<double>(std::cos(reduce_angle_l(static_cast<long double>(j) * tl)));
    double term = 2.0 * c * pw / (1.0 + pw * pw);
    acc.add(term);
    abs_acc += std::abs(term);
    double tail = 2.0 * pw * q / (1.0 - q);
    if (tail <= policy.rel_tol * (abs_acc + std::numeric_limits<double>::min())) {
      return acc.value();
    }
  }
  detail::truncation_failure("eval_heat_poisson");
}

// (P_{q,beta} * phi_n)(x) with phi_n = sign sin(n t):
//   (4/pi) sum_{nu>=0} q^{(2nu+1)n}/(2nu+1) * sin((2nu+1) n x - beta*pi/2).
inline double convolve_phi_n(const KernelParams& p, int n, double x,
                             const SeriesPolicy& policy = {}) {
  if (n < 1) throw std::invalid_argument("convolve_phi_n: n must be >= 1");
  const double Q = std::pow(p.q, static_cast<double>(n));
  if (Q == 0.0) return 0.0;
  const double rho = Q * Q;
  const long double nx = static_cast<long double>(n) * static_cast<long double>(x);
  const long double b = static_cast<long double>(p.beta) * (kPiL / 2.0L);
  NeumaierSum acc;
  double abs_acc = 0.0;
  double c = Q;
  for (std::int64_t nu = 0; nu <= policy.max_terms; ++nu) {
    long double ang = reduce_angle_l(static_cast<long double>(2 * nu + 1) * nx - b);
    double term = c / static_cast<double>(2 * nu + 1) * static_cast<double>(std::sin(ang));
    acc.add(term);
    abs_acc += std::abs(term);
    double tail = c * rho / (static_cast<double>(2 * nu + 3) * (1.0 - rho));
    if (tail <= policy.rel_tol * (abs_acc + std::numeric_limits<double>::min())) {
      return (4.0 / kPi) * acc.value();
    }
    c *= rho;
  }
  detail::truncation_failure("convolve_phi_n");
}

// Independent oracle: (1/pi) Int_0^{2pi} P_{q,beta}(x - t) phi_n(t) dt by
// composite 8-point Gauss-Legendre on the 2n sign-constant subintervals of
// phi_n, `panels` panels per subinterval.  Accumulated in extended precision:
// at small q^n the convolution is far below the integrand's magnitude, and
// binary64 accumulation would limit the achievable relative agreement.
inline double quadrature_convolution(const KernelParams& p, int n, double x,
                                     int panels = 32) {
  if (n < 1) throw std::invalid_argument("quadrature_convolution: n must be >= 1");
  if (panels < 1) throw std::invalid_argument("quadrature_convolution: panels must be >= 1");

  static const long double gl_x[4] = {
      0.1834346424956498049394761L, 0.5255324099163289858177390L,
      0.7966664774136267395915539L, 0.9602898564975362316835609L};
  static const long double gl_w[4] = {
      0.3626837833783619829651504L, 0.3137066458778872873379622L,
      0.2223810344533744705443560L, 0.1012285362903762591525314L};

  const long double xl = static_cast<long double>(x);
  const long double h_sub = kPiL / static_cast<long double>(n);
  long double total = 0.0L;
  for (int k = 0; k < 2 * n; ++k) {
    const long double a = static_cast<long double>(k) * h_sub;
    const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
    const long double hp = h_sub / static_cast<long double>(panels);
    long double acc = 0.0L;
    for (int pnl = 0; pnl < panels; ++pnl) {
      const long double c0 = a + (static_cast<long double>(pnl) + 0.5L) * hp;
      const long double half = 0.5L * hp;
      for (int g = 0; g < 4; ++g) {
        const long double dt = half * gl_x[g];
        acc += gl_w[g] * (detail::eval_poisson_l(p.q, p.beta, xl - (c0 + dt)) +
                          detail::eval_poisson_l(p.q, p.beta, xl - (c0 - dt)));
      }
    }
    total += sign * acc * (0.5L * hp);
  }
  return static_cast<double>(total / kPiL);
}

}  // namespace kwidths
