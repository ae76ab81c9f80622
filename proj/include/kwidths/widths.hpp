#pragma once

// Best-approximation / width values and their asymptotic decomposition.
//
// Every width is kept in factored form value = q^n * mantissa: the mantissa
// stays O(1) for all n, so reports remain meaningful when q^n underflows.
// The asymptotic coefficient gamma_n is computed from an algebraically
// rearranged expression in which the root identity of theta_n is substituted
// exactly — the naive (value/q^n - 4/pi)/q^{2n} form loses all digits to
// cancellation once q^{2n} is below roundoff.

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "errors.hpp"
#include "kernels.hpp"
#include "rootfind.hpp"
#include "thresholds.hpp"

namespace kwidths {

enum class Certified { yes, no, unknown };

struct BestApprox {
  double value = 0.0;     // q^n * mantissa (0 when q^n underflows)
  double mantissa = 0.0;  // (4/pi)|sum|, the q^n-free factor
  double log_value = -std::numeric_limits<double>::infinity();
  ThetaRoot theta;
};

struct WidthReport {
  double value = 0.0;
  double mantissa = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  ThetaRoot theta;
  int n = 0;
  KernelParams params;
  Certified certified = Certified::unknown;
};

namespace detail {

// sum_{nu>=0} rho^nu sin((2nu+1) theta pi - b) / (2nu+1), the q^n-scaled
// series of the best-approximation value.
inline double width_mantissa_sum(const KernelParams& p, int n, double theta,
                                 const SeriesPolicy& policy) {
  const double Q = std::pow(p.q, static_cast<double>(n));
  const double rho = Q * Q;
  const long double b = static_cast<long double>(p.beta) * (kPiL / 2.0L);
  const long double tp = static_cast<long double>(theta) * kPiL;
  NeumaierSum acc;
  double abs_acc = 0.0;
  double c = 1.0;
  for (std::int64_t nu = 0; nu <= policy.max_terms; ++nu) {
    long double ang = reduce_angle_l(static_cast<long double>(2 * nu + 1) * tp - b);
    double term = c / static_cast<double>(2 * nu + 1) * static_cast<double>(std::sin(ang));
    acc.add(term);
    abs_acc += std::abs(term);
    double tail = c * rho / (3.0 * (1.0 - rho));
    if (tail <= policy.rel_tol * (abs_acc + std::numeric_limits<double>::min())) {
      return acc.value();
    }
    c *= rho;
  }
  truncation_failure("best_approx_value");
}

}  // namespace detail

inline BestApprox best_approx_factored(const KernelParams& p, int n,
                                       const SeriesPolicy& policy = {}) {
  ThetaRoot th = solve_theta(p, n, 1e-14);
  double s = detail::width_mantissa_sum(p, n, th.theta, policy);
  double mantissa = (4.0 / kPi) * std::abs(s);
  double Q = std::pow(p.q, static_cast<double>(n));
  double log_value = (mantissa > 0.0)
                         ? static_cast<double>(n) * std::log(p.q) + std::log(mantissa)
                         : -std::numeric_limits<double>::infinity();
  return BestApprox{Q * mantissa, mantissa, log_value, th};
}

// (4/pi)|sum_{nu>=0} q^{(2nu+1)n}/(2nu+1) sin((2nu+1) theta_n pi - beta pi/2)|.
inline double best_approx_value(const KernelParams& p, int n,
                                const SeriesPolicy& policy = {}) {
  return best_approx_factored(p, n, policy).value;
}

// Width report; `certified` compares n against n_{q,beta} and is `unknown`
// only when the threshold search capped out below n.
inline WidthReport width_report(const KernelParams& p, int n,
                                std::int64_t cap = 10000000) {
  BestApprox ba = best_approx_factored(p, n);
  WidthReport r{ba.value, ba.mantissa, ba.log_value, ba.theta, n, p, Certified::unknown};
  std::optional<std::int64_t> nqb = n_q_beta(p.q, p.beta, cap);
  if (nqb.has_value()) {
    r.certified = (n >= *nqb) ? Certified::yes : Certified::no;
  } else {
    // n_{q,beta} exceeds cap; n below cap is therefore uncertified.
    r.certified = (static_cast<std::int64_t>(n) <= cap) ? Certified::no : Certified::unknown;
  }
  return r;
}

// gamma_n = (best_approx/q^n - 4/pi)(1-q^{2n})/q^{2n}, computed in the
// cancellation-free rearrangement
//   gamma_n = (4/pi)(1-rho)(2 s1 T + rho (T^2 - W^2)) / (|S|+1),
// where rho = q^{2n}, u = theta_n pi, b = beta pi/2, s1 = sin(u-b),
//   T = sum_{nu>=1} rho^{nu-1} sin((2nu+1)u-b)/(2nu+1),
//   W = sum_{nu>=1} rho^{nu-1} cos((2nu+1)u-b),  S = s1 + rho T.
// The root equation cos(u-b) + rho W = 0 is substituted exactly, which is
// what removes the q^{2n}-scale cancellation.
inline double asymptotic_gamma(const KernelParams& p, int n,
                               const SeriesPolicy& policy = {}) {
  if (n < 1) throw std::invalid_argument("asymptotic_gamma: n must be >= 1");
  const double Q = std::pow(p.q, static_cast<double>(n));
  if (Q == 0.0) {
    throw RangeUnsupportedError("asymptotic_gamma: q^n underflows binary64");
  }
  const double rho = Q * Q;
  ThetaRoot th = solve_theta(p, n, 1e-14);
  const long double b = static_cast<long double>(p.beta) * (kPiL / 2.0L);
  const long double u = static_cast<long double>(th.theta) * kPiL;
  const double s1 = static_cast<double>(std::sin(reduce_angle_l(u - b)));

  NeumaierSum T_acc, W_acc;
  double abs_T = 0.0;
  double c = 1.0;
  for (std::int64_t nu = 1; nu <= policy.max_terms; ++nu) {
    long double ang = reduce_angle_l(static_cast<long double>(2 * nu + 1) * u - b);
    T_acc.add(c / static_cast<double>(2 * nu + 1) * static_cast<double>(std::sin(ang)));
    W_acc.add(c * static_cast<double>(std::cos(ang)));
    abs_T += c;
    double tail = c * rho / (1.0 - rho);
    if (tail <= policy.rel_tol * (abs_T + std::numeric_limits<double>::min())) break;
    c *= rho;
    if (nu == policy.max_terms) detail::truncation_failure("asymptotic_gamma");
  }
  const double T = T_acc.value();
  const double W = W_acc.value();
  const double S = s1 + rho * T;
  return (4.0 / kPi) * (1.0 - rho) * (2.0 * s1 * T + rho * (T * T - W * W)) /
         (std::abs(S) + 1.0);
}

// (q^n (1 - (4/3) rho/(1-rho)), q^n (1 + (4/3) rho/(1-rho))), rho = q^{2n}:
// the interval bracketing (pi/4) * best_approx_value.
inline std::pair<double, double> two_sided_bounds(const KernelParams& p, int n) {
  if (n < 1) throw std::invalid_argument("two_sided_bounds: n must be >= 1");
  const double Q = std::pow(p.q, static_cast<double>(n));
  if (Q == 0.0) {
    throw RangeUnsupportedError("two_sided_bounds: q^n underflows binary64");
  }
  const double rho = Q * Q;
  const double w = (4.0 / 3.0) * rho / (1.0 - rho);
  return {Q * (1.0 - w), Q * (1.0 + w)};
}

}  // namespace kwidths
