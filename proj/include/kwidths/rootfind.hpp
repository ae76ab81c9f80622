#pragma once

// Locating the unique root theta_n in [0,1) of
//   sum_{nu>=0} q^{(2nu+1)n} cos((2nu+1) theta pi - beta pi/2) = 0.
//
// The common factor q^n is divided out before any sign decision, so the
// solver works even when q^n underflows.  The scaled series has antiperiod 1
// (F(theta+1) = -F(theta)); scanning its period [0,2) turns the two
// half-wave crossings into an ordinary circular bracketing problem, which
// handles roots at the seam theta == 0 without special casing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "numerics.hpp"

namespace kwidths {

struct ThetaRoot {
  double theta = 0.0;            // root in [0,1)
  double residual = 0.0;         // defining sum at theta (q^n scale)
  double scaled_residual = 0.0;  // residual with q^n divided out
  double bracket_width = 0.0;    // final bisection bracket width
  int n = 0;
  KernelParams params;
};

struct ThetaLhs {
  double scaled = 0.0;    // sum with q^n divided out
  double unscaled = 0.0;  // scaled * q^n (0 if q^n underflows)
  double abs_sum = 0.0;   // sum of |terms| of the scaled series
};

namespace detail {

// Scaled series F(theta) = sum_nu rho^nu cos((2nu+1) theta pi - b), rho=q^2n.
// Valid for any real theta; antiperiodic with period 2.
inline ThetaLhs theta_scaled_series(const KernelParams& p, int n, double theta,
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
    double term = c * static_cast<double>(std::cos(ang));
    acc.add(term);
    abs_acc += c;  // coefficient magnitude, so termwise-zero points read as 0
    double tail = c * rho / (1.0 - rho);
    if (tail <= policy.rel_tol * (abs_acc + std::numeric_limits<double>::min())) break;
    c *= rho;
    if (nu == policy.max_terms) truncation_failure("theta_lhs");
  }
  double scaled = acc.value();
  return {scaled, scaled * Q, abs_acc};
}

// Sign with a noise floor: values indistinguishable from rounding of the
// absolute-magnitude sum are classified 0 (termwise-zero roots land here).
inline int classify_sign(double value, double abs_sum) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(value) <= 4.0 * eps * abs_sum) return 0;
  return value > 0.0 ? 1 : -1;
}

}  // namespace detail

// Left-hand side of the root equation at a given theta in [0,1].
inline ThetaLhs theta_lhs(const KernelParams& p, int n, double theta,
                          const SeriesPolicy& policy = {}) {
  if (n < 1) throw std::invalid_argument("theta_lhs: n must be >= 1");
  if (!(theta >= 0.0) || !(theta <= 1.0)) {
    throw std::invalid_argument("theta_lhs: theta must lie in [0,1]");
  }
  return detail::theta_scaled_series(p, n, theta, policy);
}

// Bracket the root by a circular scan of [0,2), then bisect.
inline ThetaRoot solve_theta(const KernelParams& p, int n, double tol = 1e-12) {
  if (n < 1) throw std::invalid_argument("solve_theta: n must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_theta: tol must be positive");
  const SeriesPolicy policy{};

  // Scan points: uniform grid plus the dominant-term root (beta+1)/2 mod 1
  // with small offsets, in both half-waves.
  std::vector<double> pts;
  constexpr int kScan = 256;
  pts.reserve(kScan + 16);
  for (int i = 0; i < kScan; ++i) pts.push_back(static_cast<double>(i) * (2.0 / kScan));
  double cand = std::fmod((p.beta + 1.0) / 2.0, 1.0);
  if (cand < 0.0) cand += 1.0;
  for (double base : {cand, cand + 1.0}) {
    for (double off : {-1e-3, -1e-6, 0.0, 1e-6, 1e-3}) {
      double x = std::fmod(base + off + 2.0, 2.0);
      pts.push_back(x);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  struct Sample {
    double x;
    int sign;
  };
  std::vector<Sample> solid;
  solid.reserve(pts.size());
  for (double x : pts) {
    ThetaLhs v = detail::theta_scaled_series(p, n, x, policy);
    int s = detail::classify_sign(v.scaled, v.abs_sum);
    if (s != 0) solid.push_back({x, s});
  }
  if (solid.empty()) {
    throw NoSignChangeError("solve_theta: scan found no sign information");
  }

  // Circular transition detection over the solid samples.
  struct Bracket {
    double lo, hi;
    int sign_lo;
  };
  std::vector<Bracket> brackets;
  for (std::size_t i = 0; i < solid.size(); ++i) {
    const Sample& a = solid[i];
    const Sample& b = solid[(i + 1) % solid.size()];
    if (a.sign != b.sign) {
      double hi = (i + 1 == solid.size()) ? b.x + 2.0 : b.x;
      brackets.push_back({a.x, hi, a.sign});
    }
  }
  if (brackets.empty()) {
    throw NoSignChangeError("solve_theta: no sign change on the scan grid");
  }
  if (brackets.size() != 2) {
    throw AmbiguousBracketError("solve_theta: expected 2 circular sign changes, found " +
                                std::to_string(brackets.size()));
  }

  // Bisection on the first bracket.  Width target maps tol on the residual
  // to a theta interval via the series' slope bound pi(1+rho)/(1-rho)^2.
  const double Q = std::pow(p.q, static_cast<double>(n));
  const double rho = Q * Q;
  const double slope_bound = kPi * (1.0 + rho) / ((1.0 - rho) * (1.0 - rho));
  const double width_target = tol / std::max(1.0, slope_bound);

  double lo = brackets[0].lo;
  double hi = brackets[0].hi;
  int sign_lo = brackets[0].sign_lo;
  double root = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      root = mid;
      break;
    }
    ThetaLhs v = detail::theta_scaled_series(p, n, mid, policy);
    int s = detail::classify_sign(v.scaled, v.abs_sum);
    if (s == 0) {
      root = mid;  // below the noise floor: cannot resolve further
      break;
    }
    if (s == sign_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
    root = 0.5 * (lo + hi);
    if (hi - lo <= width_target) break;
  }

  double theta = std::fmod(root, 1.0);
  if (theta >= 1.0 - 1e-11) theta = 0.0;  // root at the seam: domain is [0,1)

  ThetaLhs res = detail::theta_scaled_series(p, n, theta, policy);
  ThetaRoot out{theta, res.unscaled, res.scaled, hi - lo, n, p};
  return out;
}

}  // namespace kwidths
