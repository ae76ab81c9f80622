#pragma once

// Fundamental interpolation splines built on the integrated Poisson kernel.
// The spline s(t) = a0 + sum_{j=1}^{2n} a_j P_{q,beta,1}(t - x_j) with nodes
// x_j = j*pi/n is pinned down by the cardinal conditions s(y_k) = delta_{0,k}
// at the shifted points y_k = k*pi/n + y together with sum a_j = 0.  The
// derivative in the kernel sense is piecewise constant, and its sign pattern
// at interval midpoints is the alternation test this module certifies.
//
// Precision notes: the coefficient magnitudes grow like q^{-n}; the system is
// ill-conditioned enough (kappa ~ 1e10 already at q=0.1, n=12) that a plain
// binary64 solve loses four to five digits in downstream derivative values.
// Entries are therefore summed in long double, carried as double-double, and
// the solve is a binary64 LU refined with double-double residuals.  All
// evaluation paths accumulate in double-double against the stored
// double-double coefficients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "numerics.hpp"

namespace kwidths {

struct SplineSolution {
  std::vector<double> alpha;  // a_0 .. a_{2n}
  std::vector<dd> alpha_dd;   // same coefficients, double-double
  int n = 0;
  double y = 0.0;
  KernelParams params;
  double interp_residual = 0.0;
  double sum_residual = 0.0;
  double condition_estimate = 0.0;
};

struct SignPattern {
  std::vector<int> signs;  // in {-1, 0, +1}, one per interval midpoint
  int epsilon = +1;
  std::vector<int> e;  // in {0, 1}
  bool conforms = false;
  double zero_tolerance = 0.0;
  std::vector<double> values;  // raw midpoint derivative values (diagnostic)
};

namespace detail {

inline const SeriesPolicy& spline_series_policy() {
  // Tail below the long double epsilon so the assembled entries carry the
  // full 64-bit significand.
  static const SeriesPolicy policy{1e-19, 2000000};
  return policy;
}

inline long double bernoulli_l(long double t) {
  long double u = reduce_angle_l(t);
  if (u == 0.0L) return 0.0L;
  return (kPiL - u) * 0.5L;
}

}  // namespace detail

inline SplineSolution build_fundamental_spline(const KernelParams& params, int n, double y) {
  if (n < 1) throw std::invalid_argument("build_fundamental_spline: n must be >= 1");
  const double step = kPi / n;
  if (!(y >= 0.0) || !(y < step)) {
    throw std::invalid_argument("build_fundamental_spline: y must lie in [0, pi/n)");
  }
  // Coefficients scale like q^{-n}; past this envelope they overflow binary64.
  if (n * std::log(1.0 / params.q) > 700.0) {
    throw RangeUnsupportedError(
        "build_fundamental_spline: n*ln(1/q) > 700, coefficients exceed binary64 range");
  }

  const int N = 2 * n + 1;
  const SeriesPolicy& pol = detail::spline_series_policy();

  // Entry (k, j) is P1(y + (k-j)*pi/n); precompute over the difference range.
  const int dmin = -2 * n;
  const int dmax = 2 * n - 2;
  std::vector<dd> table(static_cast<std::size_t>(dmax - dmin + 1));
  for (int d = dmin; d <= dmax; ++d) {
    long double td = static_cast<long double>(y) + static_cast<long double>(d) * kPiL / n;
    long double v = detail::poisson_integrated_series<long double>(params.q, params.beta, td, pol);
    table[static_cast<std::size_t>(d - dmin)] = dd::from_long_double(v);
  }

  std::vector<dd> a_dd(static_cast<std::size_t>(N) * N, dd(0.0));
  std::vector<dd> b_dd(N, dd(0.0));
  for (int k = 0; k < 2 * n; ++k) {
    a_dd[static_cast<std::size_t>(k) * N + 0] = dd(1.0);
    for (int j = 1; j <= 2 * n; ++j) {
      a_dd[static_cast<std::size_t>(k) * N + j] = table[static_cast<std::size_t>(k - j - dmin)];
    }
  }
  for (int j = 1; j <= 2 * n; ++j) a_dd[static_cast<std::size_t>(2 * n) * N + j] = dd(1.0);
  b_dd[0] = dd(1.0);

  std::vector<double> a(static_cast<std::size_t>(N) * N);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a_dd[i].hi;
  LuFactors lu = lu_factor(a, N);
  if (lu.singular || lu.min_pivot_ratio < 1e-13) {
    throw SplineNotUniqueError("build_fundamental_spline: interpolation matrix numerically "
                               "singular at q=" + std::to_string(params.q) +
                               ", beta=" + std::to_string(params.beta) +
                               ", n=" + std::to_string(n));
  }

  std::vector<double> x(N, 0.0);
  x[0] = 1.0;  // b
  lu_solve(lu, x);
  std::vector<dd> x_dd(N);
  for (int i = 0; i < N; ++i) x_dd[i] = dd(x[i]);

  // Iterative refinement against the double-double matrix.
  double prev_delta = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<dd> r = dd_residual(a_dd, N, x_dd, b_dd);
    std::vector<double> delta(N);
    for (int i = 0; i < N; ++i) delta[i] = r[i].to_double();
    lu_solve(lu, delta);
    double nd = 0.0, nx = 0.0;
    for (int i = 0; i < N; ++i) {
      x_dd[i] = dd_add(x_dd[i], dd(delta[i]));
      nd = std::max(nd, std::abs(delta[i]));
      nx = std::max(nx, std::abs(x_dd[i].hi));
    }
    if (nd <= 1e-31 * nx) break;
    if (iter >= 3 && nd >= 0.5 * prev_delta) break;  // stagnated at the noise floor
    prev_delta = nd;
  }

  std::vector<double> alpha(N);
  for (int i = 0; i < N; ++i) alpha[i] = x_dd[i].to_double();

  std::vector<dd> r = dd_residual(a_dd, N, x_dd, b_dd);
  double ir = 0.0;
  for (int k = 0; k < 2 * n; ++k) ir = std::max(ir, std::abs(r[k].to_double()));
  dd coeff_sum(0.0);
  for (int j = 1; j <= 2 * n; ++j) coeff_sum = dd_add(coeff_sum, x_dd[j]);

  return SplineSolution{std::move(alpha),
                        std::move(x_dd),
                        n,
                        y,
                        params,
                        ir,
                        std::abs(coeff_sum.to_double()),
                        condition_estimate_1norm(a, lu)};
}

inline double spline_eval(const SplineSolution& sol, double t) {
  const SeriesPolicy& pol = detail::spline_series_policy();
  dd acc = sol.alpha_dd[0];
  for (int j = 1; j <= 2 * sol.n; ++j) {
    long double tj = static_cast<long double>(t) - static_cast<long double>(j) * kPiL / sol.n;
    long double v =
        detail::poisson_integrated_series<long double>(sol.params.q, sol.params.beta, tj, pol);
    acc = dd_add(acc, dd_mul(sol.alpha_dd[j], dd::from_long_double(v)));
  }
  return acc.to_double();
}

// Kernel-sense derivative sum a_j B1(t - x_j); piecewise constant between
// nodes because the coefficients sum to zero.
inline double derivative_eval(const SplineSolution& sol, double t) {
  dd acc(0.0);
  for (int j = 1; j <= 2 * sol.n; ++j) {
    long double tj = static_cast<long double>(t) - static_cast<long double>(j) * kPiL / sol.n;
    acc = dd_add(acc, dd_mul(sol.alpha_dd[j], dd::from_long_double(detail::bernoulli_l(tj))));
  }
  return acc.to_double();
}

// Derivative at the midpoints of the node intervals (x_k, x_{k+1}),
// k = 0..2n-1.  The sawtooth arguments are exact odd multiples of pi/(2n), so
// they are reduced in integer arithmetic before a single rounding.
inline std::vector<double> derivative_at_midpoints(const SplineSolution& sol) {
  const int n = sol.n;
  std::vector<double> out(static_cast<std::size_t>(2 * n), 0.0);
  for (int k = 0; k < 2 * n; ++k) {
    dd acc(0.0);
    for (int j = 1; j <= 2 * n; ++j) {
      int m = 2 * (k - j) + 1;  // argument is m*pi/(2n), m odd
      int r = ((m % (4 * n)) + 4 * n) % (4 * n);
      long double b1 = kPiL * static_cast<long double>(2 * n - r) / static_cast<long double>(4 * n);
      acc = dd_add(acc, dd_mul(sol.alpha_dd[j], dd::from_long_double(b1)));
    }
    out[static_cast<std::size_t>(k)] = acc.to_double();
  }
  return out;
}

// Sign-alternation certificate: nonzero midpoint derivative signs must equal
// (-1)^k * epsilon for a single epsilon, with zeros allowed.
inline SignPattern check_Cy2n(const KernelParams& params, int n, double y,
                              double zero_tol = 1e-8) {
  SplineSolution sol = build_fundamental_spline(params, n, y);
  SignPattern pat;
  pat.zero_tolerance = zero_tol;
  pat.values = derivative_at_midpoints(sol);
  double scale = 0.0;
  for (double v : pat.values) scale = std::max(scale, std::abs(v));
  pat.signs.resize(pat.values.size());
  pat.e.resize(pat.values.size());
  for (std::size_t k = 0; k < pat.values.size(); ++k) {
    double v = pat.values[k];
    int s = (std::abs(v) <= zero_tol * scale) ? 0 : (v > 0.0 ? 1 : -1);
    pat.signs[k] = s;
    pat.e[k] = (s != 0) ? 1 : 0;
  }
  pat.epsilon = +1;
  bool seen = false;
  pat.conforms = true;
  for (std::size_t k = 0; k < pat.signs.size(); ++k) {
    if (pat.signs[k] == 0) continue;
    int parity = (k % 2 == 0) ? 1 : -1;
    if (!seen) {
      pat.epsilon = pat.signs[k] * parity;
      seen = true;
    } else if (pat.signs[k] != pat.epsilon * parity) {
      pat.conforms = false;
    }
  }
  return pat;
}

}  // namespace kwidths
