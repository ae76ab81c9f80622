#pragma once

// Error-budget machinery for the midpoint-derivative representation of the
// fundamental spline.  The derivative at the midpoint t_k = k*pi/n - pi/(2n)
// admits the closed form
//
//   (-1)^{k+s+1} * (pi/(4 n q^n)) * ( HeatKernel(t_k - y0) + g1+g2+g3+g4+g5 )
//
// where the five gamma corrections are built from the Fourier coefficients
// lambda_{n-j}(y0) of the spline data.  Everything here runs in scaled
// arithmetic: lambda, its residual pieces r^{(1..3)}, and R carry an implicit
// factor q^n/n divided out, so only moderate ratios are ever formed.  The
// scale factor q^{-n} itself is only materialized inside the envelope
// n*ln(1/q) <= 200.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "numerics.hpp"
#include "rootfind.hpp"
#include "skspline.hpp"
#include "thresholds.hpp"

namespace kwidths {

struct GammaBreakdown {
  std::array<double, 5> gamma{};  // g1..g5
  int s = 0;                      // parity in {0,1}; (-1)^s = sign sin(n*y0 - beta*pi/2)
  double y0 = 0.0;
  int k = 0;
  int n = 0;
  KernelParams params;
  std::vector<double> delta;       // delta_j, j = 0..floor(sqrt(n))
  std::vector<double> big_r;       // scaled R_j, j = 0..n-1
  std::vector<double> lambda_abs;  // scaled |lambda_{n-j}|, j = 0..n-1
  double heat_value = 0.0;         // HeatKernel(t_k - y0)

  double gamma_sum() const {
    NeumaierSum acc;
    for (double g : gamma) acc.add(g);
    return acc.value();
  }
};

namespace detail {

inline void require_gamma_envelope(const KernelParams& p, int n, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be >= 1");
  if (n * std::log(1.0 / p.q) > 200.0) {
    throw RangeUnsupportedError(std::string(who) +
                                ": n*ln(1/q) > 200, q^{-n} scale not representable honestly");
  }
}

inline int int_sqrt_floor(int n) {
  int r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Pieces of the scaled Fourier coefficient at frequency n - j.
struct LambdaParts {
  std::complex<double> r1, r2, r3;   // residual pieces, scaled by n/q^n
  double a_tilde = 0.0;              // scaled principal modulus n(q^{-j}/(n-j) + q^j/(n+j))
  std::complex<double> r;            // r1 + r2 + r3
  std::complex<double> lambda;       // scaled lambda_{n-j}(y0), rotation e^{-i j y0} applied
  double lambda_abs = 0.0;
  double big_r = 0.0;                // scaled |lambda| - a_tilde, cancellation-free form
};

inline LambdaParts lambda_parts(const KernelParams& p, int n, int j, double y0, int s,
                                const SeriesPolicy& policy) {
  if (j < 0 || j >= n) throw std::invalid_argument("lambda_parts: need 0 <= j <= n-1");
  const long double qL = static_cast<long double>(p.q);
  const long double uL = static_cast<long double>(n) * static_cast<long double>(y0);
  const long double bL = static_cast<long double>(p.beta) * kPiL / 2.0L;
  const long double phiL = bL + kPiL / 2.0L;  // (beta+1)*pi/2
  const long double nL = static_cast<long double>(n);
  const long double qpj = std::pow(qL, static_cast<long double>(j));
  const long double qmj = 1.0L / qpj;

  LambdaParts out;
  out.a_tilde = static_cast<double>(nL * (qmj / (n - j) + qpj / (n + j)));

  // r1: the m >= 1 tail of the two-sided frequency series, phase-rotated so
  // only multiples of u = n*y0 appear.  Terms shrink by q^{2n} per step.
  {
    long double re = 0.0L, im = 0.0L, abs_acc = 0.0L;
    const long double q2n = std::pow(qL, 2.0L * nL);
    long double qa = std::pow(qL, 2.0L * nL - j);    // q^{2mn - j} at m = 1
    long double qb = std::pow(qL, static_cast<long double>(j));  // q^{(2m-2)n + j} at m = 1
    bool converged = false;
    for (std::int64_t m = 1; m <= policy.max_terms; ++m) {
      long double anga = reduce_angle_l((2.0L * m + 1.0L) * uL - phiL);
      long double ta = nL * qa / ((2 * m + 1) * nL - j);
      re += ta * std::cos(anga);
      im += ta * std::sin(anga);
      abs_acc += ta;
      if (m >= 2) {
        long double angb = reduce_angle_l(-((2.0L * m - 1.0L) * uL - phiL));
        long double tb = nL * qb / ((2 * m - 1) * nL + j);
        re += tb * std::cos(angb);
        im += tb * std::sin(angb);
        abs_acc += tb;
      }
      qa *= q2n;
      qb *= q2n;
      long double tail = nL * (qa + qb);  // crude bound on everything remaining
      if (tail <= static_cast<long double>(policy.rel_tol) *
                      (abs_acc + std::numeric_limits<long double>::min())) {
        converged = true;
        break;
      }
    }
    if (!converged) truncation_failure("lambda_parts/r1");
    out.r1 = {static_cast<double>(re), static_cast<double>(im)};
  }

  const long double c = std::cos(reduce_angle_l(uL - bL));
  const long double sigma_abs = std::abs(std::sin(reduce_angle_l(uL - bL)));
  out.r2 = {0.0, static_cast<double>(nL * (qpj / (n + j) - qmj / (n - j)) * c)};
  // |sigma| - 1 = -cos^2/(1+|sigma|): avoids cancellation when sigma ~ +-1.
  const double sign_s = (s == 0) ? 1.0 : -1.0;
  out.r3 = {-sign_s * out.a_tilde * static_cast<double>(c * c / (1.0L + sigma_abs)), 0.0};

  out.r = out.r1 + out.r2 + out.r3;
  std::complex<double> unrotated = std::complex<double>(sign_s * out.a_tilde, 0.0) + out.r;
  const long double rot = reduce_angle_l(-static_cast<long double>(j) * y0);
  out.lambda = unrotated * std::complex<double>(static_cast<double>(std::cos(rot)),
                                                static_cast<double>(std::sin(rot)));
  out.lambda_abs = std::abs(unrotated);
  // |lambda|^2 - a^2 expands without forming the near-equal difference.
  out.big_r = (sign_s * 2.0 * out.a_tilde * out.r.real() + std::norm(out.r)) /
              (out.lambda_abs + out.a_tilde);
  return out;
}

}  // namespace detail

// Parity of sign sin(n*y0 - beta*pi/2): s = 0 when positive, 1 when negative.
inline int compute_s(const KernelParams& p, int n, double y0) {
  if (n < 1) throw std::invalid_argument("compute_s: n must be >= 1");
  long double arg = reduce_angle_l(static_cast<long double>(n) * static_cast<long double>(y0) -
                                   static_cast<long double>(p.beta) * kPiL / 2.0L);
  double sine = static_cast<double>(std::sin(arg));
  if (std::abs(sine) <= 1e-13) {
    throw DegenerateSignError("compute_s: sin(n*y0 - beta*pi/2) vanishes; parity undefined");
  }
  return sine > 0.0 ? 0 : 1;
}

// Residual pieces (r1, r2, r3) of the scaled Fourier coefficient.
inline std::array<std::complex<double>, 3> compute_r(const KernelParams& p, int n, int j,
                                                     double y0,
                                                     const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "compute_r");
  int s = compute_s(p, n, y0);
  detail::LambdaParts parts = detail::lambda_parts(p, n, j, y0, s, policy);
  return {parts.r1, parts.r2, parts.r3};
}

// Scaled lambda_{n-j}(y0), factor q^n/n divided out.
inline std::complex<double> compute_lambda(const KernelParams& p, int n, int j, double y0,
                                           const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "compute_lambda");
  int s = compute_s(p, n, y0);
  return detail::lambda_parts(p, n, j, y0, s, policy).lambda;
}

// Scaled R_j = |lambda| - principal modulus.
inline double compute_R(const KernelParams& p, int n, int j, double y0,
                        const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "compute_R");
  int s = compute_s(p, n, y0);
  return detail::lambda_parts(p, n, j, y0, s, policy).big_r;
}

// delta_j = |lambda~_{n-j}| cos(j*pi/(2n)) / (q^{-j} + q^j) - 1 (dimensionless).
inline double compute_delta(const KernelParams& p, int n, int j, double y0,
                            const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "compute_delta");
  if (j < 0 || j > detail::int_sqrt_floor(n)) {
    throw std::invalid_argument("compute_delta: need 0 <= j <= floor(sqrt(n))");
  }
  int s = compute_s(p, n, y0);
  detail::LambdaParts parts = detail::lambda_parts(p, n, j, y0, s, policy);
  if (j == 0) return parts.big_r / 2.0;
  const long double qL = static_cast<long double>(p.q);
  const long double qpj = std::pow(qL, static_cast<long double>(j));
  long double cosj = std::cos(static_cast<long double>(j) * kPiL /
                              (2.0L * static_cast<long double>(n)));
  return static_cast<double>(static_cast<long double>(parts.lambda_abs) * cosj /
                                 (1.0L / qpj + qpj) -
                             1.0L);
}

inline GammaBreakdown compute_gammas(const KernelParams& p, int n, int k, double y0,
                                     const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "compute_gammas");
  if (k < 1 || k > 2 * n) throw std::invalid_argument("compute_gammas: need 1 <= k <= 2n");

  const int s = compute_s(p, n, y0);
  const int root_n = detail::int_sqrt_floor(n);
  const long double nL = static_cast<long double>(n);
  const long double tkL = (2.0L * k - 1.0L) * kPiL / (2.0L * nL);  // k*pi/n - pi/(2n)
  const long double deltaL = tkL - static_cast<long double>(y0);
  const double sign_s = (s == 0) ? 1.0 : -1.0;

  std::array<double, 5> gamma{};
  std::vector<double> big_r(static_cast<std::size_t>(n));
  std::vector<double> lambda_abs(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(root_n + 1));

  // One ascending-j pass builds every coefficient and all j-indexed sums with
  // compensated accumulation; the fixed order makes g3's k-independence and
  // repeat runs bit-reproducible.
  NeumaierSum g1, g2_tail, g4;
  double g2_head = 0.0;
  const long double qL = static_cast<long double>(p.q);
  for (int j = 0; j < n; ++j) {
    detail::LambdaParts parts = detail::lambda_parts(p, n, j, y0, s, policy);
    big_r[static_cast<std::size_t>(j)] = parts.big_r;
    lambda_abs[static_cast<std::size_t>(j)] = parts.lambda_abs;

    const long double jdL = reduce_angle_l(static_cast<long double>(j) * deltaL);
    const double cjd = static_cast<double>(std::cos(jdL));
    const double sjd = static_cast<double>(std::sin(jdL));
    const double cos_half = static_cast<double>(
        std::cos(static_cast<long double>(j) * kPiL / (2.0L * nL)));

    const double z_j = (parts.r.real() * cjd - parts.r.imag() * sjd) -
                       sign_s * parts.big_r * cjd;

    if (j == 0) {
      g2_head = z_j / (parts.lambda_abs * parts.lambda_abs);
      delta[0] = parts.big_r / 2.0;
      continue;
    }
    if (j <= root_n) {
      const long double qpj = std::pow(qL, static_cast<long double>(j));
      double dj = static_cast<double>(static_cast<long double>(parts.lambda_abs) *
                                          static_cast<long double>(cos_half) /
                                          (1.0L / qpj + qpj) -
                                      1.0L);
      delta[static_cast<std::size_t>(j)] = dj;
      g4.add(dj * cjd / (parts.lambda_abs * cos_half));
    } else {
      g1.add(cjd / (parts.lambda_abs * cos_half));
    }
    g2_tail.add(z_j / (parts.lambda_abs * parts.lambda_abs * cos_half));
  }

  gamma[0] = 2.0 * g1.value();
  gamma[1] = sign_s * (g2_head + 2.0 * g2_tail.value());
  const double r0 = big_r[0];
  gamma[2] = -r0 / (2.0 * (2.0 + r0));
  gamma[3] = -2.0 * g4.value();

  // g5: heat-kernel tail beyond floor(sqrt(n)).
  {
    NeumaierSum acc;
    double abs_acc = 0.0;
    long double qpj = std::pow(qL, static_cast<long double>(root_n + 1));
    bool converged = false;
    for (std::int64_t j = root_n + 1; j <= policy.max_terms; ++j) {
      double term = static_cast<double>(
          2.0L * qpj * std::cos(reduce_angle_l(static_cast<long double>(j) * deltaL)) /
          (1.0L + qpj * qpj));
      acc.add(term);
      abs_acc += std::abs(term);
      qpj *= qL;
      double tail = static_cast<double>(2.0L * qpj / (1.0L - qL));
      if (tail <= policy.rel_tol * (abs_acc + std::numeric_limits<double>::min())) {
        converged = true;
        break;
      }
    }
    if (!converged) detail::truncation_failure("compute_gammas/g5");
    gamma[4] = -acc.value();
  }

  double heat = eval_heat_poisson(p.q, static_cast<double>(deltaL), policy);
  return GammaBreakdown{gamma,          s, y0, k, n, p, std::move(delta), std::move(big_r),
                        std::move(lambda_abs), heat};
}

// Uniform lower bound for the heat kernel; same expression as the threshold
// right-hand side, so the two certifications share one code path.
inline double heat_lower_bound(double q) { return rhs_condition(q); }

// heat_lower_bound(q) + sum of gammas >= 0: the spline-derivative main term
// dominates the corrections.
inline bool check_positivity(const KernelParams& p, int n, int k,
                             const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "check_positivity");
  double theta = solve_theta(p, n).theta;
  double y0 = theta * kPi / n;
  GammaBreakdown gb = compute_gammas(p, n, k, y0, policy);
  return heat_lower_bound(p.q) + gb.gamma_sum() >= 0.0;
}

// Relative disagreement between the spline midpoint derivative computed from
// the linear system and the closed-form representation above.  k follows the
// 1..2n midpoint convention t_k = k*pi/n - pi/(2n); the interval index of the
// same point in derivative_at_midpoints is k-1.
inline double representation_residual(const KernelParams& p, int n, int k,
                                      const SeriesPolicy& policy = {}) {
  detail::require_gamma_envelope(p, n, "representation_residual");
  if (k < 1 || k > 2 * n) throw std::invalid_argument("representation_residual: need 1 <= k <= 2n");

  double theta = solve_theta(p, n).theta;
  double y0 = theta * kPi / n;

  SplineSolution sol = build_fundamental_spline(p, n, y0);
  std::vector<double> d = derivative_at_midpoints(sol);
  double d_spline = d[static_cast<std::size_t>(k - 1)];

  GammaBreakdown gb = compute_gammas(p, n, k, y0, policy);
  const long double qn = std::pow(static_cast<long double>(p.q), static_cast<long double>(n));
  const long double scale = kPiL / (4.0L * static_cast<long double>(n) * qn);
  const double parity = ((k + gb.s + 1) % 2 == 0) ? 1.0 : -1.0;
  double d_formula = parity * static_cast<double>(scale) * (gb.heat_value + gb.gamma_sum());

  double denom = std::max(std::abs(d_spline), std::abs(d_formula));
  if (denom == 0.0) return 0.0;
  return std::abs(d_spline - d_formula) / denom;
}

}  // namespace kwidths
