#pragma once

// Sign-change counters and cyclic-variation-diminishing checks: odd-order
// determinants of kernel translates det P_{q,beta}(x_i - y_j) decide whether
// the kernel damps cyclic sign changes under convolution.  A single pair of
// node systems with opposite determinant signs disproves the property for
// all orders, which is what counterexample_report computes at q = 0.21.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "numerics.hpp"

namespace kwidths {

// Strictly increasing sample points spanning less than one period.
struct NodeVector {
  std::vector<double> values;

  explicit NodeVector(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("NodeVector: empty");
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (!(values[i] > values[i - 1])) {
        throw std::invalid_argument("NodeVector: values must be strictly increasing");
      }
    }
    if (!(values.back() - values.front() < 2.0 * kPi)) {
      throw std::invalid_argument("NodeVector: span must be less than 2*pi");
    }
  }
};

// S(x): strict sign alternations after deleting zero entries.
inline int sign_changes(const std::vector<double>& x) {
  int count = 0;
  double prev = 0.0;
  bool seen = false;
  for (double v : x) {
    if (v == 0.0) continue;
    if (seen && ((prev > 0.0) != (v > 0.0))) ++count;
    prev = v;
    seen = true;
  }
  if (!seen) throw AllZerosError("sign_changes: vector has no nonzero entry");
  return count;
}

// S_c(x): sign changes of the rotation starting at a nonzero entry with that
// entry repeated at the far end, which realizes the maximum over rotations.
inline int cyclic_sign_changes(const std::vector<double>& x) {
  std::size_t k = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      k = i;
      break;
    }
  }
  if (k == x.size()) throw AllZerosError("cyclic_sign_changes: vector has no nonzero entry");
  std::vector<double> rotated;
  rotated.reserve(x.size() + 1);
  for (std::size_t i = k; i < x.size(); ++i) rotated.push_back(x[i]);
  for (std::size_t i = 0; i <= k; ++i) rotated.push_back(x[i]);
  return sign_changes(rotated);
}

struct DetResult {
  double value = 0.0;
  double error_bound = 0.0;  // first-order forward bound on |value| error
  bool escalated = false;    // true when extended precision was required
};

// det P_{q,beta}(x_i - y_j) with a forward error bound via the cofactor
// expansion: |d det| <= sum |C_ij| |da_ij|, entry and factorization errors
// folded into a c*eps*|a_ij| model.  When the bound is within 10x of the
// value, entries are rebuilt in long double and the determinant recomputed in
// double-double arithmetic before a sign is reported.
inline DetResult kernel_det(const KernelParams& params, const NodeVector& xs,
                            const NodeVector& ys) {
  const std::size_t m = xs.values.size();
  if (ys.values.size() != m) throw std::invalid_argument("kernel_det: node counts differ");
  if (m % 2 == 0) throw std::invalid_argument("kernel_det: order must be odd");
  const int n = static_cast<int>(m);

  std::vector<double> a(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i * m + j] = eval_poisson(params, xs.values[i] - ys.values[j]);
    }
  }

  DetResult out;
  out.value = lu_det(lu_factor(a, n));

  std::vector<double> cof = cofactor_matrix(a, n);
  double sensitivity = 0.0;
  for (std::size_t i = 0; i < m * m; ++i) sensitivity += std::abs(cof[i]) * std::abs(a[i]);
  const double c = 8.0;  // few-op entry evaluation plus factorization growth
  out.error_bound = c * std::numeric_limits<double>::epsilon() * sensitivity;

  if (out.error_bound >= std::abs(out.value) / 10.0) {
    std::vector<dd> a_dd(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        long double t = static_cast<long double>(xs.values[i]) -
                        static_cast<long double>(ys.values[j]);
        a_dd[i * m + j] =
            dd::from_long_double(detail::eval_poisson_l(params.q, params.beta, t));
      }
    }
    out.value = dd_lu_det(a_dd, n).to_double();
    out.error_bound = c * static_cast<double>(std::numeric_limits<long double>::epsilon()) *
                      sensitivity;
    out.escalated = true;
  }
  return out;
}

struct DeterminantCase {
  NodeVector xs;
  NodeVector ys;
  DetResult det;
};

struct CounterexampleReport {
  double q = 0.0;
  double beta = 0.0;
  DeterminantCase first;
  DeterminantCase second;
  bool signs_certified = false;  // both magnitudes exceed 10x their error bound
  bool not_cvd = false;          // certified determinants of opposite sign
};

namespace detail {

inline double pi_multiple(int num, int den) {
  return static_cast<double>(kPiL * static_cast<long double>(num) /
                             static_cast<long double>(den));
}

}  // namespace detail

// Evaluates the two fixed third-order node systems whose determinants have
// opposite signs at q = 0.21, disproving the variation-diminishing property
// for this kernel family.
inline CounterexampleReport counterexample_report(double q0 = 0.21, double beta = 0.0) {
  KernelParams params(q0, beta);
  NodeVector x1(std::vector<double>{detail::pi_multiple(1, 18), detail::pi_multiple(1, 9),
                                    detail::pi_multiple(1, 6)});
  NodeVector y1(std::vector<double>{detail::pi_multiple(13, 36), detail::pi_multiple(11, 30),
                                    detail::pi_multiple(67, 180)});
  NodeVector x2 = x1;
  NodeVector y2(std::vector<double>{detail::pi_multiple(13, 30), detail::pi_multiple(10, 9),
                                    detail::pi_multiple(7, 6)});

  DeterminantCase first{x1, y1, kernel_det(params, x1, y1)};
  DeterminantCase second{x2, y2, kernel_det(params, x2, y2)};

  auto certified = [](const DetResult& d) {
    return std::abs(d.value) >= 10.0 * d.error_bound && d.value != 0.0;
  };
  bool signs_certified = certified(first.det) && certified(second.det);
  bool not_cvd =
      signs_certified && ((first.det.value > 0.0) != (second.det.value > 0.0));
  return CounterexampleReport{q0, beta, std::move(first), std::move(second), signs_certified,
                              not_cvd};
}

}  // namespace kwidths
