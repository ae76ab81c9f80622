#pragma once

// Small dense linear algebra: LU with partial pivoting in binary64, a
// double-double LU for determinant escalation, and double-double residual
// evaluation for iterative refinement.  Systems here are tiny ((2n+1) x (2n+1)
// spline systems, odd-order kernel determinant samples), so simplicity and
// verifiable residuals win over structure exploitation.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace kwidths {

struct LuFactors {
  int n = 0;
  std::vector<double> lu;  // row-major, L below diagonal (unit), U on/above
  std::vector<int> piv;
  int perm_sign = 1;
  bool singular = false;
  double min_pivot_ratio = 0.0;  // min over steps of |pivot| / pivot-row norm
};

inline LuFactors lu_factor(std::vector<double> a, int n) {
  LuFactors f;
  f.n = n;
  f.lu = std::move(a);
  f.piv.resize(n);
  f.min_pivot_ratio = std::numeric_limits<double>::infinity();

  std::vector<double> row_norm(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) row_norm[i] = std::max(row_norm[i], std::abs(f.lu[i * n + j]));
    if (row_norm[i] == 0.0) row_norm[i] = 1.0;
  }

  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(f.lu[k * n + k]);
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(f.lu[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    f.piv[k] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu[k * n + j], f.lu[p * n + j]);
      std::swap(row_norm[k], row_norm[p]);
      f.perm_sign = -f.perm_sign;
    }
    double pivot = f.lu[k * n + k];
    f.min_pivot_ratio = std::min(f.min_pivot_ratio, std::abs(pivot) / row_norm[k]);
    if (pivot == 0.0) {
      f.singular = true;
      return f;
    }
    for (int i = k + 1; i < n; ++i) {
      double m = f.lu[i * n + k] / pivot;
      f.lu[i * n + k] = m;
      for (int j = k + 1; j < n; ++j) f.lu[i * n + j] -= m * f.lu[k * n + j];
    }
  }
  return f;
}

inline void lu_solve(const LuFactors& f, std::vector<double>& b) {
  const int n = f.n;
  // Stored multipliers were row-swapped by later pivots, so all permutations
  // must be applied to b before the triangular solves.
  for (int k = 0; k < n; ++k) {
    if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = k + 1; i < n; ++i) b[i] -= f.lu[i * n + k] * b[k];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= f.lu[i * n + j] * b[j];
    b[i] /= f.lu[i * n + i];
  }
}

inline double lu_det(const LuFactors& f) {
  if (f.singular) return 0.0;
  double d = static_cast<double>(f.perm_sign);
  for (int k = 0; k < f.n; ++k) d *= f.lu[k * f.n + k];
  return d;
}

// 1-norm condition estimate via the explicit inverse (fine for tiny systems).
inline double condition_estimate_1norm(const std::vector<double>& a, const LuFactors& f) {
  const int n = f.n;
  if (f.singular) return std::numeric_limits<double>::infinity();
  double norm_a = 0.0;
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += std::abs(a[i * n + j]);
    norm_a = std::max(norm_a, col);
  }
  double norm_inv = 0.0;
  std::vector<double> e(n);
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    lu_solve(f, e);
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += std::abs(e[i]);
    norm_inv = std::max(norm_inv, col);
  }
  return norm_a * norm_inv;
}

// Cofactor matrix C with det(A) = sum_j a_ij C_ij for any row i.  Used for a
// first-order sensitivity bound on the determinant; cost O(n^5) is irrelevant
// at the sizes involved.
inline std::vector<double> cofactor_matrix(const std::vector<double>& a, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) * n, 0.0);
  if (n == 1) {
    c[0] = 1.0;
    return c;
  }
  std::vector<double> minor(static_cast<std::size_t>(n - 1) * (n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int r = 0;
      for (int ii = 0; ii < n; ++ii) {
        if (ii == i) continue;
        int s = 0;
        for (int jj = 0; jj < n; ++jj) {
          if (jj == j) continue;
          minor[r * (n - 1) + s] = a[ii * n + jj];
          ++s;
        }
        ++r;
      }
      double dm = lu_det(lu_factor(minor, n - 1));
      c[i * n + j] = (((i + j) % 2) == 0) ? dm : -dm;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Double-double LU (pivoting on the hi parts) for determinant escalation.
// ---------------------------------------------------------------------------
inline dd dd_lu_det(std::vector<dd> a, int n) {
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a[k * n + k].hi);
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(a[i * n + k].hi);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      sign = -sign;
    }
    if (a[k * n + k].to_double() == 0.0) return dd(0.0);
    for (int i = k + 1; i < n; ++i) {
      dd m = dd_div(a[i * n + k], a[k * n + k]);
      a[i * n + k] = m;
      for (int j = k + 1; j < n; ++j) {
        a[i * n + j] = dd_sub(a[i * n + j], dd_mul(m, a[k * n + j]));
      }
    }
  }
  dd det(static_cast<double>(sign));
  for (int k = 0; k < n; ++k) det = dd_mul(det, a[k * n + k]);
  return det;
}

// r = b - A x, all in double-double.
inline std::vector<dd> dd_residual(const std::vector<dd>& a, int n,
                                   const std::vector<dd>& x, const std::vector<dd>& b) {
  std::vector<dd> r(n);
  for (int i = 0; i < n; ++i) {
    dd acc = b[i];
    for (int j = 0; j < n; ++j) {
      acc = dd_sub(acc, dd_mul(a[i * n + j], x[j]));
    }
    r[i] = acc;
  }
  return r;
}

}  // namespace kwidths
