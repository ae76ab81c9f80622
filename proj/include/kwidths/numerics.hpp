#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace kwidths {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr long double kPiL = 3.14159265358979323846264338327950288L;
inline constexpr long double kTwoPiL = 2.0L * kPiL;

// ---------------------------------------------------------------------------
// Error-free transformations and double-double arithmetic.
//
// A double-double value represents hi + lo with |lo| <= ulp(hi)/2, giving
// roughly 32 significant decimal digits.  Used where binary64 rounding of
// matrix entries or residuals would dominate the quantities being verified
// (spline solves and near-singular determinants).
// ---------------------------------------------------------------------------

struct TwoSum {
  double sum;
  double err;
};

// Knuth two-sum: sum + err == a + b exactly.
inline TwoSum two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Requires |a| >= |b| (or a == 0).
inline TwoSum fast_two_sum(double a, double b) {
  double s = a + b;
  double e = b - (s - a);
  return {s, e};
}

// prod + err == a * b exactly (std::fma is correctly rounded).
inline TwoSum two_prod(double a, double b) {
  double p = a * b;
  double e = std::fma(a, b, -p);
  return {p, e};
}

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  explicit dd(double x) : hi(x), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  static dd from_long_double(long double x) {
    double h = static_cast<double>(x);
    double l = static_cast<double>(x - static_cast<long double>(h));
    return {h, l};
  }

  double to_double() const { return hi + lo; }
};

inline dd dd_renorm(double h, double l) {
  TwoSum t = fast_two_sum(h, l);
  return {t.sum, t.err};
}

inline dd dd_add(const dd& a, const dd& b) {
  TwoSum s = two_sum(a.hi, b.hi);
  TwoSum t = two_sum(a.lo, b.lo);
  double lo = s.err + t.sum;
  TwoSum u = fast_two_sum(s.sum, lo);
  lo = u.err + t.err;
  return dd_renorm(u.sum, lo);
}

inline dd dd_neg(const dd& a) { return {-a.hi, -a.lo}; }

inline dd dd_sub(const dd& a, const dd& b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(const dd& a, const dd& b) {
  TwoSum p = two_prod(a.hi, b.hi);
  double lo = p.err + (a.hi * b.lo + a.lo * b.hi);
  return dd_renorm(p.sum, lo);
}

inline dd dd_mul(const dd& a, double b) {
  TwoSum p = two_prod(a.hi, b);
  double lo = p.err + a.lo * b;
  return dd_renorm(p.sum, lo);
}

inline dd dd_div(const dd& a, const dd& b) {
  double q1 = a.hi / b.hi;
  dd r = dd_sub(a, dd_mul(b, q1));
  double q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(b, q2));
  double q3 = r.hi / b.hi;
  TwoSum s = fast_two_sum(q1, q2);
  return dd_add(dd{s.sum, s.err}, dd(q3));
}

inline double dd_abs(const dd& a) { return std::abs(a.to_double()); }

// ---------------------------------------------------------------------------
// Compensated (Neumaier) accumulation in double.
// ---------------------------------------------------------------------------
class NeumaierSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Angle reduction.  Arguments of the kernel series can be k*t with k up to
// ~1e6; reduction is done in 80-bit extended precision so the absolute error
// stays near ulp(k*t) instead of growing with the naive double subtraction.
// ---------------------------------------------------------------------------

// Reduce x into [0, 2*pi) using extended precision.
inline long double reduce_angle_l(long double x) {
  long double r = std::fmod(x, kTwoPiL);
  if (r < 0.0L) r += kTwoPiL;
  if (r >= kTwoPiL) r = 0.0L;  // guard against fmod rounding at the seam
  return r;
}

inline double reduce_angle(double x) {
  return static_cast<double>(reduce_angle_l(static_cast<long double>(x)));
}

// cos/sin of (a*k + c) reduced in extended precision; k may be large.
inline double cos_reduced(long double a, long double c) {
  return static_cast<double>(std::cos(reduce_angle_l(a + c)));
}

inline double sin_reduced(long double a, long double c) {
  return static_cast<double>(std::sin(reduce_angle_l(a + c)));
}

}  // namespace kwidths
