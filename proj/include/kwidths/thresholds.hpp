#pragma once

// Certification inequalities and the threshold indices n_q, n_q*.
//
// Everything is evaluated in the log domain: the right-hand side decays like
// ((1-q)/(1+q))^{4/(1-q^2)} and underflows binary64 long before q reaches 1,
// while the left-hand sides involve q^{sqrt(n)} at n beyond 10^11 for large q.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace kwidths {

enum class ThresholdKind { NQ, NQ_STAR };

struct ThresholdResult {
  double q = 0.0;
  ThresholdKind kind = ThresholdKind::NQ;
  std::optional<std::int64_t> n;  // empty: not found up to cap
  std::int64_t cap = 0;
  double lhs_at_n = std::numeric_limits<double>::quiet_NaN();
  double rhs = 0.0;
};

namespace detail {

inline void require_q(double q, const char* who) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": q must lie strictly in (0,1)");
  }
}

inline double log_sum_exp(double a, double b) {
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace detail

// log of (1/2 + 2q/((1+q^2)(1-q))) * ((1-q)/(1+q))^{4/(1-q^2)}.
inline double log_rhs_condition(double q) {
  detail::require_q(q, "rhs_condition");
  double lead = 0.5 + 2.0 * q / ((1.0 + q * q) * (1.0 - q));
  double expo = 4.0 / (1.0 - q * q);
  return std::log(lead) + expo * (std::log1p(-q) - std::log1p(q));
}

inline double rhs_condition(double q) { return std::exp(log_rhs_condition(q)); }

// log of (43/(10(1-q))) q^{sqrt n} + (160/(57(n - sqrt n))) * q/(1-q)^2.
inline double log_lhs_old(double q, std::int64_t n) {
  detail::require_q(q, "lhs_old");
  if (n < 9) throw std::invalid_argument("lhs_old: n must be >= 9");
  double rn = std::sqrt(static_cast<double>(n));
  double t1 = std::log(4.3) - std::log1p(-q) + rn * std::log(q);
  double t2 = std::log(160.0 / 57.0) - std::log(static_cast<double>(n) - rn) +
              std::log(q) - 2.0 * std::log1p(-q);
  return detail::log_sum_exp(t1, t2);
}

// As log_lhs_old but with the sharper second factor
// min{160/(57(n - sqrt n)), 8/(3n - 7 sqrt n)}.
inline double log_lhs_new(double q, std::int64_t n) {
  detail::require_q(q, "lhs_new");
  if (n < 9) throw std::invalid_argument("lhs_new: n must be >= 9");
  double rn = std::sqrt(static_cast<double>(n));
  double t1 = std::log(4.3) - std::log1p(-q) + rn * std::log(q);
  double f1 = 160.0 / (57.0 * (static_cast<double>(n) - rn));
  double f2 = 8.0 / (3.0 * static_cast<double>(n) - 7.0 * rn);
  double t2 = std::log(std::min(f1, f2)) + std::log(q) - 2.0 * std::log1p(-q);
  return detail::log_sum_exp(t1, t2);
}

inline double lhs_old(double q, std::int64_t n) { return std::exp(log_lhs_old(q, n)); }
inline double lhs_new(double q, std::int64_t n) { return std::exp(log_lhs_new(q, n)); }

// Smallest n >= 9 with lhs(q,n) <= rhs(q), or empty if none up to cap.
// The lhs is strictly decreasing in n and the rhs is constant, so an
// exponential bracket followed by binary search is exact.
inline ThresholdResult find_threshold(double q, ThresholdKind kind,
                                      std::int64_t cap = 10000000) {
  detail::require_q(q, "find_threshold");
  if (cap < 9) throw std::invalid_argument("find_threshold: cap must be >= 9");
  const double lrhs = log_rhs_condition(q);
  auto llhs = [&](std::int64_t n) {
    return kind == ThresholdKind::NQ ? log_lhs_old(q, n) : log_lhs_new(q, n);
  };
  auto holds = [&](std::int64_t n) { return llhs(n) <= lrhs; };

  ThresholdResult res;
  res.q = q;
  res.kind = kind;
  res.cap = cap;
  res.rhs = rhs_condition(q);

  std::int64_t lo = 9;
  if (holds(lo)) {
    res.n = lo;
    res.lhs_at_n = std::exp(llhs(lo));
    return res;
  }
  std::int64_t hi = lo;
  while (true) {
    if (hi >= cap) return res;  // not found up to cap
    hi = (hi > cap / 2) ? cap : hi * 2;
    if (holds(hi)) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  res.n = hi;
  res.lhs_at_n = std::exp(llhs(hi));
  return res;
}

// Certification index n_{q,beta}: 1 inside the small-q regions (0.2 for
// integer beta, 0.196881 otherwise), else n_q*.
inline std::optional<std::int64_t> n_q_beta(double q, double beta,
                                            std::int64_t cap = 10000000) {
  detail::require_q(q, "n_q_beta");
  const bool beta_integral = (beta == std::round(beta));
  if (beta_integral) {
    if (q <= 0.2) return 1;
  } else {
    if (q <= 0.196881) return 1;
  }
  return find_threshold(q, ThresholdKind::NQ_STAR, cap).n;
}

// q^n/(1 - q^{2n}) <= 7 q^{sqrt n} / (37 n^2), log-domain.
inline bool check_umova_z(double q, std::int64_t n) {
  detail::require_q(q, "check_umova_z");
  if (n < 1) throw std::invalid_argument("check_umova_z: n must be >= 1");
  double lq = std::log(q);
  double nd = static_cast<double>(n);
  double llhs = nd * lq - std::log1p(-std::exp(2.0 * nd * lq));
  double lrhs = std::log(7.0 / 37.0) - 2.0 * std::log(nd) + std::sqrt(nd) * lq;
  return llhs <= lrhs;
}

// Truth values of the four chained predicates and any violation of the
// implications between them.
struct ImplicationReport {
  bool p9 = false;   // lhs_new(q,n) <= rhs(q)
  bool pz = false;   // check_umova_z
  bool pn1 = false;  // n > (8q/(3(1-q)^2)) ((1+q)/(1-q))^3
  bool pn2 = false;  // n > (9(1+q)/(4(1-q)))^2
  bool violation_p9_pn1 = false;
  bool violation_pn2_pz = false;
  bool violation_pn1_pn2 = false;  // only asserted for q > 91/250
  bool any_violation() const {
    return violation_p9_pn1 || violation_pn2_pz || violation_pn1_pn2;
  }
};

inline ImplicationReport implication_suite(double q, std::int64_t n) {
  detail::require_q(q, "implication_suite");
  if (n < 9) throw std::invalid_argument("implication_suite: n must be >= 9");
  ImplicationReport r;
  r.p9 = log_lhs_new(q, n) <= log_rhs_condition(q);
  r.pz = check_umova_z(q, n);
  double nd = static_cast<double>(n);
  double one_minus = 1.0 - q;
  double ratio = (1.0 + q) / one_minus;
  r.pn1 = nd > (8.0 * q / (3.0 * one_minus * one_minus)) * ratio * ratio * ratio;
  double h = 9.0 * (1.0 + q) / (4.0 * one_minus);
  r.pn2 = nd > h * h;
  r.violation_p9_pn1 = r.p9 && !r.pn1;
  r.violation_pn2_pz = r.pn2 && !r.pz;
  r.violation_pn1_pn2 = (q > 91.0 / 250.0) && r.pn1 && !r.pn2;
  return r;
}

}  // namespace kwidths
