#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "kwidths/thresholds.hpp"

using Catch::Approx;
using namespace kwidths;

TEST_CASE("Reference thresholds at q = 0.5", "[thresholds]") {
  ThresholdResult nq = find_threshold(0.5, ThresholdKind::NQ);
  ThresholdResult ns = find_threshold(0.5, ThresholdKind::NQ_STAR);
  REQUIRE(nq.n.has_value());
  REQUIRE(ns.n.has_value());
  CHECK(*nq.n == 969);
  CHECK(*ns.n == 963);
  // Strictness: the certificate must fail one index earlier.
  CHECK(lhs_old(0.5, 969) <= rhs_condition(0.5));
  CHECK(lhs_old(0.5, 968) > rhs_condition(0.5));
  CHECK(lhs_new(0.5, 963) <= rhs_condition(0.5));
  CHECK(lhs_new(0.5, 962) > rhs_condition(0.5));
  CHECK(nq.lhs_at_n <= nq.rhs);
}

TEST_CASE("Threshold values across the q grid", "[thresholds]") {
  struct Row {
    double q;
    std::int64_t nq, nq_star;
  };
  const Row rows[] = {
      {0.25, 16, 16},     {0.30, 29, 29},       {0.35, 55, 55},
      {0.40, 120, 120},   {0.45, 308, 308},     {0.55, 3922, 3810},
      {0.60, 22685, 21752}, {0.65, 221506, 211056}, {0.70, 4870853, 4630235},
  };
  for (const Row& r : rows) {
    ThresholdResult a = find_threshold(r.q, ThresholdKind::NQ);
    ThresholdResult b = find_threshold(r.q, ThresholdKind::NQ_STAR);
    REQUIRE(a.n.has_value());
    REQUIRE(b.n.has_value());
    INFO("q=" << r.q);
    CHECK(*a.n == r.nq);
    CHECK(*b.n == r.nq_star);
    CHECK(*b.n <= *a.n);
  }
}

TEST_CASE("Capped searches report not-found", "[thresholds]") {
  ThresholdResult r = find_threshold(0.75, ThresholdKind::NQ);
  CHECK_FALSE(r.n.has_value());
  CHECK(r.cap == 10000000);
  ThresholdResult s = find_threshold(0.75, ThresholdKind::NQ_STAR);
  CHECK_FALSE(s.n.has_value());
}

TEST_CASE("Strict separation of the two thresholds", "[thresholds]") {
  ThresholdResult a = find_threshold(0.4925, ThresholdKind::NQ);
  ThresholdResult b = find_threshold(0.4925, ThresholdKind::NQ_STAR);
  REQUIRE((a.n.has_value() && b.n.has_value()));
  CHECK(*a.n == 804);
  CHECK(*b.n == 803);
  CHECK(*b.n < *a.n);

  // Deep search with a raised cap.
  ThresholdResult c = find_threshold(0.80, ThresholdKind::NQ, 10000000000000LL);
  ThresholdResult d = find_threshold(0.80, ThresholdKind::NQ_STAR, 10000000000000LL);
  REQUIRE((c.n.has_value() && d.n.has_value()));
  CHECK(*c.n == 418163003524LL);
  CHECK(*d.n == 397255709684LL);
  CHECK(*d.n < *c.n);
}

TEST_CASE("New certificate never exceeds the old one", "[thresholds]") {
  for (double q : {0.3, 0.5, 0.7, 0.9}) {
    for (std::int64_t n : {10LL, 100LL, 10000LL, 1000000LL}) {
      CHECK(log_lhs_new(q, n) <= log_lhs_old(q, n) + 1e-12);
    }
  }
}

TEST_CASE("Certification index by parameter region", "[thresholds]") {
  // Integer beta: certified from n = 1 up to q = 0.2.
  CHECK(n_q_beta(0.15, 0.0) == 1);
  CHECK(n_q_beta(0.2, 3.0) == 1);
  CHECK(n_q_beta(0.2, -1.0) == 1);
  // Fractional beta: the smaller region applies.
  CHECK(n_q_beta(0.19, 0.5) == 1);
  CHECK(n_q_beta(0.196881, 0.5) == 1);
  CHECK(n_q_beta(0.197, 0.5) != 1);
  // Outside both regions the new-certificate threshold takes over.
  auto direct = find_threshold(0.2, ThresholdKind::NQ_STAR).n;
  CHECK(n_q_beta(0.2, 0.5) == direct);
  CHECK(n_q_beta(0.5, 1.0) == 963);
}

TEST_CASE("Decay inequality has the expected truth values", "[thresholds]") {
  CHECK_FALSE(check_umova_z(0.5, 9));
  CHECK(check_umova_z(0.5, 963));
  CHECK_THROWS_AS(check_umova_z(0.5, 0), std::invalid_argument);
}

TEST_CASE("Implication chain holds on a sample of the lattice", "[thresholds]") {
  for (double q : {0.37, 0.5, 0.7, 0.9}) {
    for (std::int64_t n : {9LL, 25LL, 100LL, 500LL, 2000LL}) {
      ImplicationReport rep = implication_suite(q, n);
      INFO("q=" << q << " n=" << n);
      CHECK_FALSE(rep.violation_p9_pn1);
      CHECK_FALSE(rep.violation_pn2_pz);
      CHECK_FALSE(rep.violation_pn1_pn2);
    }
  }
}

TEST_CASE("Right-hand side closed value", "[thresholds]") {
  // (1/2 + 2q/((1+q^2)(1-q))) ((1-q)/(1+q))^{4/(1-q^2)} at q = 1/2.
  CHECK(rhs_condition(0.5) ==
        Approx(2.1 * std::pow(1.0 / 3.0, 16.0 / 3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(find_threshold(0.0, ThresholdKind::NQ), std::invalid_argument);
  CHECK_THROWS_AS(find_threshold(1.0, ThresholdKind::NQ), std::invalid_argument);
  CHECK_THROWS_AS(rhs_condition(-0.1), std::invalid_argument);
}
