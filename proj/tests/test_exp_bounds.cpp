#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "civp/civp.hpp"

using namespace civp;

TEST_CASE("theta construction: K=1, T=5, n=6") {
  TaylorUpperBound th = build_theta(Rat(1), Rat(5), 6);
  // M = K^{n+1} T / (n - K T) = 5 / 1 = 5
  CHECK(th.slack_coeff == Rat(5));
  CHECK(th.theta.eval(Rat(0)) == Rat(1));
  // t^6 coefficient: 1/720 + 5/720 = 1/120
  CHECK(th.theta.coeff(6) == Rat(mpz_class(1), mpz_class(120)));
  CHECK(th.theta.coeff(3) == Rat(mpz_class(1), mpz_class(6)));
  CHECK(th.darboux.nonneg);
}

TEST_CASE("theta precondition: n must exceed K*T") {
  CHECK_THROWS_AS(build_theta(Rat(1), Rat(5), 5), theta_precondition_error);
  CHECK_THROWS_AS(build_theta(Rat(1), Rat(5), 4), theta_precondition_error);
  CHECK_THROWS_AS(build_theta(Rat(0), Rat(5), 6), theta_precondition_error);
  // boundary: K = 2, T = 3, n = 6 = KT rejected; n = 7 fine
  CHECK_THROWS_AS(build_theta(Rat(2), Rat(3), 6), theta_precondition_error);
  CHECK(build_theta(Rat(2), Rat(3), 7).theta.eval(Rat(0)) == Rat(1));
}

TEST_CASE("theta(0) = 1 and K -> 0 behavior") {
  TaylorUpperBound tiny = build_theta(rat_pow2(-20), Rat(1), 2);
  CHECK(tiny.theta.eval(Rat(0)) == Rat(1));
  CHECK(tiny.theta.eval(Rat(1)) < Rat(1) + rat_pow2(-17));
}

TEST_CASE("Darboux witness verified by Sturm and by grid") {
  for (int n : {6, 10, 17, 28}) {
    TaylorUpperBound th = build_theta(Rat(1), Rat(5), n);
    UniPoly darboux = th.theta.derivative() - th.theta.scaled(Rat(1));
    CHECK(th.darboux.polynomial == darboux);
    CHECK(sturm_witness_valid(th.darboux));
    for (int i = 0; i <= 1000; ++i) {
      Rat t = Rat(5) * Rat(mpz_class(i), mpz_class(1000));
      if (darboux.eval(t).sign() < 0) {
        CHECK(false);
        break;
      }
    }
  }
}

TEST_CASE("theta dominates the exponential series on a grid") {
  TaylorUpperBound th = build_theta(Rat(2), Rat(3), 12);
  for (int i = 0; i <= 64; ++i) {
    Rat t = Rat(3) * Rat(mpz_class(i), mpz_class(64));
    CHECK(th.theta.eval(t) >= exp_series_lower(Rat(2) * t, 60));
  }
}

TEST_CASE("certified theta maxima decrease toward the series value") {
  Rat dt(5);
  Rat series = exp_series_lower(Rat(5), 200);  // e^5 to high accuracy
  Rat prev;
  bool first = true;
  for (int n = 6; n <= 40; ++n) {
    Rat v = theta_value(Rat(1), dt, n, dt);
    CHECK(v >= series);
    if (!first) CHECK(v <= prev);
    prev = v;
    first = false;
  }
  Rat tol = rat_pow2(-20);
  Rat certified = exp_rational_bound(Rat(1), Rat(5), tol);
  CHECK(certified >= series);
  CHECK(certified <= series * (Rat(1) + tol * Rat(2)));
}

TEST_CASE("exp_upper worked bounds") {
  // paper-scale bound: e^5 < 300 is provable
  auto ok = exp_upper(Rat(1), Rat(1), Rat(5), Rat(300));
  REQUIRE(std::holds_alternative<ExpUpperProof>(ok));
  const auto& proof = std::get<ExpUpperProof>(ok);
  CHECK(proof.cert_max <= Rat(300));
  CHECK(proof.theta.darboux.nonneg);

  // e^5 = 148.4131...: a cap of 148 is certifiably impossible
  auto bad = exp_upper(Rat(1), Rat(1), Rat(5), Rat(148));
  REQUIRE(std::holds_alternative<ExpInfeasible>(bad));
  CHECK(std::get<ExpInfeasible>(bad).series_lower > Rat(148));
}

TEST_CASE("the running-example exponential instantiation fails its side "
          "condition") {
  // 1.1 * e^{0.16} = 1.2909... > 1.2: infeasible, certified by the series
  auto res = exp_upper(rat_from_string("11/10"), Rat(8),
                       rat_from_string("1/50"), rat_from_string("6/5"));
  REQUIRE(std::holds_alternative<ExpInfeasible>(res));
  Rat lower = std::get<ExpInfeasible>(res).series_lower;
  CHECK(lower > rat_from_string("6/5"));
  CHECK(lower > rat_from_string("1.29"));
  CHECK(lower < rat_from_string("1.2915"));
  // re-selection with a smaller c succeeds at the same K, dt
  auto ok = exp_upper(Rat(1) + rat_pow2(-10), Rat(8), rat_from_string("1/50"),
                      rat_from_string("6/5"));
  CHECK(std::holds_alternative<ExpUpperProof>(ok));
}

TEST_CASE("exp_rational_bound against the series oracle") {
  Rat tol = rat_pow2(-16);
  CHECK(exp_rational_bound(Rat(0), Rat(1), tol) == Rat(1));
  CHECK(exp_rational_bound(Rat(1), Rat(0), tol) == Rat(1));

  Rat e016 = exp_rational_bound(Rat(8), rat_from_string("1/50"), tol);
  double expect = std::exp(0.16);
  CHECK(e016.to_double() >= expect - 1e-12);
  CHECK(e016.to_double() <= expect * (1 + 1e-4));

  Rat e5 = exp_rational_bound(Rat(1), Rat(5), tol);
  double e5d = std::exp(5.0);
  CHECK(e5.to_double() >= e5d - 1e-9);
  CHECK(e5.to_double() <= e5d * (1 + 1e-4));
}
