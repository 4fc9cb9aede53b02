#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "civp/civp.hpp"
#include "support/testutil.hpp"

using namespace civp;
using civp_test::grid_max;
using civp_test::rnd_point_in;
using civp_test::rnd_poly;
using civp_test::rnd_rat;

namespace {

Box box1(const Rat& lo, const Rat& hi) { return Box{{Iv(lo, hi)}}; }

}  // namespace

TEST_CASE("interval_eval examples") {
  std::vector<std::string> xv{"x"};
  MultiPoly sq = MultiPoly::variable(xv, 0).pow(2);
  CHECK(interval_eval(sq, box1(Rat(-1), Rat(2))) == Iv(Rat(0), Rat(4)));

  std::vector<std::string> xyv{"x", "y"};
  MultiPoly xy_minus_x =
      MultiPoly::variable(xyv, 0) * MultiPoly::variable(xyv, 1) -
      MultiPoly::variable(xyv, 0);
  Box unit{{Iv(Rat(0), Rat(1)), Iv(Rat(0), Rat(1))}};
  Iv enc = interval_eval(xy_minus_x, unit);
  // naive evaluation gives [-1, 1]; the true range [-1, 0] is enclosed
  CHECK(enc == Iv(Rat(-1), Rat(1)));
  CHECK(enc.lo <= Rat(-1));
  CHECK(enc.hi >= Rat(0));

  MultiPoly c = MultiPoly::constant(xv, Rat(mpz_class(7), mpz_class(3)));
  Iv ce = interval_eval(c, box1(Rat(-5), Rat(11)));
  CHECK(ce.is_point());
  CHECK(ce.lo == Rat(mpz_class(7), mpz_class(3)));
}

TEST_CASE("prove_upper basic examples") {
  std::vector<std::string> xv{"x"};
  MultiPoly sq = MultiPoly::variable(xv, 0).pow(2);
  Box b = box1(Rat(-1), Rat(1));
  auto ok = prove_upper(sq, b, Rat(1), 100);
  CHECK(ok.status == ProveStatus::Proved);
  CHECK(subdivision_witness_valid(sq, ok.witness));

  // max is exactly 1 > 99/100: must never prove
  auto bad = prove_upper(sq, b, rat_from_string("99/100"), 4000);
  CHECK(bad.status != ProveStatus::Proved);
  CHECK(bad.status == ProveStatus::Refuted);
  REQUIRE(bad.refutation.has_value());
  CHECK(sq.eval(*bad.refutation) > rat_from_string("99/100"));
}

TEST_CASE("prove_upper never accepts a false bound (fuzz)") {
  std::mt19937_64 rng(101);
  std::vector<std::string> vars{"x", "y"};
  int proved = 0;
  for (int i = 0; i < 800; ++i) {
    MultiPoly p = rnd_poly(rng, vars, 4, 6);
    Box b;
    for (int d = 0; d < 2; ++d) {
      Rat lo = rnd_rat(rng, 4, 4);
      Rat w = rat_abs(rnd_rat(rng, 3, 2)) + Rat(mpz_class(1), mpz_class(4));
      b.dims.push_back(Iv(lo, lo + w));
    }
    // grid maximum is attained at some grid point: any bound strictly below
    // it is false
    Rat gm = grid_max(p, b, 6);
    Rat bound = gm - Rat(mpz_class(1), mpz_class(100));
    auto res = prove_upper(p, b, bound, 300);
    CHECK(res.status != ProveStatus::Proved);
    // and a clearly true bound must often be provable
    auto yes = prove_upper(p, b, interval_eval(p, b).hi, 4);
    if (yes.status == ProveStatus::Proved) ++proved;
  }
  CHECK(proved == 800);
}

TEST_CASE("approx_max examples") {
  std::vector<std::string> xv{"x"};
  MultiPoly x = MultiPoly::variable(xv, 0);
  MultiPoly parab = x - x.pow(2);  // x(1-x), max 1/4 at 1/2
  Rat tol(mpz_class(1), mpz_class(1000));
  MaxBound mb = approx_max(parab, box1(Rat(0), Rat(1)), tol);
  CHECK(mb.upper >= Rat(mpz_class(1), mpz_class(4)));
  CHECK(mb.upper <= Rat(mpz_class(1), mpz_class(4)) + tol);
  CHECK(subdivision_witness_valid(parab, mb.witness));

  // ||f||^2 for f = x^2 + 1 on [0, 2]: (x^2+1)^2 has max 25
  MultiPoly f = x.pow(2) + MultiPoly::constant(xv, Rat(1));
  MultiPoly fsq = f * f;
  MaxBound m2 = approx_max(fsq, box1(Rat(0), Rat(2)), tol);
  CHECK(m2.upper >= Rat(25));
  CHECK(m2.upper <= Rat(25) + tol);

  MultiPoly c = MultiPoly::constant(xv, rat_from_string("-7/3"));
  MaxBound m3 = approx_max(c, box1(Rat(0), Rat(1)), tol);
  CHECK(m3.upper == rat_from_string("-7/3"));
}

TEST_CASE("approx_max dominates finite samples") {
  std::mt19937_64 rng(3);
  std::vector<std::string> vars{"x", "y"};
  for (int i = 0; i < 40; ++i) {
    MultiPoly p = rnd_poly(rng, vars, 3, 5);
    Box b{{Iv(Rat(-1), Rat(1)), Iv(Rat(0), Rat(2))}};
    MaxBound mb = approx_max(p, b, Rat(mpz_class(1), mpz_class(64)));
    for (int s = 0; s < 50; ++s)
      CHECK(p.eval(rnd_point_in(rng, b)) <= mb.upper);
    CHECK(mb.best_sample <= mb.upper);
  }
}

TEST_CASE("lipschitz_bound examples") {
  std::vector<std::string> xv{"x"};
  MultiPoly x = MultiPoly::variable(xv, 0);
  PolyVec ident({x});
  Rat k1 = lipschitz_bound(ident, box1(Rat(-10), Rat(10)));
  CHECK(k1 >= Rat(1));
  CHECK(k1 <= Rat(2));

  PolyVec sq_field({x.pow(2) + MultiPoly::constant(xv, Rat(1))});
  Rat k2 = lipschitz_bound(sq_field, box1(Rat(0), Rat(2)));
  CHECK(k2 >= Rat(4));
  CHECK(k2 <= Rat(5));

  // Moore-Greitzer field on the enclosure box from the running example
  std::vector<std::string> uv{"u", "v"};
  MultiPoly u = MultiPoly::variable(uv, 0), v = MultiPoly::variable(uv, 1);
  PolyVec f({-v - u.pow(2).scaled(rat_from_string("3/2")) -
                 u.pow(3).scaled(rat_from_string("1/2")) -
                 MultiPoly::constant(uv, rat_from_string("1/2")),
             u.scaled(Rat(3)) - v});
  Box B{{Iv(rat_from_string("0.781"), rat_from_string("1.109")),
         Iv(rat_from_string("0.891"), rat_from_string("1.199"))}};
  Rat k3 = lipschitz_bound(f, B);
  CHECK(k3 <= Rat(8));
  CHECK(k3 >= Rat(3));
}

TEST_CASE("lipschitz_bound dominates sampled difference quotients") {
  std::mt19937_64 rng(17);
  std::vector<std::string> vars{"x", "y"};
  for (int trial = 0; trial < 20; ++trial) {
    PolyVec f({rnd_poly(rng, vars, 3, 4), rnd_poly(rng, vars, 3, 4)});
    Box b{{Iv(Rat(-1), Rat(1)), Iv(Rat(-1), Rat(1))}};
    Rat K = lipschitz_bound(f, b);
    for (int s = 0; s < 30; ++s) {
      auto xp = rnd_point_in(rng, b);
      auto yp = rnd_point_in(rng, b);
      if (xp == yp) continue;
      Rat fx0 = f[0].eval(xp) - f[0].eval(yp);
      Rat fx1 = f[1].eval(xp) - f[1].eval(yp);
      Rat num = fx0 * fx0 + fx1 * fx1;
      Rat d0 = xp[0] - yp[0], d1 = xp[1] - yp[1];
      Rat den = d0 * d0 + d1 * d1;
      CHECK(num <= K * K * den);
    }
  }
}

TEST_CASE("region_membership examples") {
  std::vector<std::string> xyv{"x", "y"};
  MultiPoly x = MultiPoly::variable(xyv, 0), y = MultiPoly::variable(xyv, 1);
  // ||x||^2 < 1 as atom x^2 + y^2 - 1 < 0
  OpenRegion ball;
  ball.root = RegionNode::atom(x.pow(2) + y.pow(2) -
                                   MultiPoly::constant(xyv, Rat(1)),
                               false);
  Box origin{{Iv(Rat(0)), Iv(Rat(0))}};
  auto ok = region_membership(origin, rat_from_string("1/2"), ball, 100);
  REQUIRE(ok.has_value());
  Box inflated = origin.inflated(rat_from_string("1/2"));
  CHECK(region_proof_valid(ball.root, inflated, *ok));

  // boundary touch: box [0,0], pad 1, region x < 1 fails (not strict inside)
  std::vector<std::string> xv{"x"};
  OpenRegion half;
  half.root = RegionNode::atom(
      MultiPoly::variable(xv, 0) - MultiPoly::constant(xv, Rat(1)), false);
  Box pt{{Iv(Rat(0))}};
  auto bad = region_membership(pt, Rat(1), half, 200);
  CHECK(!bad.has_value());
}

TEST_CASE("region_membership handles disjunctions by splitting") {
  std::vector<std::string> xv{"x"};
  MultiPoly x = MultiPoly::variable(xv, 0);
  // (x < 1/4) or (x > -1/4): covers everything, but neither disjunct covers
  // [-1, 1] alone — requires an OrSplit
  OpenRegion r;
  r.root = RegionNode::disj(
      {RegionNode::atom(x - MultiPoly::constant(xv, rat_from_string("1/4")),
                        false),
       RegionNode::atom(x + MultiPoly::constant(xv, rat_from_string("1/4")),
                        true)});
  Box b{{Iv(Rat(-1), Rat(1))}};
  auto ok = region_membership(b, Rat(0), r, 500);
  REQUIRE(ok.has_value());
  CHECK(ok->kind == RegionProofNode::Kind::OrSplit);
  CHECK(region_proof_valid(r.root, b, *ok));
}

TEST_CASE("witnesses are deterministic and replayable") {
  std::mt19937_64 rng(71);
  std::vector<std::string> vars{"x", "y"};
  for (int i = 0; i < 25; ++i) {
    MultiPoly p = rnd_poly(rng, vars, 4, 5);
    Box b{{Iv(Rat(-1), Rat(1)), Iv(Rat(-1), Rat(1))}};
    Rat bound = grid_max(p, b, 4) + Rat(1);
    auto r1 = prove_upper(p, b, bound, 2000);
    auto r2 = prove_upper(p, b, bound, 2000);
    REQUIRE(r1.status == r2.status);
    if (r1.status == ProveStatus::Proved) {
      CHECK(subdivision_witness_valid(p, r1.witness));
      CHECK(json(certjson::enc(r1.witness)).dump() ==
            json(certjson::enc(r2.witness)).dump());
    }
  }
}
