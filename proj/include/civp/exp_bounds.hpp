#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "civp/sturm.hpp"

namespace civp {

// Taylor-with-slack upper bound on e^{Kt} over [0, T]:
//   theta_n(t) = sum_{i<=n} K^i t^i / i!  +  M t^n / n!,
//   M = K^{n+1} T / (n - K T), requires n > K T.
// theta_n(0) = 1, all coefficients nonnegative, and theta' - K theta >= 0 on
// [0, T] (certified by a Sturm witness).
struct TaylorUpperBound {
  Rat K, T;
  int n = 0;
  UniPoly theta;
  Rat slack_coeff;  // M above
  SturmWitness darboux;
};

namespace detail {

inline UniPoly theta_poly(const Rat& K, int n, const Rat& slack) {
  std::vector<Rat> c(static_cast<size_t>(n) + 1);
  Rat fact(1), kpow(1);
  for (int i = 0; i <= n; ++i) {
    if (i > 0) {
      fact *= Rat(i);
      kpow *= K;
    }
    c[static_cast<size_t>(i)] = kpow / fact;
  }
  c[static_cast<size_t>(n)] += slack / fact;
  return UniPoly(std::move(c));
}

}  // namespace detail

struct theta_precondition_error : domain_error {
  using domain_error::domain_error;
};

inline TaylorUpperBound build_theta(const Rat& K, const Rat& T, int n) {
  if (K.sign() <= 0 || T.sign() <= 0)
    throw theta_precondition_error("build_theta requires K > 0 and T > 0");
  if (Rat(n) <= K * T)
    throw theta_precondition_error("build_theta requires n > K*T");
  TaylorUpperBound out;
  out.K = K;
  out.T = T;
  out.n = n;
  out.slack_coeff = rat_pow(K, static_cast<unsigned>(n) + 1) * T /
                    (Rat(n) - K * T);
  out.theta = detail::theta_poly(K, n, out.slack_coeff);
  UniPoly darboux_poly = out.theta.derivative() - out.theta.scaled(K);
  SturmOutcome res = sturm_nonneg(darboux_poly, Rat(0), T);
  if (!res.nonneg)
    throw domain_error(
        "build_theta: Darboux check failed; this is an implementation bug");
  out.darboux = std::move(res.witness);
  return out;
}

// Truncated exponential series: a lower bound on e^x for x >= 0.
inline Rat exp_series_lower(const Rat& x, int terms) {
  Rat acc(0), pow(1), fact(1);
  for (int i = 0; i <= terms; ++i) {
    if (i > 0) {
      fact *= Rat(i);
      pow *= x;
    }
    acc += pow / fact;
  }
  return acc;
}

// theta_n value without Darboux certification (search helper).
inline Rat theta_value(const Rat& K, const Rat& dt, int n, const Rat& at) {
  Rat slack = rat_pow(K, static_cast<unsigned>(n) + 1) * dt /
              (Rat(n) - K * dt);
  return detail::theta_poly(K, n, slack).eval(at);
}

// E >= e^{K dt} with E <= e^{K dt} (1 + tol).
inline Rat exp_rational_bound(const Rat& K, const Rat& dt, const Rat& tol) {
  if (tol.sign() <= 0) throw domain_error("exp_rational_bound needs tol > 0");
  Rat x = K * dt;
  if (x.sign() < 0) throw domain_error("exp_rational_bound needs K*dt >= 0");
  if (x.is_zero()) return Rat(1);
  long n0 = 0;
  {
    mpz_class f = rat_floor(x);
    n0 = f.get_si() + 1;
  }
  for (int n = static_cast<int>(n0);; ++n) {
    Rat upper = theta_value(K, dt, n, dt);
    Rat lower = exp_series_lower(x, n);
    if (upper <= lower * (Rat(1) + tol)) return upper;
  }
}

struct ExpUpperProof {
  Rat c, K, dt, M;  // proves: g = c at 0, g' = K g  =>  g <= M on [0, dt]
  TaylorUpperBound theta;
  Rat cert_max;     // c * theta(dt), the certified max of c*theta on [0, dt]
};

struct ExpInfeasible {
  Rat series_lower;  // certified lower bound on c * e^{K dt}
  int terms = 0;
};

struct ExpBudgetExhausted {};

using ExpUpperResult =
    std::variant<ExpUpperProof, ExpInfeasible, ExpBudgetExhausted>;

// Searches n upward for c * max_{[0,dt]} theta_n <= M_target; detects
// infeasibility via the series lower bound on c * e^{K dt}.
inline ExpUpperResult exp_upper(const Rat& c, const Rat& K, const Rat& dt,
                                const Rat& M_target, int n_budget = 400) {
  if (c < Rat(1)) throw domain_error("exp_upper requires c >= 1");
  if (K.sign() <= 0 || dt.sign() <= 0)
    throw domain_error("exp_upper requires K > 0 and dt > 0");
  Rat x = K * dt;
  long n0 = rat_floor(x).get_si() + 1;
  for (int n = static_cast<int>(n0); n < static_cast<int>(n0) + n_budget;
       ++n) {
    // theta has nonnegative coefficients, so its max on [0,dt] is theta(dt)
    Rat upper = c * theta_value(K, dt, n, dt);
    if (upper <= M_target) {
      ExpUpperProof proof;
      proof.c = c;
      proof.K = K;
      proof.dt = dt;
      proof.M = M_target;
      proof.theta = build_theta(K, dt, n);
      proof.cert_max = upper;
      return proof;
    }
    Rat lower = c * exp_series_lower(x, n);
    if (lower > M_target) {
      // refine the reported lower bound past the detection threshold
      int terms = n + 24;
      return ExpInfeasible{c * exp_series_lower(x, terms), terms};
    }
  }
  return ExpBudgetExhausted{};
}

}  // namespace civp
