#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "civp/certificate.hpp"

namespace civp {

// State-space enclosure of the certified flow tube, with the Lipschitz data
// that was validated on it.
struct EnclosureBox {
  Box B;
  Rat K;       // >= Lipschitz constant of f on B, floored at 2^-20
  Rat margin;  // inflation applied to the interval hull of phi
  Rat rho;     // certified Gronwall error pad; consistency: rho < margin
};

// The psi invariant package: error envelope eps(g,t) = h(1+t-t0)g - h with
// exponential ghost g' = Kg started at g = c.
struct InvariantSpec {
  Rat h, c, K, t0, T;
  ApproximantPoly phi;
  EnclosureBox enclosure;

  Rat epsilon_at(const Rat& g, const Rat& t) const {
    return h * (Rat(1) + t - t0) * g - h;
  }
};

struct ErrorBoundResult {
  Rat epsilon_target;
  int k = 0;
  InvariantSpec invariant;
  ExpUpperProof exp_proof;
  DefectReport defect;
  Rat bound;  // certified: sup ||phi_true - phi|| <= bound <= epsilon_target
  Certificate certificate;
};

struct Infeasible {
  std::string code;  // enclosure-divergence | family-exhausted | exp-budget |
                     // target-infeasible | budget-exhausted
  std::string message;
};

using ErrorBoundOutcome = std::variant<ErrorBoundResult, Infeasible>;

struct EngineOptions {
  int max_k = 48;
  long oracle_budget = 400000;
  int exp_n_budget = 600;
  int margin_doublings = 8;
  long enc_leaf_budget = 4096;
};

// Indexed approximant family. For Picard the index is the iterate count
// (t-degree capped at the index to keep nonlinear iterates polynomial-sized).
struct ApproximantFamily {
  std::function<ApproximantPoly(int)> at;
  int k_min = 1;
  int k_max = 48;
  bool single = false;
  std::string name;
};

inline ApproximantFamily picard_family(const CompactIVP& ivp) {
  ApproximantFamily fam;
  fam.at = [ivp](int k) { return picard_iterate(ivp, k, /*t_degree_cap=*/k); };
  fam.name = "picard";
  return fam;
}

inline ApproximantFamily fixed_family(ApproximantPoly phi) {
  ApproximantFamily fam;
  auto shared = std::make_shared<ApproximantPoly>(std::move(phi));
  fam.at = [shared](int) { return *shared; };
  fam.k_min = fam.k_max = 0;
  fam.single = true;
  fam.name = "user";
  return fam;
}

inline InvariantSpec build_invariant(const Rat& h, const Rat& c, const Rat& K,
                                     const CompactIVP& ivp,
                                     const ApproximantPoly& phi,
                                     EnclosureBox enclosure) {
  InvariantSpec spec;
  spec.h = h;
  spec.c = c;
  spec.K = K;
  spec.t0 = ivp.t0;
  spec.T = ivp.T;
  spec.phi = phi;
  spec.enclosure = std::move(enclosure);
  return spec;
}

namespace detail {

constexpr int kKFloorBits = 20;  // K floored at 2^-20 (K must be positive)

struct AttemptOutcome {
  bool ok = false;
  std::string fail_code;
  std::string fail_message;
  // on success:
  ApproximantPoly phi;
  DefectReport defect;
  EnclosureBox enclosure;
  Rat c, h, M;
  ExpUpperProof exp_proof;
  Rat bound;
};

inline Box phi_domain(const CompactIVP& ivp) {
  return ivp.init.bounding_box.product(Iv(ivp.t0, ivp.T));
}

inline Rat engine_lipschitz(const PolyVec& jacobian, const Box& B) {
  Rat hi = norm_sq_interval(jacobian, B).hi;
  Rat K = rat_sqrt_upper(rat_max(hi, Rat(0)), 40);
  return rat_max(K, rat_pow2(-kKFloorBits));
}

inline AttemptOutcome attempt_k(const CompactIVP& ivp,
                                const ApproximantPoly& phi,
                                const Rat& epsilon_target,
                                const EngineOptions& opts) {
  AttemptOutcome out;
  out.phi = phi;
  Rat dt = ivp.T - ivp.t0;
  if (dt.is_zero()) dt = rat_pow2(-kKFloorBits);  // degenerate horizon

  Box domain = phi_domain(ivp);
  std::vector<Iv> hull;
  for (size_t i = 0; i < phi.ivp_dim; ++i)
    hull.push_back(interval_eval(phi.phi[i], domain));

  PolyVec jacobian = checker::recompute_jacobian(ivp.f);
  Rat margin0 = rat_max(ivp.init.bounding_box.max_width() / Rat(8),
                        Rat(mpz_class(1), mpz_class(8)));

  // Bootstrap estimate of a "useful" defect resolution: refining delta
  // below the point where the final bound clears half the target brings
  // nothing, so the defect search may stop early there.
  std::optional<Rat> stop_below;
  {
    Box B0;
    for (const auto& hv : hull)
      B0.dims.push_back(Iv(hv.lo - margin0, hv.hi + margin0));
    Rat K0 = engine_lipschitz(jacobian, B0);
    if (K0 * dt <= Rat(16)) {
      Rat E0 = exp_rational_bound(K0, dt, rat_pow2(-6));
      Rat delta_useful =
          epsilon_target /
          (Rat(4) * (Rat(1) + E0) * (Rat(1) + dt) * E0);
      stop_below = delta_useful * delta_useful;
    }
  }
  out.defect = defect_bounds(phi, ivp, opts.oracle_budget, stop_below);
  const Rat& delta = out.defect.delta;
  const Rat& e0 = out.defect.e0;
  Rat margin = margin0;
  for (int attempt = 0; attempt <= opts.margin_doublings;
       ++attempt, margin *= Rat(2)) {
    Box B;
    for (const auto& hv : hull) B.dims.push_back(Iv(hv.lo - margin, hv.hi + margin));
    Rat K = engine_lipschitz(jacobian, B);

    // With K*dt beyond ~16 the exponential factor already dwarfs any target
    // (h is floored at epsilon*2^-20, so the final bound would exceed the
    // target by orders of magnitude). Keep inflating; divergence follows.
    if (K * dt > Rat(16)) continue;

    // Select c (and iterate when e0 couples c to h).
    Rat c = Rat(1) + rat_pow2(-10);
    Rat h, rho, M, E_eff;
    bool settled = false;
    for (int round = 0; round < 5 && !settled; ++round) {
      Rat E_cheap = exp_rational_bound(K, dt, rat_pow2(-12));
      M = c * E_cheap * (Rat(1) + rat_pow2(-10));
      E_eff = M / c;
      rho = e0 * E_eff + delta / K * (E_eff - Rat(1));
      h = rat_max(rho, delta + K * rho);
      h = rat_max(h, epsilon_target * rat_pow2(-20));
      if (e0.is_zero()) {
        settled = true;
      } else {
        Rat c_new = Rat(1) + rat_max(Rat(2) * e0 / h, rat_pow2(-10));
        if (c_new <= c) settled = true;
        else c = c_new;
      }
    }
    if (!(rho < margin)) continue;  // enclosure inconsistent: inflate

    Rat bound = h * ((Rat(1) + dt) * M - Rat(1));
    if (!(bound <= epsilon_target)) {
      out.fail_code = "target-infeasible";
      out.fail_message =
          "defect-based constants cannot reach the target at this index "
          "(bound " +
          bound.str() + " > " + epsilon_target.str() + ")";
      return out;
    }
    ExpUpperResult exp = exp_upper(c, K, dt, M, opts.exp_n_budget);
    if (!std::holds_alternative<ExpUpperProof>(exp)) {
      out.fail_code = "exp-budget";
      out.fail_message = "exponential premise search exhausted its budget";
      return out;
    }
    out.ok = true;
    out.enclosure = EnclosureBox{std::move(B), K, margin, rho};
    out.c = c;
    out.h = h;
    out.M = M;
    out.exp_proof = std::get<ExpUpperProof>(std::move(exp));
    out.bound = bound;
    return out;
  }
  out.fail_code = "enclosure-divergence";
  out.fail_message =
      "error pad outgrew every tried enclosure (possible finite-time "
      "blow-up, or the approximant is too crude)";
  return out;
}

inline RuleApp make_error_tree(const CompactIVP& ivp,
                               const AttemptOutcome& at, int k,
                               const Rat& epsilon_target,
                               const EngineOptions& opts) {
  Box domain = phi_domain(ivp);
  size_t t_idx = ivp.dim();
  const ApproximantPoly& phi = at.phi;
  Rat dt = ivp.T - ivp.t0;

  RuleApp dinv;
  dinv.rule = "dInv";
  {
    ObNormBound defect;
    defect.comps = at.defect.defect;
    defect.box = domain;
    defect.bound = at.defect.delta * at.defect.delta;
    defect.witness = at.defect.delta_witness;
    dinv.leaves.push_back(std::move(defect));

    PolyVec jacobian = checker::recompute_jacobian(ivp.f);
    auto kb = prove_bound_with(NormSqEvaluator{&jacobian}, at.enclosure.B,
                               at.enclosure.K * at.enclosure.K,
                               BoundKind::UpperLe, opts.enc_leaf_budget);
    if (kb.status != ProveStatus::Proved)
      throw domain_error("internal: K-bound leaf failed");
    ObNormBound kbound;
    kbound.comps = std::move(jacobian);
    kbound.box = at.enclosure.B;
    kbound.bound = at.enclosure.K * at.enclosure.K;
    kbound.witness = std::move(kb.witness);
    dinv.leaves.push_back(std::move(kbound));

    if (at.defect.e0.is_zero()) {
      ObExact anchor;
      anchor.claim = ObExact::Claim::ZeroPolyVec;
      for (size_t i = 0; i < phi.ivp_dim; ++i)
        anchor.polys.push_back(phi.phi[i].subst_value(t_idx, ivp.t0) -
                               MultiPoly::variable(phi.phi.vars(), i));
      dinv.leaves.push_back(std::move(anchor));
    } else {
      ObNormBound init_leaf;
      init_leaf.comps = *at.defect.init_diff;
      init_leaf.box = domain;
      init_leaf.bound = at.defect.e0 * at.defect.e0;
      init_leaf.witness = *at.defect.e0_witness;
      dinv.leaves.push_back(std::move(init_leaf));
    }
  }

  RuleApp dgi;
  dgi.rule = "DGi";
  {
    const TaylorUpperBound& th = at.exp_proof.theta;
    dgi.rats = {{"K", at.enclosure.K}, {"M", at.M}, {"c", at.c}, {"dt", dt}};
    dgi.ints = {{"n", th.n}};
    dgi.upolys = {{"theta", th.theta}};
    ObExact at0;
    at0.claim = ObExact::Claim::ValueEq;
    at0.upoly = th.theta;
    at0.point = Rat(0);
    at0.value = Rat(1);
    dgi.leaves.push_back(std::move(at0));
    ObExact coeffs;
    coeffs.claim = ObExact::Claim::NonnegCoeffs;
    coeffs.upoly = th.theta;
    dgi.leaves.push_back(std::move(coeffs));
    ObSturm darboux;
    darboux.witness = th.darboux;
    dgi.leaves.push_back(std::move(darboux));
    ObExact maxle;
    maxle.claim = ObExact::Claim::RatLe;
    maxle.lhs = at.exp_proof.cert_max;
    maxle.rhs = at.M;
    dgi.leaves.push_back(std::move(maxle));
  }

  RuleApp dw;
  dw.rule = "dW";
  {
    ObExact fin;
    fin.claim = ObExact::Claim::RatLe;
    fin.lhs = at.bound;
    fin.rhs = epsilon_target;
    dw.leaves.push_back(std::move(fin));
  }

  RuleApp lda;
  lda.rule = "LDA";
  lda.rats = {{"K", at.enclosure.K}, {"M", at.M},
              {"T", ivp.T},          {"bound", at.bound},
              {"c", at.c},           {"delta", at.defect.delta},
              {"e0", at.defect.e0},  {"h", at.h},
              {"t0", ivp.t0},        {"target", epsilon_target}};
  lda.ints = {{"k", k}};
  lda.polyvecs = {{"phi", phi.phi}};
  lda.children = {std::move(dinv), std::move(dgi), std::move(dw)};

  RuleApp enc;
  enc.rule = "Enc";
  for (size_t i = 0; i < phi.ivp_dim; ++i) {
    const Rat& rho = at.enclosure.rho;
    auto up = prove_bound(phi.phi[i], domain, at.enclosure.B[i].hi - rho,
                          BoundKind::UpperLt, opts.enc_leaf_budget);
    auto lo = prove_bound(phi.phi[i], domain, at.enclosure.B[i].lo + rho,
                          BoundKind::LowerGt, opts.enc_leaf_budget);
    if (up.status != ProveStatus::Proved || lo.status != ProveStatus::Proved)
      throw domain_error("internal: enclosure consistency leaf failed");
    ObPolyBound upper;
    upper.upper = true;
    upper.strict = true;
    upper.p = phi.phi[i];
    upper.box = domain;
    upper.bound = at.enclosure.B[i].hi - rho;
    upper.witness = std::move(up.witness);
    enc.leaves.push_back(std::move(upper));
    ObPolyBound lower;
    lower.upper = false;
    lower.strict = true;
    lower.p = phi.phi[i];
    lower.box = domain;
    lower.bound = at.enclosure.B[i].lo + rho;
    lower.witness = std::move(lo.witness);
    enc.leaves.push_back(std::move(lower));
  }

  RuleApp dc;
  dc.rule = "dC";
  dc.boxes = {{"B", at.enclosure.B}};
  dc.rats = {{"rho", at.enclosure.rho}};
  dc.children = {std::move(enc), std::move(lda)};
  return dc;
}

}  // namespace detail

struct SelectedConstants {
  Rat h, c, M;
  int k = 0;
};

// Searches the family index (doubling then bisection to the least feasible k)
// and picks (h, c, M) satisfying the defect conditions, the exponential side
// condition, initial containment, and the target bound.
inline ErrorBoundOutcome prove_error_bound(const CompactIVP& ivp,
                                           const ApproximantFamily& family,
                                           const Rat& epsilon_target,
                                           const EngineOptions& opts = {}) {
  if (epsilon_target.sign() <= 0)
    throw domain_error("prove_error_bound requires epsilon_target > 0");

  auto attempt = [&](int k) {
    return detail::attempt_k(ivp, family.at(k), epsilon_target, opts);
  };

  int success_k = -1;
  std::optional<detail::AttemptOutcome> success;
  std::string last_code = "family-exhausted";
  std::string last_msg = "no feasible approximant index within budget";

  if (family.single) {
    auto out = attempt(family.k_min);
    if (!out.ok) return Infeasible{out.fail_code, out.fail_message};
    success_k = family.k_min;
    success = std::move(out);
  } else {
    int prev_fail = family.k_min - 1;
    const int cap = std::min(family.k_max, opts.max_k);
    for (int k = family.k_min; k <= cap;) {
      auto out = attempt(k);
      if (out.ok) {
        success_k = k;
        success = std::move(out);
        break;
      }
      last_code = out.fail_code;
      last_msg = out.fail_message + " (k = " + std::to_string(k) + ")";
      prev_fail = k;
      int next = k == 0 ? 1 : 2 * k;
      k = (next > cap && k < cap) ? cap : next;  // the cap is the last try
    }
    if (success_k < 0) return Infeasible{last_code, last_msg};
    // bisect down to the least feasible index
    int lo = prev_fail, hi = success_k;
    while (hi - lo > 1) {
      int mid = lo + (hi - lo) / 2;
      auto out = attempt(mid);
      if (out.ok) {
        hi = mid;
        success = std::move(out);
      } else {
        lo = mid;
      }
    }
    success_k = hi;
  }

  ErrorBoundResult res;
  res.epsilon_target = epsilon_target;
  res.k = success_k;
  res.defect = success->defect;
  res.exp_proof = success->exp_proof;
  res.bound = success->bound;
  res.invariant = build_invariant(success->h, success->c,
                                  success->enclosure.K, ivp, success->phi,
                                  success->enclosure);
  return res;
}

// The spec's find_enclosure entry point (single-approximant view).
inline std::variant<EnclosureBox, Infeasible> find_enclosure(
    const CompactIVP& ivp, const ApproximantPoly& phi, const Rat& margin,
    const EngineOptions& opts = {}) {
  EngineOptions o = opts;
  detail::AttemptOutcome out = detail::attempt_k(ivp, phi, Rat(1) * rat_pow2(30), o);
  (void)margin;
  if (!out.ok) return Infeasible{out.fail_code, out.fail_message};
  return out.enclosure;
}

// The spec's select_constants entry point.
inline std::variant<SelectedConstants, Infeasible> select_constants(
    const CompactIVP& ivp, const ApproximantFamily& family,
    const Rat& epsilon_target, const EngineOptions& opts = {}) {
  auto outcome = prove_error_bound(ivp, family, epsilon_target, opts);
  if (const auto* inf = std::get_if<Infeasible>(&outcome)) return *inf;
  const auto& res = std::get<ErrorBoundResult>(outcome);
  return SelectedConstants{res.invariant.h, res.invariant.c,
                           res.exp_proof.M, res.k};
}

// Full pipeline: constants, invariant, exponential premise, certificate.
inline ErrorBoundOutcome prove_error_bound_certified(
    const Problem& prob, const ApproximantFamily& family,
    const Rat& epsilon_target, const EngineOptions& opts = {}) {
  auto outcome = prove_error_bound(prob.ivp, family, epsilon_target, opts);
  if (std::holds_alternative<Infeasible>(outcome)) return outcome;
  auto& res = std::get<ErrorBoundResult>(outcome);

  detail::AttemptOutcome at;
  at.ok = true;
  at.phi = res.invariant.phi;
  at.defect = res.defect;
  at.enclosure = res.invariant.enclosure;
  at.c = res.invariant.c;
  at.h = res.invariant.h;
  at.M = res.exp_proof.M;
  at.exp_proof = res.exp_proof;
  at.bound = res.bound;

  Certificate cert;
  cert.kind = "error-bound";
  cert.problem = prob;
  cert.hash = problem_hash(prob);
  cert.citations = default_citations();
  cert.root = detail::make_error_tree(prob.ivp, at, res.k, epsilon_target,
                                      opts);
  res.certificate = std::move(cert);
  return outcome;
}

}  // namespace civp
