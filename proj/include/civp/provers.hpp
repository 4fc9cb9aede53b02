#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "civp/invariant_engine.hpp"

namespace civp {

struct ProverOptions {
  EngineOptions engine;
  std::vector<int> n_schedule = {3, 4, 5, 7, 9, 11};  // error targets 2^-n
  int cover_depth_base = 6;     // domain splits at the first n, +1 per step
  long region_budget = 4000;    // oracle nodes per membership call
  int time_grid_depth = 6;      // liveness witness grid refinement
  int r_doublings = 16;         // existence R cap: R0 * 2^16
  unsigned dt_round_bits = 64;  // step-exist dyadic rounding
  long step_m_floor_bits = 16;  // step-exist M floor 2^-16
};

using ProveOutcome = std::variant<Certificate, Infeasible>;

struct SafetyGoalSpec {
  CompactIVP ivp;
  OpenRegion region;  // bounded (declared box present)
};

struct LivenessGoalSpec {
  CompactIVP ivp;
  OpenRegion region;
};

struct StepSchedule {
  Rat alpha;
  long steps = 0;
  struct Step {
    Rat R, M, dt;
  };
  std::vector<Step> per_step;
  Rat duration;
};

struct StepExistenceResult {
  Rat duration;
  StepSchedule schedule;
  Certificate certificate;
};

namespace detail {

inline std::optional<size_t> excluded_by_constraint(
    const std::vector<Constraint>& constraints, const Box& x0part) {
  for (size_t j = 0; j < constraints.size(); ++j) {
    const Constraint& c = constraints[j];
    Iv enc = interval_eval(c.p, x0part);
    bool excluded = (c.rel == ConstraintRel::Ge0 && enc.hi.sign() < 0) ||
                    (c.rel == ConstraintRel::Le0 && enc.lo.sign() > 0) ||
                    (c.rel == ConstraintRel::Eq0 &&
                     (enc.hi.sign() < 0 || enc.lo.sign() > 0));
    if (excluded) return j;
  }
  return std::nullopt;
}

inline Box image_enclosure(const PolyVec& phi, const Box& domain) {
  Box img;
  for (const auto& comp : phi.comps)
    img.dims.push_back(interval_eval(comp, domain));
  return img;
}

// Safety coverage: domain ranges over (x0..., t).
inline std::optional<CoverageNode> build_cover_all_t(
    const ObRegionContainment& payload, const Box& domain, int depth,
    const ProverOptions& opts) {
  Box x0part = domain;
  x0part.dims.pop_back();
  if (auto j = excluded_by_constraint(payload.skip_constraints, x0part)) {
    CoverageNode n;
    n.kind = CoverageNode::Kind::Skip;
    n.skip_constraint = *j;
    return n;
  }
  Box img = image_enclosure(payload.phi, domain);
  long budget = opts.region_budget;
  auto proof = region_membership(img, payload.pad, payload.region, budget);
  if (proof) {
    CoverageNode n;
    n.kind = CoverageNode::Kind::Contained;
    n.image = std::move(img);
    n.region_proof = std::move(*proof);
    return n;
  }
  if (depth <= 0) return std::nullopt;
  CoverageNode n;
  n.kind = CoverageNode::Kind::Split;
  n.axis = domain.widest_axis();
  if (domain[n.axis].width().is_zero()) return std::nullopt;
  n.mid = domain[n.axis].mid();
  auto [lb, rb] = domain.split(n.axis);
  auto left = build_cover_all_t(payload, lb, depth - 1, opts);
  if (!left) return std::nullopt;
  auto right = build_cover_all_t(payload, rb, depth - 1, opts);
  if (!right) return std::nullopt;
  n.kids.push_back(std::move(*left));
  n.kids.push_back(std::move(*right));
  return n;
}

// Liveness coverage: domain ranges over x0; each covered leaf carries one
// rational witness time from the refining grid of [t0, T].
inline std::optional<CoverageNode> build_cover_witness_t(
    const ObRegionContainment& payload, const Box& domain, int depth,
    const ProverOptions& opts) {
  if (auto j = excluded_by_constraint(payload.skip_constraints, domain)) {
    CoverageNode n;
    n.kind = CoverageNode::Kind::Skip;
    n.skip_constraint = *j;
    return n;
  }
  Rat span = payload.T - payload.t0;
  for (int level = 0; level <= opts.time_grid_depth; ++level) {
    long cells = 1L << level;
    for (long i = 0; i <= cells; ++i) {
      if (level > 0 && i % 2 == 0) continue;  // new points only
      Rat tw = payload.t0 + span * Rat(i) / Rat(cells);
      Box eval_domain = domain.product(Iv(tw));
      Box img = image_enclosure(payload.phi, eval_domain);
      long budget = opts.region_budget;
      auto proof =
          region_membership(img, payload.pad, payload.region, budget);
      if (proof) {
        CoverageNode n;
        n.kind = CoverageNode::Kind::Contained;
        n.image = std::move(img);
        n.t_witness = tw;
        n.region_proof = std::move(*proof);
        return n;
      }
    }
  }
  if (depth <= 0) return std::nullopt;
  CoverageNode n;
  n.kind = CoverageNode::Kind::Split;
  n.axis = domain.widest_axis();
  if (domain[n.axis].width().is_zero()) return std::nullopt;
  n.mid = domain[n.axis].mid();
  auto [lb, rb] = domain.split(n.axis);
  auto left = build_cover_witness_t(payload, lb, depth - 1, opts);
  if (!left) return std::nullopt;
  auto right = build_cover_witness_t(payload, rb, depth - 1, opts);
  if (!right) return std::nullopt;
  n.kids.push_back(std::move(*left));
  n.kids.push_back(std::move(*right));
  return n;
}

inline ApproximantFamily problem_family(const Problem& prob) {
  if (prob.user_phi)
    return fixed_family(
        make_approximant(*prob.user_phi, prob.ivp.dim(), prob.ivp.t0));
  return picard_family(prob.ivp);
}

inline bool error_infeasibility_is_final(const Infeasible& inf) {
  // Smaller targets only get harder; these reasons will not improve.
  return inf.code == "enclosure-divergence" || inf.code == "exp-budget" ||
         inf.code == "target-infeasible" || inf.code == "family-exhausted";
}

}  // namespace detail

// Existence prover: error pipeline inside a proven enclosure, then the ball
// safety ||x|| < R discharged by duality (StepDual->).
inline ProveOutcome prove_existence(const Problem& prob,
                                    const ProverOptions& opts = {}) {
  auto fam = detail::problem_family(prob);
  auto outcome =
      prove_error_bound_certified(prob, fam, Rat(1), opts.engine);
  if (const auto* inf = std::get_if<Infeasible>(&outcome)) return *inf;
  auto& err = std::get<ErrorBoundResult>(outcome);

  Box domain = prob.ivp.init.bounding_box.product(Iv(prob.ivp.t0, prob.ivp.T));
  const PolyVec& phiv = err.invariant.phi.phi;
  Rat U = norm_sq_interval(phiv, domain).hi;
  Rat S = rat_sqrt_upper(rat_max(U, Rat(0)), 40);
  auto sw = prove_bound_with(NormSqEvaluator{&phiv}, domain, S * S,
                             BoundKind::UpperLe, opts.engine.enc_leaf_budget);
  if (sw.status != ProveStatus::Proved)
    return Infeasible{"budget-exhausted", "phi-norm bound failed"};

  Rat R = Rat(2) * rat_max(prob.ivp.init.bounding_box.sup_norm(),
                           Rat(mpz_class(1), mpz_class(2)));
  bool found = false;
  for (int d = 0; d <= opts.r_doublings; ++d, R *= Rat(2)) {
    if (S + err.bound < R) {
      found = true;
      break;
    }
  }
  if (!found)
    return Infeasible{"budget-exhausted",
                      "flow tube exceeded every tried ball radius"};

  RuleApp v;
  v.rule = "V";
  ObNormBound nb;
  nb.comps = phiv;
  nb.box = domain;
  nb.bound = S * S;
  nb.witness = std::move(sw.witness);
  v.leaves.push_back(std::move(nb));

  RuleApp dw;
  dw.rule = "dW";
  ObExact lt;
  lt.claim = ObExact::Claim::RatLt;
  lt.lhs = S + err.bound;
  lt.rhs = R;
  dw.leaves.push_back(std::move(lt));

  Certificate cert;
  cert.kind = "exists-until";
  cert.problem = prob;
  cert.hash = problem_hash(prob);
  cert.citations = default_citations();
  cert.root.rule = "StepDual->";
  cert.root.rats = {{"R", R}, {"S", S}};
  cert.root.children.push_back(err.certificate.root);
  cert.root.children.push_back(std::move(v));
  cert.root.children.push_back(std::move(dw));
  return cert;
}

inline ProveOutcome prove_bounded_safety(const Problem& prob,
                                         const ProverOptions& opts = {}) {
  const auto* goal = std::get_if<GoalSafety>(&prob.goal);
  if (!goal) throw domain_error("prove_bounded_safety needs a safety goal");
  auto fam = detail::problem_family(prob);
  Infeasible last{"budget-exhausted",
                  "containment not established within the n-schedule"};
  for (size_t step = 0; step < opts.n_schedule.size(); ++step) {
    int n = opts.n_schedule[step];
    auto outcome = prove_error_bound_certified(prob, fam, rat_pow2(-n),
                                               opts.engine);
    if (const auto* inf = std::get_if<Infeasible>(&outcome)) {
      if (detail::error_infeasibility_is_final(*inf)) return *inf;
      last = *inf;
      continue;
    }
    auto& err = std::get<ErrorBoundResult>(outcome);

    ObRegionContainment payload;
    payload.phi = err.invariant.phi.phi;
    payload.x0_box = prob.ivp.init.bounding_box;
    payload.t0 = prob.ivp.t0;
    payload.T = prob.ivp.T;
    payload.pad = err.bound;
    payload.region = goal->region;
    payload.skip_constraints = prob.ivp.init.constraints;
    payload.witness_time_mode = false;

    Box domain =
        prob.ivp.init.bounding_box.product(Iv(prob.ivp.t0, prob.ivp.T));
    int depth = opts.cover_depth_base + static_cast<int>(step);
    auto cover = detail::build_cover_all_t(payload, domain, depth, opts);
    if (!cover) continue;
    payload.cover = std::move(*cover);

    RuleApp dw;
    dw.rule = "dW";
    dw.leaves.push_back(std::move(payload));
    RuleApp v;
    v.rule = "V";
    v.children.push_back(std::move(dw));

    Certificate cert;
    cert.kind = "safety";
    cert.problem = prob;
    cert.hash = problem_hash(prob);
    cert.citations = default_citations();
    cert.root.rule = "K";
    cert.root.rats = {{"pad", err.bound}};
    cert.root.ints = {{"n", n}};
    cert.root.children.push_back(err.certificate.root);
    cert.root.children.push_back(std::move(v));
    return cert;
  }
  return last;
}

inline ProveOutcome prove_liveness(const Problem& prob,
                                   const ProverOptions& opts = {}) {
  const auto* goal = std::get_if<GoalLiveness>(&prob.goal);
  if (!goal) throw domain_error("prove_liveness needs a liveness goal");
  // The flow must exist on the full horizon before ``exists t'' makes sense.
  auto existence = prove_existence(prob, opts);
  if (const auto* inf = std::get_if<Infeasible>(&existence)) {
    Infeasible out = *inf;
    out.message = "existence precondition failed: " + out.message;
    return out;
  }
  const Certificate& exist_cert = std::get<Certificate>(existence);

  auto fam = detail::problem_family(prob);
  Infeasible last{"budget-exhausted",
                  "no witness times found within the n-schedule"};
  for (size_t step = 0; step < opts.n_schedule.size(); ++step) {
    int n = opts.n_schedule[step];
    auto outcome = prove_error_bound_certified(prob, fam, rat_pow2(-n),
                                               opts.engine);
    if (const auto* inf = std::get_if<Infeasible>(&outcome)) {
      if (detail::error_infeasibility_is_final(*inf)) return *inf;
      last = *inf;
      continue;
    }
    auto& err = std::get<ErrorBoundResult>(outcome);

    ObRegionContainment payload;
    payload.phi = err.invariant.phi.phi;
    payload.x0_box = prob.ivp.init.bounding_box;
    payload.t0 = prob.ivp.t0;
    payload.T = prob.ivp.T;
    payload.pad = err.bound;
    payload.region = goal->region;
    payload.skip_constraints = prob.ivp.init.constraints;
    payload.witness_time_mode = true;

    int depth = opts.cover_depth_base + static_cast<int>(step);
    auto cover = detail::build_cover_witness_t(
        payload, prob.ivp.init.bounding_box, depth, opts);
    if (!cover) continue;
    payload.cover = std::move(*cover);

    RuleApp dw;
    dw.rule = "dW";
    dw.leaves.push_back(std::move(payload));
    RuleApp kd;
    kd.rule = "K<>";
    kd.children.push_back(std::move(dw));
    RuleApp bdg;
    bdg.rule = "BDG<>";
    bdg.children.push_back(err.certificate.root);

    Certificate cert;
    cert.kind = "liveness";
    cert.problem = prob;
    cert.hash = problem_hash(prob);
    cert.citations = default_citations();
    cert.root.rule = "<&>";
    cert.root.rats = {{"pad", err.bound}};
    cert.root.ints = {{"n", n}};
    cert.root.children.push_back(exist_cert.root);
    cert.root.children.push_back(std::move(bdg));
    cert.root.children.push_back(std::move(kd));
    return cert;
  }
  return last;
}

// Step-chained existence: per step, the box inflates by R, the field norm is
// bounded on the inflated box, and the solution survives R/M more time.
inline std::variant<StepExistenceResult, Infeasible> step_existence(
    const Problem& prob, const Rat& alpha, long steps,
    const ProverOptions& opts = {}) {
  if (alpha.sign() <= 0 || steps < 1)
    throw domain_error("step_existence requires alpha > 0 and N >= 1");
  const CompactIVP& ivp = prob.ivp;
  Rat scale = ivp.init.bounding_box.sup_norm();
  if (scale.is_zero())
    return Infeasible{"target-infeasible",
                      "auto step radius needs a nonzero initial box scale"};
  Rat R = alpha * scale;
  Rat m_floor = rat_pow2(static_cast<int>(-opts.step_m_floor_bits));

  Certificate cert;
  cert.kind = "step-exist";
  cert.problem = prob;
  cert.hash = problem_hash(prob);
  cert.citations = default_citations();
  cert.root.rule = "StepExt";

  StepSchedule schedule;
  schedule.alpha = alpha;
  schedule.steps = steps;
  schedule.duration = Rat(0);

  Box box = ivp.init.bounding_box;
  Rat t_cursor = ivp.t0;
  for (long i = 0; i < steps; ++i) {
    box = box.inflated(R);
    Iv enc = norm_sq_interval(ivp.f, box);
    Rat M_raw = rat_max(rat_sqrt_upper(rat_max(enc.hi, Rat(0)), 60), m_floor);
    Rat dt = dyadic_floor(R / M_raw, opts.dt_round_bits);
    if (dt.sign() <= 0) dt = R / M_raw;
    Rat M = R / dt;  // M >= M_raw, and dt * M == R exactly

    RuleApp step;
    step.rule = "StepEx";
    step.rats = {{"M", M},
                 {"R", R},
                 {"dt", dt},
                 {"t_end", t_cursor + dt},
                 {"t_start", t_cursor}};
    ObNormBound leaf;
    leaf.comps = ivp.f;
    leaf.box = box;
    leaf.bound = M * M;
    leaf.witness =
        SubdivisionWitness{box, BoundKind::UpperLe, M * M,
                           SubdivNode::leaf(enc)};
    step.leaves.push_back(std::move(leaf));
    cert.root.children.push_back(std::move(step));

    schedule.per_step.push_back({R, M, dt});
    schedule.duration += dt;
    t_cursor += dt;
  }
  cert.root.rats = {{"R_step", R},
                    {"alpha", alpha},
                    {"duration", schedule.duration}};
  cert.root.ints = {{"N", steps}};

  StepExistenceResult res;
  res.duration = schedule.duration;
  res.schedule = std::move(schedule);
  res.certificate = std::move(cert);
  return res;
}

}  // namespace civp
