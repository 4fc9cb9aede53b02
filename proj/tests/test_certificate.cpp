#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "civp/civp.hpp"
#include "support/testutil.hpp"

using namespace civp;

namespace {

Certificate make_error_cert() {
  Problem p = parse_problem(
      "var x; ode x' = x; init x = 1; horizon [0, 2];"
      "goal error-bound 1/100;");
  auto outcome = prove_error_bound_certified(p, picard_family(p.ivp),
                                             rat_from_string("1/100"));
  REQUIRE(std::holds_alternative<ErrorBoundResult>(outcome));
  return std::get<ErrorBoundResult>(outcome).certificate;
}

Certificate make_step_cert(long steps = 10) {
  Problem p = parse_problem(
      "var x; ode x' = x^2 + 1; init x = 1; horizon [0, 1];"
      "goal step-exist alpha=1/10 N=" +
      std::to_string(steps) + ";");
  auto out = step_existence(p, rat_from_string("1/10"), steps);
  REQUIRE(std::holds_alternative<StepExistenceResult>(out));
  return std::get<StepExistenceResult>(out).certificate;
}

RuleApp* find_child_mut(RuleApp& rule, const std::string& name) {
  for (auto& c : rule.children)
    if (c.rule == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("emit is deterministic; emit-parse-emit is a fixpoint") {
  Certificate cert = make_error_cert();
  std::string b1 = emit(cert);
  CHECK(b1 == emit(cert));
  Certificate back = parse_certificate(b1);
  CHECK(emit(back) == b1);
  CHECK(check(back).ok);
}

TEST_CASE("checker accepts pipeline output and validates the header") {
  Certificate cert = make_error_cert();
  auto chk = check(cert);
  INFO(chk.node, ": ", chk.reason);
  CHECK(chk.ok);

  Certificate tampered = cert;
  tampered.hash = "0000000000000000";
  auto bad = check(tampered);
  CHECK(!bad.ok);
  CHECK(bad.node == "header");
}

TEST_CASE("tamper detection: tightened leaf bound is rejected") {
  Certificate cert = make_error_cert();
  RuleApp* lda = find_child_mut(cert.root, "LDA");
  REQUIRE(lda != nullptr);
  RuleApp* dinv = find_child_mut(*lda, "dInv");
  REQUIRE(dinv != nullptr);
  // make delta (and the leaf bound) claim a quarter of the true value:
  // the stored witness no longer validates against the smaller bound
  auto* defect = std::get_if<ObNormBound>(&dinv->leaves[0]);
  REQUIRE(defect != nullptr);
  Rat delta = lda->rats.at("delta");
  Rat smaller = delta / Rat(4);
  lda->rats["delta"] = smaller;
  defect->bound = smaller * smaller;
  defect->witness.bound = smaller * smaller;
  auto res = check(cert);
  CHECK(!res.ok);
}

TEST_CASE("tamper detection: perturbed approximant is rejected") {
  Certificate cert = make_error_cert();
  RuleApp* lda = find_child_mut(cert.root, "LDA");
  REQUIRE(lda != nullptr);
  PolyVec phi = lda->polyvecs.at("phi");
  MultiPoly bump = MultiPoly::constant(phi.vars(), rat_pow2(-30));
  phi.comps[0] = phi.comps[0] + bump;
  lda->polyvecs["phi"] = phi;
  auto res = check(cert);
  CHECK(!res.ok);  // defect/anchoring recomputation disagrees
}

TEST_CASE("tamper detection: perturbed theta is rejected") {
  Certificate cert = make_error_cert();
  RuleApp* lda = find_child_mut(cert.root, "LDA");
  RuleApp* dgi = find_child_mut(*lda, "DGi");
  REQUIRE(dgi != nullptr);
  UniPoly theta = dgi->upolys.at("theta");
  std::vector<Rat> cs = theta.coeffs();
  cs[1] -= rat_pow2(-8);
  dgi->upolys["theta"] = UniPoly(cs);
  auto res = check(cert);
  CHECK(!res.ok);
}

TEST_CASE("tamper detection: inconsistent LDA constants are rejected") {
  Certificate cert = make_error_cert();
  RuleApp* lda = find_child_mut(cert.root, "LDA");
  Certificate c2 = cert;
  find_child_mut(c2.root, "LDA")->rats["h"] = lda->rats.at("h") / Rat(1000);
  CHECK(!check(c2).ok);
  Certificate c3 = cert;
  find_child_mut(c3.root, "LDA")->rats["M"] = Rat(1);
  CHECK(!check(c3).ok);
}

TEST_CASE("step certificates: abutment and arithmetic are enforced") {
  Certificate cert = make_step_cert();
  CHECK(check(cert).ok);

  // introduce a gap between consecutive step horizons
  Certificate gap = cert;
  REQUIRE(gap.root.children.size() >= 3);
  gap.root.children[2].rats["t_start"] =
      gap.root.children[2].rats.at("t_start") + rat_pow2(-20);
  auto res = check(gap);
  CHECK(!res.ok);
  CHECK(res.reason.find("abut") != std::string::npos);

  // break dt = R/M
  Certificate dtbad = cert;
  dtbad.root.children[1].rats["dt"] =
      dtbad.root.children[1].rats.at("dt") * Rat(2);
  CHECK(!check(dtbad).ok);

  // shrink a field bound M below the true field norm
  Certificate mbad = cert;
  auto& step = mbad.root.children[0];
  Rat m = step.rats.at("M");
  Rat m_small = m / Rat(8);
  step.rats["M"] = m_small;
  step.rats["dt"] = step.rats.at("R") / m_small;
  // keep duration consistent so the structural sum check passes downstream
  Rat total(0);
  for (auto& ch : mbad.root.children) total += ch.rats.at("dt");
  mbad.root.rats["duration"] = total;
  // fix the end time chain
  Rat cursor(0);
  for (auto& ch : mbad.root.children) {
    ch.rats["t_start"] = cursor;
    cursor += ch.rats.at("dt");
    ch.rats["t_end"] = cursor;
  }
  auto* leaf = std::get_if<ObNormBound>(&step.leaves[0]);
  leaf->bound = m_small * m_small;
  leaf->witness.bound = m_small * m_small;
  auto mres = check(mbad);
  CHECK(!mres.ok);
}

TEST_CASE("unknown rule names are rejected") {
  Certificate cert = make_error_cert();
  cert.root.children[0].rule = "MadeUpRule";
  auto res = check(cert);
  CHECK(!res.ok);
  CHECK(res.reason.find("vocabulary") != std::string::npos);
}

TEST_CASE("export_external renders the problem and annotations") {
  Certificate cert = make_error_cert();
  std::string kyx = export_external(cert);
  CHECK(kyx.find("x' = x") != std::string::npos);
  CHECK(kyx.find("[{") != std::string::npos);
  CHECK(kyx.find("eps(g,t)") != std::string::npos);
  CHECK(kyx.find("theta_n") != std::string::npos);
  CHECK(kyx.find("Problem") != std::string::npos);

  Certificate step = make_step_cert();
  CHECK_THROWS_AS(export_external(step), domain_error);
}

TEST_CASE("certificates carry the trusted-core citations") {
  Certificate cert = make_error_cert();
  REQUIRE(!cert.citations.empty());
  bool gronwall = false, dinv_complete = false;
  for (const auto& c : cert.citations) {
    gronwall = gronwall || c.find("Gronwall") != std::string::npos;
    dinv_complete =
        dinv_complete || c.find("differential invariants") != std::string::npos;
  }
  CHECK(gronwall);
  CHECK(dinv_complete);
}
