#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "civp/approximant.hpp"
#include "civp/exp_bounds.hpp"
#include "civp/oracle.hpp"
#include "civp/problem.hpp"
#include "civp/sturm.hpp"

namespace civp {

using json = nlohmann::json;

// ---- obligation payloads --------------------------------------------------

// Bound obligation: p <=/< bound (upper) or p >=/> bound (lower) on box,
// backed by a subdivision witness.
struct ObPolyBound {
  bool upper = true;
  bool strict = false;
  MultiPoly p;
  Box box;
  Rat bound;
  SubdivisionWitness witness;

  BoundKind kind() const {
    if (upper) return strict ? BoundKind::UpperLt : BoundKind::UpperLe;
    return strict ? BoundKind::LowerGt : BoundKind::LowerGe;
  }
};

// Norm bound obligation: sum over components of (range of comps_i)^2 is at
// most `bound` on the box (an upper bound on sup ||comps||^2 that never
// expands the square symbolically).
struct ObNormBound {
  PolyVec comps;
  Box box;
  Rat bound;
  SubdivisionWitness witness;  // kind UpperLe with this bound
};

struct ObSturm {
  SturmWitness witness;  // claims witness.polynomial >= 0 on [a, b]
};

// Closed-form claims the checker re-derives exactly (no search).
struct ObExact {
  enum class Claim { ZeroPolyVec, NonnegCoeffs, ValueEq, RatLe, RatLt };
  Claim claim = Claim::RatLe;
  std::vector<MultiPoly> polys;  // ZeroPolyVec
  UniPoly upoly;                 // NonnegCoeffs, ValueEq
  Rat point, value;              // ValueEq: upoly(point) == value
  Rat lhs, rhs;                  // RatLe / RatLt
};

// Coverage tree over the domain (init box, optionally x time) proving that
// the pad-inflated image of phi lies in an open region. Skip nodes discard
// sub-boxes certifiably outside the init constraints.
struct CoverageNode {
  enum class Kind { Split, Skip, Contained };
  Kind kind = Kind::Contained;
  size_t axis = 0;  // Split
  Rat mid;
  std::vector<CoverageNode> kids;  // Split: exactly 2
  size_t skip_constraint = 0;      // Skip: index into the init constraints
  Box image;                       // Contained: enclosure of phi here
  std::optional<Rat> t_witness;    // Contained, witness-time mode
  RegionProofNode region_proof;    // Contained
};

struct ObRegionContainment {
  PolyVec phi;    // over (x0..., t)
  Box x0_box;     // init bounding box
  Rat t0, T;
  Rat pad;
  OpenRegion region;                       // over state variables
  std::vector<Constraint> skip_constraints;  // init semialgebraic part
  bool witness_time_mode = false;          // liveness: leaves carry times
  CoverageNode cover;
};

using Obligation = std::variant<ObPolyBound, ObNormBound, ObSturm, ObExact,
                                ObRegionContainment>;

inline const char* obligation_kind_name(const Obligation& ob) {
  if (const auto* b = std::get_if<ObPolyBound>(&ob))
    return b->upper ? "poly_upper" : "poly_lower";
  if (std::holds_alternative<ObNormBound>(ob)) return "poly_upper";
  if (std::holds_alternative<ObSturm>(ob)) return "sturm_nonneg";
  if (std::holds_alternative<ObExact>(ob)) return "exact_identity";
  return "region_containment";
}

// ---- rule applications ------------------------------------------------

inline const std::vector<std::string>& rule_vocabulary() {
  static const std::vector<std::string> v = {
      "dInv",     "dC",     "dW",     "DGi",    "DG",      "Enc",
      "K",        "V",      "LDA",    "StepDual->", "StepDual<-", "StepEx",
      "StepExt",  "IVT",    "BDG<>",  "DR<>",   "K<>",     "<&>"};
  return v;
}

struct RuleApp {
  std::string rule;
  std::map<std::string, Rat> rats;
  std::map<std::string, long> ints;
  std::map<std::string, Box> boxes;
  std::map<std::string, PolyVec> polyvecs;
  std::map<std::string, UniPoly> upolys;
  std::vector<RuleApp> children;
  std::vector<Obligation> leaves;

  const Rat& rat(const std::string& k) const {
    auto it = rats.find(k);
    if (it == rats.end()) throw domain_error("missing rat binding " + k);
    return it->second;
  }
  long intval(const std::string& k) const {
    auto it = ints.find(k);
    if (it == ints.end()) throw domain_error("missing int binding " + k);
    return it->second;
  }
};

struct Certificate {
  int version = 1;
  std::string kind;  // error-bound | safety | liveness | exists-until | step-exist
  Problem problem;
  std::string hash;  // of the canonical problem text
  std::vector<std::string> citations;
  RuleApp root;
};

inline std::vector<std::string> default_citations() {
  return {
      "continuous dependence on initial data via Gronwall's inequality; the "
      "recorded arithmetic side conditions entail invariance of the error "
      "envelope",
      "effective completeness of differential invariants over first-order "
      "real arithmetic (trusted meta-theorem; side conditions checked here)",
      "Picard-Lindelof step existence: duration R/M on a ball where the "
      "field norm is at most M",
      "decidability of real-closed fields, realized as box subdivision and "
      "Sturm witnesses"};
}

// ---- JSON encoding ------------------------------------------------------

namespace certjson {

inline json enc(const Rat& r) { return r.str(); }
inline Rat dec_rat(const json& j) { return rat_from_string(j.get<std::string>()); }

inline json enc(const Iv& v) { return json::array({enc(v.lo), enc(v.hi)}); }
inline Iv dec_iv(const json& j) { return Iv(dec_rat(j.at(0)), dec_rat(j.at(1))); }

inline json enc(const Box& b) {
  json a = json::array();
  for (const auto& d : b.dims) a.push_back(enc(d));
  return a;
}
inline Box dec_box(const json& j) {
  Box b;
  for (const auto& d : j) b.dims.push_back(dec_iv(d));
  return b;
}

inline json enc(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) {
    json ex = json::array();
    for (auto x : e) ex.push_back(x);
    terms.push_back(json::array({ex, enc(c)}));
  }
  return json{{"vars", p.vars()}, {"terms", terms}};
}
inline MultiPoly dec_poly(const json& j) {
  MultiPoly p(j.at("vars").get<std::vector<std::string>>());
  for (const auto& t : j.at("terms")) {
    Expo e;
    for (const auto& x : t.at(0)) e.push_back(x.get<uint32_t>());
    p.add_term(e, dec_rat(t.at(1)));
  }
  return p;
}

inline json enc(const PolyVec& v) {
  json a = json::array();
  for (const auto& p : v.comps) a.push_back(enc(p));
  return a;
}
inline PolyVec dec_polyvec(const json& j) {
  std::vector<MultiPoly> comps;
  for (const auto& p : j) comps.push_back(dec_poly(p));
  return PolyVec(std::move(comps));
}

inline json enc(const UniPoly& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(enc(c));
  return a;
}
inline UniPoly dec_upoly(const json& j) {
  std::vector<Rat> c;
  for (const auto& x : j) c.push_back(dec_rat(x));
  return UniPoly(std::move(c));
}

inline json enc_subdiv_node(const SubdivNode& n) {
  if (n.is_split) {
    return json{{"axis", n.axis},
                {"kids", json::array({enc_subdiv_node(*n.left),
                                      enc_subdiv_node(*n.right)})},
                {"mid", enc(n.mid)}};
  }
  return json{{"enc", enc(n.enclosure)}};
}
inline std::shared_ptr<SubdivNode> dec_subdiv_node(const json& j) {
  auto n = std::make_shared<SubdivNode>();
  if (j.contains("axis")) {
    n->is_split = true;
    n->axis = j.at("axis").get<size_t>();
    n->mid = dec_rat(j.at("mid"));
    n->left = dec_subdiv_node(j.at("kids").at(0));
    n->right = dec_subdiv_node(j.at("kids").at(1));
  } else {
    n->enclosure = dec_iv(j.at("enc"));
  }
  return n;
}

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::UpperLe: return "upper_le";
    case BoundKind::UpperLt: return "upper_lt";
    case BoundKind::LowerGe: return "lower_ge";
    case BoundKind::LowerGt: return "lower_gt";
  }
  return "?";
}
inline BoundKind dec_bound_kind(const std::string& s) {
  if (s == "upper_le") return BoundKind::UpperLe;
  if (s == "upper_lt") return BoundKind::UpperLt;
  if (s == "lower_ge") return BoundKind::LowerGe;
  if (s == "lower_gt") return BoundKind::LowerGt;
  throw parse_error("bad bound kind " + s);
}

inline json enc(const SubdivisionWitness& w) {
  return json{{"bound", enc(w.bound)},
              {"kind", bound_kind_name(w.kind)},
              {"root_box", enc(w.root_box)},
              {"tree", enc_subdiv_node(*w.tree)}};
}
inline SubdivisionWitness dec_subdiv(const json& j) {
  SubdivisionWitness w;
  w.bound = dec_rat(j.at("bound"));
  w.kind = dec_bound_kind(j.at("kind").get<std::string>());
  w.root_box = dec_box(j.at("root_box"));
  w.tree = dec_subdiv_node(j.at("tree"));
  return w;
}

inline json enc(const SturmWitness& w) {
  json chain = json::array();
  for (const auto& p : w.chain) chain.push_back(enc(p));
  return json{{"a", enc(w.a)},
              {"b", enc(w.b)},
              {"chain", chain},
              {"nonneg", w.nonneg},
              {"polynomial", enc(w.polynomial)},
              {"root_count", w.root_count},
              {"signs_at_a", w.signs_at_a},
              {"signs_at_b", w.signs_at_b},
              {"value_at_a", enc(w.value_at_a)},
              {"value_at_b", enc(w.value_at_b)}};
}
inline SturmWitness dec_sturm(const json& j) {
  SturmWitness w;
  w.a = dec_rat(j.at("a"));
  w.b = dec_rat(j.at("b"));
  for (const auto& p : j.at("chain")) w.chain.push_back(dec_upoly(p));
  w.nonneg = j.at("nonneg").get<bool>();
  w.polynomial = dec_upoly(j.at("polynomial"));
  w.root_count = j.at("root_count").get<int>();
  w.signs_at_a = j.at("signs_at_a").get<std::vector<int>>();
  w.signs_at_b = j.at("signs_at_b").get<std::vector<int>>();
  w.value_at_a = dec_rat(j.at("value_at_a"));
  w.value_at_b = dec_rat(j.at("value_at_b"));
  return w;
}

inline json enc_region(const RegionNode& n) {
  switch (n.kind) {
    case RegionNode::Kind::Atom:
      return json{{"atom", json{{"greater", n.greater}, {"p", enc(n.p)}}}};
    case RegionNode::Kind::And: {
      json a = json::array();
      for (const auto& k : n.kids) a.push_back(enc_region(k));
      return json{{"and", a}};
    }
    case RegionNode::Kind::Or: {
      json a = json::array();
      for (const auto& k : n.kids) a.push_back(enc_region(k));
      return json{{"or", a}};
    }
  }
  return {};
}
inline RegionNode dec_region(const json& j) {
  if (j.contains("atom"))
    return RegionNode::atom(dec_poly(j.at("atom").at("p")),
                            j.at("atom").at("greater").get<bool>());
  std::vector<RegionNode> kids;
  const bool is_and = j.contains("and");
  for (const auto& k : j.at(is_and ? "and" : "or"))
    kids.push_back(dec_region(k));
  return is_and ? RegionNode::conj(std::move(kids))
                : RegionNode::disj(std::move(kids));
}

inline json enc_region_proof(const RegionProofNode& n) {
  switch (n.kind) {
    case RegionProofNode::Kind::Atom:
      return json{{"atom", enc(n.atom)}};
    case RegionProofNode::Kind::And: {
      json a = json::array();
      for (const auto& k : n.kids) a.push_back(enc_region_proof(k));
      return json{{"and", a}};
    }
    case RegionProofNode::Kind::OrChoice:
      return json{{"choice", n.choice},
                  {"proof", enc_region_proof(n.kids.at(0))}};
    case RegionProofNode::Kind::OrSplit:
      return json{{"axis", n.axis},
                  {"kids", json::array({enc_region_proof(n.kids.at(0)),
                                        enc_region_proof(n.kids.at(1))})},
                  {"mid", enc(n.mid)}};
  }
  return {};
}
inline RegionProofNode dec_region_proof(const json& j) {
  RegionProofNode n;
  if (j.contains("atom")) {
    n.kind = RegionProofNode::Kind::Atom;
    n.atom = dec_subdiv(j.at("atom"));
  } else if (j.contains("and")) {
    n.kind = RegionProofNode::Kind::And;
    for (const auto& k : j.at("and")) n.kids.push_back(dec_region_proof(k));
  } else if (j.contains("choice")) {
    n.kind = RegionProofNode::Kind::OrChoice;
    n.choice = j.at("choice").get<size_t>();
    n.kids.push_back(dec_region_proof(j.at("proof")));
  } else {
    n.kind = RegionProofNode::Kind::OrSplit;
    n.axis = j.at("axis").get<size_t>();
    n.mid = dec_rat(j.at("mid"));
    n.kids.push_back(dec_region_proof(j.at("kids").at(0)));
    n.kids.push_back(dec_region_proof(j.at("kids").at(1)));
  }
  return n;
}

inline json enc_coverage(const CoverageNode& n) {
  switch (n.kind) {
    case CoverageNode::Kind::Split:
      return json{{"axis", n.axis},
                  {"kids", json::array({enc_coverage(n.kids.at(0)),
                                        enc_coverage(n.kids.at(1))})},
                  {"mid", enc(n.mid)}};
    case CoverageNode::Kind::Skip:
      return json{{"skip", n.skip_constraint}};
    case CoverageNode::Kind::Contained: {
      json j{{"image", enc(n.image)},
             {"region_proof", enc_region_proof(n.region_proof)}};
      if (n.t_witness) j["t_witness"] = enc(*n.t_witness);
      return j;
    }
  }
  return {};
}
inline CoverageNode dec_coverage(const json& j) {
  CoverageNode n;
  if (j.contains("axis")) {
    n.kind = CoverageNode::Kind::Split;
    n.axis = j.at("axis").get<size_t>();
    n.mid = dec_rat(j.at("mid"));
    n.kids.push_back(dec_coverage(j.at("kids").at(0)));
    n.kids.push_back(dec_coverage(j.at("kids").at(1)));
  } else if (j.contains("skip")) {
    n.kind = CoverageNode::Kind::Skip;
    n.skip_constraint = j.at("skip").get<size_t>();
  } else {
    n.kind = CoverageNode::Kind::Contained;
    n.image = dec_box(j.at("image"));
    if (j.contains("t_witness")) n.t_witness = dec_rat(j.at("t_witness"));
    n.region_proof = dec_region_proof(j.at("region_proof"));
  }
  return n;
}

inline const char* rel_name(ConstraintRel r) {
  switch (r) {
    case ConstraintRel::Ge0: return "ge0";
    case ConstraintRel::Le0: return "le0";
    case ConstraintRel::Eq0: return "eq0";
  }
  return "?";
}
inline ConstraintRel dec_rel(const std::string& s) {
  if (s == "ge0") return ConstraintRel::Ge0;
  if (s == "le0") return ConstraintRel::Le0;
  if (s == "eq0") return ConstraintRel::Eq0;
  throw parse_error("bad constraint relation " + s);
}

inline json enc_obligation(const Obligation& ob) {
  json j;
  j["kind"] = obligation_kind_name(ob);
  if (const auto* b = std::get_if<ObPolyBound>(&ob)) {
    j["bound"] = enc(b->bound);
    j["box"] = enc(b->box);
    j["p"] = enc(b->p);
    j["strict"] = b->strict;
    j["witness"] = enc(b->witness);
  } else if (const auto* nb = std::get_if<ObNormBound>(&ob)) {
    j["bound"] = enc(nb->bound);
    j["box"] = enc(nb->box);
    j["polys"] = enc(nb->comps);  // norm-squared payload: component vector
    j["witness"] = enc(nb->witness);
  } else if (const auto* s = std::get_if<ObSturm>(&ob)) {
    j["witness"] = enc(s->witness);
  } else if (const auto* e = std::get_if<ObExact>(&ob)) {
    switch (e->claim) {
      case ObExact::Claim::ZeroPolyVec: {
        json a = json::array();
        for (const auto& p : e->polys) a.push_back(enc(p));
        j["claim"] = "zero_polyvec";
        j["polys"] = a;
        break;
      }
      case ObExact::Claim::NonnegCoeffs:
        j["claim"] = "nonneg_coeffs";
        j["upoly"] = enc(e->upoly);
        break;
      case ObExact::Claim::ValueEq:
        j["claim"] = "value_eq";
        j["upoly"] = enc(e->upoly);
        j["point"] = enc(e->point);
        j["value"] = enc(e->value);
        break;
      case ObExact::Claim::RatLe:
        j["claim"] = "rat_le";
        j["lhs"] = enc(e->lhs);
        j["rhs"] = enc(e->rhs);
        break;
      case ObExact::Claim::RatLt:
        j["claim"] = "rat_lt";
        j["lhs"] = enc(e->lhs);
        j["rhs"] = enc(e->rhs);
        break;
    }
  } else if (const auto* r = std::get_if<ObRegionContainment>(&ob)) {
    j["T"] = enc(r->T);
    j["cover"] = enc_coverage(r->cover);
    j["pad"] = enc(r->pad);
    j["phi"] = enc(r->phi);
    j["region"] = enc_region(r->region.root);
    json sc = json::array();
    for (const auto& c : r->skip_constraints)
      sc.push_back(json{{"p", enc(c.p)}, {"rel", rel_name(c.rel)}});
    j["skip_constraints"] = sc;
    j["t0"] = enc(r->t0);
    j["witness_time_mode"] = r->witness_time_mode;
    j["x0_box"] = enc(r->x0_box);
  }
  return j;
}

inline Obligation dec_obligation(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "poly_upper" && j.contains("polys")) {
    ObNormBound b;
    b.bound = dec_rat(j.at("bound"));
    b.box = dec_box(j.at("box"));
    b.comps = dec_polyvec(j.at("polys"));
    b.witness = dec_subdiv(j.at("witness"));
    return b;
  }
  if (kind == "poly_upper" || kind == "poly_lower") {
    ObPolyBound b;
    b.upper = kind == "poly_upper";
    b.strict = j.at("strict").get<bool>();
    b.bound = dec_rat(j.at("bound"));
    b.box = dec_box(j.at("box"));
    b.p = dec_poly(j.at("p"));
    b.witness = dec_subdiv(j.at("witness"));
    return b;
  }
  if (kind == "sturm_nonneg") {
    ObSturm s;
    s.witness = dec_sturm(j.at("witness"));
    return s;
  }
  if (kind == "exact_identity") {
    ObExact e;
    std::string claim = j.at("claim").get<std::string>();
    if (claim == "zero_polyvec") {
      e.claim = ObExact::Claim::ZeroPolyVec;
      for (const auto& p : j.at("polys")) e.polys.push_back(dec_poly(p));
    } else if (claim == "nonneg_coeffs") {
      e.claim = ObExact::Claim::NonnegCoeffs;
      e.upoly = dec_upoly(j.at("upoly"));
    } else if (claim == "value_eq") {
      e.claim = ObExact::Claim::ValueEq;
      e.upoly = dec_upoly(j.at("upoly"));
      e.point = dec_rat(j.at("point"));
      e.value = dec_rat(j.at("value"));
    } else if (claim == "rat_le") {
      e.claim = ObExact::Claim::RatLe;
      e.lhs = dec_rat(j.at("lhs"));
      e.rhs = dec_rat(j.at("rhs"));
    } else if (claim == "rat_lt") {
      e.claim = ObExact::Claim::RatLt;
      e.lhs = dec_rat(j.at("lhs"));
      e.rhs = dec_rat(j.at("rhs"));
    } else {
      throw parse_error("bad exact_identity claim " + claim);
    }
    return e;
  }
  if (kind == "region_containment") {
    ObRegionContainment r;
    r.T = dec_rat(j.at("T"));
    r.cover = dec_coverage(j.at("cover"));
    r.pad = dec_rat(j.at("pad"));
    r.phi = dec_polyvec(j.at("phi"));
    r.region.root = dec_region(j.at("region"));
    for (const auto& c : j.at("skip_constraints"))
      r.skip_constraints.push_back(Constraint{
          dec_poly(c.at("p")), dec_rel(c.at("rel").get<std::string>())});
    r.t0 = dec_rat(j.at("t0"));
    r.witness_time_mode = j.at("witness_time_mode").get<bool>();
    r.x0_box = dec_box(j.at("x0_box"));
    return r;
  }
  throw parse_error("bad obligation kind " + kind);
}

inline json enc_rule(const RuleApp& r) {
  json j;
  j["rule"] = r.rule;
  if (!r.rats.empty()) {
    json b;
    for (const auto& [k, v] : r.rats) b[k] = enc(v);
    j["rats"] = b;
  }
  if (!r.ints.empty()) {
    json b;
    for (const auto& [k, v] : r.ints) b[k] = v;
    j["ints"] = b;
  }
  if (!r.boxes.empty()) {
    json b;
    for (const auto& [k, v] : r.boxes) b[k] = enc(v);
    j["boxes"] = b;
  }
  if (!r.polyvecs.empty()) {
    json b;
    for (const auto& [k, v] : r.polyvecs) b[k] = enc(v);
    j["polyvecs"] = b;
  }
  if (!r.upolys.empty()) {
    json b;
    for (const auto& [k, v] : r.upolys) b[k] = enc(v);
    j["upolys"] = b;
  }
  if (!r.children.empty()) {
    json a = json::array();
    for (const auto& c : r.children) a.push_back(enc_rule(c));
    j["children"] = a;
  }
  if (!r.leaves.empty()) {
    json a = json::array();
    for (const auto& l : r.leaves) a.push_back(enc_obligation(l));
    j["leaves"] = a;
  }
  return j;
}

inline RuleApp dec_rule(const json& j) {
  RuleApp r;
  r.rule = j.at("rule").get<std::string>();
  if (j.contains("rats"))
    for (auto it = j.at("rats").begin(); it != j.at("rats").end(); ++it)
      r.rats.emplace(it.key(), dec_rat(it.value()));
  if (j.contains("ints"))
    for (auto it = j.at("ints").begin(); it != j.at("ints").end(); ++it)
      r.ints.emplace(it.key(), it.value().get<long>());
  if (j.contains("boxes"))
    for (auto it = j.at("boxes").begin(); it != j.at("boxes").end(); ++it)
      r.boxes.emplace(it.key(), dec_box(it.value()));
  if (j.contains("polyvecs"))
    for (auto it = j.at("polyvecs").begin(); it != j.at("polyvecs").end(); ++it)
      r.polyvecs.emplace(it.key(), dec_polyvec(it.value()));
  if (j.contains("upolys"))
    for (auto it = j.at("upolys").begin(); it != j.at("upolys").end(); ++it)
      r.upolys.emplace(it.key(), dec_upoly(it.value()));
  if (j.contains("children"))
    for (const auto& c : j.at("children")) r.children.push_back(dec_rule(c));
  if (j.contains("leaves"))
    for (const auto& l : j.at("leaves")) r.leaves.push_back(dec_obligation(l));
  return r;
}

}  // namespace certjson

// Deterministic canonical serialization: sorted keys, explicit rationals,
// canonical term order. Identical certificates yield identical bytes.
inline std::string emit(const Certificate& cert) {
  json j;
  j["format"] = "civp-certificate";
  j["version"] = cert.version;
  j["kind"] = cert.kind;
  j["header"] = json{{"citations", cert.citations},
                     {"goal", goal_kind_name(cert.problem.goal)},
                     {"problem", canonical_problem_text(cert.problem)},
                     {"problem_hash", cert.hash}};
  j["root"] = certjson::enc_rule(cert.root);
  return j.dump(1) + "\n";
}

inline Certificate parse_certificate(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw parse_error(std::string("certificate JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "civp-certificate")
      throw parse_error("not a certificate file");
    Certificate cert;
    cert.version = j.at("version").get<int>();
    cert.kind = j.at("kind").get<std::string>();
    cert.citations =
        j.at("header").at("citations").get<std::vector<std::string>>();
    cert.problem =
        parse_problem(j.at("header").at("problem").get<std::string>());
    cert.hash = j.at("header").at("problem_hash").get<std::string>();
    cert.root = certjson::dec_rule(j.at("root"));
    return cert;
  } catch (const json::exception& e) {
    throw parse_error(std::string("certificate structure: ") + e.what());
  }
}

// ---- the independent checker ---------------------------------------------

struct CheckResult {
  bool ok = true;
  std::string node;    // canonically-first failing node
  std::string reason;

  static CheckResult accept() { return {}; }
  static CheckResult reject(std::string node_, std::string reason_) {
    return {false, std::move(node_), std::move(reason_)};
  }
};

namespace checker {

// Core-only recomputation of the defect components (no search machinery).
inline PolyVec recompute_defect(const PolyVec& phi, const PolyVec& f,
                                size_t t_idx) {
  std::vector<MultiPoly> images(phi.comps.begin(), phi.comps.end());
  std::vector<MultiPoly> comps;
  for (size_t i = 0; i < phi.size(); ++i)
    comps.push_back(phi[i].partial_derivative(t_idx) -
                    f[i].subst_full(images));
  return PolyVec(std::move(comps));
}

// All Jacobian entries of f, flattened row-major: the Frobenius bound is
// the norm-squared bound of this vector.
inline PolyVec recompute_jacobian(const PolyVec& f) {
  std::vector<MultiPoly> comps;
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < f.vars().size(); ++j)
      comps.push_back(f[i].partial_derivative(j));
  return PolyVec(std::move(comps));
}

inline CheckResult check_poly_bound(const ObPolyBound& b,
                                    const std::string& node) {
  if (!(b.witness.root_box == b.box))
    return CheckResult::reject(node, "witness root box differs from payload");
  if (b.witness.kind != b.kind())
    return CheckResult::reject(node, "witness direction mismatch");
  if (!(b.witness.bound == b.bound))
    return CheckResult::reject(node, "witness bound differs from payload");
  if (!subdivision_witness_valid(b.p, b.witness))
    return CheckResult::reject(node, "subdivision witness failed re-evaluation");
  return CheckResult::accept();
}

inline CheckResult check_norm_bound(const ObNormBound& b,
                                    const std::string& node) {
  if (!(b.witness.root_box == b.box))
    return CheckResult::reject(node, "witness root box differs from payload");
  if (b.witness.kind != BoundKind::UpperLe)
    return CheckResult::reject(node, "norm bound must be an upper bound");
  if (!(b.witness.bound == b.bound))
    return CheckResult::reject(node, "witness bound differs from payload");
  if (!subdivision_witness_valid_with(NormSqEvaluator{&b.comps}, b.witness))
    return CheckResult::reject(node, "norm witness failed re-evaluation");
  return CheckResult::accept();
}

inline CheckResult check_exact(const ObExact& e, const std::string& node) {
  switch (e.claim) {
    case ObExact::Claim::ZeroPolyVec:
      for (const auto& p : e.polys)
        if (!p.is_zero())
          return CheckResult::reject(node, "zero_polyvec claim is false");
      return CheckResult::accept();
    case ObExact::Claim::NonnegCoeffs:
      for (const auto& c : e.upoly.coeffs())
        if (c.sign() < 0)
          return CheckResult::reject(node, "nonneg_coeffs claim is false");
      return CheckResult::accept();
    case ObExact::Claim::ValueEq:
      if (!(e.upoly.eval(e.point) == e.value))
        return CheckResult::reject(node, "value_eq claim is false");
      return CheckResult::accept();
    case ObExact::Claim::RatLe:
      if (!(e.lhs <= e.rhs))
        return CheckResult::reject(node, "rat_le claim is false");
      return CheckResult::accept();
    case ObExact::Claim::RatLt:
      if (!(e.lhs < e.rhs))
        return CheckResult::reject(node, "rat_lt claim is false");
      return CheckResult::accept();
  }
  return CheckResult::reject(node, "unknown exact claim");
}

inline CheckResult check_sturm(const ObSturm& s, const std::string& node) {
  if (!s.witness.nonneg)
    return CheckResult::reject(node, "sturm witness does not claim nonneg");
  if (!sturm_witness_valid(s.witness))
    return CheckResult::reject(node, "sturm recomputation disagrees");
  return CheckResult::accept();
}

// Coverage replay for region containment obligations.
inline CheckResult check_coverage(const ObRegionContainment& r,
                                  const CoverageNode& n, const Box& domain,
                                  const std::string& node) {
  switch (n.kind) {
    case CoverageNode::Kind::Split: {
      if (n.kids.size() != 2)
        return CheckResult::reject(node, "split without two children");
      if (n.axis >= domain.dim())
        return CheckResult::reject(node, "split axis out of range");
      const Iv& d = domain[n.axis];
      if (!(d.lo < n.mid && n.mid < d.hi))
        return CheckResult::reject(node, "split midpoint outside axis");
      Box lb = domain, rb = domain;
      lb[n.axis] = Iv(d.lo, n.mid);
      rb[n.axis] = Iv(n.mid, d.hi);
      auto cl = check_coverage(r, n.kids[0], lb, node + "/L");
      if (!cl.ok) return cl;
      return check_coverage(r, n.kids[1], rb, node + "/R");
    }
    case CoverageNode::Kind::Skip: {
      if (n.skip_constraint >= r.skip_constraints.size())
        return CheckResult::reject(node, "skip constraint index out of range");
      const Constraint& c = r.skip_constraints[n.skip_constraint];
      Box x0part = domain;
      if (!r.witness_time_mode) x0part.dims.pop_back();  // drop time axis
      Iv enc = interval_eval(c.p, x0part);
      bool excluded = (c.rel == ConstraintRel::Ge0 && enc.hi.sign() < 0) ||
                      (c.rel == ConstraintRel::Le0 && enc.lo.sign() > 0) ||
                      (c.rel == ConstraintRel::Eq0 &&
                       (enc.hi.sign() < 0 || enc.lo.sign() > 0));
      if (!excluded)
        return CheckResult::reject(node, "skip not justified by constraint");
      return CheckResult::accept();
    }
    case CoverageNode::Kind::Contained: {
      Box eval_domain = domain;
      if (r.witness_time_mode) {
        if (!n.t_witness)
          return CheckResult::reject(node, "missing witness time");
        if (*n.t_witness < r.t0 || r.T < *n.t_witness)
          return CheckResult::reject(node, "witness time outside horizon");
        eval_domain = domain.product(Iv(*n.t_witness));
      }
      if (n.image.dim() != r.phi.size())
        return CheckResult::reject(node, "image dimension mismatch");
      for (size_t i = 0; i < r.phi.size(); ++i) {
        Iv fresh = interval_eval(r.phi[i], eval_domain);
        if (!n.image[i].contains(fresh))
          return CheckResult::reject(node,
                                     "stored image does not enclose phi");
      }
      Box inflated =
          r.pad.is_zero() ? n.image : n.image.inflated(r.pad);
      if (!region_proof_valid(r.region.root, inflated, n.region_proof))
        return CheckResult::reject(node, "region membership proof failed");
      return CheckResult::accept();
    }
  }
  return CheckResult::reject(node, "unknown coverage node");
}

inline CheckResult check_region_containment(const ObRegionContainment& r,
                                            const Problem& prob,
                                            const std::string& node) {
  if (!(r.x0_box == prob.ivp.init.bounding_box))
    return CheckResult::reject(node, "containment domain is not the init box");
  if (!(r.t0 == prob.ivp.t0) || !(r.T == prob.ivp.T))
    return CheckResult::reject(node, "containment horizon mismatch");
  if (r.skip_constraints.size() != prob.ivp.init.constraints.size())
    return CheckResult::reject(node, "skip constraint set mismatch");
  for (size_t i = 0; i < r.skip_constraints.size(); ++i) {
    if (!(r.skip_constraints[i].p == prob.ivp.init.constraints[i].p) ||
        r.skip_constraints[i].rel != prob.ivp.init.constraints[i].rel)
      return CheckResult::reject(node, "skip constraint set mismatch");
  }
  Box domain = r.witness_time_mode
                   ? r.x0_box
                   : r.x0_box.product(Iv(r.t0, r.T));
  return check_coverage(r, r.cover, domain, node + "/cover");
}

inline CheckResult check_leaves(const RuleApp& rule, const Problem& prob,
                                const std::string& node) {
  for (size_t i = 0; i < rule.leaves.size(); ++i) {
    std::string leaf_node = node + "/leaf" + std::to_string(i);
    const Obligation& ob = rule.leaves[i];
    CheckResult res = CheckResult::accept();
    if (const auto* b = std::get_if<ObPolyBound>(&ob))
      res = check_poly_bound(*b, leaf_node);
    else if (const auto* nb = std::get_if<ObNormBound>(&ob))
      res = check_norm_bound(*nb, leaf_node);
    else if (const auto* s = std::get_if<ObSturm>(&ob))
      res = check_sturm(*s, leaf_node);
    else if (const auto* e = std::get_if<ObExact>(&ob))
      res = check_exact(*e, leaf_node);
    else if (const auto* r = std::get_if<ObRegionContainment>(&ob))
      res = check_region_containment(*r, prob, leaf_node);
    if (!res.ok) return res;
  }
  for (size_t i = 0; i < rule.children.size(); ++i) {
    auto res = check_leaves(rule.children[i], prob,
                            node + "/" + rule.children[i].rule);
    if (!res.ok) return res;
  }
  return CheckResult::accept();
}

inline CheckResult check_vocabulary(const RuleApp& rule,
                                    const std::string& node) {
  const auto& vocab = rule_vocabulary();
  if (std::find(vocab.begin(), vocab.end(), rule.rule) == vocab.end())
    return CheckResult::reject(node, "rule name outside vocabulary: " +
                                         rule.rule);
  for (const auto& c : rule.children) {
    auto res = check_vocabulary(c, node + "/" + c.rule);
    if (!res.ok) return res;
  }
  return CheckResult::accept();
}

template <typename T>
const T* find_leaf(const RuleApp& rule, size_t index_among_kind = 0) {
  size_t seen = 0;
  for (const auto& l : rule.leaves) {
    if (const T* v = std::get_if<T>(&l)) {
      if (seen == index_among_kind) return v;
      ++seen;
    }
  }
  return nullptr;
}

inline const RuleApp* find_child(const RuleApp& rule, const std::string& name,
                                 size_t index_among_kind = 0) {
  size_t seen = 0;
  for (const auto& c : rule.children) {
    if (c.rule == name) {
      if (seen == index_among_kind) return &c;
      ++seen;
    }
  }
  return nullptr;
}

// Structural constraints of an error-bound subtree rooted at a dC node.
// Returns the certified error bound through `bound_out` on success.
inline CheckResult check_error_bound_tree(const RuleApp& dc,
                                          const Problem& prob,
                                          const std::string& node,
                                          Rat* bound_out) {
  if (dc.rule != "dC")
    return CheckResult::reject(node, "error-bound root must be dC");
  auto itB = dc.boxes.find("B");
  if (itB == dc.boxes.end())
    return CheckResult::reject(node, "dC missing enclosure box B");
  const Box& B = itB->second;
  const RuleApp* enc = find_child(dc, "Enc");
  const RuleApp* lda = find_child(dc, "LDA");
  if (!enc || !lda)
    return CheckResult::reject(node, "dC must contain Enc and LDA children");

  // LDA bindings and their arithmetic consistency.
  Rat h, c, K, M, delta, e0, t0, T, target;
  try {
    h = lda->rat("h");
    c = lda->rat("c");
    K = lda->rat("K");
    M = lda->rat("M");
    delta = lda->rat("delta");
    e0 = lda->rat("e0");
    t0 = lda->rat("t0");
    T = lda->rat("T");
    target = lda->rat("target");
  } catch (const domain_error& e) {
    return CheckResult::reject(node + "/LDA", e.what());
  }
  auto itphi = lda->polyvecs.find("phi");
  if (itphi == lda->polyvecs.end())
    return CheckResult::reject(node + "/LDA", "missing phi binding");
  const PolyVec& phi = itphi->second;
  if (phi.size() != prob.ivp.dim())
    return CheckResult::reject(node + "/LDA", "phi dimension mismatch");
  if (!(t0 == prob.ivp.t0) || !(T == prob.ivp.T))
    return CheckResult::reject(node + "/LDA", "horizon bindings mismatch");
  if (h.sign() <= 0 || K.sign() <= 0 || !(Rat(1) < c))
    return CheckResult::reject(node + "/LDA", "need h > 0, K > 0, c > 1");
  Rat E = M / c;
  if (!(Rat(1) <= E))
    return CheckResult::reject(node + "/LDA", "M/c must be at least 1");
  Rat rho = e0 * E + delta / K * (E - Rat(1));
  if (!(rho <= h))
    return CheckResult::reject(node + "/LDA", "condition rho <= h fails");
  if (!(delta + K * rho <= h))
    return CheckResult::reject(node + "/LDA",
                               "condition delta + K*rho <= h fails");
  if (!(e0 <= h * (c - Rat(1))))
    return CheckResult::reject(node + "/LDA",
                               "initial containment h(c-1) >= e0 fails");
  Rat bound = h * ((Rat(1) + T - t0) * M - Rat(1));
  if (!(bound <= target))
    return CheckResult::reject(node + "/LDA",
                               "bound h((1+T-t0)M - 1) <= target fails");

  Box domain = prob.ivp.init.bounding_box.product(Iv(t0, T));
  size_t t_idx = prob.ivp.dim();

  // dInv side conditions: defect bound, anchoring/e0, Lipschitz bound.
  const RuleApp* dinv = find_child(*lda, "dInv");
  if (!dinv)
    return CheckResult::reject(node + "/LDA", "missing dInv side conditions");
  {
    const ObNormBound* defect = find_leaf<ObNormBound>(*dinv, 0);
    if (!defect)
      return CheckResult::reject(node + "/LDA/dInv", "missing defect leaf");
    PolyVec expect = recompute_defect(phi, prob.ivp.f, t_idx);
    if (!(defect->comps == expect))
      return CheckResult::reject(node + "/LDA/dInv",
                                 "defect polynomial does not match phi and f");
    if (!(defect->box == domain))
      return CheckResult::reject(node + "/LDA/dInv", "defect domain mismatch");
    if (!(defect->bound == delta * delta))
      return CheckResult::reject(node + "/LDA/dInv",
                                 "defect bound must be delta^2");
    const ObNormBound* kbound = find_leaf<ObNormBound>(*dinv, 1);
    if (!kbound)
      return CheckResult::reject(node + "/LDA/dInv", "missing K-bound leaf");
    PolyVec jac = recompute_jacobian(prob.ivp.f);
    if (!(kbound->comps == jac))
      return CheckResult::reject(node + "/LDA/dInv",
                                 "K-bound polynomial mismatch");
    if (!(kbound->box == B))
      return CheckResult::reject(node + "/LDA/dInv",
                                 "K-bound must be over the enclosure box");
    if (!(kbound->bound == K * K))
      return CheckResult::reject(node + "/LDA/dInv", "K-bound must be K^2");
    if (e0.is_zero()) {
      const ObExact* anchor = find_leaf<ObExact>(*dinv);
      if (!anchor || anchor->claim != ObExact::Claim::ZeroPolyVec)
        return CheckResult::reject(node + "/LDA/dInv",
                                   "missing anchoring leaf for e0 = 0");
      if (anchor->polys.size() != phi.size())
        return CheckResult::reject(node + "/LDA/dInv",
                                   "anchoring leaf arity mismatch");
      for (size_t i = 0; i < phi.size(); ++i) {
        MultiPoly expect_zero = phi[i].subst_value(t_idx, t0) -
                                MultiPoly::variable(phi.vars(), i);
        if (!(anchor->polys[i] == expect_zero))
          return CheckResult::reject(node + "/LDA/dInv",
                                     "anchoring polynomial mismatch");
      }
    } else {
      const ObNormBound* init_leaf = find_leaf<ObNormBound>(*dinv, 2);
      if (!init_leaf)
        return CheckResult::reject(node + "/LDA/dInv",
                                   "missing initial-error leaf");
      std::vector<MultiPoly> comps;
      for (size_t i = 0; i < phi.size(); ++i)
        comps.push_back(phi[i].subst_value(t_idx, t0) -
                        MultiPoly::variable(phi.vars(), i));
      PolyVec expect0 = PolyVec(std::move(comps));
      if (!(init_leaf->comps == expect0) || !(init_leaf->bound == e0 * e0) ||
          !(init_leaf->box == domain))
        return CheckResult::reject(node + "/LDA/dInv",
                                   "initial-error leaf mismatch");
    }
  }

  // The exponential premise beneath the LDA node.
  const RuleApp* dgi = find_child(*lda, "DGi");
  if (!dgi)
    return CheckResult::reject(node + "/LDA",
                               "missing exponential premise (DGi)");
  {
    Rat dt = T - t0;
    auto it_theta = dgi->upolys.find("theta");
    if (it_theta == dgi->upolys.end())
      return CheckResult::reject(node + "/LDA/DGi", "missing theta");
    const UniPoly& theta = it_theta->second;
    const ObExact* at0 = nullptr;
    const ObExact* coeffs = nullptr;
    const ObExact* maxle = nullptr;
    for (const auto& l : dgi->leaves) {
      const ObExact* e = std::get_if<ObExact>(&l);
      if (!e) continue;
      if (e->claim == ObExact::Claim::ValueEq) at0 = e;
      if (e->claim == ObExact::Claim::NonnegCoeffs) coeffs = e;
      if (e->claim == ObExact::Claim::RatLe) maxle = e;
    }
    const ObSturm* darboux = find_leaf<ObSturm>(*dgi);
    if (!at0 || !coeffs || !maxle || !darboux)
      return CheckResult::reject(node + "/LDA/DGi",
                                 "incomplete exponential premise leaves");
    if (!(at0->upoly == theta) || !at0->point.is_zero() ||
        !(at0->value == Rat(1)))
      return CheckResult::reject(node + "/LDA/DGi", "theta(0) = 1 mismatch");
    if (!(coeffs->upoly == theta))
      return CheckResult::reject(node + "/LDA/DGi",
                                 "nonneg-coeff leaf is not theta");
    UniPoly darboux_expect = theta.derivative() - theta.scaled(K);
    if (!(darboux->witness.polynomial == darboux_expect))
      return CheckResult::reject(node + "/LDA/DGi",
                                 "Darboux polynomial mismatch");
    if (!darboux->witness.a.is_zero() || !(darboux->witness.b == dt))
      return CheckResult::reject(node + "/LDA/DGi",
                                 "Darboux interval must be [0, T - t0]");
    if (!(maxle->lhs == c * theta.eval(dt)) || !(maxle->rhs == M))
      return CheckResult::reject(node + "/LDA/DGi",
                                 "c*theta(dt) <= M leaf mismatch");
  }

  // Enc: the rho-padded phi tube stays strictly inside B.
  {
    Rat rho_enc = rho;
    size_t n = phi.size();
    if (enc->leaves.size() != 2 * n)
      return CheckResult::reject(node + "/Enc",
                                 "enclosure needs 2*dim leaves");
    for (size_t i = 0; i < n; ++i) {
      const ObPolyBound* up = std::get_if<ObPolyBound>(&enc->leaves[2 * i]);
      const ObPolyBound* lo = std::get_if<ObPolyBound>(&enc->leaves[2 * i + 1]);
      if (!up || !lo)
        return CheckResult::reject(node + "/Enc", "enclosure leaf kinds");
      if (!(up->p == phi[i]) || !(lo->p == phi[i]))
        return CheckResult::reject(node + "/Enc",
                                   "enclosure leaf polynomial mismatch");
      if (!(up->box == domain) || !(lo->box == domain))
        return CheckResult::reject(node + "/Enc", "enclosure domain mismatch");
      if (!up->upper || !up->strict || lo->upper || !lo->strict)
        return CheckResult::reject(node + "/Enc",
                                   "enclosure leaves must be strict");
      if (!(up->bound == B[i].hi - rho_enc) ||
          !(lo->bound == B[i].lo + rho_enc))
        return CheckResult::reject(node + "/Enc",
                                   "enclosure bounds must be B -/+ rho");
    }
  }

  if (bound_out) *bound_out = bound;
  return CheckResult::accept();
}

inline const PolyVec* error_tree_phi(const RuleApp& dc) {
  const RuleApp* lda = find_child(dc, "LDA");
  if (!lda) return nullptr;
  auto it = lda->polyvecs.find("phi");
  return it == lda->polyvecs.end() ? nullptr : &it->second;
}

inline CheckResult check_exists_tree(const RuleApp& root, const Problem& prob,
                                     const std::string& node, Rat* radius_out);

inline CheckResult check_safety_tree(const RuleApp& root, const Problem& prob,
                                     const OpenRegion& region,
                                     const std::string& node) {
  if (root.rule != "K")
    return CheckResult::reject(node, "safety root must be K");
  if (root.children.empty())
    return CheckResult::reject(node, "safety needs the error-bound premise");
  Rat errbound;
  auto res =
      check_error_bound_tree(root.children[0], prob, node + "/dC", &errbound);
  if (!res.ok) return res;
  const RuleApp* v = find_child(root, "V");
  if (!v) return CheckResult::reject(node, "safety missing V premise");
  const RuleApp* dw = find_child(*v, "dW");
  if (!dw) return CheckResult::reject(node + "/V", "missing dW weakening");
  const ObRegionContainment* cont = find_leaf<ObRegionContainment>(*dw);
  if (!cont)
    return CheckResult::reject(node + "/V/dW", "missing containment leaf");
  if (cont->witness_time_mode)
    return CheckResult::reject(node + "/V/dW",
                               "safety containment must cover all times");
  if (!(errbound <= cont->pad))
    return CheckResult::reject(node + "/V/dW",
                               "pad smaller than certified error bound");
  const PolyVec* phi = error_tree_phi(root.children[0]);
  if (!phi || !(cont->phi == *phi))
    return CheckResult::reject(node + "/V/dW",
                               "containment phi differs from certified phi");
  std::string want = json(certjson::enc_region(region.root)).dump();
  std::string got = json(certjson::enc_region(cont->region.root)).dump();
  if (want != got)
    return CheckResult::reject(node + "/V/dW",
                               "containment region differs from the goal");
  return CheckResult::accept();
}

inline CheckResult check_liveness_tree(const RuleApp& root,
                                       const Problem& prob,
                                       const OpenRegion& region,
                                       const std::string& node) {
  if (root.rule != "<&>")
    return CheckResult::reject(node, "liveness root must be <&>");
  if (root.children.size() < 3)
    return CheckResult::reject(node, "liveness needs three premises");
  auto exist = check_exists_tree(root.children[0], prob,
                                 node + "/StepDual->", nullptr);
  if (!exist.ok) return exist;
  const RuleApp* bdg = find_child(root, "BDG<>");
  if (!bdg || bdg->children.empty())
    return CheckResult::reject(node, "liveness missing BDG<> premise");
  Rat errbound;
  auto res = check_error_bound_tree(bdg->children[0], prob,
                                    node + "/BDG<>/dC", &errbound);
  if (!res.ok) return res;
  const RuleApp* kd = find_child(root, "K<>");
  if (!kd) return CheckResult::reject(node, "liveness missing K<> premise");
  const RuleApp* dw = find_child(*kd, "dW");
  if (!dw) return CheckResult::reject(node + "/K<>", "missing dW");
  const ObRegionContainment* cont = find_leaf<ObRegionContainment>(*dw);
  if (!cont)
    return CheckResult::reject(node + "/K<>/dW", "missing containment leaf");
  if (!cont->witness_time_mode)
    return CheckResult::reject(node + "/K<>/dW",
                               "liveness containment needs witness times");
  if (!(errbound <= cont->pad))
    return CheckResult::reject(node + "/K<>/dW",
                               "pad smaller than certified error bound");
  const PolyVec* phi = error_tree_phi(bdg->children[0]);
  if (!phi || !(cont->phi == *phi))
    return CheckResult::reject(node + "/K<>/dW",
                               "containment phi differs from certified phi");
  std::string want = json(certjson::enc_region(region.root)).dump();
  std::string got = json(certjson::enc_region(cont->region.root)).dump();
  if (want != got)
    return CheckResult::reject(node + "/K<>/dW",
                               "containment region differs from the goal");
  return CheckResult::accept();
}

inline CheckResult check_exists_tree(const RuleApp& root, const Problem& prob,
                                     const std::string& node,
                                     Rat* radius_out) {
  if (root.rule != "StepDual->")
    return CheckResult::reject(node, "existence root must be StepDual->");
  Rat R;
  try {
    R = root.rat("R");
  } catch (const domain_error& e) {
    return CheckResult::reject(node, e.what());
  }
  if (R.sign() <= 0) return CheckResult::reject(node, "R must be positive");
  if (root.children.empty())
    return CheckResult::reject(node, "existence needs the error premise");
  Rat errbound;
  auto res =
      check_error_bound_tree(root.children[0], prob, node + "/dC", &errbound);
  if (!res.ok) return res;
  const PolyVec* phi = error_tree_phi(root.children[0]);
  if (!phi) return CheckResult::reject(node, "missing phi");
  const RuleApp* v = find_child(root, "V");
  const RuleApp* dw = find_child(root, "dW");
  if (!v || !dw)
    return CheckResult::reject(node, "existence needs V and dW premises");
  const ObNormBound* normb = find_leaf<ObNormBound>(*v);
  if (!normb)
    return CheckResult::reject(node + "/V", "missing phi-norm leaf");
  Rat S;
  try {
    S = root.rat("S");
  } catch (const domain_error& e) {
    return CheckResult::reject(node, e.what());
  }
  if (!(normb->comps == *phi))
    return CheckResult::reject(node + "/V", "phi-norm polynomial mismatch");
  Box domain = prob.ivp.init.bounding_box.product(Iv(prob.ivp.t0, prob.ivp.T));
  if (!(normb->box == domain))
    return CheckResult::reject(node + "/V", "phi-norm domain mismatch");
  if (!(normb->bound == S * S))
    return CheckResult::reject(node + "/V", "phi-norm bound must be S^2");
  const ObExact* lt = find_leaf<ObExact>(*dw);
  if (!lt || lt->claim != ObExact::Claim::RatLt)
    return CheckResult::reject(node + "/dW", "missing S + err < R leaf");
  if (!(lt->lhs == S + errbound) || !(lt->rhs == R))
    return CheckResult::reject(node + "/dW", "ball radius arithmetic mismatch");
  if (radius_out) *radius_out = R;
  return CheckResult::accept();
}

inline CheckResult check_step_exist_tree(const RuleApp& root,
                                         const Problem& prob,
                                         const std::string& node) {
  if (root.rule != "StepExt")
    return CheckResult::reject(node, "step-exist root must be StepExt");
  Rat duration;
  try {
    duration = root.rat("duration");
  } catch (const domain_error& e) {
    return CheckResult::reject(node, e.what());
  }
  if (root.children.empty())
    return CheckResult::reject(node, "StepExt needs StepEx children");
  Box box = prob.ivp.init.bounding_box;
  Rat t_cursor = prob.ivp.t0;
  Rat total(0);
  for (size_t i = 0; i < root.children.size(); ++i) {
    const RuleApp& step = root.children[i];
    std::string snode = node + "/StepEx" + std::to_string(i);
    if (step.rule != "StepEx")
      return CheckResult::reject(snode, "StepExt child must be StepEx");
    Rat Ri, Mi, dti, ts, te;
    try {
      Ri = step.rat("R");
      Mi = step.rat("M");
      dti = step.rat("dt");
      ts = step.rat("t_start");
      te = step.rat("t_end");
    } catch (const domain_error& e) {
      return CheckResult::reject(snode, e.what());
    }
    if (Ri.sign() <= 0 || Mi.sign() <= 0 || dti.sign() <= 0)
      return CheckResult::reject(snode, "step requires R, M, dt > 0");
    if (!(ts == t_cursor))
      return CheckResult::reject(snode, "step horizons do not abut");
    if (!(te == ts + dti))
      return CheckResult::reject(snode, "step end time mismatch");
    if (!(dti * Mi == Ri))
      return CheckResult::reject(snode, "dt must equal R/M");
    box = box.inflated(Ri);
    const ObNormBound* b = find_leaf<ObNormBound>(step);
    if (!b) return CheckResult::reject(snode, "missing field-bound leaf");
    if (!(b->comps == prob.ivp.f))
      return CheckResult::reject(snode, "field-norm polynomial mismatch");
    if (!(b->box == box))
      return CheckResult::reject(snode, "step box must be cumulative inflation");
    if (!(b->bound == Mi * Mi))
      return CheckResult::reject(snode, "field bound must be M^2");
    t_cursor = te;
    total += dti;
  }
  if (!(duration == total))
    return CheckResult::reject(node, "duration differs from the step sum");
  return CheckResult::accept();
}

}  // namespace checker

// Re-verifies every leaf by pure interval evaluation / exact recomputation /
// Sturm recomputation over the stored witnesses, plus the per-kind structural
// constraints. No search is performed.
inline CheckResult check(const Certificate& cert) {
  if (cert.hash != problem_hash(cert.problem))
    return CheckResult::reject("header", "problem hash mismatch");
  auto vocab = checker::check_vocabulary(cert.root, cert.root.rule);
  if (!vocab.ok) return vocab;
  auto leaves = checker::check_leaves(cert.root, cert.problem, cert.root.rule);
  if (!leaves.ok) return leaves;

  const std::string root = cert.root.rule;
  if (cert.kind == "error-bound") {
    const auto* g = std::get_if<GoalErrorBound>(&cert.problem.goal);
    if (!g) return CheckResult::reject("header", "goal/kind mismatch");
    Rat bound;
    auto res = checker::check_error_bound_tree(cert.root, cert.problem, root,
                                               &bound);
    if (!res.ok) return res;
    if (!(bound <= g->epsilon))
      return CheckResult::reject(root, "certified bound exceeds the goal");
    return CheckResult::accept();
  }
  if (cert.kind == "safety") {
    const auto* g = std::get_if<GoalSafety>(&cert.problem.goal);
    if (!g) return CheckResult::reject("header", "goal/kind mismatch");
    return checker::check_safety_tree(cert.root, cert.problem, g->region,
                                      root);
  }
  if (cert.kind == "liveness") {
    const auto* g = std::get_if<GoalLiveness>(&cert.problem.goal);
    if (!g) return CheckResult::reject("header", "goal/kind mismatch");
    return checker::check_liveness_tree(cert.root, cert.problem, g->region,
                                        root);
  }
  if (cert.kind == "exists-until") {
    if (!std::holds_alternative<GoalExistsUntil>(cert.problem.goal))
      return CheckResult::reject("header", "goal/kind mismatch");
    return checker::check_exists_tree(cert.root, cert.problem, root, nullptr);
  }
  if (cert.kind == "step-exist") {
    if (!std::holds_alternative<GoalStepExist>(cert.problem.goal))
      return CheckResult::reject("header", "goal/kind mismatch");
    return checker::check_step_exist_tree(cert.root, cert.problem, root);
  }
  return CheckResult::reject("header", "unknown certificate kind " + cert.kind);
}

// ---- best-effort export to an external proof assistant's text format ------

inline std::string poly_to_external(const MultiPoly& p) {
  // identical infix syntax, ^ for powers; acceptable to .kyx-style readers
  return p.str();
}

inline std::string export_external(const Certificate& cert) {
  if (cert.kind != "error-bound" && cert.kind != "safety")
    throw domain_error("export_external supports error-bound and safety only");
  const Problem& prob = cert.problem;
  const auto& vars = prob.ivp.state_vars();
  std::ostringstream os;
  os << "ArchiveEntry \"civp " << cert.kind << " " << cert.hash << "\"\n\n";
  os << "ProgramVariables\n";
  for (const auto& v : vars) os << "  Real " << v << ";\n";
  for (const auto& v : vars) os << "  Real " << v << "0;\n";
  os << "  Real t;\n  Real g;\nEnd.\n\nProblem\n  (";
  // initial condition
  bool first = true;
  for (size_t i = 0; i < vars.size(); ++i) {
    const Iv& d = prob.ivp.init.bounding_box[i];
    if (!first) os << " & ";
    first = false;
    if (d.is_point())
      os << vars[i] << " = " << d.lo.str();
    else
      os << d.lo.str() << " <= " << vars[i] << " & " << vars[i]
         << " <= " << d.hi.str();
  }
  for (const auto& c : prob.ivp.init.constraints) {
    os << " & " << poly_to_external(c.p)
       << (c.rel == ConstraintRel::Ge0
               ? " >= 0"
               : c.rel == ConstraintRel::Le0 ? " <= 0" : " = 0");
  }
  for (const auto& v : vars) os << " & " << v << "0 = " << v;
  os << " & t = " << prob.ivp.t0.str() << ")\n  ->\n  [{";
  for (size_t i = 0; i < vars.size(); ++i)
    os << vars[i] << "' = " << poly_to_external(prob.ivp.f[i]) << ", ";
  os << "t' = 1 & t <= " << prob.ivp.T.str() << "}]\n  (";
  if (cert.kind == "error-bound") {
    const RuleApp* lda = checker::find_child(cert.root, "LDA");
    const PolyVec* phi = checker::error_tree_phi(cert.root);
    if (!lda || !phi)
      throw domain_error("export_external: malformed error-bound certificate");
    Rat bound = lda ? lda->rat("h") * ((Rat(1) + prob.ivp.T - prob.ivp.t0) *
                                           lda->rat("M") -
                                       Rat(1))
                    : Rat(0);
    first = true;
    os << "(";
    for (size_t i = 0; i < vars.size(); ++i) {
      if (!first) os << " + ";
      first = false;
      os << "(" << vars[i] << " - (" << poly_to_external((*phi)[i]) << "))^2";
    }
    os << ") <= (" << bound.str() << ")^2";
    os << ")\nEnd.\n\n";
    if (lda) {
      Rat h = lda->rat("h"), c = lda->rat("c"), K = lda->rat("K"),
          M = lda->rat("M");
      os << "/* invariant annotation:\n";
      os << "   psi := t >= " << prob.ivp.t0.str() << " & g >= 1 & C(";
      for (size_t i = 0; i < vars.size(); ++i)
        os << (i ? "," : "") << vars[i] << "0";
      os << ") & ||x - phi(x0,t)||^2 <= eps(g,t)^2\n";
      os << "   eps(g,t) := " << h.str() << "*((1 + t - " << prob.ivp.t0.str()
         << ")*g - 1)\n";
      os << "   ghost: g' = " << K.str() << "*g, g(" << prob.ivp.t0.str()
         << ") = " << c.str() << ", proved g <= " << M.str() << "\n";
      const RuleApp* dgi = checker::find_child(*lda, "DGi");
      if (dgi) {
        auto it = dgi->upolys.find("theta");
        if (it != dgi->upolys.end())
          os << "   theta_n(s) = " << it->second.to_multipoly("s").str()
             << "\n";
      }
      os << "*/\n";
    }
  } else {
    const auto* g = std::get_if<GoalSafety>(&prob.goal);
    os << detail::region_to_string(g->region.root, false) << ")\nEnd.\n";
  }
  os << "End.\n";
  return os.str();
}

}  // namespace civp
