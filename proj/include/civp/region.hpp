#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "civp/box.hpp"
#include "civp/polynomial.hpp"

namespace civp {

// Closed constraint p(x) ~ 0 used in initial regions.
enum class ConstraintRel { Ge0, Le0, Eq0 };

struct Constraint {
  MultiPoly p;
  ConstraintRel rel = ConstraintRel::Ge0;

  bool satisfied(const std::vector<Rat>& pt) const {
    Rat v = p.eval(pt);
    switch (rel) {
      case ConstraintRel::Ge0: return v.sign() >= 0;
      case ConstraintRel::Le0: return v.sign() <= 0;
      case ConstraintRel::Eq0: return v.is_zero();
    }
    return false;
  }
};

// Compact initial region: bounding box intersected with closed constraints.
struct InitRegion {
  Box bounding_box;
  std::vector<Constraint> constraints;

  size_t dim() const { return bounding_box.dim(); }

  bool contains(const std::vector<Rat>& pt) const {
    if (!bounding_box.contains(pt)) return false;
    for (const auto& c : constraints)
      if (!c.satisfied(pt)) return false;
    return true;
  }
};

// Positive boolean combination of strict polynomial inequalities. Atoms are
// normalized to p > 0 or p < 0.
struct RegionNode {
  enum class Kind { Atom, And, Or };
  Kind kind = Kind::Atom;
  MultiPoly p;               // Atom only
  bool greater = true;       // Atom: p > 0 if true, p < 0 otherwise
  std::vector<RegionNode> kids;

  static RegionNode atom(MultiPoly poly, bool greater_) {
    RegionNode n;
    n.kind = Kind::Atom;
    n.p = std::move(poly);
    n.greater = greater_;
    return n;
  }
  static RegionNode conj(std::vector<RegionNode> kids_) {
    RegionNode n;
    n.kind = Kind::And;
    n.kids = std::move(kids_);
    return n;
  }
  static RegionNode disj(std::vector<RegionNode> kids_) {
    RegionNode n;
    n.kind = Kind::Or;
    n.kids = std::move(kids_);
    return n;
  }

  bool satisfied(const std::vector<Rat>& pt) const {
    switch (kind) {
      case Kind::Atom: {
        int s = p.eval(pt).sign();
        return greater ? s > 0 : s < 0;
      }
      case Kind::And:
        for (const auto& k : kids)
          if (!k.satisfied(pt)) return false;
        return true;
      case Kind::Or:
        for (const auto& k : kids)
          if (k.satisfied(pt)) return true;
        return false;
    }
    return false;
  }
};

struct OpenRegion {
  RegionNode root;
  std::optional<Box> declared_box;  // present iff boundedness was established

  bool satisfied(const std::vector<Rat>& pt) const {
    return root.satisfied(pt);
  }
};

// Polynomial compact IVP: x' = f(x), x(t0) in init, horizon [t0, T].
struct CompactIVP {
  PolyVec f;             // over state variables x
  InitRegion init;       // same dimension as f
  Rat t0, T;

  size_t dim() const { return f.size(); }
  const std::vector<std::string>& state_vars() const { return f.vars(); }
  Rat horizon() const { return T - t0; }
};

}  // namespace civp
