#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "civp/region.hpp"

namespace civp {

// Sound interval enclosure of p over the box. Term-wise evaluation with
// per-variable power caching and outward rounding above the denominator
// budget; exact otherwise.
inline Iv interval_eval(const MultiPoly& p, const Box& box) {
  if (box.dim() != p.vars().size())
    throw var_mismatch("interval_eval dimension mismatch");
  std::vector<std::vector<Iv>> pows(box.dim());
  Iv acc{Rat(0)};
  for (const auto& [e, c] : p.terms()) {
    Iv term{Rat(1)};
    bool first = true;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      auto& cache = pows[i];
      while (cache.size() < e[i])
        cache.push_back(iv_round_outward(
            iv_pow(box[i], static_cast<unsigned>(cache.size()) + 1)));
      const Iv& pw = cache[e[i] - 1];
      term = first ? pw : iv_round_outward(iv_mul(term, pw));
      first = false;
    }
    acc = iv_round_outward(iv_add(acc, iv_scale(term, c)));
  }
  return acc;
}

// Evaluators abstract the objective of the subdivision machinery: either a
// single polynomial or the squared Euclidean norm of a polynomial vector
// (kept unexpanded; enclosing each component before squaring is both cheaper
// and tighter than expanding the square).
struct PolyEvaluator {
  const MultiPoly* p;
  Iv enclose(const Box& box) const { return interval_eval(*p, box); }
  Rat at(const std::vector<Rat>& pt) const { return p->eval(pt); }
};

inline Iv norm_sq_interval(const PolyVec& comps, const Box& box) {
  Iv acc{Rat(0)};
  for (const auto& c : comps.comps)
    acc = iv_add(acc, iv_pow(interval_eval(c, box), 2));
  return acc;
}

struct NormSqEvaluator {
  const PolyVec* comps;
  Iv enclose(const Box& box) const { return norm_sq_interval(*comps, box); }
  Rat at(const std::vector<Rat>& pt) const {
    Rat acc(0);
    for (const auto& c : comps->comps) {
      Rat v = c.eval(pt);
      acc += v * v;
    }
    return acc;
  }
};

enum class BoundKind { UpperLe, UpperLt, LowerGe, LowerGt };

inline bool bound_holds_on(const Iv& enclosure, BoundKind kind,
                           const Rat& bound) {
  switch (kind) {
    case BoundKind::UpperLe: return enclosure.hi <= bound;
    case BoundKind::UpperLt: return enclosure.hi < bound;
    case BoundKind::LowerGe: return enclosure.lo >= bound;
    case BoundKind::LowerGt: return enclosure.lo > bound;
  }
  return false;
}

inline bool bound_violated_by_value(const Rat& v, BoundKind kind,
                                    const Rat& bound) {
  switch (kind) {
    case BoundKind::UpperLe: return v > bound;
    case BoundKind::UpperLt: return v >= bound;
    case BoundKind::LowerGe: return v < bound;
    case BoundKind::LowerGt: return v <= bound;
  }
  return false;
}

// Box-bisection tree. Leaves record the interval enclosure found there;
// split children partition the parent box at the stored midpoint.
struct SubdivNode {
  bool is_split = false;
  Iv enclosure;  // leaf payload
  size_t axis = 0;
  Rat mid;
  std::shared_ptr<SubdivNode> left, right;

  static std::shared_ptr<SubdivNode> leaf(Iv e) {
    auto n = std::make_shared<SubdivNode>();
    n->enclosure = std::move(e);
    return n;
  }
};

struct SubdivisionWitness {
  Box root_box;
  BoundKind kind = BoundKind::UpperLe;
  Rat bound;
  std::shared_ptr<SubdivNode> tree;

  size_t leaf_count() const {
    size_t n = 0;
    std::deque<const SubdivNode*> q{tree.get()};
    while (!q.empty()) {
      const SubdivNode* t = q.front();
      q.pop_front();
      if (!t) continue;
      if (t->is_split) {
        q.push_back(t->left.get());
        q.push_back(t->right.get());
      } else {
        ++n;
      }
    }
    return n;
  }
};

// Checker-side witness replay: recomputes every leaf enclosure by direct
// interval evaluation and demands a verdict at least as strong as claimed.
template <typename Eval>
bool subdivision_witness_valid_with(const Eval& eval,
                                    const SubdivisionWitness& w) {
  struct Item {
    const SubdivNode* node;
    Box box;
  };
  if (!w.tree) return false;
  std::vector<Item> stack{{w.tree.get(), w.root_box}};
  while (!stack.empty()) {
    auto [node, box] = std::move(stack.back());
    stack.pop_back();
    if (node->is_split) {
      if (!node->left || !node->right) return false;
      if (node->axis >= box.dim()) return false;
      const Iv& d = box[node->axis];
      if (!(d.lo < node->mid && node->mid < d.hi)) return false;
      Box lb = box, rb = box;
      lb[node->axis] = Iv(d.lo, node->mid);
      rb[node->axis] = Iv(node->mid, d.hi);
      stack.push_back({node->left.get(), std::move(lb)});
      stack.push_back({node->right.get(), std::move(rb)});
      continue;
    }
    Iv fresh = eval.enclose(box);
    if (!bound_holds_on(fresh, w.kind, w.bound)) return false;
  }
  return true;
}

inline bool subdivision_witness_valid(const MultiPoly& p,
                                      const SubdivisionWitness& w) {
  return subdivision_witness_valid_with(PolyEvaluator{&p}, w);
}

enum class ProveStatus { Proved, Refuted, Unknown };

struct ProveResult {
  ProveStatus status = ProveStatus::Unknown;
  SubdivisionWitness witness;              // Proved only
  std::optional<std::vector<Rat>> refutation;  // Refuted only
};

namespace detail {

template <typename Eval>
std::shared_ptr<SubdivNode> prove_bound_rec(const Eval& eval, const Box& box,
                                            const Rat& bound, BoundKind kind,
                                            long& budget, ProveResult& out) {
  Iv enc = eval.enclose(box);
  if (bound_holds_on(enc, kind, bound)) return SubdivNode::leaf(std::move(enc));
  std::vector<Rat> c = box.center();
  if (bound_violated_by_value(eval.at(c), kind, bound)) {
    out.status = ProveStatus::Refuted;
    out.refutation = std::move(c);
    return nullptr;
  }
  if (--budget < 0 || box.max_width().is_zero()) {
    out.status = ProveStatus::Unknown;
    return nullptr;
  }
  auto node = std::make_shared<SubdivNode>();
  node->is_split = true;
  node->axis = box.widest_axis();
  node->mid = box[node->axis].mid();
  auto [lb, rb] = box.split(node->axis);
  node->left = prove_bound_rec(eval, lb, bound, kind, budget, out);
  if (!node->left) return nullptr;
  node->right = prove_bound_rec(eval, rb, bound, kind, budget, out);
  if (!node->right) return nullptr;
  return node;
}

}  // namespace detail

// Semidecision of "objective ~ bound holds everywhere on box" by bisection.
// Sound: never proves a false statement. Complete for robustly-true
// instances at sufficient budget. Deterministic (widest-axis, midpoint,
// depth-first).
template <typename Eval>
ProveResult prove_bound_with(const Eval& eval, const Box& box,
                             const Rat& bound, BoundKind kind, long budget) {
  ProveResult out;
  out.status = ProveStatus::Proved;
  auto tree = detail::prove_bound_rec(eval, box, bound, kind, budget, out);
  if (!tree) {
    if (out.status == ProveStatus::Proved) out.status = ProveStatus::Unknown;
    return out;
  }
  out.status = ProveStatus::Proved;
  out.witness = SubdivisionWitness{box, kind, bound, std::move(tree)};
  return out;
}

inline ProveResult prove_bound(const MultiPoly& p, const Box& box,
                               const Rat& bound, BoundKind kind, long budget) {
  return prove_bound_with(PolyEvaluator{&p}, box, bound, kind, budget);
}

// prove_upper of the spec: max_box p <= bound, or Unknown.
inline ProveResult prove_upper(const MultiPoly& p, const Box& box,
                               const Rat& bound, long budget) {
  return prove_bound(p, box, bound, BoundKind::UpperLe, budget);
}

struct MaxBound {
  Rat upper;            // certified: max <= upper
  Rat best_sample;      // exact value at some box point (lower bound on max)
  SubdivisionWitness witness;  // proves max <= upper
};

namespace detail {

struct BnbItem {
  std::shared_ptr<SubdivNode> node;  // leaf in the growing tree
  Box box;
};

struct RatGreater {
  bool operator()(const Rat& a, const Rat& b) const { return b < a; }
};

}  // namespace detail

// Branch-and-bound upper bound of the objective's max over box: returns U
// with true_max <= U. Terminates when U is within tolerance of the best
// exact sample (absolute or relative), when U falls below `stop_below`
// (caller-declared "good enough"), or when the iteration budget runs out —
// in every case the returned bound is sound, possibly loose.
template <typename Eval>
MaxBound approx_max_with(const Eval& eval, const Box& box, const Rat& abs_tol,
                         const Rat& rel_tol, long max_iters = 2000000,
                         const std::optional<Rat>& stop_below = std::nullopt) {
  auto root = SubdivNode::leaf(eval.enclose(box));
  std::multimap<Rat, detail::BnbItem, detail::RatGreater> active;
  active.emplace(root->enclosure.hi, detail::BnbItem{root, box});
  Rat best = eval.at(box.center());

  auto done = [&](const Rat& u) {
    if (u <= best + abs_tol) return true;
    if (stop_below && u <= *stop_below) return true;
    if (rel_tol.sign() > 0 && u <= best + rat_abs(best) * rel_tol) return true;
    return false;
  };

  for (long it = 0; it < max_iters; ++it) {
    auto top = active.begin();
    Rat u = top->first;
    if (done(u) || top->second.box.max_width().is_zero()) {
      return {u, best, SubdivisionWitness{box, BoundKind::UpperLe, u, root}};
    }
    detail::BnbItem item = std::move(top->second);
    active.erase(top);
    item.node->is_split = true;
    item.node->axis = item.box.widest_axis();
    item.node->mid = item.box[item.node->axis].mid();
    auto [lb, rb] = item.box.split(item.node->axis);
    for (const Box* side : {&lb, &rb}) {
      auto child = SubdivNode::leaf(eval.enclose(*side));
      best = rat_max(best, eval.at(side->center()));
      if (side == &lb)
        item.node->left = child;
      else
        item.node->right = child;
      active.emplace(child->enclosure.hi, detail::BnbItem{child, *side});
    }
  }
  // budget exhausted: the worst active upper bound is still sound
  Rat u = active.begin()->first;
  return {u, best, SubdivisionWitness{box, BoundKind::UpperLe, u, root}};
}

inline MaxBound approx_max_impl(const MultiPoly& p, const Box& box,
                                const Rat& abs_tol, const Rat& rel_tol,
                                long max_iters = 2000000) {
  return approx_max_with(PolyEvaluator{&p}, box, abs_tol, rel_tol, max_iters);
}

// Certified upper bound on max p over box, within absolute tolerance tol.
inline MaxBound approx_max(const MultiPoly& p, const Box& box, const Rat& tol) {
  if (tol.sign() <= 0) throw domain_error("approx_max requires tol > 0");
  return approx_max_impl(p, box, tol, Rat(0));
}

// Rational K >= Lipschitz constant of f on box (Euclidean norm), via the
// Frobenius bound on the interval Jacobian.
inline Rat lipschitz_bound(const PolyVec& f, const Box& box) {
  Rat sum(0);
  for (size_t i = 0; i < f.size(); ++i) {
    for (size_t j = 0; j < f.vars().size(); ++j) {
      Rat m = interval_eval(f[i].partial_derivative(j), box).mag();
      sum += m * m;
    }
  }
  return rat_sqrt_upper(sum, 40);
}

// Proof that an inflated box lies inside an open region. Mirrors the region
// tree; disjunctions may bisect the box until some disjunct covers a piece.
struct RegionProofNode {
  enum class Kind { Atom, And, OrChoice, OrSplit };
  Kind kind = Kind::Atom;
  SubdivisionWitness atom;            // Atom
  std::vector<RegionProofNode> kids;  // And / OrSplit(2) / OrChoice(1)
  size_t choice = 0;                  // OrChoice
  size_t axis = 0;                    // OrSplit
  Rat mid;
};

namespace detail {

inline std::optional<RegionProofNode> region_prove_rec(const RegionNode& node,
                                                       const Box& box,
                                                       long& budget,
                                                       int split_depth);

inline std::optional<RegionProofNode> region_prove_or(const RegionNode& node,
                                                      const Box& box,
                                                      long& budget,
                                                      int split_depth) {
  for (size_t i = 0; i < node.kids.size(); ++i) {
    long probe = budget;
    auto sub = region_prove_rec(node.kids[i], box, probe, split_depth);
    if (sub) {
      budget = probe;
      RegionProofNode r;
      r.kind = RegionProofNode::Kind::OrChoice;
      r.choice = i;
      r.kids.push_back(std::move(*sub));
      return r;
    }
  }
  if (split_depth <= 0 || --budget < 0) return std::nullopt;
  RegionProofNode r;
  r.kind = RegionProofNode::Kind::OrSplit;
  r.axis = box.widest_axis();
  r.mid = box[r.axis].mid();
  if (!(box[r.axis].lo < r.mid && r.mid < box[r.axis].hi)) return std::nullopt;
  auto [lb, rb] = box.split(r.axis);
  auto lw = region_prove_or(node, lb, budget, split_depth - 1);
  if (!lw) return std::nullopt;
  auto rw = region_prove_or(node, rb, budget, split_depth - 1);
  if (!rw) return std::nullopt;
  r.kids.push_back(std::move(*lw));
  r.kids.push_back(std::move(*rw));
  return r;
}

inline std::optional<RegionProofNode> region_prove_rec(const RegionNode& node,
                                                       const Box& box,
                                                       long& budget,
                                                       int split_depth) {
  switch (node.kind) {
    case RegionNode::Kind::Atom: {
      auto res = prove_bound(node.p, box, Rat(0),
                             node.greater ? BoundKind::LowerGt
                                          : BoundKind::UpperLt,
                             budget);
      if (res.status != ProveStatus::Proved) return std::nullopt;
      RegionProofNode r;
      r.kind = RegionProofNode::Kind::Atom;
      r.atom = std::move(res.witness);
      return r;
    }
    case RegionNode::Kind::And: {
      RegionProofNode r;
      r.kind = RegionProofNode::Kind::And;
      for (const auto& k : node.kids) {
        auto sub = region_prove_rec(k, box, budget, split_depth);
        if (!sub) return std::nullopt;
        r.kids.push_back(std::move(*sub));
      }
      return r;
    }
    case RegionNode::Kind::Or:
      return region_prove_or(node, box, budget, split_depth);
  }
  return std::nullopt;
}

}  // namespace detail

// Proves that the pad-inflated box (componentwise inflation, a superset of
// the Euclidean pad ball) lies inside the open region.
inline std::optional<RegionProofNode> region_membership(
    const Box& enclosure, const Rat& pad, const OpenRegion& region,
    long budget, int or_split_depth = 8) {
  if (pad.sign() < 0) throw domain_error("region_membership needs pad >= 0");
  Box inflated = pad.is_zero() ? enclosure : enclosure.inflated(pad);
  return detail::region_prove_rec(region.root, inflated, budget,
                                  or_split_depth);
}

// Checker replay of a region membership proof.
inline bool region_proof_valid(const RegionNode& node, const Box& box,
                               const RegionProofNode& proof) {
  switch (proof.kind) {
    case RegionProofNode::Kind::Atom: {
      if (node.kind != RegionNode::Kind::Atom) return false;
      if (!(proof.atom.root_box == box)) return false;
      BoundKind expect =
          node.greater ? BoundKind::LowerGt : BoundKind::UpperLt;
      if (proof.atom.kind != expect || !proof.atom.bound.is_zero())
        return false;
      return subdivision_witness_valid(node.p, proof.atom);
    }
    case RegionProofNode::Kind::And: {
      if (node.kind != RegionNode::Kind::And ||
          proof.kids.size() != node.kids.size())
        return false;
      for (size_t i = 0; i < node.kids.size(); ++i)
        if (!region_proof_valid(node.kids[i], box, proof.kids[i]))
          return false;
      return true;
    }
    case RegionProofNode::Kind::OrChoice: {
      if (node.kind != RegionNode::Kind::Or || proof.kids.size() != 1 ||
          proof.choice >= node.kids.size())
        return false;
      return region_proof_valid(node.kids[proof.choice], box, proof.kids[0]);
    }
    case RegionProofNode::Kind::OrSplit: {
      if (node.kind != RegionNode::Kind::Or || proof.kids.size() != 2)
        return false;
      if (proof.axis >= box.dim()) return false;
      const Iv& d = box[proof.axis];
      if (!(d.lo < proof.mid && proof.mid < d.hi)) return false;
      Box lb = box, rb = box;
      lb[proof.axis] = Iv(d.lo, proof.mid);
      rb[proof.axis] = Iv(proof.mid, d.hi);
      return region_proof_valid(node, lb, proof.kids[0]) &&
             region_proof_valid(node, rb, proof.kids[1]);
    }
  }
  return false;
}

}  // namespace civp
