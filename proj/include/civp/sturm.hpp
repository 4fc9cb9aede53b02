#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "civp/unipoly.hpp"

namespace civp {

// Sturm chain of a square-free polynomial: S0 = q, S1 = q', each further
// entry the negated remainder of the previous pair (rescaled to a primitive
// integer polynomial by a positive factor, which preserves all signs).
inline std::vector<UniPoly> sturm_chain(const UniPoly& q) {
  std::vector<UniPoly> chain;
  if (q.is_zero()) return chain;
  chain.push_back(q.primitive_scaled());
  UniPoly d = q.derivative();
  if (d.is_zero()) return chain;
  chain.push_back(d.primitive_scaled());
  while (true) {
    const UniPoly& s0 = chain[chain.size() - 2];
    const UniPoly& s1 = chain[chain.size() - 1];
    UniPoly r = s0.divmod(s1).second;
    if (r.is_zero()) break;
    chain.push_back((-r).primitive_scaled());
  }
  return chain;
}

inline int sturm_sign_variations(const std::vector<UniPoly>& chain,
                                 const Rat& x) {
  int prev = 0, var = 0;
  for (const auto& s : chain) {
    int sg = s.eval(x).sign();
    if (sg == 0) continue;
    if (prev != 0 && sg != prev) ++var;
    prev = sg;
  }
  return var;
}

// Distinct roots of the square-free q in (a, b); requires q(a), q(b) != 0.
inline int sturm_count_roots(const std::vector<UniPoly>& chain, const Rat& a,
                             const Rat& b) {
  return sturm_sign_variations(chain, a) - sturm_sign_variations(chain, b);
}

struct SturmWitness {
  UniPoly polynomial;
  Rat a, b;
  std::vector<UniPoly> chain;   // Sturm chain of the square-free core
  std::vector<int> signs_at_a;  // chain signs at a
  std::vector<int> signs_at_b;
  Rat value_at_a, value_at_b;   // exact endpoint values of the polynomial
  int root_count = 0;           // distinct roots of the core in (a, b)
  bool nonneg = false;
};

struct SturmOutcome {
  bool nonneg = false;
  std::optional<Rat> refutation;  // a rational point with p < 0
  SturmWitness witness;
};

namespace detail {

inline std::vector<int> chain_signs(const std::vector<UniPoly>& chain,
                                    const Rat& x) {
  std::vector<int> s;
  s.reserve(chain.size());
  for (const auto& e : chain) s.push_back(e.eval(x).sign());
  return s;
}

// Point in (lo, hi) with q != 0, chosen deterministically near the midpoint.
inline Rat nonroot_split_point(const UniPoly& q, const Rat& lo,
                               const Rat& hi) {
  Rat w = hi - lo;
  Rat m = (lo + hi) / Rat(2);
  if (!q.eval(m).is_zero()) return m;
  for (int j = 3;; ++j) {
    Rat off = w * rat_pow2(-j);
    Rat c1 = m + off;
    if (c1 < hi && !q.eval(c1).is_zero()) return c1;
    Rat c2 = m - off;
    if (lo < c2 && !q.eval(c2).is_zero()) return c2;
  }
}

// Finds an explicit point of [a, b] where p < 0, starting the scan from
// `from` toward the interior. Only called when such points exist near from.
inline Rat scan_negative(const UniPoly& p, const Rat& from, const Rat& toward) {
  Rat step = (toward - from) / Rat(4);
  Rat x = from + step;
  for (int guard = 0; guard < 100000; ++guard) {
    if (p.eval(x).sign() < 0) return x;
    step /= Rat(2);
    x = from + step;
  }
  throw domain_error("sturm: failed to locate negative sample");
}

}  // namespace detail

// Exact decision of p >= 0 on [a, b]. Always terminates. On refutation the
// outcome carries a rational point with p < 0.
inline SturmOutcome sturm_nonneg(const UniPoly& p, const Rat& a, const Rat& b) {
  if (b < a) throw domain_error("sturm_nonneg: empty interval");
  SturmOutcome out;
  out.witness.polynomial = p;
  out.witness.a = a;
  out.witness.b = b;
  out.witness.value_at_a = p.eval(a);
  out.witness.value_at_b = p.eval(b);

  auto refute = [&](const Rat& pt) {
    out.nonneg = false;
    out.witness.nonneg = false;
    out.refutation = pt;
    return out;
  };
  auto accept = [&]() {
    out.nonneg = true;
    out.witness.nonneg = true;
    return out;
  };

  if (p.is_zero()) return accept();
  if (a == b) {
    if (out.witness.value_at_a.sign() >= 0) return accept();
    return refute(a);
  }
  if (out.witness.value_at_a.sign() < 0) return refute(a);
  if (out.witness.value_at_b.sign() < 0) return refute(b);

  // Peel off roots at the endpoints: p = (t-a)^alpha (t-b)^beta * core.
  UniPoly core = p;
  unsigned beta = 0;
  while (core.eval(a).is_zero()) core = core.deflate_root(a);
  while (core.eval(b).is_zero()) {
    core = core.deflate_root(b);
    ++beta;
  }
  // (t-a)^alpha > 0 and (t-b)^beta = (-1)^beta (b-t)^beta on (a, b), so the
  // sign of p on the open interval is the sign of (-1)^beta * core.
  if (beta % 2 == 1) core = -core;
  if (core.eval(a).sign() < 0) return refute(detail::scan_negative(p, a, b));
  if (core.eval(b).sign() < 0) return refute(detail::scan_negative(p, b, a));
  if (core.degree() <= 0) return accept();

  UniPoly q = square_free_part(core);
  out.witness.chain = sturm_chain(q);
  out.witness.signs_at_a = detail::chain_signs(out.witness.chain, a);
  out.witness.signs_at_b = detail::chain_signs(out.witness.chain, b);
  out.witness.root_count = sturm_count_roots(out.witness.chain, a, b);

  // Refine until every subinterval holds at most one distinct root of core;
  // then core >= 0 on [a,b] iff core > 0 at every breakpoint (a lone root
  // between two positive samples must have even multiplicity).
  std::vector<std::pair<Rat, Rat>> work{{a, b}};
  std::vector<Rat> breakpoints{a, b};
  while (!work.empty()) {
    auto [lo, hi] = work.back();
    work.pop_back();
    int k = sturm_count_roots(out.witness.chain, lo, hi);
    if (k <= 1) continue;
    Rat m = detail::nonroot_split_point(q, lo, hi);
    int sg = core.eval(m).sign();
    if (sg < 0) {
      // m lies strictly inside (a, b), where sign(core) = sign(p).
      return refute(m);
    }
    breakpoints.push_back(m);
    work.emplace_back(lo, m);
    work.emplace_back(m, hi);
  }
  for (const auto& s : breakpoints) {
    if (core.eval(s).sign() < 0) {
      if (s == a) return refute(detail::scan_negative(p, a, b));
      if (s == b) return refute(detail::scan_negative(p, b, a));
      return refute(s);
    }
  }
  return accept();
}

// Re-verification used by the certificate checker: recomputes the decision
// and demands agreement with the stored witness (chain included).
inline bool sturm_witness_valid(const SturmWitness& w) {
  SturmOutcome fresh = sturm_nonneg(w.polynomial, w.a, w.b);
  if (!fresh.nonneg || !w.nonneg) return fresh.nonneg && w.nonneg;
  if (fresh.witness.chain != w.chain) return false;
  if (fresh.witness.signs_at_a != w.signs_at_a) return false;
  if (fresh.witness.signs_at_b != w.signs_at_b) return false;
  if (fresh.witness.value_at_a != w.value_at_a) return false;
  if (fresh.witness.value_at_b != w.value_at_b) return false;
  if (fresh.witness.root_count != w.root_count) return false;
  return true;
}

}  // namespace civp
