#pragma once

#include <utility>
#include <vector>

#include "civp/polynomial.hpp"
#include "civp/rational.hpp"

namespace civp {

// Dense univariate polynomial over Q; coeffs[i] multiplies t^i, no trailing
// zero coefficient is stored.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

  static UniPoly constant(const Rat& v) { return UniPoly({v}); }
  static UniPoly monomial(const Rat& v, size_t deg) {
    std::vector<Rat> c(deg + 1, Rat(0));
    c[deg] = v;
    return UniPoly(std::move(c));
  }

  const std::vector<Rat>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Rat& leading() const { return c_.back(); }
  Rat coeff(size_t i) const { return i < c_.size() ? c_[i] : Rat(0); }

  Rat eval(const Rat& x) const {
    Rat acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) return UniPoly();
    std::vector<Rat> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i)
      d[i - 1] = c_[i] * Rat(static_cast<long>(i));
    return UniPoly(std::move(d));
  }

  UniPoly operator-() const {
    std::vector<Rat> d = c_;
    for (auto& x : d) x = -x;
    return UniPoly(std::move(d));
  }

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    std::vector<Rat> d(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) d[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) d[i] += b.c_[i];
    return UniPoly(std::move(d));
  }

  friend UniPoly operator-(const UniPoly& a, const UniPoly& b) {
    return a + (-b);
  }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly();
    std::vector<Rat> d(a.c_.size() + b.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) d[i + j] += a.c_[i] * b.c_[j];
    return UniPoly(std::move(d));
  }

  UniPoly scaled(const Rat& k) const {
    if (k.is_zero()) return UniPoly();
    std::vector<Rat> d = c_;
    for (auto& x : d) x *= k;
    return UniPoly(std::move(d));
  }

  // Exact division with remainder over Q.
  std::pair<UniPoly, UniPoly> divmod(const UniPoly& b) const {
    if (b.is_zero()) throw domain_error("polynomial division by zero");
    std::vector<Rat> rem = c_;
    std::vector<Rat> quot(
        c_.size() >= b.c_.size() ? c_.size() - b.c_.size() + 1 : 0, Rat(0));
    while (rem.size() >= b.c_.size()) {
      while (!rem.empty() && rem.back().is_zero()) rem.pop_back();
      if (rem.size() < b.c_.size()) break;
      Rat q = rem.back() / b.leading();
      size_t shift = rem.size() - b.c_.size();
      quot[shift] = q;
      for (size_t i = 0; i < b.c_.size(); ++i) rem[shift + i] -= q * b.c_[i];
      rem.pop_back();
    }
    return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
  }

  // Synthetic division by (t - a); requires a to be a root.
  UniPoly deflate_root(const Rat& a) const {
    if (c_.empty()) throw domain_error("deflating zero polynomial");
    std::vector<Rat> q(c_.size() - 1, Rat(0));
    Rat carry = c_.back();
    for (size_t i = c_.size() - 1; i-- > 0;) {
      q[i] = carry;
      carry = c_[i] + carry * a;
    }
    if (!carry.is_zero()) throw domain_error("deflate_root: not a root");
    return UniPoly(std::move(q));
  }

  // Scales to a primitive integer polynomial with the same sign behavior
  // (multiplied by a positive rational).
  UniPoly primitive_scaled() const {
    if (c_.empty()) return UniPoly();
    mpz_class den_lcm(1);
    for (const auto& x : c_) {
      mpz_class d = x.den();
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
      den_lcm = den_lcm / g * d;
    }
    mpz_class content(0);
    for (const auto& x : c_) {
      mpz_class n = x.num() * den_lcm / x.den();
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), n.get_mpz_t());
    }
    if (content == 0) content = 1;
    std::vector<Rat> d(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
      mpz_class scaled = c_[i].num() * den_lcm / c_[i].den() / content;
      d[i] = Rat(scaled);
    }
    return UniPoly(std::move(d));
  }

  MultiPoly to_multipoly(const std::string& var) const {
    MultiPoly p({var});
    for (size_t i = 0; i < c_.size(); ++i) p.add_term({uint32_t(i)}, c_[i]);
    return p;
  }

  static UniPoly from_multipoly(const MultiPoly& p) {
    if (p.vars().size() != 1)
      throw var_mismatch("from_multipoly needs univariate input");
    std::vector<Rat> c(p.degree_in(0) + 1, Rat(0));
    for (const auto& [e, k] : p.terms()) c[e[0]] = k;
    return UniPoly(std::move(c));
  }

  friend bool operator==(const UniPoly& a, const UniPoly& b) {
    return a.c_ == b.c_;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Rat> c_;
};

// gcd over Q, returned primitive with positive leading coefficient.
inline UniPoly unipoly_gcd(UniPoly a, UniPoly b) {
  a = a.primitive_scaled();
  b = b.primitive_scaled();
  while (!b.is_zero()) {
    UniPoly r = a.divmod(b).second.primitive_scaled();
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero() && a.leading().sign() < 0) a = (-a);
  return a;
}

// Square-free part p / gcd(p, p'), primitive, positive leading coefficient.
inline UniPoly square_free_part(const UniPoly& p) {
  if (p.is_zero() || p.degree() == 0) return p.primitive_scaled();
  UniPoly g = unipoly_gcd(p, p.derivative());
  if (g.degree() == 0) {
    UniPoly q = p.primitive_scaled();
    if (q.leading().sign() < 0) q = -q;
    return q;
  }
  auto [q, r] = p.divmod(g);
  if (!r.is_zero()) throw domain_error("square_free_part: inexact division");
  q = q.primitive_scaled();
  if (q.leading().sign() < 0) q = -q;
  return q;
}

}  // namespace civp
