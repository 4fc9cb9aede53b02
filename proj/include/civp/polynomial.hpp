#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "civp/box.hpp"
#include "civp/rational.hpp"

namespace civp {

using Expo = std::vector<uint32_t>;

// Graded lexicographic: lower total degree first, then lexicographic.
struct GrlexLess {
  bool operator()(const Expo& a, const Expo& b) const {
    uint64_t da = 0, db = 0;
    for (auto e : a) da += e;
    for (auto e : b) db += e;
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

struct var_mismatch : domain_error {
  using domain_error::domain_error;
};

// Multivariate polynomial with exact rational coefficients over a fixed,
// ordered variable context. No zero coefficients are ever stored.
class MultiPoly {
 public:
  using TermMap = std::map<Expo, Rat, GrlexLess>;

  MultiPoly() = default;
  explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static MultiPoly constant(std::vector<std::string> vars, const Rat& c) {
    MultiPoly p(std::move(vars));
    if (!c.is_zero()) p.terms_[Expo(p.vars_.size(), 0)] = c;
    return p;
  }

  static MultiPoly variable(std::vector<std::string> vars, size_t idx) {
    MultiPoly p(std::move(vars));
    Expo e(p.vars_.size(), 0);
    e.at(idx) = 1;
    p.terms_[e] = Rat(1);
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  bool is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && total_degree() == 0;
  }

  Rat constant_value() const {
    if (terms_.empty()) return Rat(0);
    return terms_.begin()->second;
  }

  uint32_t total_degree() const {
    uint32_t d = 0;
    for (const auto& [e, c] : terms_) {
      uint32_t s = 0;
      for (auto x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  uint32_t degree_in(size_t idx) const {
    uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[idx]);
    return d;
  }

  void add_term(const Expo& e, const Rat& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  MultiPoly operator-() const {
    MultiPoly r(vars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_vars(b);
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }

  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_vars(b);
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_vars(b);
    MultiPoly r(a.vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Expo e(ea.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  MultiPoly scaled(const Rat& c) const {
    MultiPoly r(vars_);
    if (c.is_zero()) return r;
    for (const auto& [e, k] : terms_) r.terms_[e] = k * c;
    return r;
  }

  MultiPoly pow(unsigned n) const {
    MultiPoly r = constant(vars_, Rat(1));
    MultiPoly base = *this;
    while (n > 0) {
      if (n & 1u) r = r * base;
      base = (n >>= 1) ? base * base : base;
    }
    return r;
  }

  Rat eval(const std::vector<Rat>& pt) const {
    if (pt.size() != vars_.size())
      throw var_mismatch("eval point dimension mismatch");
    // per-variable power cache
    std::vector<std::vector<Rat>> pows(pt.size());
    for (size_t i = 0; i < pt.size(); ++i) pows[i].push_back(Rat(1));
    Rat acc(0);
    for (const auto& [e, c] : terms_) {
      Rat t = c;
      for (size_t i = 0; i < e.size(); ++i) {
        while (pows[i].size() <= e[i]) pows[i].push_back(pows[i].back() * pt[i]);
        if (e[i] > 0) t *= pows[i][e[i]];
      }
      acc += t;
    }
    return acc;
  }

  MultiPoly partial_derivative(size_t idx) const {
    MultiPoly r(vars_);
    for (const auto& [e, c] : terms_) {
      if (e[idx] == 0) continue;
      Expo d = e;
      d[idx] -= 1;
      r.add_term(d, c * Rat(static_cast<long>(e[idx])));
    }
    return r;
  }

  // Antiderivative in variable idx (constant of integration 0).
  MultiPoly antiderivative(size_t idx) const {
    MultiPoly r(vars_);
    for (const auto& [e, c] : terms_) {
      Expo d = e;
      d[idx] += 1;
      r.add_term(d, c / Rat(static_cast<long>(d[idx])));
    }
    return r;
  }

  // The polynomial antiderivative in variable idx vanishing at idx = t0.
  MultiPoly integral_from(size_t idx, const Rat& t0) const {
    MultiPoly anti = antiderivative(idx);
    return anti - anti.subst_value(idx, t0);
  }

  // Substitutes a rational value for one variable; same variable context
  // (result has degree 0 in idx).
  MultiPoly subst_value(size_t idx, const Rat& value) const {
    MultiPoly r(vars_);
    for (const auto& [e, c] : terms_) {
      Expo d = e;
      d[idx] = 0;
      r.add_term(d, e[idx] ? c * rat_pow(value, e[idx]) : c);
    }
    return r;
  }

  // Substitutes a value and removes the variable from the context.
  MultiPoly subst_value_drop(size_t idx, const Rat& value) const {
    std::vector<std::string> nv;
    for (size_t i = 0; i < vars_.size(); ++i)
      if (i != idx) nv.push_back(vars_[i]);
    MultiPoly r(std::move(nv));
    for (const auto& [e, c] : terms_) {
      Expo d;
      d.reserve(e.size() - 1);
      for (size_t i = 0; i < e.size(); ++i)
        if (i != idx) d.push_back(e[i]);
      r.add_term(d, e[idx] ? c * rat_pow(value, e[idx]) : c);
    }
    return r;
  }

  // Full substitution: every variable of *this is replaced by images[i], all
  // images over one shared context. Exact.
  MultiPoly subst_full(const std::vector<MultiPoly>& images) const {
    if (images.size() != vars_.size())
      throw var_mismatch("subst_full needs one image per variable");
    const std::vector<std::string>& nv = images.empty()
                                             ? std::vector<std::string>{}
                                             : images.front().vars();
    for (const auto& img : images) img.check_same_vars(images.front());
    MultiPoly r(nv);
    for (const auto& [e, c] : terms_) {
      MultiPoly t = MultiPoly::constant(nv, c);
      for (size_t i = 0; i < e.size(); ++i)
        if (e[i] > 0) t = t * images[i].pow(e[i]);
      r = r + t;
    }
    return r;
  }

  // Substitutes polynomial b for the named variable; remaining variables of
  // *this must exist in b's context.
  MultiPoly compose(const std::string& var, const MultiPoly& b) const {
    std::vector<MultiPoly> images;
    images.reserve(vars_.size());
    for (const auto& v : vars_) {
      if (v == var) {
        images.push_back(b);
        continue;
      }
      auto it = std::find(b.vars().begin(), b.vars().end(), v);
      if (it == b.vars().end())
        throw var_mismatch("compose: variable '" + v +
                           "' missing from substitution context");
      images.push_back(MultiPoly::variable(
          b.vars(), static_cast<size_t>(it - b.vars().begin())));
    }
    return subst_full(images);
  }

  // Renames the variable context (exponents untouched).
  MultiPoly with_vars(std::vector<std::string> nv) const {
    if (nv.size() != vars_.size())
      throw var_mismatch("with_vars arity mismatch");
    MultiPoly r(std::move(nv));
    r.terms_ = terms_;
    return r;
  }

  // Canonical expression text in graded-lex term order.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      Rat coeff = c;
      if (first) {
        if (coeff.sign() < 0) {
          os << "-";
          coeff = -coeff;
        }
      } else {
        os << (coeff.sign() < 0 ? " - " : " + ");
        if (coeff.sign() < 0) coeff = -coeff;
      }
      first = false;
      bool any_var = false;
      for (auto x : e) any_var = any_var || x > 0;
      if (!any_var) {
        os << coeff.str();
        continue;
      }
      bool printed = false;
      if (coeff != Rat(1)) {
        os << coeff.str();
        printed = true;
      }
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (printed) os << "*";
        os << vars_[i];
        if (e[i] > 1) os << "^" << e[i];
        printed = true;
      }
    }
    return os.str();
  }

  void check_same_vars(const MultiPoly& o) const {
    if (vars_ != o.vars_)
      throw var_mismatch("polynomial variable-context mismatch");
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  std::vector<std::string> vars_;
  TermMap terms_;
};

// Vector of polynomials over one shared variable context.
struct PolyVec {
  std::vector<MultiPoly> comps;

  PolyVec() = default;
  explicit PolyVec(std::vector<MultiPoly> c) : comps(std::move(c)) {
    if (comps.empty()) throw domain_error("PolyVec must be nonempty");
    for (const auto& p : comps) p.check_same_vars(comps.front());
  }

  size_t size() const { return comps.size(); }
  const MultiPoly& operator[](size_t i) const { return comps[i]; }
  const std::vector<std::string>& vars() const { return comps.front().vars(); }

  // Sum of squared components (the ||.||^2 polynomial).
  MultiPoly norm_sq() const {
    MultiPoly acc(comps.front().vars());
    for (const auto& p : comps) acc = acc + p * p;
    return acc;
  }

  friend bool operator==(const PolyVec& a, const PolyVec& b) {
    return a.comps == b.comps;
  }
};

}  // namespace civp
