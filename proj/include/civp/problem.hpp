#pragma once

#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "civp/oracle.hpp"
#include "civp/region.hpp"

namespace civp {

struct GoalErrorBound {
  Rat epsilon;
};
struct GoalSafety {
  OpenRegion region;
};
struct GoalLiveness {
  OpenRegion region;
};
struct GoalExistsUntil {
  Rat until;
};
struct GoalStepExist {
  Rat alpha;
  long steps = 1;
};

using Goal = std::variant<GoalErrorBound, GoalSafety, GoalLiveness,
                          GoalExistsUntil, GoalStepExist>;

inline const char* goal_kind_name(const Goal& g) {
  switch (g.index()) {
    case 0: return "error-bound";
    case 1: return "safety";
    case 2: return "liveness";
    case 3: return "exists-until";
    case 4: return "step-exist";
  }
  return "?";
}

struct Problem {
  CompactIVP ivp;
  Goal goal;
  std::optional<PolyVec> user_phi;  // over (x0 vars..., t)

  std::vector<std::string> approx_vars() const {
    std::vector<std::string> v;
    for (const auto& name : ivp.state_vars()) v.push_back(name + "0");
    v.push_back("t");
    return v;
  }
};

namespace detail {

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
        continue;
      }
      break;
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t s = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = src_.substr(s, pos_ - s);
      col_ += static_cast<int>(pos_ - s);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t s = pos_;
      bool dot = false;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              (src_[pos_] == '.' && !dot))) {
        dot = dot || src_[pos_] == '.';
        ++pos_;
      }
      tok_.kind = Token::Kind::Number;
      tok_.text = src_.substr(s, pos_ - s);
      col_ += static_cast<int>(pos_ - s);
      return;
    }
    // multi-char punct: <= >= '
    tok_.kind = Token::Kind::Punct;
    if ((c == '<' || c == '>') && pos_ + 1 < src_.size() &&
        src_[pos_ + 1] == '=') {
      tok_.text = src_.substr(pos_, 2);
      pos_ += 2;
      col_ += 2;
      return;
    }
    tok_.text = std::string(1, c);
    ++pos_;
    ++col_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class ProblemParser {
 public:
  explicit ProblemParser(const std::string& src) : lex_(src) {}

  Problem parse() {
    std::vector<std::string> vars;
    std::map<std::string, MultiPoly> odes;
    std::vector<std::pair<MultiPoly, ConstraintRel>> raw_constraints;
    std::optional<Rat> t0, T;
    std::optional<Goal> goal;
    std::map<std::string, MultiPoly> approx;
    bool seen_init = false;

    while (lex_.peek().kind != Token::Kind::End) {
      Token kw = expect_ident("statement keyword");
      if (kw.text == "var") {
        if (!vars.empty()) fail(kw, "duplicate var statement");
        vars.push_back(expect_ident("variable name").text);
        while (accept_punct(",")) {
          vars.push_back(expect_ident("variable name").text);
        }
        validate_vars(kw, vars);
      } else if (kw.text == "ode") {
        need_vars(kw, vars);
        Token name = expect_ident("ode variable");
        expect_punct("'");
        expect_punct("=");
        MultiPoly rhs = parse_expr(vars);
        if (odes.count(name.text)) fail(name, "duplicate ode for " + name.text);
        if (std::find(vars.begin(), vars.end(), name.text) == vars.end())
          fail(name, "ode for undeclared variable " + name.text);
        odes.emplace(name.text, std::move(rhs));
      } else if (kw.text == "init") {
        need_vars(kw, vars);
        seen_init = true;
        parse_ineq_chain(vars, raw_constraints, /*strict=*/false);
        while (accept_punct(","))
          parse_ineq_chain(vars, raw_constraints, /*strict=*/false);
      } else if (kw.text == "horizon") {
        expect_punct("[");
        t0 = parse_rat();
        expect_punct(",");
        T = parse_rat();
        expect_punct("]");
      } else if (kw.text == "goal") {
        need_vars(kw, vars);
        goal = parse_goal(vars);
      } else if (kw.text == "approx") {
        need_vars(kw, vars);
        Token name = expect_ident("approx component variable");
        if (std::find(vars.begin(), vars.end(), name.text) == vars.end())
          fail(name, "approx for undeclared variable " + name.text);
        expect_punct("=");
        std::vector<std::string> av;
        for (const auto& v : vars) av.push_back(v + "0");
        av.push_back("t");
        MultiPoly rhs = parse_expr(av);
        if (approx.count(name.text))
          fail(name, "duplicate approx for " + name.text);
        approx.emplace(name.text, std::move(rhs));
      } else {
        fail(kw, "unknown statement '" + kw.text + "'");
      }
      expect_punct(";");
    }

    Token end = lex_.peek();
    if (vars.empty()) fail(end, "missing var statement");
    if (!t0 || !T) fail(end, "missing horizon statement");
    if (*T < *t0) fail(end, "horizon requires t0 <= T");
    if (!seen_init) fail(end, "missing init statement");
    if (!goal) fail(end, "missing goal statement");
    std::vector<MultiPoly> comps;
    for (const auto& v : vars) {
      auto it = odes.find(v);
      if (it == odes.end()) fail(end, "missing ode for variable " + v);
      comps.push_back(it->second);
    }

    Problem prob;
    prob.ivp.f = PolyVec(std::move(comps));
    prob.ivp.t0 = *t0;
    prob.ivp.T = *T;
    prob.ivp.init = build_init_region(end, vars, raw_constraints);
    prob.goal = std::move(*goal);
    if (!approx.empty()) {
      std::vector<MultiPoly> phi;
      for (const auto& v : vars) {
        auto it = approx.find(v);
        if (it == approx.end())
          fail(end, "approx must cover every state variable (missing " + v +
                        ")");
        phi.push_back(it->second);
      }
      prob.user_phi = PolyVec(std::move(phi));
    }

    if (auto* eu = std::get_if<GoalExistsUntil>(&prob.goal)) {
      if (eu->until != prob.ivp.T)
        fail(end, "exists-until horizon must match the problem horizon");
    }
    return prob;
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& msg) {
    throw parse_error(msg, at.line, at.col);
  }

  void need_vars(const Token& at, const std::vector<std::string>& vars) {
    if (vars.empty()) fail(at, "var statement must come first");
  }

  void validate_vars(const Token& at, const std::vector<std::string>& vars) {
    for (size_t i = 0; i < vars.size(); ++i) {
      if (vars[i] == "t" || vars[i] == "g")
        fail(at, "variable name '" + vars[i] + "' is reserved");
      for (size_t j = 0; j < vars.size(); ++j)
        if (i != j && (vars[i] == vars[j] || vars[i] == vars[j] + "0"))
          fail(at, "variable names collide: " + vars[i]);
    }
  }

  Token expect_ident(const std::string& what) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::Ident) fail(t, "expected " + what);
    return t;
  }

  bool accept_punct(const std::string& s) {
    if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == s) {
      lex_.take();
      return true;
    }
    return false;
  }

  void expect_punct(const std::string& s) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::Punct || t.text != s)
      fail(t, "expected '" + s + "'");
  }

  Rat parse_rat() {
    bool neg = accept_punct("-");
    Token t = lex_.take();
    if (t.kind != Token::Kind::Number) fail(t, "expected rational literal");
    Rat r = rat_from_string(t.text);
    if (accept_punct("/")) {
      Token d = lex_.take();
      if (d.kind != Token::Kind::Number || d.text.find('.') != std::string::npos)
        fail(d, "expected integer denominator");
      Rat den = rat_from_string(d.text);
      if (den.is_zero()) fail(d, "zero denominator");
      r /= den;
    }
    return neg ? -r : r;
  }

  long parse_int() {
    bool neg = accept_punct("-");
    Token t = lex_.take();
    if (t.kind != Token::Kind::Number || t.text.find('.') != std::string::npos)
      fail(t, "expected integer literal");
    long v = std::stol(t.text);
    return neg ? -v : v;
  }

  // expr := term (("+"|"-") term)*
  MultiPoly parse_expr(const std::vector<std::string>& vars) {
    MultiPoly acc = parse_term(vars);
    while (true) {
      if (accept_punct("+")) {
        acc = acc + parse_term(vars);
      } else if (lex_.peek().kind == Token::Kind::Punct &&
                 lex_.peek().text == "-") {
        lex_.take();
        acc = acc - parse_term(vars);
      } else {
        return acc;
      }
    }
  }

  // term := factor (("*" factor) | ("/" factor-that-is-constant))*
  MultiPoly parse_term(const std::vector<std::string>& vars) {
    MultiPoly acc = parse_factor(vars);
    while (true) {
      if (accept_punct("*")) {
        acc = acc * parse_factor(vars);
      } else if (lex_.peek().kind == Token::Kind::Punct &&
                 lex_.peek().text == "/") {
        Token slash = lex_.take();
        MultiPoly d = parse_factor(vars);
        if (!d.is_constant() || d.constant_value().is_zero())
          fail(slash, "division only by nonzero constants");
        acc = acc.scaled(Rat(1) / d.constant_value());
      } else {
        return acc;
      }
    }
  }

  // factor := base ("^" uint)?
  MultiPoly parse_factor(const std::vector<std::string>& vars) {
    MultiPoly base = parse_base(vars);
    if (accept_punct("^")) {
      Token e = lex_.take();
      if (e.kind != Token::Kind::Number ||
          e.text.find('.') != std::string::npos)
        fail(e, "expected integer exponent");
      long n = std::stol(e.text);
      if (n < 0) fail(e, "negative exponent");
      return base.pow(static_cast<unsigned>(n));
    }
    return base;
  }

  MultiPoly parse_base(const std::vector<std::string>& vars) {
    Token t = lex_.take();
    if (t.kind == Token::Kind::Punct && t.text == "(") {
      MultiPoly e = parse_expr(vars);
      expect_punct(")");
      return e;
    }
    if (t.kind == Token::Kind::Punct && t.text == "-") {
      return -parse_factor(vars);
    }
    if (t.kind == Token::Kind::Number) {
      return MultiPoly::constant(vars, rat_from_string(t.text));
    }
    if (t.kind == Token::Kind::Ident) {
      auto it = std::find(vars.begin(), vars.end(), t.text);
      if (it == vars.end()) {
        if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "'")
          fail(t, "primed variable on right-hand side");
        fail(t, "unknown variable '" + t.text + "'");
      }
      return MultiPoly::variable(vars,
                                 static_cast<size_t>(it - vars.begin()));
    }
    fail(t, "expected expression");
  }

  // Chain of closed comparisons: expr (<=|>=|=) expr ((<=|>=|=) expr)*.
  void parse_ineq_chain(
      const std::vector<std::string>& vars,
      std::vector<std::pair<MultiPoly, ConstraintRel>>& out, bool strict) {
    (void)strict;
    MultiPoly lhs = parse_expr(vars);
    bool any = false;
    while (lex_.peek().kind == Token::Kind::Punct &&
           (lex_.peek().text == "<=" || lex_.peek().text == ">=" ||
            lex_.peek().text == "=")) {
      Token op = lex_.take();
      MultiPoly rhs = parse_expr(vars);
      if (op.text == "<=")
        out.emplace_back(rhs - lhs, ConstraintRel::Ge0);
      else if (op.text == ">=")
        out.emplace_back(lhs - rhs, ConstraintRel::Ge0);
      else
        out.emplace_back(lhs - rhs, ConstraintRel::Eq0);
      lhs = std::move(rhs);
      any = true;
    }
    if (!any)
      throw parse_error("expected comparison in init constraint",
                        lex_.peek().line, lex_.peek().col);
  }

  Goal parse_goal(const std::vector<std::string>& vars) {
    Token name = expect_ident("goal kind");
    std::string kind = name.text;
    // goal keywords may contain a hyphen (error-bound, exists-until, ...)
    while ((kind == "error" || kind == "exists" || kind == "step") &&
           lex_.peek().kind == Token::Kind::Punct &&
           lex_.peek().text == "-") {
      lex_.take();
      kind += "-" + expect_ident("goal kind").text;
    }
    if (kind == "error-bound") {
      Rat eps = parse_rat();
      if (eps.sign() <= 0) fail(name, "error-bound must be positive");
      return GoalErrorBound{eps};
    }
    if (kind == "safety") return GoalSafety{parse_region(vars, true)};
    if (kind == "liveness") return GoalLiveness{parse_region(vars, false)};
    if (kind == "exists-until") return GoalExistsUntil{parse_rat()};
    if (kind == "step-exist") {
      Token a = expect_ident("alpha");
      if (a.text != "alpha") fail(a, "expected alpha=<rat>");
      expect_punct("=");
      Rat alpha = parse_rat();
      if (alpha.sign() <= 0) fail(a, "alpha must be positive");
      Token n = expect_ident("N");
      if (n.text != "N") fail(n, "expected N=<int>");
      expect_punct("=");
      long steps = parse_int();
      if (steps < 1) fail(n, "N must be >= 1");
      return GoalStepExist{alpha, steps};
    }
    fail(name, "unknown goal kind '" + kind + "'");
  }

  // region := conj ("or" conj)* ; conj := atom (("and"|",") atom)*
  OpenRegion parse_region(const std::vector<std::string>& vars,
                          bool require_bounded) {
    std::vector<RegionNode> disjuncts{parse_region_conj(vars)};
    while (lex_.peek().kind == Token::Kind::Ident &&
           lex_.peek().text == "or") {
      lex_.take();
      disjuncts.push_back(parse_region_conj(vars));
    }
    OpenRegion r;
    r.root = disjuncts.size() == 1 ? std::move(disjuncts.front())
                                   : RegionNode::disj(std::move(disjuncts));
    if (require_bounded) r.declared_box = region_bounding_box(r.root, vars);
    return r;
  }

  RegionNode parse_region_conj(const std::vector<std::string>& vars) {
    std::vector<RegionNode> atoms;
    parse_region_atom(vars, atoms);
    while (true) {
      if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "and") {
        lex_.take();
      } else if (lex_.peek().kind == Token::Kind::Punct &&
                 lex_.peek().text == ",") {
        lex_.take();
      } else {
        break;
      }
      parse_region_atom(vars, atoms);
    }
    if (atoms.size() == 1) return std::move(atoms.front());
    return RegionNode::conj(std::move(atoms));
  }

  // atom := "(" region ")" | expr (("<"|">") expr)+
  void parse_region_atom(const std::vector<std::string>& vars,
                         std::vector<RegionNode>& out) {
    if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "(") {
      // Parenthesized subregion (it may contain and/or).
      lex_.take();
      std::vector<RegionNode> disjuncts{parse_region_conj(vars)};
      while (lex_.peek().kind == Token::Kind::Ident &&
             lex_.peek().text == "or") {
        lex_.take();
        disjuncts.push_back(parse_region_conj(vars));
      }
      expect_punct(")");
      out.push_back(disjuncts.size() == 1
                        ? std::move(disjuncts.front())
                        : RegionNode::disj(std::move(disjuncts)));
      return;
    }
    MultiPoly lhs = parse_expr(vars);
    bool any = false;
    while (lex_.peek().kind == Token::Kind::Punct &&
           (lex_.peek().text == "<" || lex_.peek().text == ">")) {
      Token op = lex_.take();
      MultiPoly rhs = parse_expr(vars);
      // normalize: a < b  ->  a-b < 0 ; a > b  ->  a-b > 0
      out.push_back(RegionNode::atom(lhs - rhs, op.text == ">"));
      lhs = std::move(rhs);
      any = true;
    }
    if (!any)
      throw parse_error("expected strict inequality in region",
                        lex_.peek().line, lex_.peek().col);
  }

  // Reads a per-variable bounding box off direct strict bounds; every
  // disjunct must bound every variable on both sides.
  Box region_bounding_box(const RegionNode& node,
                          const std::vector<std::string>& vars) {
    std::vector<const RegionNode*> disjuncts;
    if (node.kind == RegionNode::Kind::Or) {
      for (const auto& k : node.kids) disjuncts.push_back(&k);
    } else {
      disjuncts.push_back(&node);
    }
    std::optional<Box> hull;
    for (const RegionNode* d : disjuncts) {
      std::vector<std::optional<Rat>> lo(vars.size()), hi(vars.size());
      std::vector<const RegionNode*> atoms;
      collect_atoms(*d, atoms);
      for (const RegionNode* a : atoms) {
        auto direct = direct_bound(a->p, a->greater);
        if (!direct) continue;
        auto [idx, is_lower, val] = *direct;
        if (is_lower) {
          if (!lo[idx] || *lo[idx] < val) lo[idx] = val;
        } else {
          if (!hi[idx] || val < *hi[idx]) hi[idx] = val;
        }
      }
      std::vector<Iv> dims;
      for (size_t i = 0; i < vars.size(); ++i) {
        if (!lo[i] || !hi[i] || *hi[i] < *lo[i])
          throw parse_error(
              "bounded safety region needs two-sided strict bounds on '" +
              vars[i] + "' in every disjunct");
        dims.emplace_back(*lo[i], *hi[i]);
      }
      Box b{dims};
      hull = hull ? box_hull(*hull, b) : b;
    }
    return *hull;
  }

  static void collect_atoms(const RegionNode& n,
                            std::vector<const RegionNode*>& out) {
    if (n.kind == RegionNode::Kind::Atom) {
      out.push_back(&n);
      return;
    }
    if (n.kind == RegionNode::Kind::And)
      for (const auto& k : n.kids) collect_atoms(k, out);
    // atoms under a nested Or do not bound the conjunct; skip them
  }

  // Recognizes p ~ 0 as a direct variable bound c*x_i + d ~ 0; returns
  // (index, is_lower_bound, bound value).
  static std::optional<std::tuple<size_t, bool, Rat>> direct_bound(
      const MultiPoly& p, bool greater) {
    size_t var_idx = SIZE_MAX;
    Rat coeff, offset(0);
    for (const auto& [e, c] : p.terms()) {
      uint32_t deg = 0;
      size_t idx = SIZE_MAX;
      for (size_t i = 0; i < e.size(); ++i) {
        deg += e[i];
        if (e[i] > 0) idx = i;
      }
      if (deg == 0) {
        offset = c;
      } else if (deg == 1) {
        if (var_idx != SIZE_MAX && var_idx != idx) return std::nullopt;
        var_idx = idx;
        coeff = c;
      } else {
        return std::nullopt;
      }
    }
    if (var_idx == SIZE_MAX || coeff.is_zero()) return std::nullopt;
    Rat bound = -offset / coeff;
    bool pos = coeff.sign() > 0;
    // c*x + d > 0 : lower bound if c > 0; c*x + d < 0 : lower if c < 0.
    bool is_lower = greater == pos;
    return std::make_tuple(var_idx, is_lower, bound);
  }

  // Splits direct variable bounds into the bounding box; everything else
  // stays as a semialgebraic constraint. Rejects unbounded or empty regions.
  InitRegion build_init_region(
      const Token& at, const std::vector<std::string>& vars,
      const std::vector<std::pair<MultiPoly, ConstraintRel>>& raw) {
    std::vector<std::optional<Rat>> lo(vars.size()), hi(vars.size());
    std::vector<Constraint> rest;
    for (const auto& [p, rel] : raw) {
      bool greater = rel != ConstraintRel::Le0;
      MultiPoly q = rel == ConstraintRel::Le0 ? -p : p;
      auto direct = direct_bound(q, /*greater=*/true);
      if (direct && rel != ConstraintRel::Eq0) {
        auto [idx, is_lower, val] = *direct;
        (void)greater;
        if (is_lower) {
          if (!lo[idx] || *lo[idx] < val) lo[idx] = val;
        } else {
          if (!hi[idx] || val < *hi[idx]) hi[idx] = val;
        }
        continue;
      }
      if (direct && rel == ConstraintRel::Eq0) {
        auto [idx, is_lower, val] = *direct;
        (void)is_lower;
        if (!lo[idx] || *lo[idx] < val) lo[idx] = val;
        if (!hi[idx] || val < *hi[idx]) hi[idx] = val;
        continue;
      }
      rest.push_back(Constraint{p, rel});
    }
    std::vector<Iv> dims;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (!lo[i] || !hi[i])
        fail(at, "init must bound variable '" + vars[i] +
                     "' on both sides (box-anchored regions)");
      if (*hi[i] < *lo[i]) fail(at, "empty init region (bounds cross)");
      dims.emplace_back(*lo[i], *hi[i]);
    }
    InitRegion region;
    region.bounding_box = Box{dims};
    region.constraints = std::move(rest);
    if (!init_region_nonempty(region))
      fail(at, "empty init region (no satisfying point found)");
    return region;
  }

  static bool init_region_nonempty(const InitRegion& region) {
    std::deque<Box> queue{region.bounding_box};
    for (int budget = 0; budget < 512 && !queue.empty(); ++budget) {
      Box b = std::move(queue.front());
      queue.pop_front();
      if (region.contains(b.center())) return true;
      // prune boxes a constraint certifiably excludes
      bool excluded = false;
      for (const auto& c : region.constraints) {
        Iv enc = interval_eval(c.p, b);
        if ((c.rel == ConstraintRel::Ge0 && enc.hi.sign() < 0) ||
            (c.rel == ConstraintRel::Le0 && enc.lo.sign() > 0) ||
            (c.rel == ConstraintRel::Eq0 &&
             (enc.hi.sign() < 0 || enc.lo.sign() > 0))) {
          excluded = true;
          break;
        }
      }
      if (excluded || b.max_width().is_zero()) continue;
      auto [l, r] = b.split(b.widest_axis());
      queue.push_back(std::move(l));
      queue.push_back(std::move(r));
    }
    return false;
  }

  Lexer lex_;
};

inline std::string region_to_string(const RegionNode& n, bool parenthesize) {
  std::ostringstream os;
  switch (n.kind) {
    case RegionNode::Kind::Atom:
      os << n.p.str() << (n.greater ? " > 0" : " < 0");
      break;
    case RegionNode::Kind::And: {
      if (parenthesize) os << "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) os << " and ";
        os << region_to_string(n.kids[i], true);
      }
      if (parenthesize) os << ")";
      break;
    }
    case RegionNode::Kind::Or: {
      if (parenthesize) os << "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) os << " or ";
        os << region_to_string(n.kids[i], true);
      }
      if (parenthesize) os << ")";
      break;
    }
  }
  return os.str();
}

}  // namespace detail

inline Problem parse_problem(const std::string& text) {
  return detail::ProblemParser(text).parse();
}

// Canonical serialization; parse(canonical_problem_text(p)) reproduces the
// same canonical text.
inline std::string canonical_problem_text(const Problem& prob) {
  std::ostringstream os;
  const auto& vars = prob.ivp.state_vars();
  os << "var ";
  for (size_t i = 0; i < vars.size(); ++i) os << (i ? ", " : "") << vars[i];
  os << ";\n";
  for (size_t i = 0; i < vars.size(); ++i)
    os << "ode " << vars[i] << "' = " << prob.ivp.f[i].str() << ";\n";
  os << "init ";
  bool first = true;
  for (size_t i = 0; i < vars.size(); ++i) {
    const Iv& d = prob.ivp.init.bounding_box[i];
    if (!first) os << ", ";
    first = false;
    if (d.is_point()) {
      os << vars[i] << " = " << d.lo.str();
    } else {
      os << d.lo.str() << " <= " << vars[i] << ", " << vars[i]
         << " <= " << d.hi.str();
    }
  }
  for (const auto& c : prob.ivp.init.constraints) {
    os << ", " << c.p.str();
    switch (c.rel) {
      case ConstraintRel::Ge0: os << " >= 0"; break;
      case ConstraintRel::Le0: os << " <= 0"; break;
      case ConstraintRel::Eq0: os << " = 0"; break;
    }
  }
  os << ";\n";
  os << "horizon [" << prob.ivp.t0.str() << ", " << prob.ivp.T.str() << "];\n";
  os << "goal ";
  if (const auto* g = std::get_if<GoalErrorBound>(&prob.goal)) {
    os << "error-bound " << g->epsilon.str();
  } else if (const auto* g = std::get_if<GoalSafety>(&prob.goal)) {
    os << "safety " << detail::region_to_string(g->region.root, false);
  } else if (const auto* g = std::get_if<GoalLiveness>(&prob.goal)) {
    os << "liveness " << detail::region_to_string(g->region.root, false);
  } else if (const auto* g = std::get_if<GoalExistsUntil>(&prob.goal)) {
    os << "exists-until " << g->until.str();
  } else if (const auto* g = std::get_if<GoalStepExist>(&prob.goal)) {
    os << "step-exist alpha=" << g->alpha.str() << " N=" << g->steps;
  }
  os << ";\n";
  if (prob.user_phi) {
    for (size_t i = 0; i < vars.size(); ++i)
      os << "approx " << vars[i] << " = " << (*prob.user_phi)[i].str()
         << ";\n";
  }
  return os.str();
}

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string problem_hash(const Problem& prob) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(canonical_problem_text(prob))));
  return buf;
}

}  // namespace civp
