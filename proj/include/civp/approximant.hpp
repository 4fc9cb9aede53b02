#pragma once

#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "civp/oracle.hpp"
#include "civp/problem.hpp"

namespace civp {

// Candidate flow approximant: a polynomial vector in (x0..., t). `anchored`
// holds exactly when substituting t = t0 yields the identity on x0.
struct ApproximantPoly {
  PolyVec phi;      // over (x0 vars..., t)
  size_t ivp_dim = 0;
  Rat t0;
  bool anchored = false;

  size_t t_index() const { return ivp_dim; }

  // Symbolic anchoring check: phi(x0, t0) == x0 identically.
  bool check_anchored() const {
    for (size_t i = 0; i < ivp_dim; ++i) {
      MultiPoly at0 = phi[i].subst_value(t_index(), t0);
      MultiPoly ident = MultiPoly::variable(phi.vars(), i);
      if (!(at0 == ident)) return false;
    }
    return true;
  }
};

inline ApproximantPoly make_approximant(PolyVec phi, size_t dim, Rat t0) {
  ApproximantPoly a{std::move(phi), dim, std::move(t0), false};
  a.anchored = a.check_anchored();
  return a;
}

namespace detail {

inline MultiPoly truncate_t_degree(const MultiPoly& p, size_t t_idx,
                                   uint32_t cap) {
  MultiPoly r(p.vars());
  for (const auto& [e, c] : p.terms())
    if (e[t_idx] <= cap) r.add_term(e, c);
  return r;
}

}  // namespace detail

// k-th Picard iterate of the IVP, symbolically exact in (x0, t):
// phi_0 = x0, phi_{j+1} = x0 + int_{t0}^t f(phi_j(s)) ds. A nonnegative
// t_degree_cap truncates each iterate (the defect stays exactly computable;
// anchoring is unaffected since the cap never removes t-degree-0 terms).
inline ApproximantPoly picard_iterate(const CompactIVP& ivp, int k,
                                      int t_degree_cap = -1,
                                      size_t term_budget = 4000000) {
  if (k < 0) throw domain_error("picard_iterate requires k >= 0");
  std::vector<std::string> av;
  for (const auto& v : ivp.state_vars()) av.push_back(v + "0");
  av.push_back("t");
  const size_t n = ivp.dim();
  const size_t t_idx = n;

  std::vector<MultiPoly> cur;
  for (size_t i = 0; i < n; ++i) cur.push_back(MultiPoly::variable(av, i));
  for (int j = 0; j < k; ++j) {
    std::vector<MultiPoly> images = cur;  // x_i -> phi_i
    std::vector<MultiPoly> next;
    size_t terms = 0;
    for (size_t i = 0; i < n; ++i) {
      MultiPoly integrand = ivp.f[i].subst_full(images);
      MultiPoly comp = MultiPoly::variable(av, i) +
                       integrand.integral_from(t_idx, ivp.t0);
      if (t_degree_cap >= 0)
        comp = detail::truncate_t_degree(comp, t_idx,
                                         static_cast<uint32_t>(t_degree_cap));
      terms += comp.term_count();
      next.push_back(std::move(comp));
    }
    if (terms > term_budget)
      throw domain_error(
          "picard_iterate: coefficient/term budget exceeded (try a t-degree "
          "cap or round_coeffs)");
    cur = std::move(next);
  }
  return make_approximant(PolyVec(std::move(cur)), n, ivp.t0);
}

// Replaces every coefficient by the nearest rational with denominator
// 2^denom_bits (ties to even numerator). Anchoring-relevant terms (the
// identity part at t = t0) are preserved exactly.
inline ApproximantPoly round_coeffs(const ApproximantPoly& a,
                                    unsigned denom_bits) {
  if (denom_bits < 1) throw domain_error("round_coeffs requires denom_bits >= 1");
  std::vector<MultiPoly> comps;
  for (size_t i = 0; i < a.ivp_dim; ++i) {
    MultiPoly r(a.phi.vars());
    for (const auto& [e, c] : a.phi[i].terms()) {
      bool identity_part = a.anchored && e[a.t_index()] == 0;
      r.add_term(e, identity_part ? c : round_to_dyadic(c, denom_bits));
    }
    comps.push_back(std::move(r));
  }
  auto out = make_approximant(PolyVec(std::move(comps)), a.ivp_dim, a.t0);
  return out;
}

// Certified defect data: delta bounds sup ||dphi/dt - f(phi)|| over
// init box x [t0, T]; e0 bounds the initial mismatch ||phi(x0,t0) - x0||.
// The squared norm is never expanded symbolically; bounds are certified on
// the component vector (sum of squared component enclosures).
struct DefectReport {
  Rat delta;
  Rat e0;
  PolyVec defect;                        // d phi/dt - f(phi), componentwise
  SubdivisionWitness delta_witness;      // ||defect||^2 <= delta^2 on domain
  std::optional<PolyVec> init_diff;      // phi(., t0) - x0, if e0 > 0
  std::optional<SubdivisionWitness> e0_witness;
};

// The exact defect polynomial of an approximant.
inline PolyVec defect_polyvec(const ApproximantPoly& a, const CompactIVP& ivp) {
  if (a.ivp_dim != ivp.dim())
    throw var_mismatch("approximant dimension mismatch");
  std::vector<MultiPoly> images;
  for (size_t i = 0; i < a.ivp_dim; ++i) images.push_back(a.phi[i]);
  std::vector<MultiPoly> comps;
  for (size_t i = 0; i < a.ivp_dim; ++i) {
    MultiPoly dphidt = a.phi[i].partial_derivative(a.t_index());
    MultiPoly f_of_phi = ivp.f[i].subst_full(images);
    comps.push_back(dphidt - f_of_phi);
  }
  return PolyVec(std::move(comps));
}

inline Box approximant_domain(const ApproximantPoly& a, const CompactIVP& ivp) {
  return ivp.init.bounding_box.product(Iv(ivp.t0, ivp.T));
}

inline DefectReport defect_bounds(
    const ApproximantPoly& a, const CompactIVP& ivp,
    long oracle_budget = 200000,
    const std::optional<Rat>& stop_below_norm_sq = std::nullopt) {
  DefectReport rep;
  Box domain = approximant_domain(a, ivp);
  rep.defect = defect_polyvec(a, ivp);
  bool all_zero = true;
  for (const auto& c : rep.defect.comps) all_zero = all_zero && c.is_zero();
  if (all_zero) {
    rep.delta = Rat(0);
    auto res = prove_bound_with(NormSqEvaluator{&rep.defect}, domain, Rat(0),
                                BoundKind::UpperLe, 4);
    rep.delta_witness = std::move(res.witness);
  } else {
    MaxBound mb = approx_max_with(NormSqEvaluator{&rep.defect}, domain,
                                  rat_pow2(-240), rat_pow2(-6), oracle_budget,
                                  stop_below_norm_sq);
    rep.delta = rat_sqrt_upper(mb.upper, 80);
    rep.delta_witness = std::move(mb.witness);
    rep.delta_witness.bound = rep.delta * rep.delta;  // weaker, still valid
  }
  if (a.anchored) {
    rep.e0 = Rat(0);
  } else {
    std::vector<MultiPoly> comps;
    for (size_t i = 0; i < a.ivp_dim; ++i)
      comps.push_back(a.phi[i].subst_value(a.t_index(), ivp.t0) -
                      MultiPoly::variable(a.phi.vars(), i));
    rep.init_diff = PolyVec(std::move(comps));
    MaxBound mb = approx_max_with(NormSqEvaluator{&*rep.init_diff}, domain,
                                  rat_pow2(-240), rat_pow2(-8), oracle_budget);
    rep.e0 = rat_sqrt_upper(mb.upper, 80);
    auto w = std::move(mb.witness);
    w.bound = rep.e0 * rep.e0;
    rep.e0_witness = std::move(w);
  }
  return rep;
}

// ---- trajectory sample tables ------------------------------------------

struct SampleTable {
  size_t dim = 0;
  // row: (x0, t, x)
  struct Row {
    std::vector<Rat> x0;
    Rat t;
    std::vector<Rat> x;
  };
  std::vector<Row> rows;
};

// Reads the comma-separated trajectory table: header
// x0_1,...,x0_n,t,x_1,...,x_n then one sample per line, decimal or p/q
// literals.
inline SampleTable read_sample_table(const std::string& text, size_t dim) {
  SampleTable table;
  table.dim = dim;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      size_t b = cell.find_first_not_of(" \t\r");
      size_t e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (cells.size() != 2 * dim + 1)
      throw parse_error("sample table row needs " +
                            std::to_string(2 * dim + 1) + " columns",
                        lineno, 1);
    if (!header_seen) {
      header_seen = true;  // header row: names only
      continue;
    }
    SampleTable::Row row;
    for (size_t i = 0; i < dim; ++i) row.x0.push_back(rat_from_string(cells[i]));
    row.t = rat_from_string(cells[dim]);
    for (size_t i = 0; i < dim; ++i)
      row.x.push_back(rat_from_string(cells[dim + 1 + i]));
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw parse_error("sample table missing header row");
  return table;
}

// Rejects non-grid layouts: the (x0, t) points must form a full Cartesian
// product of distinct x0 tuples and distinct times.
inline void validate_grid(const SampleTable& table) {
  std::set<std::vector<std::string>> x0s;
  std::set<std::string> ts;
  std::set<std::pair<std::vector<std::string>, std::string>> pairs;
  for (const auto& r : table.rows) {
    std::vector<std::string> key;
    for (const auto& v : r.x0) key.push_back(v.str());
    x0s.insert(key);
    ts.insert(r.t.str());
    if (!pairs.emplace(key, r.t.str()).second)
      throw domain_error("sample table: duplicate (x0, t) sample");
  }
  if (pairs.size() != x0s.size() * ts.size())
    throw domain_error("sample table: samples do not form a grid");
}

namespace detail {

// Exact linear solve (Gaussian elimination over Q). Returns nullopt when the
// matrix is singular.
inline std::optional<std::vector<Rat>> solve_exact(
    std::vector<std::vector<Rat>> m, std::vector<Rat> rhs) {
  const size_t n = rhs.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      Rat factor = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<Rat> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = rhs[i] / m[i][i];
  return out;
}

inline std::vector<Expo> monomials_up_to(size_t nvars, uint32_t maxdeg) {
  std::vector<Expo> out;
  Expo cur(nvars, 0);
  // lexicographic enumeration of exponent tuples with total degree <= maxdeg
  std::function<void(size_t, uint32_t)> rec = [&](size_t pos, uint32_t left) {
    if (pos == nvars) {
      out.push_back(cur);
      return;
    }
    for (uint32_t e = 0; e <= left; ++e) {
      cur[pos] = e;
      rec(pos + 1, left - e);
    }
    cur[pos] = 0;
  };
  rec(0, maxdeg);
  return out;
}

}  // namespace detail

// Least-squares fit of the derivative field from trajectory samples, then
// symbolic time integration. Per component, q_i(x0, t) of total degree
// degree-1 is fitted exactly (rational normal equations) to f(x sampled),
// and phi_i = x0_i + int_{t0}^t q_i. The result is anchored by construction.
inline ApproximantPoly fit_from_samples(const SampleTable& samples,
                                        const CompactIVP& ivp, int degree) {
  if (degree < 1) throw domain_error("fit_from_samples requires degree >= 1");
  if (samples.dim != ivp.dim())
    throw var_mismatch("sample table dimension mismatch");
  if (samples.rows.size() < 2)
    throw domain_error(
        "fit_from_samples: rank-deficient design matrix (insufficient or "
        "degenerate grid)");
  validate_grid(samples);
  std::vector<std::string> av;
  for (const auto& v : ivp.state_vars()) av.push_back(v + "0");
  av.push_back("t");
  const size_t t_idx = ivp.dim();

  // Degenerate grid directions (a single distinct x0 tuple, or a single
  // sample time) make their monomial columns linearly dependent; restrict
  // the basis to the varying directions.
  std::set<std::string> x0_keys, t_keys;
  for (const auto& row : samples.rows) {
    std::string key;
    for (const auto& v : row.x0) key += v.str() + "|";
    x0_keys.insert(key);
    t_keys.insert(row.t.str());
  }
  auto basis = detail::monomials_up_to(av.size(),
                                       static_cast<uint32_t>(degree - 1));
  if (x0_keys.size() == 1 || t_keys.size() == 1) {
    std::vector<Expo> pruned;
    for (const auto& e : basis) {
      bool uses_x0 = false;
      for (size_t i = 0; i < t_idx; ++i) uses_x0 = uses_x0 || e[i] > 0;
      bool uses_t = e[t_idx] > 0;
      if (x0_keys.size() == 1 && uses_x0) continue;
      if (t_keys.size() == 1 && uses_t) continue;
      pruned.push_back(e);
    }
    basis = std::move(pruned);
  }
  const size_t m = basis.size();
  // design rows: basis evaluated at each (x0, t) sample
  std::vector<std::vector<Rat>> design;
  design.reserve(samples.rows.size());
  for (const auto& row : samples.rows) {
    std::vector<Rat> pt = row.x0;
    pt.push_back(row.t);
    std::vector<Rat> drow(m);
    for (size_t j = 0; j < m; ++j) {
      Rat v(1);
      for (size_t i = 0; i < pt.size(); ++i)
        if (basis[j][i] > 0) v *= rat_pow(pt[i], basis[j][i]);
      drow[j] = v;
    }
    design.push_back(std::move(drow));
  }

  // normal matrix A^T A (shared across components)
  std::vector<std::vector<Rat>> ata(m, std::vector<Rat>(m, Rat(0)));
  for (const auto& drow : design)
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i; j < m; ++j) ata[i][j] += drow[i] * drow[j];
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < i; ++j) ata[i][j] = ata[j][i];

  std::vector<MultiPoly> comps;
  for (size_t comp = 0; comp < ivp.dim(); ++comp) {
    std::vector<Rat> atb(m, Rat(0));
    for (size_t r = 0; r < samples.rows.size(); ++r) {
      Rat d = ivp.f[comp].eval(samples.rows[r].x);  // sampled derivative
      for (size_t j = 0; j < m; ++j) atb[j] += design[r][j] * d;
    }
    auto coeffs = detail::solve_exact(ata, atb);
    if (!coeffs)
      throw domain_error(
          "fit_from_samples: rank-deficient design matrix (insufficient or "
          "degenerate grid)");
    MultiPoly q(av);
    for (size_t j = 0; j < m; ++j) q.add_term(basis[j], (*coeffs)[j]);
    comps.push_back(MultiPoly::variable(av, comp) +
                    q.integral_from(t_idx, ivp.t0));
  }
  return make_approximant(PolyVec(std::move(comps)), ivp.dim(), ivp.t0);
}

}  // namespace civp
