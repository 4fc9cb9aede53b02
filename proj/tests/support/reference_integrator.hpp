#pragma once

// Test-only high-accuracy reference integrator: classical RK4 with adaptive
// step halving until two successive resolutions agree below the threshold.
// Never part of the certified path.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "civp/civp.hpp"

namespace civp_test {

struct DTerm {
  std::vector<uint32_t> expo;
  double coeff;
};

struct DPoly {
  std::vector<DTerm> terms;

  static DPoly from(const civp::MultiPoly& p) {
    DPoly d;
    for (const auto& [e, c] : p.terms()) d.terms.push_back({e, c.to_double()});
    return d;
  }

  double eval(const std::vector<double>& x) const {
    double acc = 0;
    for (const auto& t : terms) {
      double v = t.coeff;
      for (size_t i = 0; i < t.expo.size(); ++i)
        for (uint32_t k = 0; k < t.expo[i]; ++k) v *= x[i];
      acc += v;
    }
    return acc;
  }
};

class ReferenceIntegrator {
 public:
  explicit ReferenceIntegrator(const civp::PolyVec& f, double tol = 1e-9)
      : tol_(tol) {
    for (const auto& comp : f.comps) f_.push_back(DPoly::from(comp));
  }

  // State at time t0 + span, or empty when divergence/no convergence.
  std::vector<double> flow(std::vector<double> x0, double span,
                           bool* ok = nullptr) const {
    for (long steps = initial_steps(span);; steps *= 2) {
      std::vector<double> a = rk4(x0, span, steps);
      std::vector<double> b = rk4(x0, span, steps * 2);
      if (a.empty() || b.empty()) {
        if (steps >= 1L << 22) {
          if (ok) *ok = false;
          return {};
        }
        continue;
      }
      double diff = 0;
      for (size_t i = 0; i < a.size(); ++i)
        diff = std::max(diff, std::fabs(a[i] - b[i]));
      if (diff < tol_) {
        if (ok) *ok = true;
        return b;
      }
      if (steps >= 1L << 22) {
        if (ok) *ok = false;
        return {};
      }
    }
  }

  // Dense trajectory at num+1 equally spaced times covering [0, span].
  std::vector<std::vector<double>> trajectory(const std::vector<double>& x0,
                                              double span, int num,
                                              bool* ok = nullptr) const {
    std::vector<std::vector<double>> out;
    out.push_back(x0);
    std::vector<double> cur = x0;
    for (int i = 1; i <= num; ++i) {
      bool step_ok = false;
      cur = flow(cur, span / num, &step_ok);
      if (!step_ok) {
        if (ok) *ok = false;
        return {};
      }
      out.push_back(cur);
    }
    if (ok) *ok = true;
    return out;
  }

 private:
  static long initial_steps(double span) {
    return std::max(16L, static_cast<long>(std::ceil(span * 64)));
  }

  std::vector<double> deriv(const std::vector<double>& x) const {
    std::vector<double> d(f_.size());
    for (size_t i = 0; i < f_.size(); ++i) d[i] = f_[i].eval(x);
    return d;
  }

  std::vector<double> rk4(std::vector<double> x, double span,
                          long steps) const {
    double h = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      std::vector<double> k1 = deriv(x);
      std::vector<double> t2(x), t3(x), t4(x);
      for (size_t i = 0; i < x.size(); ++i) t2[i] += h / 2 * k1[i];
      std::vector<double> k2 = deriv(t2);
      for (size_t i = 0; i < x.size(); ++i) t3[i] += h / 2 * k2[i];
      std::vector<double> k3 = deriv(t3);
      for (size_t i = 0; i < x.size(); ++i) t4[i] += h * k3[i];
      std::vector<double> k4 = deriv(t4);
      for (size_t i = 0; i < x.size(); ++i) {
        x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (!std::isfinite(x[i]) || std::fabs(x[i]) > 1e12) return {};
      }
    }
    return x;
  }

  std::vector<DPoly> f_;
  double tol_;
};

inline double eval_poly_double(const civp::MultiPoly& p,
                               const std::vector<double>& x) {
  return DPoly::from(p).eval(x);
}

}  // namespace civp_test
