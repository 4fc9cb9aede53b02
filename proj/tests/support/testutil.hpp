#pragma once

#include <random>
#include <string>
#include <vector>

#include "civp/civp.hpp"

namespace civp_test {

using civp::Box;
using civp::Iv;
using civp::MultiPoly;
using civp::Rat;

inline Rat rnd_rat(std::mt19937_64& rng, long num_range = 20,
                   long den_range = 8) {
  std::uniform_int_distribution<long> num(-num_range, num_range);
  std::uniform_int_distribution<long> den(1, den_range);
  return Rat(mpz_class(num(rng)), mpz_class(den(rng)));
}

inline Rat rnd_big_rat(std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> num(-1000000000000LL,
                                               1000000000000LL);
  std::uniform_int_distribution<long long> den(1, 1000000000LL);
  return Rat(mpz_class(static_cast<long>(num(rng) % 1000000007)),
             mpz_class(static_cast<long>(den(rng) % 999999937 + 1)));
}

inline MultiPoly rnd_poly(std::mt19937_64& rng,
                          const std::vector<std::string>& vars,
                          uint32_t max_deg, int terms) {
  MultiPoly p(vars);
  std::uniform_int_distribution<uint32_t> deg(0, max_deg);
  for (int i = 0; i < terms; ++i) {
    civp::Expo e(vars.size(), 0);
    uint32_t left = max_deg;
    for (size_t j = 0; j < vars.size(); ++j) {
      uint32_t d = deg(rng) % (left + 1);
      e[j] = d;
      left -= d;
    }
    p.add_term(e, rnd_rat(rng));
  }
  return p;
}

inline std::vector<Rat> rnd_point_in(std::mt19937_64& rng, const Box& box,
                                     int grid = 64) {
  std::uniform_int_distribution<int> pick(0, grid);
  std::vector<Rat> pt;
  for (const auto& d : box.dims) {
    Rat f(mpz_class(pick(rng)), mpz_class(grid));
    pt.push_back(d.lo + d.width() * f);
  }
  return pt;
}

// Exact maximum of p over an axis grid with `per_axis` cells.
inline Rat grid_max(const MultiPoly& p, const Box& box, int per_axis) {
  std::vector<int> idx(box.dim(), 0);
  Rat best;
  bool first = true;
  while (true) {
    std::vector<Rat> pt;
    for (size_t i = 0; i < box.dim(); ++i) {
      Rat f(mpz_class(idx[i]), mpz_class(per_axis));
      pt.push_back(box[i].lo + box[i].width() * f);
    }
    Rat v = p.eval(pt);
    if (first || best < v) best = v;
    first = false;
    size_t j = 0;
    while (j < idx.size() && ++idx[j] > per_axis) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  return best;
}

}  // namespace civp_test
