#pragma once

#include <utility>
#include <vector>

#include "civp/interval.hpp"

namespace civp {

// Axis-aligned box: a closed rational interval per dimension.
struct Box {
  std::vector<Iv> dims;

  Box() = default;
  explicit Box(std::vector<Iv> d) : dims(std::move(d)) {}

  size_t dim() const { return dims.size(); }
  const Iv& operator[](size_t i) const { return dims[i]; }
  Iv& operator[](size_t i) { return dims[i]; }

  bool contains(const std::vector<Rat>& pt) const {
    if (pt.size() != dims.size()) return false;
    for (size_t i = 0; i < dims.size(); ++i)
      if (!dims[i].contains(pt[i])) return false;
    return true;
  }

  bool contains(const Box& o) const {
    if (o.dim() != dim()) return false;
    for (size_t i = 0; i < dims.size(); ++i)
      if (!dims[i].contains(o.dims[i])) return false;
    return true;
  }

  std::vector<Rat> center() const {
    std::vector<Rat> c;
    c.reserve(dims.size());
    for (const auto& d : dims) c.push_back(d.mid());
    return c;
  }

  // Widest axis; ties break to the lowest index.
  size_t widest_axis() const {
    size_t best = 0;
    Rat w = dims[0].width();
    for (size_t i = 1; i < dims.size(); ++i) {
      Rat wi = dims[i].width();
      if (w < wi) {
        w = wi;
        best = i;
      }
    }
    return best;
  }

  Rat max_width() const {
    Rat w(0);
    for (const auto& d : dims) w = rat_max(w, d.width());
    return w;
  }

  std::pair<Box, Box> split(size_t axis) const {
    Rat m = dims[axis].mid();
    Box a = *this, b = *this;
    a.dims[axis] = Iv(dims[axis].lo, m);
    b.dims[axis] = Iv(m, dims[axis].hi);
    return {std::move(a), std::move(b)};
  }

  Box inflated(const Rat& pad) const {
    Box b = *this;
    for (auto& d : b.dims) d = Iv(d.lo - pad, d.hi + pad);
    return b;
  }

  // sup-norm bound of the box: max_i max(|lo_i|, |hi_i|).
  Rat sup_norm() const {
    Rat m(0);
    for (const auto& d : dims) m = rat_max(m, d.mag());
    return m;
  }

  Box product(const Iv& extra) const {
    Box b = *this;
    b.dims.push_back(extra);
    return b;
  }

  friend bool operator==(const Box& a, const Box& b) { return a.dims == b.dims; }
};

inline Box box_hull(const Box& a, const Box& b) {
  Box r = a;
  for (size_t i = 0; i < r.dims.size(); ++i) r.dims[i] = iv_hull(a[i], b[i]);
  return r;
}

}  // namespace civp
