#pragma once

#include <vector>

#include "civp/rational.hpp"

namespace civp {

// Closed rational interval [lo, hi].
struct Iv {
  Rat lo, hi;

  Iv() = default;
  Iv(Rat point) : lo(point), hi(point) {}  // NOLINT(google-explicit-constructor)
  Iv(Rat lo_, Rat hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (hi < lo) throw domain_error("interval with hi < lo");
  }

  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / Rat(2); }
  Rat mag() const { return rat_max(rat_abs(lo), rat_abs(hi)); }
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  bool contains(const Iv& o) const { return lo <= o.lo && o.hi <= hi; }
  bool is_point() const { return lo == hi; }

  friend bool operator==(const Iv& a, const Iv& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

inline Iv iv_add(const Iv& a, const Iv& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Iv iv_sub(const Iv& a, const Iv& b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Iv iv_neg(const Iv& a) { return {-a.hi, -a.lo}; }

inline Iv iv_mul(const Iv& a, const Iv& b) {
  Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {rat_min(rat_min(p1, p2), rat_min(p3, p4)),
          rat_max(rat_max(p1, p2), rat_max(p3, p4))};
}

inline Iv iv_scale(const Iv& a, const Rat& c) {
  if (c.sign() >= 0) return {a.lo * c, a.hi * c};
  return {a.hi * c, a.lo * c};
}

// Exact range of x^e over the interval.
inline Iv iv_pow(const Iv& a, unsigned e) {
  if (e == 0) return Iv(Rat(1));
  if (e == 1) return a;
  Rat plo = rat_pow(a.lo, e), phi = rat_pow(a.hi, e);
  if (e % 2 == 1) return {plo, phi};
  if (a.lo.sign() >= 0) return {plo, phi};
  if (a.hi.sign() <= 0) return {phi, plo};
  return {Rat(0), rat_max(plo, phi)};
}

inline Iv iv_hull(const Iv& a, const Iv& b) {
  return {rat_min(a.lo, b.lo), rat_max(a.hi, b.hi)};
}

// Outward rounding guard against denominator blowup in long interval
// computations. Exactness is kept below the bit threshold; above it the
// endpoints move outward to dyadics, preserving soundness.
constexpr size_t kIvRoundThresholdBits = 512;
constexpr unsigned kIvRoundTargetBits = 256;

inline Iv iv_round_outward(const Iv& a) {
  Iv r = a;
  if (r.lo.bit_size() > kIvRoundThresholdBits)
    r.lo = dyadic_floor(r.lo, kIvRoundTargetBits);
  if (r.hi.bit_size() > kIvRoundThresholdBits)
    r.hi = dyadic_ceil(r.hi, kIvRoundTargetBits);
  return r;
}

}  // namespace civp
