#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace civp {

struct parse_error : std::runtime_error {
  int line = 0;
  int col = 0;
  parse_error(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
  explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact rational. Always canonical: reduced, denominator > 0.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}            // NOLINT(google-explicit-constructor)
  Rat(long n) : v_(n) {}           // NOLINT(google-explicit-constructor)
  Rat(long long n) : v_(static_cast<long>(n)) {}  // NOLINT
  Rat(const mpz_class& n) : v_(n) {}              // NOLINT
  Rat(const mpz_class& num, const mpz_class& den) : v_(num, den) {
    if (den == 0) throw domain_error("rational with zero denominator");
    v_.canonicalize();
  }
  explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rat operator-() const { return Rat(mpq_class(-v_), already_canonical{}); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw domain_error("rational division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  // Canonical text: "p" for integers, "p/q" otherwise.
  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  double to_double() const { return v_.get_d(); }

  size_t bit_size() const {
    return mpz_sizeinbase(v_.get_num_mpz_t(), 2) +
           mpz_sizeinbase(v_.get_den_mpz_t(), 2);
  }

 private:
  struct already_canonical {};
  Rat(mpq_class q, already_canonical) : v_(std::move(q)) {}
  mpq_class v_;
};

inline Rat rat_abs(const Rat& a) { return a.sign() < 0 ? -a : a; }
inline const Rat& rat_min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline Rat rat_pow(const Rat& a, unsigned e) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), a.num().get_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), a.den().get_mpz_t(), e);
  return Rat(n, d);
}

inline mpz_class pow2z(unsigned bits) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
  return r;
}

// 2^-bits as a rational.
inline Rat rat_pow2(int bits) {
  if (bits >= 0) return Rat(pow2z(static_cast<unsigned>(bits)));
  return Rat(mpz_class(1), pow2z(static_cast<unsigned>(-bits)));
}

inline mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline mpz_class rat_floor(const Rat& a) { return floor_div(a.num(), a.den()); }
inline mpz_class rat_ceil(const Rat& a) { return ceil_div(a.num(), a.den()); }

// Largest multiple of 2^-bits that is <= a.
inline Rat dyadic_floor(const Rat& a, unsigned bits) {
  mpz_class scaled = floor_div(a.num() * pow2z(bits), a.den());
  return Rat(scaled, pow2z(bits));
}

// Smallest multiple of 2^-bits that is >= a.
inline Rat dyadic_ceil(const Rat& a, unsigned bits) {
  mpz_class scaled = ceil_div(a.num() * pow2z(bits), a.den());
  return Rat(scaled, pow2z(bits));
}

// Upper bound s on sqrt(a) with s^2 >= a and s <= sqrt(a) + 2^-bits.
inline Rat rat_sqrt_upper(const Rat& a, unsigned bits) {
  if (a.sign() < 0) throw domain_error("sqrt of negative rational");
  if (a.is_zero()) return Rat(0);
  mpz_class scaled = ceil_div(a.num() * pow2z(2 * bits), a.den());
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), scaled.get_mpz_t());
  if (r * r < scaled) r += 1;
  return Rat(r, pow2z(bits));
}

// Lower bound s on sqrt(a) with s^2 <= a and s >= sqrt(a) - 2^-bits.
inline Rat rat_sqrt_lower(const Rat& a, unsigned bits) {
  if (a.sign() < 0) throw domain_error("sqrt of negative rational");
  if (a.is_zero()) return Rat(0);
  mpz_class scaled = floor_div(a.num() * pow2z(2 * bits), a.den());
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), scaled.get_mpz_t());
  return Rat(r, pow2z(bits));
}

// Nearest rational with denominator 2^bits; ties go to the even numerator.
inline Rat round_to_dyadic(const Rat& a, unsigned bits) {
  mpz_class two_num = a.num() * pow2z(bits + 1);
  mpz_class q = floor_div(two_num, a.den());  // floor(a * 2^(bits+1))
  mpz_class lo = floor_div(q, mpz_class(2));
  mpz_class hi = lo + 1;
  mpz_class den = pow2z(bits);
  // distance comparison: |a - lo/2^b| vs |hi/2^b - a|
  Rat dl = Rat(a.num(), a.den()) - Rat(lo, den);
  Rat dh = Rat(hi, den) - Rat(a.num(), a.den());
  if (dl < dh) return Rat(lo, den);
  if (dh < dl) return Rat(hi, den);
  return mpz_even_p(lo.get_mpz_t()) ? Rat(lo, den) : Rat(hi, den);
}

// Parses "p/q", integer, or decimal literal ("3.8125" -> 61/16 reduced).
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw parse_error("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
    mpz_class n, d;
    if (mpz_set_str(n.get_mpz_t(), ns.c_str(), 10) != 0 ||
        mpz_set_str(d.get_mpz_t(), ds.c_str(), 10) != 0)
      throw parse_error("bad rational literal: " + s);
    if (d == 0) throw parse_error("zero denominator in literal: " + s);
    return Rat(n, d);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (fp.empty()) throw parse_error("bad decimal literal: " + s);
    bool neg = !ip.empty() && ip[0] == '-';
    if (neg) ip = ip.substr(1);
    if (ip.empty()) ip = "0";
    for (char c : ip + fp)
      if (c < '0' || c > '9') throw parse_error("bad decimal literal: " + s);
    mpz_class n;
    if (mpz_set_str(n.get_mpz_t(), (ip + fp).c_str(), 10) != 0)
      throw parse_error("bad decimal literal: " + s);
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 10, fp.size());
    Rat r(n, d);
    return neg ? -r : r;
  }
  mpz_class n;
  if (mpz_set_str(n.get_mpz_t(), s.c_str(), 10) != 0)
    throw parse_error("bad integer literal: " + s);
  return Rat(n);
}

}  // namespace civp
