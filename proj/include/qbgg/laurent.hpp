#pragma once

#include <map>
#include <string>

#include "qbgg/rational.hpp"

namespace qbgg {

// Laurent polynomial in one formal parameter t with Rational coefficients.
// Zero coefficients are never stored. Used for renormalized t->inf limits.
class Laurent {
 public:
  Laurent() = default;
  Laurent(long n) { set(0, Rational(n)); }           // NOLINT
  Laurent(const Rational& c) { set(0, c); }          // NOLINT
  static Laurent t(int e = 1) {
    Laurent out;
    out.set(e, Rational(1));
    return out;
  }
  static Laurent monomial(int e, const Rational& c) {
    Laurent out;
    out.set(e, c);
    return out;
  }

  bool is_zero() const { return c_.empty(); }
  const std::map<int, Rational>& coeffs() const { return c_; }
  Rational coeff(int e) const {
    auto it = c_.find(e);
    return it == c_.end() ? Rational(0) : it->second;
  }
  int min_exp() const { return c_.empty() ? 0 : c_.begin()->first; }
  int max_exp() const { return c_.empty() ? 0 : c_.rbegin()->first; }
  bool has_positive_exponent() const { return !c_.empty() && c_.rbegin()->first > 0; }

  // The t->inf limit. Requires all exponents <= 0; otherwise the limit
  // diverges and this throws.
  Rational limit_at_infinity() const {
    if (has_positive_exponent()) throw std::domain_error("Laurent: divergent limit");
    return coeff(0);
  }

  Laurent operator-() const {
    Laurent out;
    for (auto& [e, c] : c_) out.c_.emplace(e, -c);
    return out;
  }
  Laurent& operator+=(const Laurent& o) {
    for (auto& [e, c] : o.c_) set(e, coeff(e) + c);
    return *this;
  }
  Laurent& operator-=(const Laurent& o) {
    for (auto& [e, c] : o.c_) set(e, coeff(e) - c);
    return *this;
  }
  friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
  friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    Laurent out;
    for (auto& [ea, ca] : a.c_)
      for (auto& [eb, cb] : b.c_) out.set(ea + eb, out.coeff(ea + eb) + ca * cb);
    return out;
  }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

  friend bool operator==(const Laurent& a, const Laurent& b) { return a.c_ == b.c_; }

  std::string str() const;
  // JSON map {"exponent": "p/q", ...}
  std::string to_json() const;
  static Laurent from_json(const std::string& text);

 private:
  void set(int e, const Rational& c) {
    if (c.is_zero())
      c_.erase(e);
    else
      c_[e] = c;
  }
  std::map<int, Rational> c_;
};

}  // namespace qbgg
