#include "qbgg/rational.hpp"

#include <ostream>

namespace qbgg {

Rational Rational::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
  auto slash = s.find('/');
  mpq_class v;
  if (slash == std::string::npos) {
    if (v.set_str(s, 10) != 0) throw std::invalid_argument("Rational::parse: bad integer '" + s + "'");
  } else {
    if (v.set_str(s, 10) != 0) throw std::invalid_argument("Rational::parse: bad rational '" + s + "'");
    if (v.get_den() == 0) throw std::domain_error("Rational::parse: zero denominator");
  }
  v.canonicalize();
  return Rational(v);
}

Rational Rational::inv() const {
  if (is_zero()) throw std::domain_error("Rational: inverse of zero");
  return Rational(mpq_class(1) / v_);
}

Rational Rational::pow(long e) const {
  if (e == 0) return Rational(1);
  if (is_zero()) {
    if (e < 0) throw std::domain_error("Rational: negative power of zero");
    return Rational(0);
  }
  mpz_class num, den;
  unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), a);
  mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), a);
  mpq_class out(num, den);
  out.canonicalize();
  if (e < 0) out = mpq_class(1) / out;
  return Rational(out);
}

std::string Rational::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational factorial(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

Rational binomial(unsigned long n, unsigned long k) {
  if (k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

}  // namespace qbgg
