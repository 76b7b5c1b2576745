#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbgg/laurent.hpp"
#include "qbgg/rational.hpp"

namespace qbgg::osc {

// Index set of oscillator pairs (a_p, abar_p). The label order is fixed at
// construction and defines the canonical monomial order.
class OscSpace {
 public:
  explicit OscSpace(std::vector<std::string> labels);
  int pairs() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int p) const { return labels_[p]; }
  const std::vector<std::string>& labels() const { return labels_; }
  // -1 when the label is absent.
  int find(const std::string& label) const;
  int index_of(const std::string& label) const;  // throws when absent
  bool same(const OscSpace& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

using SpacePtr = std::shared_ptr<const OscSpace>;
SpacePtr make_space(std::vector<std::string> labels);

inline void check_same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return;
  if (!a || !b || !a->same(*b)) throw std::invalid_argument("oscillator: mismatched spaces");
}

// Normal-ordered monomial: all creations left of all annihilations, each
// block sorted by pair index. Uniquely determined by the two exponent vectors.
struct Monomial {
  std::vector<uint32_t> cr, an;

  bool operator==(const Monomial&) const = default;
  auto operator<=>(const Monomial&) const = default;

  static Monomial one(int pairs) { return Monomial{std::vector<uint32_t>(pairs, 0), std::vector<uint32_t>(pairs, 0)}; }
  bool is_one() const;
  bool balanced() const { return cr == an; }
  uint32_t cr_degree() const;
  uint32_t an_degree() const;
};

namespace detail {

// a^q abar^s = sum_k k! C(q,k) C(s,k) abar^{s-k} a^{q-k}, independently per
// pair; this expands the cross product of one term of x with one term of y.
template <class R>
void mul_terms_into(const Monomial& x, const Monomial& y, const R& cxy, std::map<Monomial, R>& out) {
  const int n = static_cast<int>(x.cr.size());
  std::vector<int> hot;
  for (int p = 0; p < n; ++p)
    if (x.an[p] > 0 && y.cr[p] > 0) hot.push_back(p);

  Monomial base;
  base.cr.resize(n);
  base.an.resize(n);
  for (int p = 0; p < n; ++p) {
    base.cr[p] = x.cr[p] + y.cr[p];
    base.an[p] = x.an[p] + y.an[p];
  }
  if (hot.empty()) {
    auto [it, fresh] = out.try_emplace(base, cxy);
    if (!fresh) {
      it->second += cxy;
      if (it->second.is_zero()) out.erase(it);
    }
    return;
  }

  // Iterate contraction counts k_p in [0, min(x.an[p], y.cr[p])] per hot pair.
  std::vector<uint32_t> k(hot.size(), 0);
  while (true) {
    Rational w(1);
    Monomial m = base;
    for (size_t h = 0; h < hot.size(); ++h) {
      const int p = hot[h];
      const uint32_t kp = k[h];
      if (kp > 0) {
        w *= factorial(kp) * binomial(x.an[p], kp) * binomial(y.cr[p], kp);
        m.cr[p] -= kp;
        m.an[p] -= kp;
      }
    }
    R add = cxy * R(w);
    auto [it, fresh] = out.try_emplace(m, add);
    if (!fresh) {
      it->second += add;
      if (it->second.is_zero()) out.erase(it);
    }
    size_t h = 0;
    for (; h < hot.size(); ++h) {
      const int p = hot[h];
      if (k[h] < std::min(x.an[p], y.cr[p])) {
        ++k[h];
        break;
      }
      k[h] = 0;
    }
    if (h == hot.size()) break;
  }
}

}  // namespace detail

// Element of the oscillator algebra in normal-ordered canonical form, with
// coefficients in R (Rational, or Laurent for the renormalized limits).
// Equality of canonical forms is map equality.
template <class R>
class Poly {
 public:
  Poly() = default;
  explicit Poly(SpacePtr space) : space_(std::move(space)) {}

  static Poly zero(SpacePtr space) { return Poly(std::move(space)); }
  static Poly constant(SpacePtr space, const R& c) {
    Poly out(std::move(space));
    if (!c.is_zero()) out.terms_[Monomial::one(out.space_->pairs())] = c;
    return out;
  }
  static Poly generator(SpacePtr space, int pair, bool creation) {
    Poly out(space);
    Monomial m = Monomial::one(space->pairs());
    (creation ? m.cr : m.an)[pair] = 1;
    out.terms_[m] = R(1);
    return out;
  }
  static Poly monomial(SpacePtr space, Monomial m, const R& c) {
    Poly out(std::move(space));
    if (!c.is_zero()) out.terms_[std::move(m)] = c;
    return out;
  }

  const SpacePtr& space() const { return space_; }
  const std::map<Monomial, R>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  R coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? R(0) : it->second;
  }
  R constant_coeff() const { return coeff(Monomial::one(space_->pairs())); }

  void add_term(const Monomial& m, const R& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Poly operator-() const {
    Poly out(space_);
    for (auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
  }
  Poly& operator+=(const Poly& o) {
    check_same_space(space_, o.space_);
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_same_space(space_, o.space_);
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  Poly& scale(const R& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= c;
      if (it->second.is_zero())
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }
  friend Poly operator*(const R& c, Poly p) { return p.scale(c); }

  // The normal-ordered product in the algebra.
  friend Poly operator*(const Poly& a, const Poly& b) {
    check_same_space(a.space_, b.space_);
    Poly out(a.space_);
    for (auto& [mx, cx] : a.terms_)
      for (auto& [my, cy] : b.terms_) detail::mul_terms_into(mx, my, cx * cy, out.terms_);
    return out;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly pow(uint32_t e) const {
    Poly out = constant(space_, R(1));
    for (uint32_t i = 0; i < e; ++i) out = out * *this;
    return out;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    check_same_space(a.space_, b.space_);
    return a.terms_ == b.terms_;
  }

  uint32_t max_an_degree() const {
    uint32_t d = 0;
    for (auto& [m, c] : terms_) d = std::max(d, m.an_degree());
    return d;
  }

 private:
  SpacePtr space_;
  std::map<Monomial, R> terms_;
};

using RPoly = Poly<Rational>;
using LPoly = Poly<Laurent>;

// --- generator substitutions ------------------------------------------------

struct GenRef {
  int pair = 0;
  bool creation = false;
};

// Image of one generator: a finite linear combination of target generators.
struct GenImage {
  std::vector<std::pair<Rational, GenRef>> terms;
};

// A linear-in-generators algebra map between oscillator spaces. Applying it
// requires the map to preserve all canonical commutators.
struct Substitution {
  SpacePtr from, to;
  std::vector<GenImage> cr_img, an_img;  // indexed by pair of `from`

  static Substitution identity(const SpacePtr& s);
  // Identity on every pair except those listed: particle-hole
  // abar_p -> -a_p, a_p -> abar_p on the flipped pairs.
  static Substitution particle_hole(const SpacePtr& s, const std::vector<int>& flipped);
  // Relabel pairs into a (super)space: abar_p -> sign_p * abar_{map(p)},
  // a_p -> sign_p * a_{map(p)}.
  static Substitution relabel(const SpacePtr& from, const SpacePtr& to, const std::vector<int>& pair_map,
                              const std::vector<Rational>& sign);
  // Diagonal scaling abar_p -> s_p * abar_p, a_p -> a_p / s_p.
  static Substitution scaling(const SpacePtr& s, const std::vector<Rational>& factors);
};

// True when the substitution preserves all canonical commutators.
bool is_algebra_map(const Substitution& s);

template <class R>
Poly<R> substitute(const Poly<R>& x, const Substitution& s, bool check = true) {
  check_same_space(x.space(), s.from);
  if (check && !is_algebra_map(s)) throw std::invalid_argument("substitute_generators: not an automorphism");
  const int n = s.from->pairs();
  auto image_poly = [&](const GenImage& img) {
    Poly<R> out(s.to);
    for (auto& [c, g] : img.terms) {
      Poly<R> gen = Poly<R>::generator(s.to, g.pair, g.creation);
      out += R(c) * gen;
    }
    return out;
  };
  Poly<R> result(s.to);
  for (auto& [m, c] : x.terms()) {
    Poly<R> acc = Poly<R>::constant(s.to, c);
    for (int p = 0; p < n; ++p)
      if (m.cr[p] > 0) acc *= image_poly(s.cr_img[p]).pow(m.cr[p]);
    for (int p = 0; p < n; ++p)
      if (m.an[p] > 0) acc *= image_poly(s.an_img[p]).pow(m.an[p]);
    result += acc;
  }
  return result;
}

// Relabel x into a superspace of its own space (label lookup).
template <class R>
Poly<R> embed(const Poly<R>& x, const SpacePtr& target) {
  const auto& from = *x.space();
  std::vector<int> map(from.pairs());
  for (int p = 0; p < from.pairs(); ++p) map[p] = target->index_of(from.label(p));
  Poly<R> out(target);
  for (auto& [m, c] : x.terms()) {
    Monomial big = Monomial::one(target->pairs());
    for (int p = 0; p < from.pairs(); ++p) {
      big.cr[map[p]] = m.cr[p];
      big.an[map[p]] = m.an[p];
    }
    out.add_term(big, c);
  }
  return out;
}

// --- Fock representation ----------------------------------------------------

// Sparse vector in the unnormalized monomial basis |m> = prod abar_p^{m_p}|0>.
struct FockVector {
  std::map<std::vector<uint32_t>, Rational> entries;

  bool is_zero() const { return entries.empty(); }
  void add(const std::vector<uint32_t>& occ, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = entries.try_emplace(occ, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) entries.erase(it);
    }
  }
  FockVector& operator+=(const FockVector& o) {
    for (auto& [m, c] : o.entries) add(m, c);
    return *this;
  }
  friend bool operator==(const FockVector& a, const FockVector& b) { return a.entries == b.entries; }
};

FockVector vacuum(const SpacePtr& s);

// Linear action: abar_p|m> = |m+e_p>, a_p|m> = m_p |m-e_p>.
FockVector apply_to_fock(const Poly<Rational>& x, const FockVector& v);

// Returns c when x|0> == c|0>; throws otherwise.
Rational vacuum_eigenvalue(const Poly<Rational>& x);
bool kills_vacuum(const Poly<Rational>& x);

// --- twisted traces -----------------------------------------------------------

// Per-pair geometric weights q_p plus a scalar prefactor: the data of a
// group-like twist prod_p q_p^{N_p}, scaled.
struct TwistWeights {
  std::vector<Rational> q;
  Rational prefactor = Rational(1);
};

// Closed-form twisted Fock trace: prefactor * sum over balanced terms of
// coeff * prod_p k_p! q_p^{k_p} / (1-q_p)^{k_p+1}. This is the unique
// rational function agreeing with the convergent series for |q_p| < 1.
Rational fock_trace(const Poly<Rational>& x, const TwistWeights& w);

// Float-oracle partial sums sum_{m<=M per pair} q^m <m|x|m>/<m|m>-free form.
double fock_trace_series(const Poly<Rational>& x, const std::vector<double>& q, uint32_t terms);

// --- truncated matrix oracle --------------------------------------------------

// Matrix of x on span{|m> : m_p <= cutoff for all p}; components leaving the
// window are dropped. Basis enumerated lexicographically by occupation.
struct TruncMatrix {
  std::vector<std::vector<uint32_t>> basis;
  std::vector<std::vector<Rational>> m;  // m[row][col]
};
TruncMatrix truncated_matrix(const Poly<Rational>& x, uint32_t cutoff);

// --- serialization -----------------------------------------------------------

std::string poly_to_json(const Poly<Rational>& x);
Poly<Rational> poly_from_json(const std::string& text, const SpacePtr& space);

}  // namespace qbgg::osc
