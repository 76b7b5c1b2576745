#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qbgg/lax.hpp"
#include "qbgg/oscillator.hpp"
#include "qbgg/weyl.hpp"

namespace qbgg::transfer {

using lax::Report;
using lax::RLax;
using weyl::AlgebraType;
using weyl::TauPoint;

// Sparse linear operator on the N-fold tensor power of C^K, polynomial in the
// spectral parameter, with exact entries. Multi-indices are encoded row-major.
class TensorOperator {
 public:
  TensorOperator() = default;
  TensorOperator(int N, int K) : N_(N), K_(K), c_(1) {}

  int N() const { return N_; }
  int K() const { return K_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  uint64_t dim() const {
    uint64_t d = 1;
    for (int i = 0; i < N_; ++i) d *= static_cast<uint64_t>(K_);
    return d;
  }

  static TensorOperator identity(int N, int K);
  static TensorOperator scalar(int N, int K, const Rational& c);

  void add(int xdeg, uint64_t row, uint64_t col, const Rational& v);
  Rational at(int xdeg, uint64_t row, uint64_t col) const;
  const std::map<std::pair<uint64_t, uint64_t>, Rational>& coeff(int d) const { return c_[d]; }

  TensorOperator& operator+=(const TensorOperator& o);
  TensorOperator& operator-=(const TensorOperator& o);
  friend TensorOperator operator+(TensorOperator a, const TensorOperator& b) { return a += b; }
  friend TensorOperator operator-(TensorOperator a, const TensorOperator& b) { return a -= b; }
  TensorOperator operator-() const;
  TensorOperator& scale(const Rational& v);
  friend TensorOperator operator*(const TensorOperator& a, const TensorOperator& b);

  // substitute x -> x + delta
  TensorOperator shifted(const Rational& delta) const;
  // evaluate in x: matrix at a point
  std::map<std::pair<uint64_t, uint64_t>, Rational> eval(const Rational& x) const;

  bool is_zero() const;
  size_t term_count() const;
  friend bool operator==(const TensorOperator& a, const TensorOperator& b);

  // conjugate every tensor slot by a signed monomial matrix
  TensorOperator conjugated(const lax::SignedPermMatrix& B) const;

  std::string to_json() const;
  void trim();

 private:
  int N_ = 0, K_ = 0;
  std::vector<std::map<std::pair<uint64_t, uint64_t>, Rational>> c_;
};

// --- twists ------------------------------------------------------------------------

// Family genericity validation of the twist point (throws when violated).
void validate_twist(const AlgebraType& alg, const TauPoint& tau);

// Twist weights of a non-degenerate family, read off the diagonal Cartan
// entries: F_ii = hw_i + sum_p c_ip N_p gives q_p = prod tau_i^{c_ip} and
// prefactor = prod tau_i^{hw_i}.
osc::TwistWeights twist_from_diagonal(const RLax& L, const TauPoint& tau);

// Twist weights of a degenerate family, determined by the conjugation
// condition D L(x) D^{-1} = Ddeg^{-1} L(x) Ddeg (verified exactly; throws on
// failure). The prefactor is fixed to 1 (normalized traces cancel it).
osc::TwistWeights degenerate_twist(const RLax& L, const TauPoint& tau);

// --- transfer matrices ---------------------------------------------------------------

// T+(x): entrywise twisted Fock trace of the N-fold monodromy.
TensorOperator transfer_plus(const RLax& L, const TauPoint& tau, int N);

// Q(x): normalized twisted trace of the degenerate monodromy.
TensorOperator q_operator(const RLax& L, const TauPoint& tau, int N);
TensorOperator q_operator(const RLax& L, int N, const osc::TwistWeights& w);

// closed-form trace of the twist itself (the ch+ scalar of the family)
Rational twist_trace(const osc::TwistWeights& w);

// --- finite modules -------------------------------------------------------------------

struct FiniteModule {
  RLax L;
  std::vector<osc::FockVector> basis;              // row-reduced, vacuum first
  std::vector<std::vector<uint32_t>> pivot_monos;  // pivot occupation of each row
  weyl::Weight hw;
  int dim = 0;

  // coordinates of v in the basis; throws when v is outside the span
  std::vector<Rational> coordinates(const osc::FockVector& v) const;
  std::vector<std::vector<Rational>> matrix_of(const osc::Poly<Rational>& X) const;
};

// Exact closure of the vacuum under the lowering generators; checks that the
// full generator set stabilizes the span and that dim == weyl_dimension.
FiniteModule build_finite_module(const RLax& L, const weyl::Weight& lambda);

// finite transfer matrix: trace over the module of the monodromy
TensorOperator transfer_finite(const FiniteModule& mod, const TauPoint& tau, int N);

// --- identity checks -------------------------------------------------------------------

Report bgg_identity_check(const AlgebraType& alg, const weyl::CosetCase& c, const Rational& t, int N,
                          const TauPoint& tau);

enum class FactorKind { ADetails, AViaQQ, CViaQQ, DViaQQ, BDViaQQ };
// ADetails: params = lambda (A-Verma); others: the coset label via `coset`.
Report factorisation_identity_check(FactorKind kind, const AlgebraType& alg, const weyl::CosetCase& c,
                                    const weyl::CosetElement& coset, const Rational& t, int N, const TauPoint& tau,
                                    const std::vector<Rational>& lambda = {});

Report qq_relation_check(int n, const std::vector<int>& I, int i, int j, int N, const TauPoint& tau);

enum class DetKind { TDet, QI };
Report determinant_identity_check(DetKind kind, int n, const std::vector<Rational>& lambda,
                                  const std::vector<int>& I, int N, const TauPoint& tau);

Report commutativity_check(const std::string& label, const TensorOperator& A, const TensorOperator& B);

Report t_symmetry_check(const AlgebraType& alg, const weyl::CosetCase& c, int N, const TauPoint& tau,
                        const Rational& t);

Report expected_vanishing_probe(const AlgebraType& alg, const weyl::CosetCase& c, int N, const TauPoint& tau,
                                const Rational& t);

// The analytic continuation of the finite transfer: alternating coset sum of T+.
TensorOperator continued_transfer(const AlgebraType& alg, const weyl::CosetCase& c, const Rational& t, int N,
                                  const TauPoint& tau);

// Q-operators of the conjugated families, generated from the base Q by the
// Weyl action on the quantum space plus the tau substitution.
TensorOperator q_weyl_conjugated(const AlgebraType& alg, const weyl::CosetCase& c, const weyl::CosetElement& e,
                                 int N, const TauPoint& tau, bool opposite);

}  // namespace qbgg::transfer
