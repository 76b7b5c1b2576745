#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbgg/oscillator.hpp"
#include "qbgg/weyl.hpp"

namespace qbgg::lax {

using osc::SpacePtr;
using weyl::AlgebraType;
using weyl::Family;

// --- matrices -------------------------------------------------------------------

// Sparse matrix with exact scalar entries.
struct ScalarMatrix {
  int n = 0;
  std::map<std::pair<int, int>, Rational> a;

  static ScalarMatrix identity(int n);
  void add(int i, int j, const Rational& c);
  Rational at(int i, int j) const;
  ScalarMatrix& operator+=(const ScalarMatrix& o);
  ScalarMatrix& scale(const Rational& c);
};

// Monomial matrix with entries in {0, +-1}: column k carries sign[k] in row perm[k].
struct SignedPermMatrix {
  std::vector<int> perm;
  std::vector<int> sign;

  static SignedPermMatrix identity(int n);
  int n() const { return static_cast<int>(perm.size()); }
  SignedPermMatrix inverse() const;
  ScalarMatrix to_scalar() const;
};

// Dense matrix over the oscillator algebra.
template <class R>
struct OpMatrix {
  int rows = 0, cols = 0;
  SpacePtr space;
  std::vector<osc::Poly<R>> e;

  OpMatrix() = default;
  OpMatrix(int r, int c, SpacePtr s) : rows(r), cols(c), space(std::move(s)) {
    e.assign(static_cast<size_t>(rows) * cols, osc::Poly<R>(space));
  }
  static OpMatrix identity(int n, SpacePtr s) {
    OpMatrix out(n, n, s);
    for (int i = 0; i < n; ++i) out.at(i, i) = osc::Poly<R>::constant(out.space, R(1));
    return out;
  }
  osc::Poly<R>& at(int i, int j) { return e[static_cast<size_t>(i) * cols + j]; }
  const osc::Poly<R>& at(int i, int j) const { return e[static_cast<size_t>(i) * cols + j]; }

  OpMatrix& operator+=(const OpMatrix& o) {
    for (size_t i = 0; i < e.size(); ++i) e[i] += o.e[i];
    return *this;
  }
  OpMatrix& operator-=(const OpMatrix& o) {
    for (size_t i = 0; i < e.size(); ++i) e[i] -= o.e[i];
    return *this;
  }
  friend OpMatrix operator+(OpMatrix a, const OpMatrix& b) { return a += b; }
  friend OpMatrix operator-(OpMatrix a, const OpMatrix& b) { return a -= b; }
  OpMatrix operator-() const {
    OpMatrix out = *this;
    for (auto& p : out.e) p = -p;
    return out;
  }
  OpMatrix& scale(const R& c) {
    for (auto& p : e) p.scale(c);
    return *this;
  }
  friend OpMatrix operator*(const OpMatrix& a, const OpMatrix& b) {
    OpMatrix out(a.rows, b.cols, a.space);
    for (int i = 0; i < a.rows; ++i)
      for (int k = 0; k < a.cols; ++k) {
        const auto& x = a.at(i, k);
        if (x.is_zero()) continue;
        for (int j = 0; j < b.cols; ++j) {
          const auto& y = b.at(k, j);
          if (y.is_zero()) continue;
          out.at(i, j) += x * y;
        }
      }
    return out;
  }
  bool is_zero() const {
    for (auto& p : e)
      if (!p.is_zero()) return false;
    return true;
  }
  size_t term_count() const {
    size_t t = 0;
    for (auto& p : e) t += p.term_count();
    return t;
  }
  friend bool operator==(const OpMatrix& a, const OpMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.e == b.e;
  }
};

// Polynomial in the spectral parameter x with OpMatrix coefficients.
template <class R>
struct XPolyMat {
  std::vector<OpMatrix<R>> c;  // c[d] multiplies x^d

  int degree() const { return static_cast<int>(c.size()) - 1; }
  int dim() const { return c.empty() ? 0 : c[0].rows; }
  const SpacePtr& space() const { return c.at(0).space; }
  void trim() {
    while (c.size() > 1 && c.back().is_zero()) c.pop_back();
  }
  friend XPolyMat operator*(const XPolyMat& a, const XPolyMat& b) {
    XPolyMat out;
    out.c.assign(a.c.size() + b.c.size() - 1, OpMatrix<R>(a.dim(), b.c[0].cols, a.space()));
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
  }
  friend XPolyMat operator-(XPolyMat a, const XPolyMat& b) {
    while (a.c.size() < b.c.size()) a.c.push_back(OpMatrix<R>(a.dim(), a.c[0].cols, a.space()));
    for (size_t d = 0; d < b.c.size(); ++d) a.c[d] -= b.c[d];
    return a;
  }
  // substitute x -> x + delta
  XPolyMat shifted(const R& delta) const {
    XPolyMat out;
    out.c.assign(c.size(), OpMatrix<R>(dim(), c[0].cols, space()));
    for (size_t d = 0; d < c.size(); ++d) {
      R p = R(1);
      for (size_t k = d + 1; k-- > 0;) {
        OpMatrix<R> term = c[d];
        term.scale(R(binomial(d, k)) * p);
        out.c[k] += term;
        p = p * delta;
      }
    }
    return out;
  }
  bool is_zero() const {
    for (auto& m : c)
      if (!m.is_zero()) return false;
    return true;
  }
  size_t term_count() const {
    size_t t = 0;
    for (auto& m : c) t += m.term_count();
    return t;
  }
};

// Row and column scaling by diagonal matrices of ring scalars.
template <class R>
void scale_rows(XPolyMat<R>& m, const std::vector<R>& d) {
  for (auto& mat : m.c)
    for (int i = 0; i < mat.rows; ++i)
      for (int j = 0; j < mat.cols; ++j) mat.at(i, j).scale(d[i]);
}
template <class R>
void scale_cols(XPolyMat<R>& m, const std::vector<R>& d) {
  for (auto& mat : m.c)
    for (int i = 0; i < mat.rows; ++i)
      for (int j = 0; j < mat.cols; ++j) mat.at(i, j).scale(d[j]);
}

// --- Lax matrices ----------------------------------------------------------------

// A K x K matrix of spectral-parameter polynomials with oscillator-algebra
// entries, tagged with its algebra type and construction.
template <class R>
struct LaxMatrix {
  AlgebraType alg{Family::A, 2};
  int K = 0;
  std::string family;
  R t{};
  XPolyMat<R> m;

  int degree() const { return m.degree(); }
  const SpacePtr& space() const { return m.space(); }
  const OpMatrix<R>& coeff(int d) const { return m.c[d]; }
  // Generator F_ij is the transposed entry of the subleading coefficient.
  const osc::Poly<R>& generator(int i, int j) const { return m.c[degree() - 1].at(j, i); }
};

using RLax = LaxMatrix<Rational>;
using LLax = LaxMatrix<Laurent>;

// oscillator space label helpers ("(i,j)" and primed "(i,j')")
std::string pair_label(int i, int j);
std::string pair_label_p(int i, int j);      // "(i,j')"
std::string pair_label_pf(int j, int i);     // "(j',i)"

SpacePtr space_verma_a(int n);
SpacePtr space_rect_a(int n, int a);
SpacePtr space_deg_a(int n, const std::vector<int>& I);
SpacePtr space_ambient_a(int n, int a);
SpacePtr space_c(int r);
SpacePtr space_ambient_c(int r);
SpacePtr space_d(int r);
SpacePtr space_ambient_d(int r);
SpacePtr space_bd(int K);
SpacePtr space_ambient_bd(int K);

// non-degenerate constructors (templated: Rational, or Laurent for limits)
template <class R>
LaxMatrix<R> rect_a(int n, int a, const R& t);
template <class R>
LaxMatrix<R> nondeg_c(int r, const R& t);
template <class R>
LaxMatrix<R> nondeg_d(int r, const R& t);
template <class R>
LaxMatrix<R> quad_bd(const AlgebraType& alg, const R& t);

RLax verma_a(int n, const std::vector<Rational>& lambda);

// degenerate families
RLax deg_a(int n, const std::vector<int>& I);
RLax deg_c_plus(int r);
RLax deg_c_minus(int r);
RLax deg_d_plus(int r);
RLax deg_d_minus(int r);
RLax deg_bd_1(const AlgebraType& alg);
RLax deg_bd_K(const AlgebraType& alg);

// product form of the quadratic BD Lax (test oracle for quad_bd)
XPolyMat<Rational> quad_bd_product(const AlgebraType& alg, const Rational& x1, const Rational& x2);

// R-matrices ----------------------------------------------------------------------

struct RMatrix {
  AlgebraType alg{Family::A, 2};
  int K = 0;
  std::vector<ScalarMatrix> c;  // coefficient of z^d, K^2 x K^2
};
RMatrix r_matrix(const AlgebraType& alg);

// reports ---------------------------------------------------------------------------

struct Report {
  std::string check;
  std::string params;
  bool pass = false;
  long defect_terms = 0;
  double elapsed_ms = 0;
  std::string mode = "coefficient-wise";
  std::string note;
};

// conjugation ----------------------------------------------------------------------

// B L B^{-1} with a particle-hole substitution applied entrywise. Checks that
// the Fock vacuum stays highest weight (all lowering-position entries kill it)
// and that the diagonal vacuum eigenvalues match `expected_hw` when given.
RLax conjugate_and_ph(const RLax& L, const SignedPermMatrix& B, const osc::Substitution& ph,
                      const std::optional<weyl::Weight>& expected_hw = std::nullopt);

// Lax matrix of one BGG coset module (conjugated + particle-hole transformed),
// with the highest-weight validation wired in.
RLax coset_lax(const AlgebraType& alg, const weyl::CosetCase& c, const weyl::CosetElement& e, const Rational& t);

// The constant diagonal twist D of the defining representation.
std::vector<Rational> defining_twist_diag(const AlgebraType& alg, const weyl::TauPoint& tau);

// Weyl-symmetry monomial matrices of the defining representation.
SignedPermMatrix b_mu(const AlgebraType& alg, const std::vector<int>& mu);  // C/D
SignedPermMatrix bhat_k(const AlgebraType& alg, int k);                     // B/D vector

// checks ----------------------------------------------------------------------------

Report rtt_check(const RLax& L1, const RLax& L2, const RMatrix& R);
Report lie_algebra_check(const RLax& L);

enum class FactorisationCase { A, C, D, BD };
Report lax_factorisation_check(FactorisationCase fc, const AlgebraType& alg, int a, const Rational& t);
Report renormalized_limit_check(FactorisationCase fc, const AlgebraType& alg, int a);
Report r_matrix_properties(const AlgebraType& alg);

// Commutativity of the factorisation similarity with the product of the two
// degenerate twists, established by the grading argument: every generator
// monomial of S must have zero net charge under each of the number-operator
// gradings read off the twists (an exact integer exponent count).
Report sd_commutativity_check(FactorisationCase fc, const AlgebraType& alg, int a);

}  // namespace qbgg::lax
