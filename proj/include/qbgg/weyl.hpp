#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbgg/rational.hpp"

namespace qbgg::weyl {

enum class Family { A, B, C, D };

std::string family_name(Family f);
Family parse_family(const std::string& s);

// Classical algebra: gl_n for A (rank field holds n), sp_2r / so_2r / so_2r+1
// for C / D / B.
struct AlgebraType {
  Family fam;
  int rank;  // n for A, r for BCD

  static AlgebraType A(int n);
  static AlgebraType B(int r);
  static AlgebraType C(int r);
  static AlgebraType D(int r);
  static AlgebraType make(Family f, int rank);

  int K() const;              // dimension of the defining representation
  Rational kappa() const;     // BCD R-matrix shift
  int epsilon(int i) const;   // 1-based defining-space index sign (+/-1)
  int weight_len() const { return fam == Family::A ? rank : rank; }
  std::string str() const;
};

using Weight = std::vector<Rational>;

Weight rho(const AlgebraType& alg);

// Positive roots as integer vectors in the epsilon basis.
std::vector<std::vector<int>> positive_roots(const AlgebraType& alg);

// Signed permutation (mu, sigma): acts on weights by (w x)_i = mu_i x_{sigma^{-1}(i)}.
// For A the signs are all +1; for D the sign vector has an even number of -1.
struct SignedPerm {
  std::vector<int> perm;  // 0-based images: sigma(i) = perm[i]
  std::vector<int> sign;  // +-1 per coordinate of the *output*

  static SignedPerm id(int n);
  int size() const { return static_cast<int>(perm.size()); }
  Weight act(const Weight& x) const;
  std::vector<int> act_root(const std::vector<int>& a) const;
  bool valid_for(const AlgebraType& alg) const;
};

int length(const SignedPerm& w, const AlgebraType& alg);

// The rho-shifted dot action w.lambda = w(lambda+rho) - rho.
Weight dot_action(const SignedPerm& w, const Weight& lambda, const AlgebraType& alg);

// Full Weyl group (permutations for A; signed with D-parity for BCD).
std::vector<SignedPerm> weyl_group(const AlgebraType& alg);

// --- evaluation points --------------------------------------------------------

// Diagonal evaluation point: tau_i = u_i^D, so tau_i^e with e*D integral is
// exactly u_i^{e*D}. D = 1 for integral weights, 2 for spinor weights, etc.
struct TauPoint {
  std::vector<Rational> u;
  long D = 1;

  int size() const { return static_cast<int>(u.size()); }
  Rational tau(int i) const { return u[i].pow(D); }
  Rational pow(int i, const Rational& e) const;     // tau_i^e
  Rational pow_weight(const Weight& w) const;       // prod tau_i^{w_i}
  Rational pow_root(const std::vector<int>& a) const;
  static TauPoint plain(std::vector<Rational> tau) { return TauPoint{std::move(tau), 1}; }
};

// --- shortest-coset combinatorics ----------------------------------------------

enum class CosetKind { ASubset, CSpinor, DSpinor, BDVector };

struct CosetCase {
  CosetKind kind;
  int a = 0;       // A: size of the subset I
  int sector = 1;  // D-spinor: +1 even, -1 odd
};

struct CosetElement {
  // exactly one of these is populated, per kind
  std::vector<int> subset;  // A: I (1-based, increasing)
  std::vector<int> mu;      // C/D-spinor: +-1 vector
  int k = 0;                // BD: 1..r or primed encoded as K+1-k
  int bigK = 0;             // BD only: ambient K

  CosetKind kind;
  int length = 0;
  int sign = 1;  // (-1)^length
  SignedPerm w;  // shortest representative

  // Highest weight of the Fock vacuum in the corresponding module, as a
  // function of the label t (printed closed forms).
  Weight highest_weight(const Rational& t, const AlgebraType& alg) const;
  std::string tag() const;
};

bool coset_case_admissible(const AlgebraType& alg, const CosetCase& c);
std::vector<CosetElement> enumerate_cosets(const AlgebraType& alg, const CosetCase& c);

// lambda(t) resolved by the coset case: t*omega_a (A), t*omega_r (C),
// 2t*omega_r / 2t*omega_{r-1} (D-spinor sectors), t*omega_1 (BD).
Weight case_weight(const AlgebraType& alg, const CosetCase& c, const Rational& t);

// --- characters -----------------------------------------------------------------

// Weyl character of the irreducible module L_lambda at the diagonal point tau,
// via the alternating sum over the full Weyl group. Throws when a Weyl
// denominator factor vanishes (the message names the root).
Rational weyl_character(const AlgebraType& alg, const Weight& lambda, const TauPoint& tau);

// Closed-form character summand ch^+ of one coset module (no sign).
Rational ch_plus(const AlgebraType& alg, const CosetCase& c, const CosetElement& e, const Rational& t,
                 const TauPoint& tau);

// Alternating sum of ch_plus over the coset set: the analytic continuation in
// t of the finite character.
Rational truncated_bgg_character(const AlgebraType& alg, const CosetCase& c, const Rational& t, const TauPoint& tau);

// prod_{alpha>0} (lambda+rho,alpha)/(rho,alpha); lambda must be dominant
// (throws otherwise). Returns the exact integer dimension.
Rational weyl_dimension(const AlgebraType& alg, const Weight& lambda);

std::string coset_to_json(const CosetElement& e, const Rational& t, const AlgebraType& alg);

}  // namespace qbgg::weyl
