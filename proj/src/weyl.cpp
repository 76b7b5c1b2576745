#include "qbgg/weyl.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qbgg::weyl {

std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "A" || s == "a") return Family::A;
  if (s == "B" || s == "b") return Family::B;
  if (s == "C" || s == "c") return Family::C;
  if (s == "D" || s == "d") return Family::D;
  throw std::invalid_argument("unknown algebra family '" + s + "'");
}

AlgebraType AlgebraType::A(int n) {
  if (n < 2) throw std::invalid_argument("type A requires n >= 2");
  return {Family::A, n};
}
AlgebraType AlgebraType::B(int r) {
  if (r < 2) throw std::invalid_argument("type B requires r >= 2");
  return {Family::B, r};
}
AlgebraType AlgebraType::C(int r) {
  if (r < 1) throw std::invalid_argument("type C requires r >= 1");
  return {Family::C, r};
}
AlgebraType AlgebraType::D(int r) {
  if (r < 2) throw std::invalid_argument("type D requires r >= 2");
  return {Family::D, r};
}
AlgebraType AlgebraType::make(Family f, int rank) {
  switch (f) {
    case Family::A: return A(rank);
    case Family::B: return B(rank);
    case Family::C: return C(rank);
    case Family::D: return D(rank);
  }
  throw std::invalid_argument("bad family");
}

int AlgebraType::K() const {
  switch (fam) {
    case Family::A: return rank;
    case Family::B: return 2 * rank + 1;
    case Family::C: return 2 * rank;
    case Family::D: return 2 * rank;
  }
  return 0;
}

Rational AlgebraType::kappa() const {
  switch (fam) {
    case Family::B: return Rational(2 * rank - 1, 2);
    case Family::C: return Rational(rank + 1);
    case Family::D: return Rational(rank - 1);
    default: throw std::domain_error("kappa: defined for BCD only");
  }
}

int AlgebraType::epsilon(int i) const {
  if (fam == Family::C) return i <= rank ? 1 : -1;
  return 1;
}

std::string AlgebraType::str() const {
  std::ostringstream os;
  os << family_name(fam) << (fam == Family::A ? rank - 1 : rank);
  if (fam == Family::A) os << " (gl" << rank << ")";
  return os.str();
}

Weight rho(const AlgebraType& alg) {
  Weight out;
  const int r = alg.rank;
  switch (alg.fam) {
    case Family::A:
      for (int i = 0; i < r; ++i) out.push_back(Rational(r - 1 - 2 * i, 2));
      break;
    case Family::B:
      for (int i = 0; i < r; ++i) out.push_back(Rational(2 * (r - i) - 1, 2));
      break;
    case Family::C:
      for (int i = 0; i < r; ++i) out.push_back(Rational(r - i));
      break;
    case Family::D:
      for (int i = 0; i < r; ++i) out.push_back(Rational(r - 1 - i));
      break;
  }
  return out;
}

std::vector<std::vector<int>> positive_roots(const AlgebraType& alg) {
  std::vector<std::vector<int>> out;
  const int r = alg.rank;
  auto root = [&](auto fill) {
    std::vector<int> v(r, 0);
    fill(v);
    out.push_back(std::move(v));
  };
  if (alg.fam == Family::A) {
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j)
        root([&](auto& v) {
          v[i] = 1;
          v[j] = -1;
        });
    return out;
  }
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      root([&](auto& v) {
        v[i] = 1;
        v[j] = -1;
      });
      root([&](auto& v) {
        v[i] = 1;
        v[j] = 1;
      });
    }
  if (alg.fam == Family::B)
    for (int i = 0; i < r; ++i) root([&](auto& v) { v[i] = 1; });
  if (alg.fam == Family::C)
    for (int i = 0; i < r; ++i) root([&](auto& v) { v[i] = 2; });
  return out;
}

SignedPerm SignedPerm::id(int n) {
  SignedPerm w;
  w.perm.resize(n);
  std::iota(w.perm.begin(), w.perm.end(), 0);
  w.sign.assign(n, 1);
  return w;
}

Weight SignedPerm::act(const Weight& x) const {
  Weight out(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    int i = perm[j];
    out[i] = Rational(sign[i]) * x[j];
  }
  return out;
}

std::vector<int> SignedPerm::act_root(const std::vector<int>& a) const {
  std::vector<int> out(a.size(), 0);
  for (size_t j = 0; j < a.size(); ++j) {
    int i = perm[j];
    out[i] = sign[i] * a[j];
  }
  return out;
}

bool SignedPerm::valid_for(const AlgebraType& alg) const {
  int minus = 0;
  for (int s : sign)
    if (s < 0) ++minus;
  if (alg.fam == Family::A) return minus == 0;
  if (alg.fam == Family::D) return minus % 2 == 0;
  return true;
}

int length(const SignedPerm& w, const AlgebraType& alg) {
  auto pos = positive_roots(alg);
  std::set<std::vector<int>> posset(pos.begin(), pos.end());
  int len = 0;
  for (auto& a : pos) {
    auto img = w.act_root(a);
    for (auto& c : img) c = -c;
    if (posset.count(img)) ++len;
  }
  return len;
}

Weight dot_action(const SignedPerm& w, const Weight& lambda, const AlgebraType& alg) {
  if (!w.valid_for(alg)) throw std::invalid_argument("dot_action: element not in the Weyl group of " + alg.str());
  Weight rr = rho(alg);
  Weight shifted(lambda.size());
  for (size_t i = 0; i < lambda.size(); ++i) shifted[i] = lambda[i] + rr[i];
  Weight out = w.act(shifted);
  for (size_t i = 0; i < out.size(); ++i) out[i] -= rr[i];
  return out;
}

std::vector<SignedPerm> weyl_group(const AlgebraType& alg) {
  const int r = alg.rank;
  std::vector<SignedPerm> out;
  std::vector<int> p(r);
  std::iota(p.begin(), p.end(), 0);
  do {
    if (alg.fam == Family::A) {
      SignedPerm w;
      w.perm = p;
      w.sign.assign(r, 1);
      out.push_back(std::move(w));
      continue;
    }
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
      int minus = __builtin_popcount(mask);
      if (alg.fam == Family::D && minus % 2 != 0) continue;
      SignedPerm w;
      w.perm = p;
      w.sign.resize(r);
      for (int i = 0; i < r; ++i) w.sign[i] = (mask >> i) & 1 ? -1 : 1;
      out.push_back(std::move(w));
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Rational TauPoint::pow(int i, const Rational& e) const {
  Rational scaled = e * Rational(D);
  if (!scaled.is_integer())
    throw std::domain_error("TauPoint: exponent " + e.str() + " not resolvable at precision D=" + std::to_string(D));
  return u[i].pow(scaled.num_long());
}

Rational TauPoint::pow_weight(const Weight& w) const {
  Rational out(1);
  for (size_t i = 0; i < w.size(); ++i) out *= pow(static_cast<int>(i), w[i]);
  return out;
}

Rational TauPoint::pow_root(const std::vector<int>& a) const {
  Rational out(1);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) out *= tau(static_cast<int>(i)).pow(a[i]);
  return out;
}

// --- coset machinery -----------------------------------------------------------

bool coset_case_admissible(const AlgebraType& alg, const CosetCase& c) {
  switch (c.kind) {
    case CosetKind::ASubset:
      return alg.fam == Family::A && c.a >= 1 && c.a <= alg.rank - 1;
    case CosetKind::CSpinor:
      return alg.fam == Family::C;
    case CosetKind::DSpinor:
      return alg.fam == Family::D && (c.sector == 1 || c.sector == -1);
    case CosetKind::BDVector:
      return alg.fam == Family::B || alg.fam == Family::D;
  }
  return false;
}

namespace {

// shortest permutation part attached to a sign vector, as the 0-based image map sigma(i) = perm[i]
std::vector<int> sigma_from_mu(const std::vector<int>& mu) {
  const int r = static_cast<int>(mu.size());
  std::vector<int> siginv(r);
  int plus_seen = 0, minus_seen = 0;
  for (int i = 0; i < r; ++i) {
    if (mu[i] > 0) {
      ++plus_seen;
      siginv[i] = plus_seen - 1;
    } else {
      ++minus_seen;
      siginv[i] = r - minus_seen;
    }
  }
  // siginv[i] = sigma^{-1}(i); invert to get sigma
  std::vector<int> perm(r);
  for (int i = 0; i < r; ++i) perm[siginv[i]] = i;
  return perm;
}

// sigma_k moving 1 into slot k (0-based k), fixing the tail.
std::vector<int> sigma_k(int r, int k0) {
  std::vector<int> perm(r);
  perm[0] = k0;
  for (int i = 1; i <= k0; ++i) perm[i] = i - 1;
  for (int i = k0 + 1; i < r; ++i) perm[i] = i;
  return perm;
}

}  // namespace

std::vector<CosetElement> enumerate_cosets(const AlgebraType& alg, const CosetCase& c) {
  if (!coset_case_admissible(alg, c))
    throw std::invalid_argument("enumerate_cosets: case not admissible for " + alg.str());
  std::vector<CosetElement> out;
  const int r = alg.rank;

  auto finalize = [&](CosetElement& e) {
    e.sign = e.length % 2 == 0 ? 1 : -1;
    out.push_back(e);
  };

  switch (c.kind) {
    case CosetKind::ASubset: {
      const int n = alg.rank;
      std::vector<int> I;
      // iterate all increasing a-subsets of {1..n}
      std::vector<int> idx(c.a);
      std::iota(idx.begin(), idx.end(), 1);
      while (true) {
        CosetElement e;
        e.kind = c.kind;
        e.subset = idx;
        std::vector<bool> in(n + 1, false);
        for (int k : idx) in[k] = true;
        int len = 0;
        for (int k : idx)
          for (int l = 1; l < k; ++l)
            if (!in[l]) ++len;
        e.length = len;
        // sigma_I: c<=a -> i_c, c>a -> j_{c-a}
        std::vector<int> J;
        for (int v = 1; v <= n; ++v)
          if (!in[v]) J.push_back(v);
        SignedPerm w;
        w.perm.resize(n);
        w.sign.assign(n, 1);
        for (int cc = 0; cc < c.a; ++cc) w.perm[cc] = idx[cc] - 1;
        for (int cc = c.a; cc < n; ++cc) w.perm[cc] = J[cc - c.a] - 1;
        e.w = std::move(w);
        finalize(e);
        // next subset
        int i = c.a - 1;
        while (i >= 0 && idx[i] == n - (c.a - 1 - i)) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < c.a; ++j) idx[j] = idx[j - 1] + 1;
      }
      break;
    }
    case CosetKind::CSpinor:
    case CosetKind::DSpinor: {
      for (unsigned mask = 0; mask < (1u << r); ++mask) {
        std::vector<int> mu(r);
        for (int i = 0; i < r; ++i) mu[i] = (mask >> i) & 1 ? -1 : 1;
        int parity = __builtin_popcount(mask) % 2 == 0 ? 1 : -1;
        if (c.kind == CosetKind::DSpinor && parity != c.sector) continue;
        CosetElement e;
        e.kind = c.kind;
        e.mu = mu;
        int len = 0;
        for (int i = 0; i < r; ++i)
          if (mu[i] < 0) len += (c.kind == CosetKind::CSpinor) ? (r - i) : (r - i - 1);
        e.length = len;
        SignedPerm w;
        w.perm = sigma_from_mu(mu);
        std::vector<int> musign = mu;
        if (c.kind == CosetKind::DSpinor && parity < 0) {
          // replace the first -1 by +1 to land in the even Weyl group
          for (int i = 0; i < r; ++i)
            if (musign[i] < 0) {
              musign[i] = 1;
              break;
            }
        }
        // sign vector indexes output coordinates: (mu,sigma) scales coordinate
        // i of the output by mu_i
        w.sign = musign;
        e.w = std::move(w);
        finalize(e);
      }
      // deterministic order: by length then tag
      std::sort(out.begin(), out.end(), [](const CosetElement& a, const CosetElement& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.mu > b.mu;
      });
      break;
    }
    case CosetKind::BDVector: {
      const int K = alg.K();
      std::vector<int> ks;
      for (int k = 1; k <= r; ++k) ks.push_back(k);
      for (int k = r; k >= 1; --k) ks.push_back(K + 1 - k);  // r', ..., 1'
      for (int kval : ks) {
        CosetElement e;
        e.kind = c.kind;
        e.k = kval;
        e.bigK = K;
        const bool primed = kval > r;
        const int cpos = primed ? K + 1 - kval : kval;  // unprimed partner in 1..r
        e.length = primed ? kval - 2 : kval - 1;
        SignedPerm w;
        w.perm = sigma_k(r, cpos - 1);
        w.sign.assign(r, 1);
        if (primed) {
          if (alg.fam == Family::B) {
            w.sign[cpos - 1] = -1;
          } else {  // D
            if (cpos < r) {
              w.sign[cpos - 1] = -1;
              w.sign[r - 1] = -1;
            } else {
              w.sign[r - 2] = -1;
              w.sign[r - 1] = -1;
            }
          }
        }
        e.w = std::move(w);
        finalize(e);
      }
      break;
    }
  }
  return out;
}

Weight case_weight(const AlgebraType& alg, const CosetCase& c, const Rational& t) {
  const int r = alg.rank;
  Weight out(alg.weight_len(), Rational(0));
  switch (c.kind) {
    case CosetKind::ASubset:
      for (int i = 0; i < c.a; ++i) out[i] = t;
      break;
    case CosetKind::CSpinor:
      for (int i = 0; i < r; ++i) out[i] = t;
      break;
    case CosetKind::DSpinor:
      for (int i = 0; i < r; ++i) out[i] = t;
      if (c.sector < 0) out[r - 1] = -t;
      break;
    case CosetKind::BDVector:
      out[0] = t;
      break;
  }
  return out;
}

Weight CosetElement::highest_weight(const Rational& t, const AlgebraType& alg) const {
  const int r = alg.rank;
  Weight out;
  switch (kind) {
    case CosetKind::ASubset: {
      const int n = alg.rank;
      std::vector<bool> in(n + 1, false);
      for (int k : subset) in[k] = true;
      for (int k = 1; k <= n; ++k) {
        if (in[k]) {
          int cnt = 0;
          for (int j = 1; j < k; ++j)
            if (!in[j]) ++cnt;
          out.push_back(t + Rational(cnt));
        } else {
          int cnt = 0;
          for (int i = k + 1; i <= n; ++i)
            if (in[i]) ++cnt;
          out.push_back(Rational(-cnt));
        }
      }
      break;
    }
    case CosetKind::CSpinor:
    case CosetKind::DSpinor: {
      const int shift = (kind == CosetKind::CSpinor) ? 1 : -1;
      int running_minus = 0;
      for (int i = 0; i < r; ++i) {
        if (mu[i] < 0) ++running_minus;
        Rational v = t;
        if (mu[i] < 0) v += Rational(r - (i + 1) + shift);
        v += Rational(running_minus);
        out.push_back(Rational(mu[i]) * v);
      }
      break;
    }
    case CosetKind::BDVector: {
      const int K = alg.K();
      const bool primed = k > r;
      const int cpos = primed ? K + 1 - k : k;
      for (int i = 1; i <= r; ++i) {
        if (i < cpos)
          out.push_back(Rational(-1));
        else if (i == cpos)
          out.push_back(primed ? -t - Rational(k - 2) : t + Rational(k - 1));
        else
          out.push_back(Rational(0));
      }
      break;
    }
  }
  return out;
}

std::string CosetElement::tag() const {
  std::ostringstream os;
  switch (kind) {
    case CosetKind::ASubset: {
      os << "I={";
      for (size_t i = 0; i < subset.size(); ++i) os << (i ? "," : "") << subset[i];
      os << "}";
      break;
    }
    case CosetKind::CSpinor:
    case CosetKind::DSpinor:
      os << "mu=";
      for (int m : mu) os << (m > 0 ? '+' : '-');
      break;
    case CosetKind::BDVector: {
      const int r = static_cast<int>(w.perm.size());
      if (k > r)
        os << "k=" << bigK + 1 - k << "'";
      else
        os << "k=" << k;
      break;
    }
  }
  return os.str();
}

// --- characters -----------------------------------------------------------------

Rational weyl_character(const AlgebraType& alg, const Weight& lambda, const TauPoint& tau) {
  Rational denom(1);
  for (auto& a : positive_roots(alg)) {
    Rational f = Rational(1) - tau.pow_root(a).inv();
    if (f.is_zero()) {
      std::ostringstream os;
      os << "weyl_character: degenerate tau, vanishing denominator at root (";
      for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
      os << ")";
      throw std::domain_error(os.str());
    }
    denom *= f;
  }
  Rational numer(0);
  for (auto& w : weyl_group(alg)) {
    int l = length(w, alg);
    // exponent w(lambda+rho)-rho stays in lambda + root lattice
    Rational term = tau.pow_weight(dot_action(w, lambda, alg));
    numer += (l % 2 == 0) ? term : -term;
  }
  return numer / denom;
}

Rational ch_plus(const AlgebraType& alg, const CosetCase& c, const CosetElement& e, const Rational& t,
                 const TauPoint& tau) {
  const int r = alg.rank;
  auto nonzero = [](const Rational& f, const char* what) {
    if (f.is_zero()) throw std::domain_error(std::string("ch_plus: degenerate tau (") + what + ")");
    return f;
  };
  Rational numer = tau.pow_weight(e.highest_weight(t, alg));
  Rational denom(1);
  switch (c.kind) {
    case CosetKind::ASubset: {
      const int n = alg.rank;
      std::vector<bool> in(n + 1, false);
      for (int k : e.subset) in[k] = true;
      for (int k = 1; k <= n; ++k) {
        if (!in[k]) continue;
        for (int l = 1; l <= n; ++l) {
          if (in[l]) continue;
          if (k > l)
            denom *= nonzero(Rational(1) - tau.tau(k - 1) / tau.tau(l - 1), "tau_k = tau_l");
          else
            denom *= nonzero(Rational(1) - tau.tau(l - 1) / tau.tau(k - 1), "tau_k = tau_l");
        }
      }
      break;
    }
    case CosetKind::CSpinor:
    case CosetKind::DSpinor: {
      for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
          if (c.kind == CosetKind::DSpinor && j == i) continue;
          Rational f = Rational(1) -
                       tau.tau(i).inv() * tau.tau(j).pow(-e.mu[i] * e.mu[j]);
          denom *= nonzero(f, "spinor denominator");
        }
      break;
    }
    case CosetKind::BDVector: {
      const bool primed = e.k > r;
      const int cpos = primed ? alg.K() + 1 - e.k : e.k;
      for (int l = 1; l <= r; ++l) {
        if (l == cpos) continue;
        if (l < cpos)
          denom *= nonzero(Rational(1) - tau.tau(cpos - 1) / tau.tau(l - 1), "tau_k = tau_l");
        else
          denom *= nonzero(Rational(1) - tau.tau(l - 1) / tau.tau(cpos - 1), "tau_k = tau_l");
        denom *= nonzero(Rational(1) - (tau.tau(cpos - 1) * tau.tau(l - 1)).inv(), "tau_k tau_l = 1");
      }
      if (alg.fam == Family::B) denom *= nonzero(Rational(1) - tau.tau(cpos - 1).inv(), "tau_k = 1");
      break;
    }
  }
  return numer / denom;
}

Rational truncated_bgg_character(const AlgebraType& alg, const CosetCase& c, const Rational& t, const TauPoint& tau) {
  Rational out(0);
  for (auto& e : enumerate_cosets(alg, c)) {
    Rational term = ch_plus(alg, c, e, t, tau);
    out += Rational(e.sign) * term;
  }
  return out;
}

Rational weyl_dimension(const AlgebraType& alg, const Weight& lambda) {
  const int r = static_cast<int>(lambda.size());
  // dominance
  for (int i = 0; i + 1 < r; ++i)
    if (lambda[i] < lambda[i + 1]) throw std::invalid_argument("weyl_dimension: weight not dominant");
  if (alg.fam == Family::B || alg.fam == Family::C) {
    if (lambda[r - 1] < Rational(0)) throw std::invalid_argument("weyl_dimension: weight not dominant");
  } else if (alg.fam == Family::D) {
    if (lambda[r - 2] < (lambda[r - 1].sign() < 0 ? -lambda[r - 1] : lambda[r - 1]))
      throw std::invalid_argument("weyl_dimension: weight not dominant");
  }
  const Weight rr = rho(alg);
  Rational dim(1);
  for (auto& a : positive_roots(alg)) {
    Rational top(0), bot(0);
    for (int i = 0; i < r; ++i) {
      top += (lambda[i] + rr[i]) * Rational(a[i]);
      bot += rr[i] * Rational(a[i]);
    }
    dim *= top / bot;
  }
  if (!dim.is_integer()) throw std::domain_error("weyl_dimension: non-integer result (non-integral weight?)");
  return dim;
}

std::string coset_to_json(const CosetElement& e, const Rational& t, const AlgebraType& alg) {
  nlohmann::json j;
  j["tag"] = e.tag();
  j["length"] = e.length;
  nlohmann::json hw = nlohmann::json::array();
  for (auto& x : e.highest_weight(t, alg)) hw.push_back(x.str());
  j["hw"] = hw;
  return j.dump();
}

}  // namespace qbgg::weyl
