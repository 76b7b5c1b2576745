#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "qbgg/weyl.hpp"

using namespace qbgg;
using weyl::AlgebraType;
using weyl::CosetCase;
using weyl::CosetKind;
using weyl::SignedPerm;
using weyl::TauPoint;
using weyl::Weight;

namespace {

std::mt19937_64 rng(424242);

TauPoint random_tau(int n, long D = 1) {
  std::uniform_int_distribution<long> d(2, 97);
  std::set<std::string> seen;
  TauPoint tau;
  tau.D = D;
  while (static_cast<int>(tau.u.size()) < n) {
    Rational r(d(rng), d(rng));
    if (r.is_one() || seen.count(r.str()) || seen.count(r.inv().str())) continue;
    seen.insert(r.str());
    tau.u.push_back(r);
  }
  return tau;
}

Weight wt(std::initializer_list<long> xs) {
  Weight out;
  for (long x : xs) out.push_back(Rational(x));
  return out;
}

}  // namespace

TEST_CASE("rho and positive roots") {
  CHECK(weyl::rho(AlgebraType::A(2)) == Weight{Rational(1, 2), Rational(-1, 2)});
  CHECK(weyl::rho(AlgebraType::C(2)) == Weight{Rational(2), Rational(1)});
  CHECK(weyl::rho(AlgebraType::D(3)) == Weight{Rational(2), Rational(1), Rational(0)});
  CHECK(weyl::rho(AlgebraType::B(2)) == Weight{Rational(3, 2), Rational(1, 2)});
  CHECK(weyl::positive_roots(AlgebraType::A(3)).size() == 3);
  CHECK(weyl::positive_roots(AlgebraType::B(2)).size() == 4);
  CHECK(weyl::positive_roots(AlgebraType::C(3)).size() == 9);
  CHECK(weyl::positive_roots(AlgebraType::D(3)).size() == 6);
}

TEST_CASE("dot action") {
  auto alg = AlgebraType::A(2);
  SignedPerm id = SignedPerm::id(2);
  CHECK(weyl::dot_action(id, wt({1, 0}), alg) == wt({1, 0}));
  SignedPerm s1 = id;
  std::swap(s1.perm[0], s1.perm[1]);
  CHECK(weyl::dot_action(s1, wt({1, 0}), alg) == Weight{Rational(-1), Rational(2)});

  auto c2 = AlgebraType::C(2);
  SignedPerm flip = SignedPerm::id(2);
  flip.sign = {-1, -1};
  // lambda = t omega_r at t = 1: (1,1) -> (-1-4, -1-2) = (-5, -3)
  CHECK(weyl::dot_action(flip, wt({1, 1}), c2) == Weight{Rational(-5), Rational(-3)});
}

TEST_CASE("weyl group sizes and lengths") {
  CHECK(weyl::weyl_group(AlgebraType::A(3)).size() == 6);
  CHECK(weyl::weyl_group(AlgebraType::B(2)).size() == 8);
  CHECK(weyl::weyl_group(AlgebraType::C(2)).size() == 8);
  CHECK(weyl::weyl_group(AlgebraType::D(3)).size() == 24);
  // longest element length equals |Delta+|
  for (auto alg : {AlgebraType::A(3), AlgebraType::B(2), AlgebraType::C(2), AlgebraType::D(3)}) {
    int maxlen = 0;
    for (auto& w : weyl::weyl_group(alg)) maxlen = std::max(maxlen, weyl::length(w, alg));
    CHECK(maxlen == static_cast<int>(weyl::positive_roots(alg).size()));
  }
}

TEST_CASE("coset enumeration: sizes and lengths") {
  // A, n = 3, a = 1: lengths of {1},{2},{3} are 0,1,2
  auto a3 = AlgebraType::A(3);
  auto cs = weyl::enumerate_cosets(a3, CosetCase{CosetKind::ASubset, 1, 1});
  REQUIRE(cs.size() == 3);
  for (auto& e : cs) CHECK(e.length == e.subset[0] - 1);

  // C, r = 2: L(++)=0, L(+-)=1, L(-+)=2, L(--)=3
  auto c2 = AlgebraType::C(2);
  auto cc = weyl::enumerate_cosets(c2, CosetCase{CosetKind::CSpinor, 0, 1});
  REQUIRE(cc.size() == 4);
  std::map<std::string, int> lengths;
  for (auto& e : cc) lengths[e.tag()] = e.length;
  CHECK(lengths["mu=++"] == 0);
  CHECK(lengths["mu=+-"] == 1);
  CHECK(lengths["mu=-+"] == 2);
  CHECK(lengths["mu=--"] == 3);

  // D-spinor, r = 2, even sector: {++: 0, --: 1}
  auto d2 = AlgebraType::D(2);
  auto dc = weyl::enumerate_cosets(d2, CosetCase{CosetKind::DSpinor, 0, 1});
  REQUIRE(dc.size() == 2);
  std::map<std::string, int> dl;
  for (auto& e : dc) dl[e.tag()] = e.length;
  CHECK(dl["mu=++"] == 0);
  CHECK(dl["mu=--"] == 1);

  // sizes: C(n,a), 2^r, 2^{r-1} per sector, 2r
  CHECK(weyl::enumerate_cosets(AlgebraType::A(4), CosetCase{CosetKind::ASubset, 2, 1}).size() == 6);
  CHECK(weyl::enumerate_cosets(AlgebraType::C(3), CosetCase{CosetKind::CSpinor, 0, 1}).size() == 8);
  CHECK(weyl::enumerate_cosets(AlgebraType::D(3), CosetCase{CosetKind::DSpinor, 0, -1}).size() == 4);
  CHECK(weyl::enumerate_cosets(AlgebraType::B(2), CosetCase{CosetKind::BDVector, 0, 1}).size() == 4);
  CHECK(weyl::enumerate_cosets(AlgebraType::D(3), CosetCase{CosetKind::BDVector, 0, 1}).size() == 6);

  CHECK_THROWS(weyl::enumerate_cosets(a3, CosetCase{CosetKind::CSpinor, 0, 1}));
}

TEST_CASE("coset length pairing identities") {
  // C: L(mu) + L(-mu) = r(r+1)/2
  for (int r = 1; r <= 3; ++r) {
    auto alg = AlgebraType::C(r);
    auto cs = weyl::enumerate_cosets(alg, CosetCase{CosetKind::CSpinor, 0, 1});
    std::map<std::vector<int>, int> lookup;
    for (auto& e : cs) lookup[e.mu] = e.length;
    for (auto& e : cs) {
      std::vector<int> neg = e.mu;
      for (auto& m : neg) m = -m;
      CHECK(e.length + lookup.at(neg) == r * (r + 1) / 2);
    }
  }
  // D: L(mu) + L(-mu) = r(r-1)/2 (opposite sector when r is odd)
  for (int r = 2; r <= 4; ++r) {
    auto alg = AlgebraType::D(r);
    std::map<std::vector<int>, int> lookup;
    for (int sector : {1, -1})
      for (auto& e : weyl::enumerate_cosets(alg, CosetCase{CosetKind::DSpinor, 0, sector})) lookup[e.mu] = e.length;
    for (auto& [mu, len] : lookup) {
      std::vector<int> neg = mu;
      for (auto& m : neg) m = -m;
      CHECK(len + lookup.at(neg) == r * (r - 1) / 2);
    }
  }
  // BD: l(w_k) + l(w_{k'}) = K - 2 (printed lengths k-1 and k-2)
  for (auto alg : {AlgebraType::B(2), AlgebraType::B(3), AlgebraType::D(2), AlgebraType::D(3)}) {
    const int K = alg.K();
    auto cs = weyl::enumerate_cosets(alg, CosetCase{CosetKind::BDVector, 0, 1});
    std::map<int, int> lookup;
    for (auto& e : cs) lookup[e.k] = e.length;
    for (auto& e : cs) CHECK(e.length + lookup.at(K + 1 - e.k) == K - 2);
  }
}

TEST_CASE("coset representative consistency: lengths and highest weights (rank <= 4)") {
  const Rational t(7, 3);
  std::vector<std::pair<AlgebraType, CosetCase>> cases;
  for (int n = 2; n <= 4; ++n)
    for (int a = 1; a < n; ++a) cases.push_back({AlgebraType::A(n), CosetCase{CosetKind::ASubset, a, 1}});
  for (int r = 1; r <= 4; ++r) cases.push_back({AlgebraType::C(r), CosetCase{CosetKind::CSpinor, 0, 1}});
  for (int r = 2; r <= 4; ++r)
    for (int sector : {1, -1}) cases.push_back({AlgebraType::D(r), CosetCase{CosetKind::DSpinor, 0, sector}});
  for (int r = 2; r <= 4; ++r) {
    cases.push_back({AlgebraType::B(r), CosetCase{CosetKind::BDVector, 0, 1}});
    cases.push_back({AlgebraType::D(r), CosetCase{CosetKind::BDVector, 0, 1}});
  }
  for (auto& [alg, c] : cases) {
    Weight lam = weyl::case_weight(alg, c, t);
    for (auto& e : weyl::enumerate_cosets(alg, c)) {
      CHECK(weyl::length(e.w, alg) == e.length);
      CHECK(weyl::dot_action(e.w, lam, alg) == e.highest_weight(t, alg));
    }
  }
}

TEST_CASE("A-subset highest weight example") {
  // n=2, a=1, I={2}: vacuum weight (-1, t+1)
  auto cs = weyl::enumerate_cosets(AlgebraType::A(2), CosetCase{CosetKind::ASubset, 1, 1});
  for (auto& e : cs) {
    if (e.subset != std::vector<int>{2}) continue;
    auto hw = e.highest_weight(Rational(5), AlgebraType::A(2));
    CHECK(hw == Weight{Rational(-1), Rational(6)});
  }
}

TEST_CASE("weyl character: frozen values") {
  // A, n=2, lambda=(2,0), tau=(2,3): 4 + 6 + 9 = 19
  TauPoint tau{{Rational(2), Rational(3)}, 1};
  CHECK(weyl::weyl_character(AlgebraType::A(2), wt({2, 0}), tau) == Rational(19));
  // C, r=2, lambda=omega_2=(1,1), tau=(2,3): 6 + 2/3 + 3/2 + 1/6 + 1
  Rational want = Rational(6) + Rational(2, 3) + Rational(3, 2) + Rational(1, 6) + Rational(1);
  CHECK(weyl::weyl_character(AlgebraType::C(2), wt({1, 1}), tau) == want);
  // lambda = 0 -> 1
  for (auto alg : {AlgebraType::A(3), AlgebraType::B(2), AlgebraType::C(2), AlgebraType::D(3)}) {
    TauPoint tt = random_tau(alg.rank);
    CHECK(weyl::weyl_character(alg, Weight(alg.weight_len(), Rational(0)), tt) == Rational(1));
  }
  // degenerate tau rejected, message names a root
  TauPoint degen{{Rational(2), Rational(2)}, 1};
  CHECK_THROWS_AS(weyl::weyl_character(AlgebraType::A(2), wt({2, 0}), degen), std::domain_error);
}

TEST_CASE("weyl denominator identity at 20 random points per type") {
  for (auto alg : {AlgebraType::A(2), AlgebraType::A(3), AlgebraType::B(2), AlgebraType::B(3), AlgebraType::C(2),
                   AlgebraType::C(3), AlgebraType::D(2), AlgebraType::D(3)}) {
    auto W = weyl::weyl_group(alg);
    auto roots = weyl::positive_roots(alg);
    Weight rho = weyl::rho(alg);
    for (int trial = 0; trial < 20; ++trial) {
      TauPoint tau = random_tau(alg.rank, 2);  // D=2: rho may be half-integral
      Rational lhs(0);
      for (auto& w : W) {
        Weight v = w.act(rho);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= rho[i];
        Rational term = tau.pow_weight(v);
        lhs += weyl::length(w, alg) % 2 == 0 ? term : -term;
      }
      Rational rhs(1);
      for (auto& a : roots) rhs *= Rational(1) - tau.pow_root(a).inv();
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("weyl dimension oracle") {
  CHECK(weyl::weyl_dimension(AlgebraType::A(3), wt({1, 0, 0})) == Rational(3));
  CHECK(weyl::weyl_dimension(AlgebraType::C(2), wt({1, 1})) == Rational(5));
  CHECK(weyl::weyl_dimension(AlgebraType::B(2), wt({1, 0})) == Rational(5));
  // so6 spinor: 2t*omega_r at t=1/2 -> (1/2,1/2,1/2), dim 4
  Weight spin{Rational(1, 2), Rational(1, 2), Rational(1, 2)};
  CHECK(weyl::weyl_dimension(AlgebraType::D(3), spin) == Rational(4));
  CHECK_THROWS(weyl::weyl_dimension(AlgebraType::A(2), wt({0, 1})));
}

TEST_CASE("truncated BGG character: frozen A value") {
  TauPoint tau{{Rational(2), Rational(3)}, 1};
  CosetCase c{CosetKind::ASubset, 1, 1};
  CHECK(weyl::truncated_bgg_character(AlgebraType::A(2), c, Rational(2), tau) == Rational(19));
}

TEST_CASE("truncated BGG character equals weyl character at admissible labels (rank <= 3)") {
  std::vector<std::pair<AlgebraType, CosetCase>> cases;
  for (int n = 2; n <= 3; ++n)
    for (int a = 1; a < n; ++a) cases.push_back({AlgebraType::A(n), CosetCase{CosetKind::ASubset, a, 1}});
  for (int r = 1; r <= 3; ++r) cases.push_back({AlgebraType::C(r), CosetCase{CosetKind::CSpinor, 0, 1}});
  for (int r = 2; r <= 3; ++r)
    for (int sector : {1, -1}) cases.push_back({AlgebraType::D(r), CosetCase{CosetKind::DSpinor, 0, sector}});
  for (int r = 2; r <= 3; ++r) {
    cases.push_back({AlgebraType::B(r), CosetCase{CosetKind::BDVector, 0, 1}});
    cases.push_back({AlgebraType::D(r), CosetCase{CosetKind::BDVector, 0, 1}});
  }
  for (auto& [alg, c] : cases) {
    std::vector<Rational> ts;
    if (c.kind == CosetKind::DSpinor)
      ts = {Rational(1, 2), Rational(1), Rational(3, 2)};
    else
      ts = {Rational(1), Rational(2), Rational(3)};
    for (auto& t : ts) {
      for (int trial = 0; trial < 10; ++trial) {
        TauPoint tau = random_tau(alg.rank, 2);
        Rational lhs = weyl::truncated_bgg_character(alg, c, t, tau);
        Rational rhs = weyl::weyl_character(alg, weyl::case_weight(alg, c, t), tau);
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("t-symmetry and vanishing of the continued character") {
  // C: ch_{r,t} = (-1)^{r(r+1)/2} ch_{r,-r-1-t}; zero at t in {-2/2,...,-2r/2}
  for (int r = 1; r <= 3; ++r) {
    auto alg = AlgebraType::C(r);
    CosetCase c{CosetKind::CSpinor, 0, 1};
    const Rational t(5, 7);
    TauPoint tau = random_tau(r, 14);
    Rational lhs = weyl::truncated_bgg_character(alg, c, t, tau);
    Rational rhs = weyl::truncated_bgg_character(alg, c, Rational(-r - 1) - t, tau);
    Rational sign = (r * (r + 1) / 2) % 2 == 0 ? Rational(1) : Rational(-1);
    CHECK(lhs == sign * rhs);
    for (int num = 2; num <= 2 * r; ++num) {
      TauPoint tau2 = random_tau(r, 2);
      CHECK(weyl::truncated_bgg_character(alg, c, Rational(-num, 2), tau2) == Rational(0));
    }
  }
  // D-spinor: ch^pm_t = (-1)^{r(r-1)/2} ch^{pm(-1)^r}_{-r+1-t}
  for (int r = 2; r <= 3; ++r) {
    auto alg = AlgebraType::D(r);
    const Rational t(3, 5);
    TauPoint tau = random_tau(r, 10);
    for (int sector : {1, -1}) {
      CosetCase c{CosetKind::DSpinor, 0, sector};
      CosetCase cbar{CosetKind::DSpinor, 0, r % 2 == 0 ? sector : -sector};
      Rational lhs = weyl::truncated_bgg_character(alg, c, t, tau);
      Rational rhs = weyl::truncated_bgg_character(alg, cbar, Rational(-r + 1) - t, tau);
      Rational sign = (r * (r - 1) / 2) % 2 == 0 ? Rational(1) : Rational(-1);
      CHECK(lhs == sign * rhs);
      for (int num = 1; num <= 2 * r - 3; ++num) {
        TauPoint tau2 = random_tau(r, 2);
        CHECK(weyl::truncated_bgg_character(alg, c, Rational(-num, 2), tau2) == Rational(0));
      }
    }
  }
  // BD: ch_{1,t} = (-1)^K ch_{1,2-K-t}; zero at t in {-1,...,3-K}
  for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)}) {
    const int K = alg.K();
    CosetCase c{CosetKind::BDVector, 0, 1};
    const Rational t(9, 4);
    TauPoint tau = random_tau(alg.rank, 4);
    Rational lhs = weyl::truncated_bgg_character(alg, c, t, tau);
    Rational rhs = weyl::truncated_bgg_character(alg, c, Rational(2 - K) - t, tau);
    Rational sign = K % 2 == 0 ? Rational(1) : Rational(-1);
    CHECK(lhs == sign * rhs);
    for (int v = -1; v >= 3 - K; --v) {
      TauPoint tau2 = random_tau(alg.rank, 1);
      CHECK(weyl::truncated_bgg_character(alg, c, Rational(v), tau2) == Rational(0));
    }
  }
}

TEST_CASE("coset JSON shape") {
  auto cs = weyl::enumerate_cosets(AlgebraType::C(2), CosetCase{CosetKind::CSpinor, 0, 1});
  auto j = weyl::coset_to_json(cs[0], Rational(1), AlgebraType::C(2));
  CHECK(j.find("\"tag\"") != std::string::npos);
  CHECK(j.find("\"length\"") != std::string::npos);
  CHECK(j.find("\"hw\"") != std::string::npos);
}

TEST_CASE("dot action rejects elements outside the Weyl group") {
  SignedPerm w = SignedPerm::id(2);
  w.sign = {-1, 1};
  CHECK_THROWS_AS(weyl::dot_action(w, Weight{Rational(1), Rational(0)}, AlgebraType::A(2)), std::invalid_argument);
  CHECK_THROWS_AS(weyl::dot_action(w, Weight{Rational(1), Rational(0)}, AlgebraType::D(2)), std::invalid_argument);
  CHECK_NOTHROW(weyl::dot_action(w, Weight{Rational(1), Rational(0)}, AlgebraType::B(2)));
}
