#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qbgg/oscillator.hpp"

using namespace qbgg;
using osc::FockVector;
using osc::Monomial;
using osc::RPoly;
using osc::SpacePtr;
using osc::Substitution;
using osc::TwistWeights;

namespace {

std::mt19937_64 rng(971231);

RPoly random_poly(const SpacePtr& s, uint32_t maxdeg, int terms) {
  std::uniform_int_distribution<uint32_t> e(0, maxdeg);
  std::uniform_int_distribution<long> c(-6, 6);
  RPoly out(s);
  for (int k = 0; k < terms; ++k) {
    Monomial m = Monomial::one(s->pairs());
    for (int p = 0; p < s->pairs(); ++p) {
      m.cr[p] = e(rng);
      m.an[p] = e(rng);
    }
    out.add_term(m, Rational(c(rng)));
  }
  return out;
}

}  // namespace

TEST_CASE("defining relation and commuting pairs") {
  auto s = osc::make_space({"p"});
  RPoly a = RPoly::generator(s, 0, false);
  RPoly abar = RPoly::generator(s, 0, true);
  // a abar = abar a + 1
  RPoly prod = a * abar;
  RPoly want = abar * a + RPoly::constant(s, Rational(1));
  CHECK(prod == want);

  auto s2 = osc::make_space({"p", "q"});
  RPoly ap = RPoly::generator(s2, 0, false);
  RPoly abarq = RPoly::generator(s2, 1, true);
  CHECK(ap * abarq == abarq * ap);
}

TEST_CASE("(a abar)^2 = abar^2 a^2 + 3 abar a + 1") {
  auto s = osc::make_space({"p"});
  RPoly a = RPoly::generator(s, 0, false);
  RPoly abar = RPoly::generator(s, 0, true);
  RPoly x = (a * abar) * (a * abar);
  RPoly want(s);
  want.add_term(Monomial{{2}, {2}}, Rational(1));
  want.add_term(Monomial{{1}, {1}}, Rational(3));
  want.add_term(Monomial{{0}, {0}}, Rational(1));
  CHECK(x == want);
  // cross-check against truncated Fock matrices at cutoff 6
  auto mx = osc::truncated_matrix(x, 6);
  auto ma = osc::truncated_matrix(a * abar, 6);
  for (uint32_t m = 0; m + 1 <= 6; ++m) {
    // (a abar)|m> = (m+1)|m>, so the square acts by (m+1)^2
    CHECK(mx.m[m][m] == Rational(static_cast<long>((m + 1) * (m + 1))));
    CHECK(ma.m[m][m] == Rational(static_cast<long>(m + 1)));
  }
}

TEST_CASE("normal_mul associativity and distributivity (randomized)") {
  auto s = osc::make_space({"p", "q"});
  for (int it = 0; it < 40; ++it) {
    RPoly x = random_poly(s, 2, 3), y = random_poly(s, 2, 3), z = random_poly(s, 2, 3);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * (y + z) == x * y + x * z);
  }
}

TEST_CASE("normal_mul vs truncated matrix product (randomized, 200 cases)") {
  for (int it = 0; it < 200; ++it) {
    const int pairs = 1 + (it % 2);
    std::vector<std::string> labels = {"p", "q"};
    labels.resize(pairs);
    auto s = osc::make_space(labels);
    RPoly x = random_poly(s, 3, 3), y = random_poly(s, 3, 3);
    const uint32_t cutoff = 7;
    auto mxy = osc::truncated_matrix(x * y, cutoff);
    auto mx = osc::truncated_matrix(x, cutoff);
    auto my = osc::truncated_matrix(y, cutoff);
    uint32_t ycr = 0;
    for (auto& [m, c] : y.terms()) {
      uint32_t d = 0;
      for (auto e : m.cr) d = std::max(d, e);
      ycr = std::max(ycr, d);
    }
    const size_t dim = mxy.basis.size();
    for (size_t col = 0; col < dim; ++col) {
      bool safe = true;
      for (auto occ : mxy.basis[col])
        if (occ + ycr > cutoff) safe = false;
      if (!safe) continue;
      for (size_t row = 0; row < dim; ++row) {
        Rational acc(0);
        for (size_t mid = 0; mid < dim; ++mid) acc += mx.m[row][mid] * my.m[mid][col];
        CHECK(acc == mxy.m[row][col]);
      }
    }
  }
}

TEST_CASE("fock action") {
  auto s = osc::make_space({"p"});
  RPoly a = RPoly::generator(s, 0, false);
  RPoly abar = RPoly::generator(s, 0, true);
  // a|0> = 0
  CHECK(osc::apply_to_fock(a, osc::vacuum(s)).is_zero());
  // abar a |m> = m|m>
  FockVector m3;
  m3.entries[{3}] = Rational(1);
  auto r = osc::apply_to_fock(abar * a, m3);
  CHECK(r.entries.size() == 1);
  CHECK(r.entries.at({3}) == Rational(3));
  // a^2 |3> = 6 |1>
  auto r2 = osc::apply_to_fock(a * a, m3);
  CHECK(r2.entries.size() == 1);
  CHECK(r2.entries.at({1}) == Rational(6));
}

TEST_CASE("truncated matrix shapes") {
  auto s = osc::make_space({"p"});
  RPoly num = RPoly::generator(s, 0, true) * RPoly::generator(s, 0, false);
  auto m = osc::truncated_matrix(num, 2);
  CHECK(m.basis.size() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m.m[i][j] == (i == j ? Rational(i) : Rational(0)));
  auto ma = osc::truncated_matrix(RPoly::generator(s, 0, false), 2);
  CHECK(ma.m[0][1] == Rational(1));
  CHECK(ma.m[1][2] == Rational(2));
  CHECK(ma.m[0][0] == Rational(0));
}

TEST_CASE("closed-form twisted trace") {
  auto s = osc::make_space({"p"});
  TwistWeights w;
  w.q = {Rational(1, 2)};
  CHECK(osc::fock_trace(RPoly::constant(s, Rational(1)), w) == Rational(2));
  RPoly num = RPoly::generator(s, 0, true) * RPoly::generator(s, 0, false);
  CHECK(osc::fock_trace(num, w) == Rational(2));  // q/(1-q)^2 at q=1/2
  RPoly unbal = RPoly::generator(s, 0, true) * num;
  CHECK(osc::fock_trace(unbal, w) == Rational(0));
  TwistWeights bad;
  bad.q = {Rational(1)};
  CHECK_THROWS_AS(osc::fock_trace(num, bad), std::domain_error);
}

TEST_CASE("trace linearity and float-series agreement") {
  auto s = osc::make_space({"p"});
  TwistWeights w;
  w.q = {Rational(1, 3)};
  for (int it = 0; it < 100; ++it) {
    RPoly x = random_poly(s, 4, 4);
    Rational exact = osc::fock_trace(x, w);
    double series = osc::fock_trace_series(x, {1.0 / 3.0}, 60);
    CHECK(std::abs(exact.to_double() - series) <= 1e-9 * (1 + std::abs(series)));
    RPoly y = random_poly(s, 4, 4);
    CHECK(osc::fock_trace(x + y, w) == osc::fock_trace(x, w) + osc::fock_trace(y, w));
  }
}

TEST_CASE("substitutions") {
  auto s = osc::make_space({"p"});
  RPoly a = RPoly::generator(s, 0, false);
  RPoly abar = RPoly::generator(s, 0, true);
  // particle-hole on abar a: abar a -> -(a abar) = -abar a - 1
  Substitution ph = Substitution::particle_hole(s, {0});
  RPoly got = osc::substitute(abar * a, ph);
  RPoly want = -(abar * a) - RPoly::constant(s, Rational(1));
  CHECK(got == want);
  // identity map
  CHECK(osc::substitute(abar * a, Substitution::identity(s)) == abar * a);
  // particle-hole twice = the signed identity abar -> -abar, a -> -a
  auto s2 = osc::make_space({"p", "q"});
  Substitution ph2 = Substitution::particle_hole(s2, {0});
  for (int it = 0; it < 10; ++it) {
    RPoly x = random_poly(s2, 2, 4);
    RPoly twice = osc::substitute(osc::substitute(x, ph2), ph2);
    Substitution negate = Substitution::identity(s2);
    negate.cr_img[0].terms = {{Rational(-1), {0, true}}};
    negate.an_img[0].terms = {{Rational(-1), {0, false}}};
    CHECK(twice == osc::substitute(x, negate));
  }
  // non-automorphism rejected
  Substitution bad = Substitution::identity(s);
  bad.cr_img[0].terms = {{Rational(2), {0, true}}};
  CHECK_THROWS_WITH_AS(osc::substitute(abar, bad), "substitute_generators: not an automorphism",
                       std::invalid_argument);
}

TEST_CASE("json round trip") {
  auto s = osc::make_space({"p", "q"});
  RPoly x = random_poly(s, 3, 5);
  auto text = osc::poly_to_json(x);
  CHECK(osc::poly_from_json(text, s) == x);
}

TEST_CASE("mismatched spaces rejected") {
  auto s1 = osc::make_space({"p"});
  auto s2 = osc::make_space({"q"});
  RPoly x = RPoly::generator(s1, 0, false);
  RPoly y = RPoly::generator(s2, 0, false);
  CHECK_THROWS_AS(x * y, std::invalid_argument);
}
