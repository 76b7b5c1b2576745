// Acceptance suite: runs every criterion of the verification grid at zero
// tolerance under the exact backend and prints one pass/fail line per
// criterion. Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qbgg/transfer.hpp"

using namespace qbgg;
using lax::AlgebraType;
using lax::FactorisationCase;
using lax::RLax;
using transfer::TensorOperator;
using weyl::CosetCase;
using weyl::CosetKind;
using weyl::TauPoint;

namespace {

uint64_t g_seed = 20240917;
std::mt19937_64 g_rng;

Rational rand_rational(long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  return Rational(d(g_rng), d(g_rng));
}

// Representation labels: numerators span the full sampling range, while the
// denominator stays small since the twist-point precision scales with it.
Rational rand_label() {
  std::uniform_int_distribution<long> num(1, 997), den(1, 9);
  return Rational(num(g_rng), den(g_rng));
}

TauPoint rand_tau(int count, long D) {
  std::set<std::string> seen;
  TauPoint out;
  out.D = D;
  while (static_cast<int>(out.u.size()) < count) {
    Rational r = rand_rational(2, 97);
    if (r.is_one() || seen.count(r.str()) || seen.count(r.inv().str())) continue;
    seen.insert(r.str());
    out.u.push_back(r);
  }
  return out;
}

struct Criterion {
  int number;
  std::string title;
  bool pass = true;
  long failures = 0;
  double ms = 0;
};

struct Harness {
  std::vector<Criterion> done;
  bool all_pass = true;

  template <class F>
  void run(int number, const std::string& title, F&& body) {
    Criterion c{number, title};
    auto start = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.pass = false;
      std::printf("      exception: %s\n", e.what());
    }
    c.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.0f ms)\n", c.pass ? "PASS" : "FAIL", c.number, c.title.c_str(), c.ms);
    std::fflush(stdout);
    all_pass = all_pass && c.pass;
    done.push_back(c);
  }
};

void expect(Criterion& c, bool ok, const std::string& what) {
  if (!ok) {
    c.pass = false;
    ++c.failures;
    std::printf("      FAILED: %s\n", what.c_str());
  }
}

void expect_report(Criterion& c, const lax::Report& rep, const std::string& what) {
  expect(c, rep.pass, what + " (defects: " + std::to_string(rep.defect_terms) + ")");
}

const weyl::CosetElement* defining(const std::vector<weyl::CosetElement>& cs) {
  for (auto& e : cs)
    if (e.length == 0) return &e;
  return nullptr;
}

}  // namespace

int main() {
  if (const char* env = std::getenv("QBGG_SEED")) g_seed = std::strtoull(env, nullptr, 10);
  g_rng.seed(g_seed);
  std::printf("acceptance suite, exact backend, seed %llu\n", static_cast<unsigned long long>(g_seed));

  Harness h;

  // ---------------------------------------------------------------- criterion 1
  h.run(1, "RTT suite: zero defect for all Lax families", [&](Criterion& c) {
    for (int n = 2; n <= 4; ++n) {
      std::vector<Rational> lam;
      for (int i = 0; i < n; ++i) lam.push_back(rand_label() - rand_label());
      RLax L = lax::verma_a(n, lam);
      expect_report(c, lax::rtt_check(L, L, lax::r_matrix(AlgebraType::A(n))), "A-Verma n=" + std::to_string(n));
    }
    const std::pair<int, int> rect[] = {{2, 1}, {3, 1}, {3, 2}, {4, 2}};
    for (auto [n, a] : rect) {
      RLax L = lax::rect_a<Rational>(n, a, rand_label());
      expect_report(c, lax::rtt_check(L, L, lax::r_matrix(AlgebraType::A(n))),
                    "A-rect (" + std::to_string(n) + "," + std::to_string(a) + ")");
    }
    for (int n = 2; n <= 3; ++n) {
      auto R = lax::r_matrix(AlgebraType::A(n));
      for (int a = 1; a < n; ++a)
        for (auto& e : weyl::enumerate_cosets(AlgebraType::A(n), CosetCase{CosetKind::ASubset, a, 1})) {
          RLax L = lax::deg_a(n, e.subset);
          expect_report(c, lax::rtt_check(L, L, R), "A-deg n=" + std::to_string(n) + " " + e.tag());
        }
    }
    for (int r = 1; r <= 2; ++r) {
      auto R = lax::r_matrix(AlgebraType::C(r));
      RLax L = lax::nondeg_c<Rational>(r, rand_label());
      expect_report(c, lax::rtt_check(L, L, R), "C-nondeg r=" + std::to_string(r));
      expect_report(c, lax::rtt_check(lax::deg_c_plus(r), lax::deg_c_plus(r), R), "C-deg+ r=" + std::to_string(r));
      expect_report(c, lax::rtt_check(lax::deg_c_minus(r), lax::deg_c_minus(r), R), "C-deg- r=" + std::to_string(r));
    }
    for (int r = 2; r <= 3; ++r) {
      auto R = lax::r_matrix(AlgebraType::D(r));
      RLax L = lax::nondeg_d<Rational>(r, rand_label());
      expect_report(c, lax::rtt_check(L, L, R), "D-nondeg r=" + std::to_string(r));
      expect_report(c, lax::rtt_check(lax::deg_d_plus(r), lax::deg_d_plus(r), R), "D-deg+ r=" + std::to_string(r));
      expect_report(c, lax::rtt_check(lax::deg_d_minus(r), lax::deg_d_minus(r), R), "D-deg- r=" + std::to_string(r));
    }
    for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)}) {
      auto R = lax::r_matrix(alg);
      RLax L = lax::quad_bd<Rational>(alg, rand_label());
      expect_report(c, lax::rtt_check(L, L, R), "BD-quad K=" + std::to_string(alg.K()));
      expect_report(c, lax::rtt_check(lax::deg_bd_1(alg), lax::deg_bd_1(alg), R),
                    "BD-deg1 K=" + std::to_string(alg.K()));
      expect_report(c, lax::rtt_check(lax::deg_bd_K(alg), lax::deg_bd_K(alg), R),
                    "BD-degK K=" + std::to_string(alg.K()));
    }
  });

  // ---------------------------------------------------------------- criterion 2
  h.run(2, "Lie-algebra suite incl. BD free-term identity", [&](Criterion& c) {
    for (int n = 2; n <= 4; ++n) {
      std::vector<Rational> lam;
      for (int i = 0; i < n; ++i) lam.push_back(rand_label() - rand_label());
      expect_report(c, lax::lie_algebra_check(lax::verma_a(n, lam)), "gl relations, A-Verma n=" + std::to_string(n));
    }
    const std::pair<int, int> rect[] = {{2, 1}, {3, 1}, {3, 2}, {4, 2}};
    for (auto [n, a] : rect)
      expect_report(c, lax::lie_algebra_check(lax::rect_a<Rational>(n, a, rand_label())),
                    "gl relations, A-rect (" + std::to_string(n) + "," + std::to_string(a) + ")");
    for (int r = 1; r <= 2; ++r)
      expect_report(c, lax::lie_algebra_check(lax::nondeg_c<Rational>(r, rand_label())),
                    "sp relations r=" + std::to_string(r));
    for (int r = 2; r <= 3; ++r)
      expect_report(c, lax::lie_algebra_check(lax::nondeg_d<Rational>(r, rand_label())),
                    "so relations (linear D) r=" + std::to_string(r));
    for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)})
      expect_report(c, lax::lie_algebra_check(lax::quad_bd<Rational>(alg, rand_label())),
                    "so relations + G-identity K=" + std::to_string(alg.K()));
  });

  // ---------------------------------------------------------------- criterion 3
  h.run(3, "Character suite (N=0 identities + t-properties)", [&](Criterion& c) {
    auto three_way = [&](const AlgebraType& alg, const CosetCase& cc, const Rational& t, long D) {
      weyl::Weight lam = weyl::case_weight(alg, cc, t);
      auto cosets = weyl::enumerate_cosets(alg, cc);
      auto mod = transfer::build_finite_module(lax::coset_lax(alg, cc, *defining(cosets), t), lam);
      for (int trial = 0; trial < 10; ++trial) {
        TauPoint tau = rand_tau(alg.rank, D);
        Rational a = weyl::truncated_bgg_character(alg, cc, t, tau);
        Rational b = weyl::weyl_character(alg, lam, tau);
        Rational d = transfer::transfer_finite(mod, tau, 0).at(0, 0, 0);
        bool ok = a == b && b == d;
        expect(c, ok,
               "three-way character equality " + alg.str() + " t=" + t.str() + " trial " + std::to_string(trial));
        if (!ok) return;
      }
    };
    for (int n = 2; n <= 4; ++n)
      for (int a = 1; a < n; ++a)
        for (long t = 1; t <= 3; ++t)
          three_way(AlgebraType::A(n), CosetCase{CosetKind::ASubset, a, 1}, Rational(t), 1);
    for (int r = 1; r <= 2; ++r)
      for (long t = 1; t <= 3; ++t) three_way(AlgebraType::C(r), CosetCase{CosetKind::CSpinor, 0, 1}, Rational(t), 1);
    for (int r = 2; r <= 3; ++r)
      for (int sector : {1, -1})
        for (long tt = 1; tt <= 3; ++tt)
          three_way(AlgebraType::D(r), CosetCase{CosetKind::DSpinor, 0, sector}, Rational(tt, 2), 2);
    for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)})
      for (long t = 1; t <= 3; ++t) three_way(alg, CosetCase{CosetKind::BDVector, 0, 1}, Rational(t), 1);

    // Lemma t-properties: symmetry at random rational t, vanishing on the
    // printed special sets
    for (int r = 1; r <= 2; ++r) {
      auto alg = AlgebraType::C(r);
      CosetCase cc{CosetKind::CSpinor, 0, 1};
      Rational t = rand_label();
      TauPoint tau = rand_tau(r, 2 * t.den_long());
      Rational sign = (r * (r + 1) / 2) % 2 == 0 ? Rational(1) : Rational(-1);
      expect(c,
             weyl::truncated_bgg_character(alg, cc, t, tau) ==
                 sign * weyl::truncated_bgg_character(alg, cc, Rational(-r - 1) - t, tau),
             "t-property C(a) r=" + std::to_string(r));
      for (int num = 2; num <= 2 * r; ++num)
        expect(c, weyl::truncated_bgg_character(alg, cc, Rational(-num, 2), rand_tau(r, 2)) == Rational(0),
               "t-property C(b) r=" + std::to_string(r) + " t=-" + std::to_string(num) + "/2");
    }
    for (int r = 2; r <= 3; ++r) {
      auto alg = AlgebraType::D(r);
      Rational t = rand_label();
      TauPoint tau = rand_tau(r, 2 * t.den_long());
      Rational sign = (r * (r - 1) / 2) % 2 == 0 ? Rational(1) : Rational(-1);
      for (int sector : {1, -1}) {
        CosetCase cc{CosetKind::DSpinor, 0, sector};
        CosetCase cbar{CosetKind::DSpinor, 0, r % 2 == 0 ? sector : -sector};
        expect(c,
               weyl::truncated_bgg_character(alg, cc, t, tau) ==
                   sign * weyl::truncated_bgg_character(alg, cbar, Rational(-r + 1) - t, tau),
               "t-property D(a) r=" + std::to_string(r));
        for (int num = 1; num <= 2 * r - 3; ++num)
          expect(c, weyl::truncated_bgg_character(alg, cc, Rational(-num, 2), rand_tau(r, 2)) == Rational(0),
                 "t-property D(b) r=" + std::to_string(r));
      }
    }
    for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)}) {
      const int K = alg.K();
      CosetCase cc{CosetKind::BDVector, 0, 1};
      Rational t = rand_label();
      TauPoint tau = rand_tau(alg.rank, t.den_long());
      Rational sign = K % 2 == 0 ? Rational(1) : Rational(-1);
      expect(c,
             weyl::truncated_bgg_character(alg, cc, t, tau) ==
                 sign * weyl::truncated_bgg_character(alg, cc, Rational(2 - K) - t, tau),
             "t-property BD(a) K=" + std::to_string(K));
      for (int v = -1; v >= 3 - K; --v)
        expect(c, weyl::truncated_bgg_character(alg, cc, Rational(v), rand_tau(alg.rank, 1)) == Rational(0),
               "t-property BD(b) K=" + std::to_string(K) + " t=" + std::to_string(v));
    }
  });

  // ---------------------------------------------------------------- criterion 4
  h.run(4, "BGG transfer suite: finite transfer = alternating coset sum", [&](Criterion& c) {
    struct Inst {
      AlgebraType alg;
      CosetCase cc;
      Rational t;
      int N;
      long D;
      std::string label;
    };
    std::vector<Inst> grid;
    grid.push_back({AlgebraType::A(2), {CosetKind::ASubset, 1, 1}, Rational(1), 1, 1, "A n=2 a=1 t=1 N=1"});
    grid.push_back({AlgebraType::A(2), {CosetKind::ASubset, 1, 1}, Rational(2), 2, 1, "A n=2 a=1 t=2 N=2"});
    grid.push_back({AlgebraType::A(3), {CosetKind::ASubset, 1, 1}, Rational(1), 1, 1, "A n=3 a=1 t=1 N=1"});
    grid.push_back({AlgebraType::A(3), {CosetKind::ASubset, 2, 1}, Rational(1), 1, 1, "A n=3 a=2 t=1 N=1"});
    grid.push_back({AlgebraType::C(2), {CosetKind::CSpinor, 0, 1}, Rational(1), 1, 1, "C r=2 t=1 N=1"});
    grid.push_back(
        {AlgebraType::D(2), {CosetKind::DSpinor, 0, 1}, Rational(1, 2), 1, 2, "D-spinor r=2 even t=1/2 N=1"});
    grid.push_back(
        {AlgebraType::D(2), {CosetKind::DSpinor, 0, -1}, Rational(1, 2), 1, 2, "D-spinor r=2 odd t=1/2 N=1"});
    grid.push_back(
        {AlgebraType::D(3), {CosetKind::DSpinor, 0, 1}, Rational(1, 2), 1, 2, "D-spinor r=3 even t=1/2 N=1"});
    grid.push_back(
        {AlgebraType::D(3), {CosetKind::DSpinor, 0, -1}, Rational(1, 2), 1, 2, "D-spinor r=3 odd t=1/2 N=1"});
    grid.push_back({AlgebraType::B(2), {CosetKind::BDVector, 0, 1}, Rational(1), 1, 1, "B K=5 t=1 N=1"});
    grid.push_back({AlgebraType::D(3), {CosetKind::BDVector, 0, 1}, Rational(1), 1, 1, "D K=6 t=1 N=1"});
    for (auto& inst : grid) {
      TauPoint tau = rand_tau(inst.alg.rank, inst.D);
      auto rep = transfer::bgg_identity_check(inst.alg, inst.cc, inst.t, inst.N, tau);
      expect_report(c, rep, inst.label);
    }
  });

  // ---------------------------------------------------------------- criterion 5
  h.run(5, "Factorisation suites: Lax level and transfer level", [&](Criterion& c) {
    expect_report(c, lax::lax_factorisation_check(FactorisationCase::A, AlgebraType::A(2), 1, rand_label()),
                  "facA n=2 a=1");
    expect_report(c, lax::lax_factorisation_check(FactorisationCase::A, AlgebraType::A(3), 1, rand_label()),
                  "facA n=3 a=1");
    expect_report(c, lax::lax_factorisation_check(FactorisationCase::A, AlgebraType::A(3), 2, rand_label()),
                  "facA n=3 a=2");
    for (int r = 1; r <= 2; ++r)
      expect_report(c, lax::lax_factorisation_check(FactorisationCase::C, AlgebraType::C(r), 0, rand_label()),
                    "factor-C r=" + std::to_string(r));
    for (int r = 2; r <= 3; ++r)
      expect_report(c, lax::lax_factorisation_check(FactorisationCase::D, AlgebraType::D(r), 0, rand_label()),
                    "factor-D r=" + std::to_string(r));
    for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)})
      expect_report(c, lax::lax_factorisation_check(FactorisationCase::BD, alg, 0, rand_label()),
                    "factor-BD K=" + std::to_string(alg.K()));

    // transfer level at N=1, two random rational t each
    for (int trial = 0; trial < 2; ++trial) {
      {
        auto alg = AlgebraType::A(2);
        CosetCase cc{CosetKind::ASubset, 1, 1};
        auto cosets = weyl::enumerate_cosets(alg, cc);
        std::vector<Rational> lam{rand_label(), rand_label()};
        long D = lam[0].den_long() * lam[1].den_long();
        auto rep = transfer::factorisation_identity_check(transfer::FactorKind::ADetails, alg, cc, cosets[0],
                                                          Rational(0), 1, rand_tau(2, D), lam);
        expect_report(c, rep, "details-fact n=2 trial " + std::to_string(trial));
      }
      {
        auto alg = AlgebraType::A(2);
        CosetCase cc{CosetKind::ASubset, 1, 1};
        Rational t = rand_label();
        for (auto& e : weyl::enumerate_cosets(alg, cc)) {
          auto rep = transfer::factorisation_identity_check(transfer::FactorKind::AViaQQ, alg, cc, e, t, 1,
                                                            rand_tau(2, t.den_long()));
          expect_report(c, rep, "T-via-QQ A " + e.tag() + " trial " + std::to_string(trial));
        }
      }
      {
        auto alg = AlgebraType::C(2);
        CosetCase cc{CosetKind::CSpinor, 0, 1};
        Rational t = rand_label();
        for (auto& e : weyl::enumerate_cosets(alg, cc)) {
          if (e.length != 1) continue;  // mu = (+,-)
          auto rep = transfer::factorisation_identity_check(transfer::FactorKind::CViaQQ, alg, cc, e, t, 1,
                                                            rand_tau(2, t.den_long()));
          expect_report(c, rep, "T-via-QQ C " + e.tag() + " trial " + std::to_string(trial));
        }
      }
      {
        auto alg = AlgebraType::D(2);
        CosetCase cc{CosetKind::DSpinor, 0, 1};
        Rational t = rand_label();
        for (auto& e : weyl::enumerate_cosets(alg, cc)) {
          auto rep = transfer::factorisation_identity_check(transfer::FactorKind::DViaQQ, alg, cc, e, t, 1,
                                                            rand_tau(2, t.den_long()));
          expect_report(c, rep, "T-via-QQ D " + e.tag() + " trial " + std::to_string(trial));
        }
      }
      for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)}) {
        CosetCase cc{CosetKind::BDVector, 0, 1};
        Rational t = rand_label();
        for (auto& e : weyl::enumerate_cosets(alg, cc)) {
          if (e.k != 2 && e.k != alg.K() - 1) continue;  // one unprimed, one primed
          auto rep = transfer::factorisation_identity_check(transfer::FactorKind::BDViaQQ, alg, cc, e, t, 1,
                                                            rand_tau(alg.rank, t.den_long()));
          expect_report(
              c, rep, "T-via-QQ BD K=" + std::to_string(alg.K()) + " " + e.tag() + " trial " + std::to_string(trial));
        }
      }
    }
  });

  // ---------------------------------------------------------------- criterion 6
  h.run(6, "QQ relations and determinant identities", [&](Criterion& c) {
    for (int N = 1; N <= 2; ++N) {
      expect_report(c, transfer::qq_relation_check(2, {}, 1, 2, N, rand_tau(2, 2)), "qq n=2 N=" + std::to_string(N));
      const std::pair<int, int> pairs3[] = {{1, 2}, {1, 3}, {2, 3}};
      for (auto [i, j] : pairs3)
        expect_report(c, transfer::qq_relation_check(3, {}, i, j, N, rand_tau(3, 2)),
                      "qq n=3 I={} (" + std::to_string(i) + "," + std::to_string(j) + ") N=" + std::to_string(N));
      for (int k = 1; k <= 3; ++k) {
        std::vector<int> rest;
        for (int v = 1; v <= 3; ++v)
          if (v != k) rest.push_back(v);
        expect_report(c, transfer::qq_relation_check(3, {k}, rest[0], rest[1], N, rand_tau(3, 2)),
                      "qq n=3 I={" + std::to_string(k) + "} N=" + std::to_string(N));
      }
    }
    expect_report(c,
                  transfer::determinant_identity_check(transfer::DetKind::TDet, 2, {Rational(1), Rational(0)}, {}, 1,
                                                       rand_tau(2, 1)),
                  "Tdet n=2 lambda=(1,0)");
    expect_report(c,
                  transfer::determinant_identity_check(transfer::DetKind::TDet, 3,
                                                       {Rational(2), Rational(1), Rational(0)}, {}, 1, rand_tau(3, 1)),
                  "Tdet n=3 lambda=(2,1,0)");
    const std::vector<std::vector<int>> subsets{{1, 2}, {1, 3}, {2, 3}};
    for (auto& I : subsets)
      expect_report(c, transfer::determinant_identity_check(transfer::DetKind::QI, 3, {}, I, 1, rand_tau(3, 1)),
                    "QI n=3 I={" + std::to_string(I[0]) + "," + std::to_string(I[1]) + "}");
  });

  // ---------------------------------------------------------------- criterion 7
  h.run(7, "t-symmetry and commutativity", [&](Criterion& c) {
    for (int trial = 0; trial < 3; ++trial) {
      Rational t = rand_label();
      long D = t.den_long();
      expect_report(c,
                    transfer::t_symmetry_check(AlgebraType::C(2), CosetCase{CosetKind::CSpinor, 0, 1}, 1,
                                               rand_tau(2, D), t),
                    "t-symmetry C r=2 t=" + t.str());
      for (int sector : {1, -1})
        expect_report(c,
                      transfer::t_symmetry_check(AlgebraType::D(2), CosetCase{CosetKind::DSpinor, 0, sector}, 1,
                                                 rand_tau(2, 2 * D), t),
                      "t-symmetry D-spinor r=2 t=" + t.str());
      for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)})
        expect_report(
            c, transfer::t_symmetry_check(alg, CosetCase{CosetKind::BDVector, 0, 1}, 1, rand_tau(alg.rank, D), t),
            "t-symmetry BD K=" + std::to_string(alg.K()) + " t=" + t.str());
    }
    {
      std::vector<Rational> lam1{rand_rational(1, 20), rand_rational(1, 20)};
      std::vector<Rational> lam2{rand_rational(1, 20), rand_rational(1, 20)};
      long D = lam1[0].den_long() * lam1[1].den_long() * lam2[0].den_long() * lam2[1].den_long();
      TauPoint tau = rand_tau(2, D);
      auto A1 = transfer::transfer_plus(lax::verma_a(2, lam1), tau, 2);
      auto A2 = transfer::transfer_plus(lax::verma_a(2, lam2), tau, 2);
      expect_report(c, transfer::commutativity_check("T+ vs T+", A1, A2), "[T+_lambda(x), T+_mu(y)] = 0, N=2");
      auto alg = AlgebraType::A(2);
      CosetCase cc{CosetKind::ASubset, 1, 1};
      auto cosets = weyl::enumerate_cosets(alg, cc);
      auto mod = transfer::build_finite_module(lax::coset_lax(alg, cc, *defining(cosets), Rational(1)),
                                               weyl::case_weight(alg, cc, Rational(1)));
      auto T = transfer::transfer_finite(mod, tau, 2);
      auto Q1 = transfer::q_operator(lax::deg_a(2, {1}), tau, 2);
      expect_report(c, transfer::commutativity_check("Q vs T", Q1, T), "[Q_1(x), T_(1,0)(y)] = 0, N=2");
    }
    {
      auto alg = AlgebraType::C(2);
      CosetCase cc{CosetKind::CSpinor, 0, 1};
      TauPoint tau = rand_tau(2, 1);
      for (auto& e : weyl::enumerate_cosets(alg, cc)) {
        if (e.length != 1) continue;
        auto Qmu = transfer::q_weyl_conjugated(alg, cc, e, 1, tau, false);
        auto Qbar = transfer::q_weyl_conjugated(alg, cc, e, 1, tau, true);
        expect_report(c, transfer::commutativity_check("Qmu vs Qbar", Qmu, Qbar), "[Q_mu(x), Q_mubar(y)] = 0, N=1");
      }
    }
  });

  // ---------------------------------------------------------------- criterion 8
  h.run(8, "Renormalized-limit suite (Laurent backend)", [&](Criterion& c) {
    const std::pair<int, int> acase[] = {{2, 1}, {3, 1}, {3, 2}};
    for (auto [n, a] : acase)
      expect_report(c, lax::renormalized_limit_check(FactorisationCase::A, AlgebraType::A(n), a),
                    "limit A n=" + std::to_string(n) + " a=" + std::to_string(a));
    for (int r = 1; r <= 2; ++r)
      expect_report(c, lax::renormalized_limit_check(FactorisationCase::C, AlgebraType::C(r), 0),
                    "limit C r=" + std::to_string(r));
    expect_report(c, lax::renormalized_limit_check(FactorisationCase::D, AlgebraType::D(2), 0), "limit D r=2");
    for (auto alg : {AlgebraType::B(2), AlgebraType::D(3)})
      expect_report(c, lax::renormalized_limit_check(FactorisationCase::BD, alg, 0),
                    "limit BD K=" + std::to_string(alg.K()));
  });

  // ---------------------------------------------------------------- criterion 9
  h.run(9, "Oracle property tests", [&](Criterion& c) {
    // normal_mul vs truncated matrices, 200 random cases
    std::uniform_int_distribution<uint32_t> expo(0, 3);
    std::uniform_int_distribution<long> coefd(-6, 6);
    for (int it = 0; it < 200; ++it) {
      const int pairs = 1 + (it % 2);
      std::vector<std::string> labels = {"p", "q"};
      labels.resize(pairs);
      auto s = osc::make_space(labels);
      auto rand_poly = [&]() {
        osc::RPoly out(s);
        for (int k = 0; k < 3; ++k) {
          osc::Monomial m = osc::Monomial::one(pairs);
          for (int p = 0; p < pairs; ++p) {
            m.cr[p] = expo(g_rng);
            m.an[p] = expo(g_rng);
          }
          out.add_term(m, Rational(coefd(g_rng)));
        }
        return out;
      };
      osc::RPoly x = rand_poly(), y = rand_poly();
      const uint32_t cutoff = 7;
      auto mxy = osc::truncated_matrix(x * y, cutoff);
      auto mx = osc::truncated_matrix(x, cutoff);
      auto my = osc::truncated_matrix(y, cutoff);
      uint32_t ycr = 0;
      for (auto& [m, cf] : y.terms())
        for (auto e : m.cr) ycr = std::max(ycr, e);
      bool ok = true;
      const size_t dim = mxy.basis.size();
      for (size_t col = 0; col < dim && ok; ++col) {
        bool safe = true;
        for (auto occ : mxy.basis[col])
          if (occ + ycr > cutoff) safe = false;
        if (!safe) continue;
        for (size_t row = 0; row < dim && ok; ++row) {
          Rational acc(0);
          for (size_t mid = 0; mid < dim; ++mid) acc += mx.m[row][mid] * my.m[mid][col];
          ok = acc == mxy.m[row][col];
        }
      }
      expect(c, ok, "normal_mul vs truncated matrix, case " + std::to_string(it));
      if (!ok) break;
    }
    // fock_trace vs float partial sums, 100 random cases, rel 1e-9
    {
      auto s = osc::make_space({"p"});
      osc::TwistWeights w;
      w.q = {Rational(1, 3)};
      for (int it = 0; it < 100; ++it) {
        osc::RPoly x(s);
        for (int k = 0; k < 4; ++k) {
          osc::Monomial m = osc::Monomial::one(1);
          m.cr[0] = expo(g_rng);
          m.an[0] = expo(g_rng);
          x.add_term(m, Rational(coefd(g_rng)));
        }
        double exact = osc::fock_trace(x, w).to_double();
        double series = osc::fock_trace_series(x, {1.0 / 3.0}, 60);
        expect(c, std::abs(exact - series) <= 1e-9 * (1 + std::abs(series)),
               "fock_trace vs partial sums, case " + std::to_string(it));
      }
    }
    // R-matrix properties at ranks <= 3
    for (auto alg : {AlgebraType::A(2), AlgebraType::A(3), AlgebraType::A(4), AlgebraType::B(2), AlgebraType::B(3),
                     AlgebraType::C(2), AlgebraType::C(3), AlgebraType::D(2), AlgebraType::D(3)})
      expect_report(c, lax::r_matrix_properties(alg), "R-matrix properties " + alg.str());
  });

  std::printf("%s\n", h.all_pass ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
  return h.all_pass ? 0 : 1;
}
