// qbgg: exact verification suite for oscillator-realized Lax matrices,
// transfer matrices, and Baxter Q-operators of rational spin chains.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "qbgg/transfer.hpp"

using namespace qbgg;
using lax::AlgebraType;
using lax::Report;
using lax::RLax;
using nlohmann::json;
using weyl::CosetCase;
using weyl::CosetKind;
using weyl::Family;
using weyl::TauPoint;

namespace {

struct Output {
  std::ostream* os = &std::cout;
  std::ofstream file;
  bool any_fail = false;
  bool timing = true;

  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    os = &file;
  }
  void emit(const Report& rep, uint64_t seed) {
    json j;
    j["check"] = rep.check;
    j["params"] = json::parse(rep.params.empty() ? "{}" : rep.params);
    j["status"] = rep.pass ? "pass" : "fail";
    j["defect_terms"] = rep.defect_terms;
    j["elapsed_ms"] = timing ? rep.elapsed_ms : 0.0;
    j["seed"] = seed;
    j["mode"] = rep.mode;
    if (!rep.note.empty()) j["note"] = rep.note;
    (*os) << j.dump() << "\n";
    if (!rep.pass) any_fail = true;
  }
};

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(uint64_t seed) : rng(seed) {}

  Rational rational(long lo = 1, long hi = 997) {
    std::uniform_int_distribution<long> d(lo, hi);
    return Rational(d(rng), d(rng));
  }
  Rational signed_rational() {
    std::uniform_int_distribution<int> s(0, 1);
    Rational r = rational();
    return s(rng) ? r : -r;
  }
  // distinct, non-unit tau values
  TauPoint tau(int count, long D) {
    std::set<std::string> seen;
    TauPoint out;
    out.D = D;
    while (static_cast<int>(out.u.size()) < count) {
      Rational r = rational(2, 97);
      if (r.is_one() || seen.count(r.str()) || seen.count(r.inv().str())) continue;
      seen.insert(r.str());
      out.u.push_back(r);
    }
    return out;
  }
};

std::vector<Rational> parse_rationals(const std::string& csv) {
  std::vector<Rational> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(Rational::parse(tok));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::vector<int> parse_mu(const std::string& s) {
  std::vector<int> mu;
  for (char ch : s) {
    if (ch == '+')
      mu.push_back(1);
    else if (ch == '-')
      mu.push_back(-1);
    else
      throw CLI::ValidationError("--mu", "expected a string of + and -");
  }
  return mu;
}

AlgebraType make_alg(const std::string& alg, int n, int r, int K) {
  Family f = weyl::parse_family(alg);
  switch (f) {
    case Family::A: return AlgebraType::A(n);
    case Family::C: return AlgebraType::C(r);
    case Family::B:
    case Family::D:
      if (K > 0) {
        if (f == Family::B && K % 2 == 0) throw CLI::ValidationError("--K", "type B needs odd K");
        if (f == Family::D && K % 2 != 0) throw CLI::ValidationError("--K", "type D needs even K");
        return AlgebraType::make(f, K / 2);
      }
      return AlgebraType::make(f, r);
  }
  throw CLI::ValidationError("--alg", "unknown algebra");
}

CosetCase make_case(const AlgebraType& alg, const std::string& csname, int a) {
  CosetCase c{CosetKind::ASubset, a, 1};
  if (alg.fam == Family::A) {
    c.kind = CosetKind::ASubset;
  } else if (alg.fam == Family::C) {
    c.kind = CosetKind::CSpinor;
  } else if (csname == "spinor" || csname == "spinor+") {
    c.kind = CosetKind::DSpinor;
    c.sector = 1;
  } else if (csname == "spinor-") {
    c.kind = CosetKind::DSpinor;
    c.sector = -1;
  } else {
    c.kind = CosetKind::BDVector;
  }
  if (!weyl::coset_case_admissible(alg, c))
    throw CLI::ValidationError(
        "--case", "not admissible for " + alg.str() +
                      " (admissible: a=1..n-1 for A, r for C, 1|r-1|r as spinor/vector for D, 1 as vector for B)");
  return c;
}

long tau_precision(const Rational& t, const CosetCase& c) {
  long D = t.den_long();
  if (c.kind == CosetKind::DSpinor && D % 2 != 0) D *= 2;
  return D;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbgg: exact checks of BGG-type transfer-matrix relations, factorisations and QQ-relations"};
  app.require_subcommand(1);

  uint64_t seed = 20240917;
  if (const char* env = std::getenv("QBGG_SEED")) seed = std::strtoull(env, nullptr, 10);
  std::string out_path, config_path;
  app.add_option("--seed", seed, "Sampling seed (QBGG_SEED overrides the default)");
  app.add_option("--out", out_path, "Write JSON-lines reports to a file instead of stdout");
  bool no_timing = false;
  app.add_flag("--no-timing", no_timing, "Zero the wall-time field for byte-identical report streams");
  app.add_option("--config", config_path, "JSON config file mirroring the flags (flags win)")
      ->check(CLI::ExistingFile);

  std::string alg_name = "A", family = "verma", case_name = "vector", kind = "tdet";
  int n = 2, r = 2, K = 0, a = 1, N = 1, i_idx = 1, j_idx = 2, kcos = 1;
  std::string t_str = "1", lambda_str, tau_str, I_str, mu_str;
  int tau_count = 0;
  bool oracle = false, quadratic = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--alg", alg_name, "Algebra family: A, B, C or D");
    cmd->add_option("--n", n, "Type-A size n (gl_n)");
    cmd->add_option("--r", r, "Rank r for B/C/D");
    cmd->add_option("--K", K, "Defining dimension for B/D (alternative to --r)");
    cmd->add_option("--a", a, "Type-A fundamental index");
    cmd->add_option("--t", t_str, "Representation label t, rational like 3/2");
    cmd->add_option("--N", N, "Chain length");
    cmd->add_option("--tau", tau_str, "Comma-separated twist parameters");
    cmd->add_option("--tau-count", tau_count, "Number of random twist parameters to draw");
    cmd->add_option("--case", case_name, "D-type case: spinor, spinor-, vector");
    cmd->add_option("--lambda", lambda_str, "Type-A weight, comma separated");
    cmd->add_option("--I", I_str, "Type-A subset, comma separated");
    cmd->add_option("--mu", mu_str, "C/D sign vector like +-+");
    cmd->add_option("--k", kcos, "BD coset index (use K+1-k for primed)");
  };

  auto* check = app.add_subcommand("check", "Run an exact identity check");
  check->require_subcommand(1);
  check->fallthrough();
  auto* c_rtt = check->add_subcommand("rtt", "RTT relation of a Lax family");
  c_rtt->add_option("--family", family, "verma|rect|deg (A), nondeg|deg+|deg- (C/D), quad|deg1|degK (B/D)");
  auto* c_lie = check->add_subcommand("lie", "Lie-algebra relations of a non-degenerate family");
  c_lie->add_option("--family", family, "verma|rect (A), nondeg (C/D), quad (B/D)");
  auto* c_fac = check->add_subcommand("laxfac", "Lax-level two-term factorisation");
  c_fac->add_flag("--quadratic", quadratic, "BD quadratic case");
  auto* c_lim = check->add_subcommand("limit", "Renormalized t->inf limits");
  auto* c_bgg = check->add_subcommand("bgg", "BGG-type transfer-matrix relation");
  auto* c_tqq = check->add_subcommand("tviaqq", "Factorisation of T+ into two Q-operators");
  c_tqq->add_option("--family", family, "verma for the full A-type Verma factorisation");
  auto* c_qq = check->add_subcommand("qq", "Three-term QQ-relation (type A)");
  c_qq->add_option("--i", i_idx, "First index");
  c_qq->add_option("--j", j_idx, "Second index");
  auto* c_det = check->add_subcommand("det", "Determinant identities");
  c_det->add_option("--kind", kind, "tdet or qi");
  auto* c_comm = check->add_subcommand("comm", "Commutativity of transfer matrices and Q-operators");
  auto* c_tsym = check->add_subcommand("tsym", "t-symmetry of the analytically continued transfer");
  auto* c_van = check->add_subcommand("vanish", "Vanishing probe at the special t values (informational)");
  for (auto* cmd : {c_rtt, c_lie, c_fac, c_lim, c_bgg, c_tqq, c_qq, c_det, c_comm, c_tsym, c_van}) {
    add_common(cmd);
    cmd->fallthrough();
  }

  auto* chr = app.add_subcommand("char", "Evaluate the analytically continued character");
  add_common(chr);
  chr->fallthrough();
  bool chr_finite = false;
  chr->add_flag("--finite", chr_finite, "Evaluate via the finite-module trace instead of the coset sum");

  auto* tr = app.add_subcommand("trace", "Twisted Fock trace of a serialized normal-ordered element");
  tr->fallthrough();
  std::string in_path, q_str, prefactor_str = "1";
  int pairs = 1;
  tr->add_option("--in", in_path, "JSON file with the element (default: stdin)");
  tr->add_option("--pairs", pairs, "Number of oscillator pairs")->required();
  tr->add_option("--q", q_str, "Comma-separated twist weights q_p")->required();
  tr->add_option("--prefactor", prefactor_str, "Scalar prefactor");
  tr->add_flag("--oracle", oracle, "Also print the float partial-sum value");

  auto* lst = app.add_subcommand("list", "Print the formula-to-suite index");

  // config file: JSON object of flag defaults; explicit flags win
  std::vector<std::string> args(argv + 1, argv + argc);
  for (size_t idx = 0; idx + 1 < args.size(); ++idx) {
    if (args[idx] != "--config") continue;
    std::ifstream f(args[idx + 1]);
    if (!f) {
      std::cerr << "cannot open config " << args[idx + 1] << "\n";
      return 2;
    }
    json cfg = json::parse(f);
    std::vector<std::string> pre;
    for (auto& [key, val] : cfg.items()) {
      pre.push_back("--" + key);
      pre.push_back(val.is_string() ? val.get<std::string>() : val.dump());
    }
    size_t insert_at = 0;
    while (insert_at < args.size() && !args[insert_at].empty() && args[insert_at][0] != '-') ++insert_at;
    args.insert(args.begin() + static_cast<long>(insert_at), pre.begin(), pre.end());
    break;
  }
  std::vector<const char*> cargv;
  cargv.push_back(argv[0]);
  for (auto& s : args) cargv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), const_cast<char**>(cargv.data()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Output out;
  out.timing = !no_timing;
  Sampler sampler(seed);
  try {
    out.open(out_path);
    const Rational t = Rational::parse(t_str);

    if (*lst) {
      struct Row {
        const char* formula;
        const char* suite;
      };
      const Row rows[] = {
          {"RTT", "check rtt --alg A|B|C|D --family ..."},
          {"gl/sp/so relations + BD free-term identity", "check lie"},
          {"facA / factor-C / factor-D / factor-BD", "check laxfac --alg A|C|D|B [--quadratic]"},
          {"A/C/D/BD renormalized limit", "check limit"},
          {"transfer-A", "check bgg --alg A --n .. --a .. --t .. --N .."},
          {"transfer-C", "check bgg --alg C --r 2 --t 1 --N 1"},
          {"transfer-Dspin", "check bgg --alg D --case spinor|spinor- ..."},
          {"transfer-D-first / transfer-B-first", "check bgg --alg D|B --case vector ..."},
          {"details-fact / T-via-QQ A/C/D/BD", "check tviaqq"},
          {"Lemma qq", "check qq --n .. --I .. --i .. --j .."},
          {"Tdet", "det --kind tdet --n .. --lambda .."},
          {"QI", "det --kind qi --n 3 --I .."},
          {"TT/QT/QQ commutativity", "check comm --alg A|C"},
          {"t-symmetry C/D/BD", "check tsym --alg C|D|B"},
          {"expected vanishing", "check vanish"},
          {"char-A / ch-C / char-Dspin / char-D-first / char-B-first", "char --alg .. --t .. --tau .."},
          {"Fock-trace", "trace --pairs .. --q .."},
      };
      for (auto& rw : rows) std::cout << rw.formula << "  ->  " << rw.suite << "\n";
      return 0;
    }

    if (*tr) {
      std::string text;
      if (in_path.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
      } else {
        std::ifstream f(in_path);
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
      }
      std::vector<std::string> labels;
      for (int p = 0; p < pairs; ++p) labels.push_back("p" + std::to_string(p + 1));
      auto space = osc::make_space(labels);
      auto poly = osc::poly_from_json(text, space);
      osc::TwistWeights w;
      w.q = parse_rationals(q_str);
      w.prefactor = Rational::parse(prefactor_str);
      json j;
      j["trace"] = osc::fock_trace(poly, w).str();
      if (oracle) {
        std::vector<double> qd;
        for (auto& q : w.q) qd.push_back(q.to_double());
        j["oracle_series"] = osc::fock_trace_series(poly, qd, 60) * w.prefactor.to_double();
      }
      std::cout << j.dump() << "\n";
      return 0;
    }

    AlgebraType alg = make_alg(alg_name, n, r, K);
    auto tau_for = [&](const CosetCase& c, long extra_den = 1) {
      long D = tau_precision(t, c);
      if (extra_den % 2 == 0 && D % 2 != 0) D *= 2;
      if (!tau_str.empty()) return TauPoint{parse_rationals(tau_str), D};
      int count = tau_count > 0 ? tau_count : alg.rank;
      return sampler.tau(count, D);
    };

    if (*chr) {
      CosetCase c = make_case(alg, case_name, a);
      TauPoint tau = tau_for(c);
      Rational value;
      if (chr_finite) {
        auto cosets = weyl::enumerate_cosets(alg, c);
        const weyl::CosetElement* def = nullptr;
        for (auto& e : cosets)
          if (e.length == 0) def = &e;
        auto mod = transfer::build_finite_module(lax::coset_lax(alg, c, *def, t), weyl::case_weight(alg, c, t));
        value = transfer::transfer_finite(mod, tau, 0).at(0, 0, 0);
      } else {
        value = weyl::truncated_bgg_character(alg, c, t, tau);
      }
      json j;
      j["char"] = value.str();
      j["alg"] = alg.str();
      j["t"] = t.str();
      json cosets = json::array();
      for (auto& e : weyl::enumerate_cosets(alg, c)) cosets.push_back(json::parse(weyl::coset_to_json(e, t, alg)));
      j["cosets"] = cosets;
      json taus = json::array();
      for (int ii = 0; ii < tau.size(); ++ii) taus.push_back(tau.tau(ii).str());
      j["tau"] = taus;
      j["seed"] = seed;
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (*c_rtt || *c_lie) {
      RLax L;
      if (alg.fam == Family::A) {
        if (family == "verma") {
          std::vector<Rational> lam;
          if (!lambda_str.empty())
            lam = parse_rationals(lambda_str);
          else
            for (int ii = 0; ii < n; ++ii) lam.push_back(sampler.signed_rational());
          L = lax::verma_a(n, lam);
        } else if (family == "rect") {
          L = lax::rect_a<Rational>(n, a, t);
        } else {
          std::vector<int> I = I_str.empty() ? std::vector<int>{1} : parse_ints(I_str);
          L = lax::deg_a(n, I);
        }
      } else if (alg.fam == Family::C) {
        L = family == "deg+"   ? lax::deg_c_plus(r)
            : family == "deg-" ? lax::deg_c_minus(r)
                               : lax::nondeg_c<Rational>(r, t);
      } else if (alg.fam == Family::D && (family == "nondeg" || family == "deg+" || family == "deg-")) {
        L = family == "deg+"   ? lax::deg_d_plus(alg.rank)
            : family == "deg-" ? lax::deg_d_minus(alg.rank)
                               : lax::nondeg_d<Rational>(alg.rank, t);
      } else {
        L = family == "deg1"   ? lax::deg_bd_1(alg)
            : family == "degK" ? lax::deg_bd_K(alg)
                               : lax::quad_bd<Rational>(alg, t);
      }
      Report rep = *c_rtt ? lax::rtt_check(L, L, lax::r_matrix(alg)) : lax::lie_algebra_check(L);
      out.emit(rep, seed);
    } else if (*c_fac) {
      lax::FactorisationCase fc = alg.fam == Family::A   ? lax::FactorisationCase::A
                                  : alg.fam == Family::C ? lax::FactorisationCase::C
                                  : (quadratic || alg.fam == Family::B) ? lax::FactorisationCase::BD
                                                                        : lax::FactorisationCase::D;
      out.emit(lax::lax_factorisation_check(fc, alg, a, t), seed);
    } else if (*c_lim) {
      lax::FactorisationCase fc = alg.fam == Family::A   ? lax::FactorisationCase::A
                                  : alg.fam == Family::C ? lax::FactorisationCase::C
                                  : (quadratic || alg.fam == Family::B) ? lax::FactorisationCase::BD
                                                                        : lax::FactorisationCase::D;
      out.emit(lax::renormalized_limit_check(fc, alg, a), seed);
    } else if (*c_bgg) {
      CosetCase c = make_case(alg, case_name, a);
      out.emit(transfer::bgg_identity_check(alg, c, t, N, tau_for(c)), seed);
    } else if (*c_tqq) {
      CosetCase c = make_case(alg, case_name, a);
      auto cosets = weyl::enumerate_cosets(alg, c);
      const weyl::CosetElement* e = &cosets[0];
      if (!I_str.empty() || !mu_str.empty() || kcos != 1) {
        for (auto& el : cosets) {
          if (!I_str.empty() && el.subset == parse_ints(I_str)) e = &el;
          if (!mu_str.empty() && el.mu == parse_mu(mu_str)) e = &el;
          if (c.kind == CosetKind::BDVector && el.k == kcos) e = &el;
        }
      }
      transfer::FactorKind fk;
      std::vector<Rational> lam;
      if (alg.fam == Family::A && family == "verma") {
        fk = transfer::FactorKind::ADetails;
        lam = lambda_str.empty() ? std::vector<Rational>{t} : parse_rationals(lambda_str);
        while (static_cast<int>(lam.size()) < n) lam.push_back(Rational(0));
      } else if (alg.fam == Family::A) {
        fk = transfer::FactorKind::AViaQQ;
      } else if (alg.fam == Family::C) {
        fk = transfer::FactorKind::CViaQQ;
      } else if (c.kind == CosetKind::DSpinor) {
        fk = transfer::FactorKind::DViaQQ;
      } else {
        fk = transfer::FactorKind::BDViaQQ;
      }
      out.emit(transfer::factorisation_identity_check(fk, alg, c, *e, t, N, tau_for(c), lam), seed);
    } else if (*c_qq) {
      CosetCase c{CosetKind::ASubset, 1, 1};
      std::vector<int> I = I_str.empty() ? std::vector<int>{} : parse_ints(I_str);
      out.emit(transfer::qq_relation_check(n, I, i_idx, j_idx, N, tau_for(c, 2)), seed);
    } else if (*c_det) {
      CosetCase c{CosetKind::ASubset, 1, 1};
      if (kind == "tdet") {
        std::vector<Rational> lam =
            lambda_str.empty() ? std::vector<Rational>{Rational(1)} : parse_rationals(lambda_str);
        while (static_cast<int>(lam.size()) < n) lam.push_back(Rational(0));
        out.emit(transfer::determinant_identity_check(transfer::DetKind::TDet, n, lam, {}, N, tau_for(c)), seed);
      } else {
        std::vector<int> I = I_str.empty() ? std::vector<int>{1, 2} : parse_ints(I_str);
        out.emit(transfer::determinant_identity_check(transfer::DetKind::QI, n, {}, I, N, tau_for(c)), seed);
      }
    } else if (*c_comm) {
      CosetCase c = make_case(alg, case_name, a);
      TauPoint tau = tau_for(c);
      if (alg.fam == Family::A) {
        std::vector<Rational> lam1, lam2;
        for (int ii = 0; ii < n; ++ii) lam1.push_back(Rational(sampler.rational(1, 20).num_long()));
        for (int ii = 0; ii < n; ++ii) lam2.push_back(Rational(sampler.rational(1, 20).num_long()));
        auto A1 = transfer::transfer_plus(lax::verma_a(n, lam1), tau, N);
        auto A2 = transfer::transfer_plus(lax::verma_a(n, lam2), tau, N);
        out.emit(transfer::commutativity_check("T+(lambda) vs T+(mu)", A1, A2), seed);
        auto cosets = weyl::enumerate_cosets(alg, c);
        const weyl::CosetElement* def = nullptr;
        for (auto& e : cosets)
          if (e.length == 0) def = &e;
        auto mod = transfer::build_finite_module(lax::coset_lax(alg, c, *def, Rational(1)),
                                                 weyl::case_weight(alg, c, Rational(1)));
        auto T = transfer::transfer_finite(mod, tau, N);
        auto Q1 = transfer::q_operator(lax::deg_a(n, {1}), tau, N);
        out.emit(transfer::commutativity_check("Q_1 vs T_(1,0,...)", Q1, T), seed);
      } else if (alg.fam == Family::C) {
        auto cosets = weyl::enumerate_cosets(alg, c);
        for (auto& e : cosets) {
          if (e.length != 1) continue;
          auto Qmu = transfer::q_weyl_conjugated(alg, c, e, N, tau, false);
          auto Qbar = transfer::q_weyl_conjugated(alg, c, e, N, tau, true);
          out.emit(transfer::commutativity_check("Q_mu vs Q_mubar (" + e.tag() + ")", Qmu, Qbar), seed);
          break;
        }
      } else {
        throw CLI::ValidationError("--alg", "comm examples cover A and C");
      }
    } else if (*c_tsym) {
      CosetCase c = make_case(alg, case_name, a);
      out.emit(transfer::t_symmetry_check(alg, c, N, tau_for(c), t), seed);
    } else if (*c_van) {
      CosetCase c = make_case(alg, case_name, a);
      out.emit(transfer::expected_vanishing_probe(alg, c, N, tau_for(c), t), seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return out.any_fail ? 1 : 0;
}
