#include "qbgg/oscillator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace qbgg::osc {

OscSpace::OscSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
    auto [it, fresh] = index_.emplace(labels_[i], i);
    if (!fresh) throw std::invalid_argument("OscSpace: duplicate label " + labels_[i]);
  }
}

int OscSpace::find(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

int OscSpace::index_of(const std::string& label) const {
  int p = find(label);
  if (p < 0) throw std::invalid_argument("OscSpace: unknown label " + label);
  return p;
}

SpacePtr make_space(std::vector<std::string> labels) { return std::make_shared<OscSpace>(std::move(labels)); }

bool Monomial::is_one() const {
  return std::all_of(cr.begin(), cr.end(), [](uint32_t e) { return e == 0; }) &&
         std::all_of(an.begin(), an.end(), [](uint32_t e) { return e == 0; });
}

uint32_t Monomial::cr_degree() const {
  uint32_t d = 0;
  for (auto e : cr) d += e;
  return d;
}

uint32_t Monomial::an_degree() const {
  uint32_t d = 0;
  for (auto e : an) d += e;
  return d;
}

Substitution Substitution::identity(const SpacePtr& s) {
  Substitution out;
  out.from = s;
  out.to = s;
  out.cr_img.resize(s->pairs());
  out.an_img.resize(s->pairs());
  for (int p = 0; p < s->pairs(); ++p) {
    out.cr_img[p].terms = {{Rational(1), GenRef{p, true}}};
    out.an_img[p].terms = {{Rational(1), GenRef{p, false}}};
  }
  return out;
}

Substitution Substitution::particle_hole(const SpacePtr& s, const std::vector<int>& flipped) {
  Substitution out = identity(s);
  for (int p : flipped) {
    out.cr_img[p].terms = {{Rational(-1), GenRef{p, false}}};
    out.an_img[p].terms = {{Rational(1), GenRef{p, true}}};
  }
  return out;
}

Substitution Substitution::relabel(const SpacePtr& from, const SpacePtr& to, const std::vector<int>& pair_map,
                                   const std::vector<Rational>& sign) {
  Substitution out;
  out.from = from;
  out.to = to;
  out.cr_img.resize(from->pairs());
  out.an_img.resize(from->pairs());
  for (int p = 0; p < from->pairs(); ++p) {
    out.cr_img[p].terms = {{sign[p], GenRef{pair_map[p], true}}};
    out.an_img[p].terms = {{sign[p], GenRef{pair_map[p], false}}};
  }
  return out;
}

Substitution Substitution::scaling(const SpacePtr& s, const std::vector<Rational>& factors) {
  Substitution out = identity(s);
  for (int p = 0; p < s->pairs(); ++p) {
    out.cr_img[p].terms = {{factors[p], GenRef{p, true}}};
    out.an_img[p].terms = {{factors[p].inv(), GenRef{p, false}}};
  }
  return out;
}

namespace {

// [g, h] for basis generators: [a_p, abar_p] = 1, [abar_p, a_p] = -1, else 0.
Rational basis_commutator(const GenRef& g, const GenRef& h) {
  if (g.pair != h.pair) return Rational(0);
  if (!g.creation && h.creation) return Rational(1);
  if (g.creation && !h.creation) return Rational(-1);
  return Rational(0);
}

Rational image_commutator(const GenImage& x, const GenImage& y) {
  Rational out(0);
  for (auto& [cx, gx] : x.terms)
    for (auto& [cy, gy] : y.terms) out += cx * cy * basis_commutator(gx, gy);
  return out;
}

}  // namespace

bool is_algebra_map(const Substitution& s) {
  const int n = s.from->pairs();
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      Rational want = (p == q) ? Rational(1) : Rational(0);
      if (image_commutator(s.an_img[p], s.cr_img[q]) != want) return false;
      if (!image_commutator(s.an_img[p], s.an_img[q]).is_zero()) return false;
      if (!image_commutator(s.cr_img[p], s.cr_img[q]).is_zero()) return false;
    }
  }
  return true;
}

FockVector vacuum(const SpacePtr& s) {
  FockVector v;
  v.entries[std::vector<uint32_t>(s->pairs(), 0)] = Rational(1);
  return v;
}

FockVector apply_to_fock(const Poly<Rational>& x, const FockVector& v) {
  const int n = x.space()->pairs();
  FockVector out;
  for (auto& [m, c] : x.terms()) {
    for (auto& [occ, w] : v.entries) {
      Rational factor = c * w;
      bool killed = false;
      std::vector<uint32_t> target(n);
      for (int p = 0; p < n; ++p) {
        if (occ[p] < m.an[p]) {
          killed = true;
          break;
        }
        // falling factorial from a_p^k |m> = m(m-1)...(m-k+1)|m-k>
        for (uint32_t j = 0; j < m.an[p]; ++j) factor *= Rational(static_cast<long>(occ[p] - j));
        target[p] = occ[p] - m.an[p] + m.cr[p];
      }
      if (!killed) out.add(target, factor);
    }
  }
  return out;
}

Rational vacuum_eigenvalue(const Poly<Rational>& x) {
  FockVector v = apply_to_fock(x, vacuum(x.space()));
  if (v.is_zero()) return Rational(0);
  std::vector<uint32_t> zero(x.space()->pairs(), 0);
  if (v.entries.size() != 1 || v.entries.begin()->first != zero)
    throw std::domain_error("vacuum_eigenvalue: vacuum is not an eigenvector");
  return v.entries.begin()->second;
}

bool kills_vacuum(const Poly<Rational>& x) { return apply_to_fock(x, vacuum(x.space())).is_zero(); }

Rational fock_trace(const Poly<Rational>& x, const TwistWeights& w) {
  const int n = x.space()->pairs();
  if (static_cast<int>(w.q.size()) != n) throw std::invalid_argument("fock_trace: weight count mismatch");
  for (auto& qp : w.q)
    if (qp.is_one()) throw std::domain_error("fock_trace: divergent trace (q = 1)");
  Rational total(0);
  for (auto& [m, c] : x.terms()) {
    if (!m.balanced()) continue;
    Rational term = c;
    for (int p = 0; p < n; ++p) {
      const uint32_t k = m.cr[p];
      const Rational& q = w.q[p];
      // tr q^N abar^k a^k = k! q^k / (1-q)^{k+1}
      term *= factorial(k) * q.pow(k) / (Rational(1) - q).pow(k + 1);
    }
    total += term;
  }
  return total * w.prefactor;
}

double fock_trace_series(const Poly<Rational>& x, const std::vector<double>& q, uint32_t terms) {
  const int n = x.space()->pairs();
  double total = 0;
  for (auto& [m, c] : x.terms()) {
    if (!m.balanced()) continue;
    double term = c.to_double();
    for (int p = 0; p < n; ++p) {
      const uint32_t k = m.cr[p];
      // sum_{mm >= k} q^mm * mm!/(mm-k)!
      double s = 0;
      for (uint32_t mm = k; mm <= terms; ++mm) {
        double ff = 1;
        for (uint32_t j = 0; j < k; ++j) ff *= static_cast<double>(mm - j);
        s += std::pow(q[p], mm) * ff;
      }
      term *= s;
    }
    total += term;
  }
  return total;
}

TruncMatrix truncated_matrix(const Poly<Rational>& x, uint32_t cutoff) {
  const int n = x.space()->pairs();
  TruncMatrix out;
  // lexicographic enumeration of occupation vectors with entries <= cutoff
  std::vector<uint32_t> occ(n, 0);
  while (true) {
    out.basis.push_back(occ);
    int p = n - 1;
    for (; p >= 0; --p) {
      if (occ[p] < cutoff) {
        ++occ[p];
        break;
      }
      occ[p] = 0;
    }
    if (p < 0) break;
  }
  std::map<std::vector<uint32_t>, size_t> idx;
  for (size_t i = 0; i < out.basis.size(); ++i) idx[out.basis[i]] = i;
  const size_t dim = out.basis.size();
  out.m.assign(dim, std::vector<Rational>(dim, Rational(0)));
  for (size_t col = 0; col < dim; ++col) {
    FockVector v;
    v.entries[out.basis[col]] = Rational(1);
    FockVector img = apply_to_fock(x, v);
    for (auto& [occ2, c] : img.entries) {
      auto it = idx.find(occ2);
      if (it != idx.end()) out.m[it->second][col] += c;  // drop out-of-window components
    }
  }
  return out;
}

std::string poly_to_json(const Poly<Rational>& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& [m, c] : x.terms()) {
    nlohmann::json term;
    term["creation"] = m.cr;
    term["annihilation"] = m.an;
    term["coeff"] = c.str();
    arr.push_back(term);
  }
  return arr.dump();
}

Poly<Rational> poly_from_json(const std::string& text, const SpacePtr& space) {
  nlohmann::json arr = nlohmann::json::parse(text);
  Poly<Rational> out(space);
  for (auto& term : arr) {
    Monomial m;
    m.cr = term.at("creation").get<std::vector<uint32_t>>();
    m.an = term.at("annihilation").get<std::vector<uint32_t>>();
    if (static_cast<int>(m.cr.size()) != space->pairs() || static_cast<int>(m.an.size()) != space->pairs())
      throw std::invalid_argument("poly_from_json: exponent length mismatch");
    out.add_term(m, Rational::parse(term.at("coeff").get<std::string>()));
  }
  return out;
}

}  // namespace qbgg::osc
