#include "super2vec/twovect.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace super2vec {

namespace {

std::string simplex_name(const Simplex& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

template <class T>
Mat<T> on_representatives(const RelTensor<T>& rt, int rows, const std::function<Vec<T>(int, int)>& f) {
  Mat<T> out = Mat<T>::Zero(rows, rt.module->dim());
  for (int q = 0; q < rt.module->dim(); ++q) {
    auto [i, j] = rt.representative(q);
    Vec<T> v = f(i, j);
    if (v.size() == 0) continue;
    if (v.size() != rows)
      throw std::invalid_argument("value on pair (" + std::to_string(i) + "," + std::to_string(j) + ") should have " +
                                  std::to_string(rows) + " entries");
    out.col(q) = v;
  }
  return out;
}

template <class T>
Vec<T> basis_vec(int n, int i) {
  return unit_vector<T>(n, i);
}

// Index of each summand's basis in a direct sum laid out evens first.
struct SumLayout {
  SuperVectorSpace space;
  std::vector<int> first, second;
  std::vector<std::pair<int, int>> origin;  // (summand, index)
};

SumLayout sum_layout(const SuperVectorSpace& a, const SuperVectorSpace& b) {
  SumLayout out;
  out.first.resize(a.dim());
  out.second.resize(b.dim());
  std::vector<std::string> labels;
  for (int p = 0; p < 2; ++p) {
    for (int i = 0; i < a.dim(); ++i)
      if (a.parity(i) == p) {
        out.first[i] = static_cast<int>(out.origin.size());
        out.origin.push_back({0, i});
        labels.push_back("(" + (i < static_cast<int>(a.labels.size()) ? a.labels[i] : std::to_string(i)) + ",0)");
      }
    for (int i = 0; i < b.dim(); ++i)
      if (b.parity(i) == p) {
        out.second[i] = static_cast<int>(out.origin.size());
        out.origin.push_back({1, i});
        labels.push_back("(0," + (i < static_cast<int>(b.labels.size()) ? b.labels[i] : std::to_string(i)) + ")");
      }
  }
  out.space = SuperVectorSpace(a.even + b.even, a.odd + b.odd, labels);
  return out;
}

template <class T>
Mat<T> block_embed(const SumLayout& lay, int summand, const Mat<T>& m) {
  const auto& idx = summand == 0 ? lay.first : lay.second;
  Mat<T> out = Mat<T>::Zero(lay.space.dim(), lay.space.dim());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out(idx[r], idx[c]) = m(r, c);
  return out;
}

template <class T>
Vec<T> vec_embed(const SumLayout& lay, int summand, const Vec<T>& v) {
  const auto& idx = summand == 0 ? lay.first : lay.second;
  Vec<T> out = Vec<T>::Zero(lay.space.dim());
  for (Index r = 0; r < v.size(); ++r) out(idx[r]) = v(r);
  return out;
}

// M (+) N over direct products of the algebras.
template <class T>
BimodulePtr<T> sum_bimodule(const BimodulePtr<T>& m, const BimodulePtr<T>& n, const AlgebraPtr<T>& left,
                            const AlgebraPtr<T>& right) {
  SumLayout lay = sum_layout(m->carrier, n->carrier);
  SumLayout la = sum_layout(m->left_algebra->carrier(), n->left_algebra->carrier());
  SumLayout lb = sum_layout(m->right_algebra->carrier(), n->right_algebra->carrier());
  SuperBimodule<T> out{left, right, lay.space, {}, {}, m->name + "+" + n->name};
  for (const auto& [s, i] : la.origin) out.left.push_back(block_embed<T>(lay, s, s == 0 ? m->left[i] : n->left[i]));
  for (const auto& [s, i] : lb.origin)
    out.right.push_back(block_embed<T>(lay, s, s == 0 ? m->right[i] : n->right[i]));
  return make_bimodule(std::move(out));
}

template <class T>
const T& first_nonzero(const Vec<T>& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (!is_zero(v(i))) return v(i);
  throw std::logic_error("zero vector");
}

template <class T>
std::pair<int, int> matrix_unit(const AlgebraPtr<T>& end, int k) {
  const std::string& l = end->carrier().labels.at(k);
  auto us = l.find('_');
  return {std::stoi(l.substr(1, us - 1)), std::stoi(l.substr(us + 1))};
}

template <class T>
const char* field_modulus_tag() {
  return Field<T>::tag;
}

template <class T>
int bw_modulus() {
  return std::is_same_v<T, Rational> ? 8 : 2;
}

}  // namespace

template <class T>
TwoVectorBundle<T> assemble_bundle(NervePtr nerve, std::vector<AlgebraPtr<T>> algebras,
                                   std::vector<BimodulePtr<T>> modules, const PairValue<T>& mu) {
  TwoVectorBundle<T> v;
  v.nerve = std::move(nerve);
  v.algebras = std::move(algebras);
  v.modules = std::move(modules);
  const auto& n = *v.nerve;
  if (static_cast<int>(v.algebras.size()) != n.count(0) || static_cast<int>(v.modules.size()) != n.count(1))
    throw std::invalid_argument("bundle: expected one algebra per vertex and one bimodule per edge");
  for (int t = 0; t < n.count(2); ++t) {
    const auto& s = n.simplices(2)[t];
    v.composites.push_back(rel_tensor(v.module_at(s[1], s[2]), v.module_at(s[0], s[1])));
    const int rows = v.module_at(s[0], s[2])->dim();
    v.mu.push_back(on_representatives<T>(v.composites.back(), rows, [&](int i, int j) { return mu(t, i, j); }));
  }
  return v;
}

template <class T>
TwoVectorBundle<T> assemble_bundle(NervePtr nerve, std::vector<AlgebraPtr<T>> algebras,
                                   std::vector<BimodulePtr<T>> modules, std::vector<Mat<T>> mu) {
  if (static_cast<int>(mu.size()) != nerve->count(2))
    throw std::invalid_argument("bundle: expected one intertwiner per triangle");
  TwoVectorBundle<T> v = assemble_bundle<T>(nerve, std::move(algebras), std::move(modules),
                                            [](int, int, int) { return Vec<T>(); });
  for (size_t t = 0; t < mu.size(); ++t) {
    if (mu[t].rows() != v.mu[t].rows() || mu[t].cols() != v.mu[t].cols())
      throw std::invalid_argument("bundle: intertwiner on triangle " + simplex_name(v.nerve->simplices(2)[t]) +
                                  " should be " + std::to_string(v.mu[t].rows()) + "x" +
                                  std::to_string(v.mu[t].cols()));
    v.mu[t] = mu[t];
  }
  return v;
}

template <class T>
Report validate_bundle(const TwoVectorBundle<T>& v, bool check_certificates) {
  Report r;
  const auto& n = *v.nerve;
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    const auto& m = v.modules[e];
    if (!same_algebra(m->left_algebra, v.algebras[s[1]]) || !same_algebra(m->right_algebra, v.algebras[s[0]])) {
      r.failures.push_back("edge " + simplex_name(s) + ": bimodule algebras do not match the vertex algebras");
      continue;
    }
    if (check_certificates && !certify_invertible(m))
      r.failures.push_back("edge " + simplex_name(s) + ": bimodule is not invertible");
  }
  if (!r.ok()) return r;
  for (int t = 0; t < n.count(2); ++t) {
    const auto& s = n.simplices(2)[t];
    Intertwiner<T> f{v.composites[t].module, v.module_at(s[0], s[2]), v.mu[t]};
    auto errs = check_intertwiner(f);
    if (!errs.empty()) r.failures.push_back("triangle " + simplex_name(s) + ": mu " + errs.front());
    else if (v.mu[t].rows() != v.mu[t].cols() || !inverse<T>(v.mu[t]))
      r.failures.push_back("triangle " + simplex_name(s) + ": mu is not invertible");
  }
  if (!r.ok() || n.count(3) == 0) return r;
  for (const auto& s : n.simplices(3)) {
    const int abc = n.index_of({s[0], s[1], s[2]}), abd = n.index_of({s[0], s[1], s[3]});
    const int acd = n.index_of({s[0], s[2], s[3]}), bcd = n.index_of({s[1], s[2], s[3]});
    const auto& m_cd = v.module_at(s[2], s[3]);
    const auto& m_bc = v.module_at(s[1], s[2]);
    const auto& m_ab = v.module_at(s[0], s[1]);
    bool ok = true;
    for (int x = 0; x < m_cd->dim() && ok; ++x)
      for (int y = 0; y < m_bc->dim() && ok; ++y) {
        Vec<T> xy = mul<T>(v.mu[bcd], v.composites[bcd].pure_basis(x, y));
        for (int z = 0; z < m_ab->dim() && ok; ++z) {
          Vec<T> yz = mul<T>(v.mu[abc], v.composites[abc].pure_basis(y, z));
          Vec<T> lhs = mul<T>(v.mu[acd], v.composites[acd].pure(basis_vec<T>(m_cd->dim(), x), yz));
          Vec<T> rhs = mul<T>(v.mu[abd], v.composites[abd].pure(xy, basis_vec<T>(m_ab->dim(), z)));
          if (lhs != rhs) {
            ok = false;
            r.failures.push_back("tetrahedron " + simplex_name(s) + ": associativity fails on basis (" +
                                 std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")");
          }
        }
      }
  }
  return r;
}

template <class T>
TwoVectorBundle<T> constant_bundle(const NervePtr& nerve, const AlgebraPtr<T>& a) {
  return reconstruct(trivial_cocycle(nerve, a));
}

template <class T>
TwoVectorBundle<T> gerbe(const NervePtr& nerve, const AlgebraPtr<T>& k, const AbelianCochain& eps,
                         const UnitCochain<T>& s) {
  if (k->dim() != 1) throw std::invalid_argument("gerbe: the vertex algebra must be the ground field");
  if (eps.degree != 1 || s.degree != 2) throw std::invalid_argument("gerbe: need a 1-cochain and a 2-cochain");
  BimodulePtr<T> even = line(k, 0), odd = line(k, 1);
  std::vector<BimodulePtr<T>> modules;
  for (long p : eps.values) modules.push_back(p % 2 ? odd : even);
  auto v = assemble_bundle<T>(nerve, std::vector<AlgebraPtr<T>>(nerve->count(0), k), modules,
                              [&](int t, int, int) { return Vec<T>::Constant(1, s.values[t]); });
  v.name = "gerbe";
  return v;
}

template <class T>
TwoVectorBundle<T> reconstruct(const CMCocycle<T>& c) {
  auto report = validate_cocycle(c);
  if (!report.ok()) throw std::invalid_argument("reconstruct: invalid cocycle: " + report.failures.front());
  const auto& a = c.algebra;
  const auto& n = *c.nerve;
  std::vector<BimodulePtr<T>> modules;
  for (const auto& g : c.g) modules.push_back(twisted_regular(g));
  std::vector<Vec<T>> ainv;
  for (const auto& x : c.a) ainv.push_back(x.inverse);
  auto v = assemble_bundle<T>(c.nerve, std::vector<AlgebraPtr<T>>(n.count(0), a), modules, [&](int t, int i, int j) {
    const auto& s = n.simplices(2)[t];
    const auto& g_bc = c.g_at(s[1], s[2]);
    return a->multiply(a->multiply(a->basis(i), g_bc(a->basis(j))), ainv[t]);
  });
  v.name = "reconstruct";
  return v;
}

template <class T>
Extraction<T> extract_cocycle(const TwoVectorBundle<T>& v, const AlgebraPtr<T>& a, Rng& rng,
                              const std::vector<BimodulePtr<T>>& equivalences, bool check_hh1) {
  const auto& n = *v.nerve;
  const bool direct = equivalences.empty();
  if (direct) {
    for (const auto& x : v.algebras)
      if (!same_algebra(x, a))
        throw std::invalid_argument("extract_cocycle: vertex algebras differ from A; supply equivalence bimodules");
  } else if (static_cast<int>(equivalences.size()) != n.count(0)) {
    throw std::invalid_argument("extract_cocycle: need one equivalence bimodule per vertex");
  }
  if (check_hh1 && hh1(a).dimension != 0) throw std::invalid_argument("extract_cocycle: HH1(A) is not zero");

  std::vector<std::optional<InvertibilityCertificate<T>>> certs;
  if (!direct)
    for (int x = 0; x < n.count(0); ++x) {
      const auto& p = equivalences[x];
      if (!same_algebra(p->left_algebra, a) || !same_algebra(p->right_algebra, v.algebras[x]))
        throw std::invalid_argument("extract_cocycle: equivalence at vertex " + std::to_string(x) +
                                    " is not an A-A_a bimodule");
      certs.push_back(certify_invertible(p));
      if (!certs.back()) throw std::invalid_argument("extract_cocycle: equivalence at vertex " +
                                                     std::to_string(x) + " is not invertible");
    }

  Extraction<T> out;
  out.cocycle = CMCocycle<T>{v.nerve, a, {}, {}};
  std::vector<RelTensor<T>> inner, full;
  std::vector<Mat<T>> iso_inv;
  std::vector<Vec<T>> gen;
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    BimodulePtr<T> m = v.modules[e];
    if (!direct) {
      inner.push_back(rel_tensor(equivalences[s[1]], m));
      full.push_back(rel_tensor(inner.back().module, certs[s[0]]->inverse));
      m = full.back().module;
    }
    auto w = picard_witness(m, rng);
    if (w.status != SearchStatus::Found)
      throw std::runtime_error("extract_cocycle: no Picard witness on edge " + simplex_name(s));
    out.conjugated.push_back(m);
    out.witnesses.push_back(*w.witness);
    out.cocycle.g.push_back(w.witness->phi);
    iso_inv.push_back(*inverse<T>(w.witness->iso.map));
    gen.push_back(mul<T>(w.witness->iso.map, a->unit()));
  }

  // Pure terms p (x) m (x) q of a conjugated element.
  struct Term {
    T c;
    int p, m, q;
  };
  auto expand = [&](int e, const Vec<T>& x) {
    std::vector<Term> terms;
    for (Index k = 0; k < x.size(); ++k) {
      if (is_zero(x(k))) continue;
      auto [i, q] = full[e].representative(static_cast<int>(k));
      auto [p, m] = inner[e].representative(i);
      terms.push_back({x(k), p, m, q});
    }
    return terms;
  };

  for (int t = 0; t < n.count(2); ++t) {
    const auto& s = n.simplices(2)[t];
    const int ab = n.index_of({s[0], s[1]}), bc = n.index_of({s[1], s[2]}), ac = n.index_of({s[0], s[2]});
    Vec<T> val;
    if (direct) {
      val = mul<T>(v.mu[t], v.composites[t].pure(gen[bc], gen[ab]));
    } else {
      val = Vec<T>::Zero(full[ac].module->dim());
      const auto& cert_b = *certs[s[1]];
      const auto& m_ab = v.modules[ab];
      const int dm_bc = v.modules[bc]->dim();
      const int dp_c = equivalences[s[2]]->dim(), dq_a = certs[s[0]]->inverse->dim();
      for (const auto& x : expand(bc, gen[bc]))
        for (const auto& y : expand(ab, gen[ab])) {
          Vec<T> ev = mul<T>(cert_b.evaluation.map, cert_b.inner.pure_basis(x.q, y.p));
          Vec<T> m2 = mul<T>(m_ab->act_left(ev), basis_vec<T>(m_ab->dim(), y.m));
          Vec<T> mac = mul<T>(v.mu[t], v.composites[t].pure(basis_vec<T>(dm_bc, x.m), m2));
          Vec<T> pm = inner[ac].pure(basis_vec<T>(dp_c, x.p), mac);
          val += (x.c * y.c) * full[ac].pure(pm, basis_vec<T>(dq_a, y.q));
        }
    }
    auto u = UnitElement<T>::from(a, mul<T>(iso_inv[ac], val));
    if (!u || u->parity != 0) throw std::runtime_error("extract_cocycle: triangle " + simplex_name(s) +
                                                       " does not give an even unit");
    out.cocycle.a.push_back(u->inv());
  }
  auto report = validate_cocycle(out.cocycle);
  if (!report.ok()) throw std::logic_error("extract_cocycle: " + report.failures.front());
  return out;
}

template <class T>
TwoVectorBundle<T> tensor(const TwoVectorBundle<T>& v, const TwoVectorBundle<T>& w) {
  if (!(*v.nerve == *w.nerve)) throw std::invalid_argument("tensor: bundles live on different nerves");
  const auto& n = *v.nerve;
  std::map<std::pair<const void*, const void*>, AlgebraPtr<T>> cache;
  std::vector<AlgebraPtr<T>> algebras;
  for (int x = 0; x < n.count(0); ++x) {
    auto key = std::make_pair(static_cast<const void*>(v.algebras[x].get()),
                              static_cast<const void*>(w.algebras[x].get()));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, graded_tensor(v.algebras[x], w.algebras[x])).first;
    algebras.push_back(it->second);
  }
  std::vector<BimodulePtr<T>> modules;
  std::vector<PairLayout> layouts;
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    modules.push_back(external_tensor(v.modules[e], w.modules[e], algebras[s[1]], algebras[s[0]]));
    layouts.emplace_back(v.modules[e]->carrier, w.modules[e]->carrier);
  }
  auto out = assemble_bundle<T>(v.nerve, algebras, modules, [&](int t, int i, int j) {
    const auto& s = n.simplices(2)[t];
    const int ab = n.index_of({s[0], s[1]}), bc = n.index_of({s[1], s[2]}), ac = n.index_of({s[0], s[2]});
    auto [k, l] = layouts[bc].pairs[i];
    auto [k2, l2] = layouts[ab].pairs[j];
    Vec<T> x = mul<T>(v.mu[t], v.composites[t].pure_basis(k, k2));
    Vec<T> y = mul<T>(w.mu[t], w.composites[t].pure_basis(l, l2));
    Vec<T> r = tensor_element(layouts[ac], x, y);
    if (w.modules[bc]->carrier.parity(l) && v.modules[ab]->carrier.parity(k2)) r = -r;
    return r;
  });
  out.name = v.name + "*" + w.name;
  return out;
}

template <class T>
TwoVectorBundle<T> direct_sum(const TwoVectorBundle<T>& v, const TwoVectorBundle<T>& w) {
  if (!(*v.nerve == *w.nerve)) throw std::invalid_argument("direct_sum: bundles live on different nerves");
  const auto& n = *v.nerve;
  std::map<std::pair<const void*, const void*>, AlgebraPtr<T>> cache;
  std::vector<AlgebraPtr<T>> algebras;
  for (int x = 0; x < n.count(0); ++x) {
    auto key = std::make_pair(static_cast<const void*>(v.algebras[x].get()),
                              static_cast<const void*>(w.algebras[x].get()));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, direct_product(v.algebras[x], w.algebras[x])).first;
    algebras.push_back(it->second);
  }
  std::vector<BimodulePtr<T>> modules;
  std::vector<SumLayout> layouts;
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    modules.push_back(sum_bimodule(v.modules[e], w.modules[e], algebras[s[1]], algebras[s[0]]));
    layouts.push_back(sum_layout(v.modules[e]->carrier, w.modules[e]->carrier));
  }
  auto out = assemble_bundle<T>(v.nerve, algebras, modules, [&](int t, int i, int j) {
    const auto& s = n.simplices(2)[t];
    const int ab = n.index_of({s[0], s[1]}), bc = n.index_of({s[1], s[2]}), ac = n.index_of({s[0], s[2]});
    auto [si, ii] = layouts[bc].origin[i];
    auto [sj, jj] = layouts[ab].origin[j];
    if (si != sj) return Vec<T>(Vec<T>::Zero(layouts[ac].space.dim()));
    const auto& b = si == 0 ? v : w;
    return vec_embed<T>(layouts[ac], si, mul<T>(b.mu[t], b.composites[t].pure_basis(ii, jj)));
  });
  out.name = v.name + "+" + w.name;
  return out;
}

template <class T>
TwoVectorBundle<T> refine(const TwoVectorBundle<T>& v, const SimplicialMap& rho) {
  rho.validate();
  if (!(*rho.target == *v.nerve)) throw std::invalid_argument("refine: map does not land in the bundle's nerve");
  const auto& src = *rho.source;
  const auto& n = *v.nerve;
  std::vector<AlgebraPtr<T>> algebras;
  for (int x = 0; x < src.count(0); ++x) algebras.push_back(v.algebras[rho.vertex_map[x]]);
  std::map<int, BimodulePtr<T>> regular;
  auto regular_at = [&](int x) {
    auto it = regular.find(x);
    if (it == regular.end()) it = regular.emplace(x, regular_bimodule(v.algebras[x])).first;
    return it->second;
  };
  std::vector<BimodulePtr<T>> modules;
  for (const auto& s : src.simplices(1)) {
    auto img = rho.image(s);
    modules.push_back(img[0] == img[1] ? regular_at(img[0]) : v.module_at(img[0], img[1]));
  }
  auto out = assemble_bundle<T>(rho.source, algebras, modules, [&](int t, int i, int j) -> Vec<T> {
    auto img = rho.image(src.simplices(2)[t]);
    const int x = img[0], y = img[1], z = img[2];
    if (x < y && y < z) {
      const int k = n.index_of({x, y, z});
      return mul<T>(v.mu[k], v.composites[k].pure_basis(i, j));
    }
    if (x == y && y < z) return v.module_at(x, z)->right[j].col(i);  // m . a
    if (x < y && y == z) return v.module_at(x, y)->left[i].col(j);   // a . m
    const auto& a = v.algebras[x];
    return a->multiply(a->basis(i), a->basis(j));
  });
  out.name = v.name + "^rho";
  return out;
}

template <class T>
BundleMorphism<T> assemble_morphism(BundlePtr<T> source, BundlePtr<T> target, std::vector<BimodulePtr<T>> p,
                                    const PairValue<T>& phi) {
  if (!(*source->nerve == *target->nerve)) throw std::invalid_argument("morphism: bundles on different nerves");
  const auto& n = *source->nerve;
  if (static_cast<int>(p.size()) != n.count(0)) throw std::invalid_argument("morphism: need one bimodule per vertex");
  BundleMorphism<T> m{source, target, std::move(p), {}, {}, {}};
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    m.before.push_back(rel_tensor(target->modules[e], m.p[s[0]]));
    m.after.push_back(rel_tensor(m.p[s[1]], source->modules[e]));
    m.phi.push_back(on_representatives<T>(m.before.back(), m.after.back().module->dim(),
                                          [&](int i, int j) { return phi(e, i, j); }));
  }
  return m;
}

template <class T>
Report validate_morphism(const BundleMorphism<T>& m) {
  Report r;
  const auto& v1 = *m.source;
  const auto& v2 = *m.target;
  const auto& n = *v1.nerve;
  for (int x = 0; x < n.count(0); ++x)
    if (!same_algebra(m.p[x]->left_algebra, v2.algebras[x]) || !same_algebra(m.p[x]->right_algebra, v1.algebras[x]))
      r.failures.push_back("vertex " + std::to_string(x) + ": bimodule algebras do not match");
  if (!r.ok()) return r;
  for (int e = 0; e < n.count(1); ++e) {
    Intertwiner<T> f{m.before[e].module, m.after[e].module, m.phi[e]};
    auto errs = check_intertwiner(f);
    const auto& s = n.simplices(1)[e];
    if (!errs.empty()) r.failures.push_back("edge " + simplex_name(s) + ": phi " + errs.front());
    else if (m.phi[e].rows() != m.phi[e].cols() || !inverse<T>(m.phi[e]))
      r.failures.push_back("edge " + simplex_name(s) + ": phi is not invertible");
  }
  if (!r.ok()) return r;
  for (int t = 0; t < n.count(2); ++t) {
    const auto& s = n.simplices(2)[t];
    const int ab = n.index_of({s[0], s[1]}), bc = n.index_of({s[1], s[2]}), ac = n.index_of({s[0], s[2]});
    const int dx = v2.modules[bc]->dim(), dy = v2.modules[ab]->dim(), dp = m.p[s[0]]->dim();
    bool ok = true;
    for (int x = 0; x < dx && ok; ++x)
      for (int y = 0; y < dy && ok; ++y) {
        Vec<T> xy = mul<T>(v2.mu[t], v2.composites[t].pure_basis(x, y));
        for (int p = 0; p < dp && ok; ++p) {
          Vec<T> lhs = mul<T>(m.phi[ac], m.before[ac].pure(xy, basis_vec<T>(dp, p)));
          Vec<T> rhs = Vec<T>::Zero(lhs.size());
          Vec<T> w = mul<T>(m.phi[ab], m.before[ab].pure_basis(y, p));
          for (Index q = 0; q < w.size(); ++q) {
            if (is_zero(w(q))) continue;
            auto [pi, mj] = m.after[ab].representative(static_cast<int>(q));
            Vec<T> u = mul<T>(m.phi[bc], m.before[bc].pure_basis(x, pi));
            for (Index q2 = 0; q2 < u.size(); ++q2) {
              if (is_zero(u(q2))) continue;
              auto [pk, ml] = m.after[bc].representative(static_cast<int>(q2));
              Vec<T> mm = mul<T>(v1.mu[t], v1.composites[t].pure_basis(ml, mj));
              rhs += (w(q) * u(q2)) * m.after[ac].pure(basis_vec<T>(m.p[s[2]]->dim(), pk), mm);
            }
          }
          if (lhs != rhs) {
            ok = false;
            r.failures.push_back("triangle " + simplex_name(s) + ": hexagon fails on basis (" + std::to_string(x) +
                                 "," + std::to_string(y) + "," + std::to_string(p) + ")");
          }
        }
      }
  }
  return r;
}

template <class T>
BundleMorphism<T> identity_morphism(const BundlePtr<T>& v) {
  std::vector<BimodulePtr<T>> p;
  for (const auto& a : v->algebras) p.push_back(regular_bimodule(a));
  const auto& n = *v->nerve;
  std::vector<RelTensor<T>> after;
  for (int e = 0; e < n.count(1); ++e) after.push_back(rel_tensor(p[n.simplices(1)[e][1]], v->modules[e]));
  return assemble_morphism<T>(v, v, p, [&](int e, int i, int j) {
    const auto& b = v->algebras[n.simplices(1)[e][1]];
    return after[e].pure(b->unit(), v->modules[e]->right[j].col(i));
  });
}

template <class T>
BundleMorphism<T> extraction_morphism(const BundlePtr<T>& v, const BundlePtr<T>& rebuilt, const Extraction<T>& x) {
  const auto& n = *v->nerve;
  for (int e = 0; e < n.count(1); ++e)
    if (x.conjugated[e] != v->modules[e])
      throw std::invalid_argument("extraction_morphism: extraction went through equivalence bimodules");
  const auto& a = x.cocycle.algebra;
  std::vector<BimodulePtr<T>> p(n.count(0), regular_bimodule(a));
  std::vector<RelTensor<T>> after;
  for (int e = 0; e < n.count(1); ++e) after.push_back(rel_tensor(p[0], v->modules[e]));
  return assemble_morphism<T>(v, rebuilt, p, [&](int e, int i, int j) {
    Vec<T> xp = rebuilt->modules[e]->right[j].col(i);
    return after[e].pure(a->unit(), mul<T>(x.witnesses[e].iso.map, xp));
  });
}

template <class T>
TwistedModuleBundle<T> assemble_twisted(const BundlePtr<T>& gerbe, const AlgebraPtr<T>& a,
                                        std::vector<AlgebraHom<T>> twist, std::vector<BimodulePtr<T>> modules,
                                        const std::function<Mat<T>(int, const RelTensor<T>&)>& eps) {
  const auto& n = *gerbe->nerve;
  if (static_cast<int>(modules.size()) != n.count(0))
    throw std::invalid_argument("twisted module: need one module per vertex");
  if (!twist.empty() && static_cast<int>(twist.size()) != n.count(1))
    throw std::invalid_argument("twisted module: need one automorphism per edge");
  TwistedModuleBundle<T> t{gerbe, a, std::move(twist), std::move(modules), {}, {}};
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    t.targets.push_back(rel_tensor(t.modules[s[1]], gerbe->modules[e]));
    t.eps.push_back(eps(e, t.targets.back()));
  }
  return t;
}

template <class T>
TwistedReport validate_twisted_module(const TwistedModuleBundle<T>& t) {
  TwistedReport out;
  auto& r = out.report;
  const auto& g = *t.gerbe;
  const auto& n = *g.nerve;
  for (int x = 0; x < n.count(0); ++x) {
    const auto& e = t.modules[x];
    if (!same_algebra(e->left_algebra, t.algebra) || !same_algebra(e->right_algebra, g.algebras[x]))
      r.failures.push_back("vertex " + std::to_string(x) + ": module algebras do not match");
  }
  if (!r.ok()) return out;
  for (int e = 0; e < n.count(1); ++e) {
    const auto& s = n.simplices(1)[e];
    const auto& src = t.modules[s[0]];
    const auto& tgt = t.targets[e].module;
    const Mat<T>& f = t.eps[e];
    const std::string where = "edge " + simplex_name(s) + ": ";
    if (f.rows() != tgt->dim() || f.cols() != src->dim()) {
      r.failures.push_back(where + "eps has wrong shape");
      continue;
    }
    if (!has_parity<T>(src->carrier, tgt->carrier, f, 0)) r.failures.push_back(where + "eps is not even");
    if (f.rows() != f.cols() || !inverse<T>(f)) r.failures.push_back(where + "eps is not invertible");
    for (int i = 0; i < t.algebra->dim(); ++i) {
      Vec<T> gi = t.twist.empty() ? t.algebra->basis(i) : t.twist[e](t.algebra->basis(i));
      if (mul<T>(f, src->left[i]) != mul<T>(tgt->act_left(gi), f)) {
        r.failures.push_back(where + "eps is not A-linear at basis " + std::to_string(i));
        break;
      }
    }
    for (size_t j = 0; j < src->right.size(); ++j)
      if (mul<T>(f, src->right[j]) != mul<T>(tgt->right[j], f)) r.failures.push_back(where + "eps is not k-linear");
  }
  if (!r.ok()) return out;
  for (int k = 0; k < n.count(2); ++k) {
    const auto& s = n.simplices(2)[k];
    const int ab = n.index_of({s[0], s[1]}), bc = n.index_of({s[1], s[2]}), ac = n.index_of({s[0], s[2]});
    const int dim = t.modules[s[0]]->dim(), dc = t.modules[s[2]]->dim();
    for (int v = 0; v < dim; ++v) {
      Vec<T> lhs = t.eps[ac].col(v);
      Vec<T> rhs = Vec<T>::Zero(lhs.size());
      Vec<T> w = t.eps[ab].col(v);
      for (Index q = 0; q < w.size(); ++q) {
        if (is_zero(w(q))) continue;
        auto [ei, lj] = t.targets[ab].representative(static_cast<int>(q));
        Vec<T> u = t.eps[bc].col(ei);
        for (Index q2 = 0; q2 < u.size(); ++q2) {
          if (is_zero(u(q2))) continue;
          auto [ek, ll] = t.targets[bc].representative(static_cast<int>(q2));
          Vec<T> l = mul<T>(g.mu[k], g.composites[k].pure_basis(ll, lj));
          rhs += (w(q) * u(q2)) * t.targets[ac].pure(basis_vec<T>(dc, ek), l);
        }
      }
      if (lhs != rhs) {
        r.failures.push_back("triangle " + simplex_name(s) + ": eps_ac != (1 (x) mu)(eps_bc (x) 1) eps_ab on basis " +
                             std::to_string(v));
        break;
      }
    }
  }
  out.fibres_invertible = true;
  for (const auto& e : t.modules)
    if (!certify_invertible(e)) out.fibres_invertible = false;
  return out;
}

template <class T>
CMCocycle<T> end_descent(const TwistedModuleBundle<T>& t) {
  auto rep = validate_twisted_module(t);
  if (!rep.report.ok()) throw std::invalid_argument("end_descent: " + rep.report.failures.front());
  const auto& n = *t.gerbe->nerve;
  const SuperVectorSpace& c = t.modules[0]->carrier;
  if (c.dim() == 0) throw std::invalid_argument("end_descent: modules must be non-zero");
  for (const auto& e : t.modules)
    if (!(e->carrier == c)) throw std::invalid_argument("end_descent: modules must share one carrier");
  auto end = endomorphism_algebra<T>(c.even, c.odd);
  const int d = end->dim(), r = c.dim();
  std::vector<std::pair<int, int>> units;
  for (int k = 0; k < d; ++k) units.push_back(matrix_unit(end, k));
  CMCocycle<T> out{t.gerbe->nerve, end, {}, {}};
  for (int e = 0; e < n.count(1); ++e) {
    // Identify E_b (x) L with E_b through e_i -> e_i (x) l.
    Mat<T> theta(r, r);
    for (int i = 0; i < r; ++i) theta.col(i) = t.targets[e].pure(basis_vec<T>(r, i), Vec<T>::Constant(1, T(1)));
    Mat<T> u = mul<T>(*inverse<T>(theta), t.eps[e]);
    Mat<T> uinv = *inverse<T>(u);
    Mat<T> map(d, d);
    for (int k = 0; k < d; ++k) {
      Mat<T> x = Mat<T>::Zero(r, r);
      x(units[k].first, units[k].second) = T(1);
      Mat<T> y = mul<T>(mul<T>(u, x), uinv);
      for (int l = 0; l < d; ++l) map(l, k) = y(units[l].first, units[l].second);
    }
    out.g.push_back(AlgebraHom<T>{end, end, map});
  }
  out.a.assign(n.count(2), UnitElement<T>::one(end));
  auto report = validate_cocycle(out);
  if (!report.ok()) throw std::logic_error("end_descent: " + report.failures.front());
  return out;
}

template <class T>
ClassTriple<T> invariant_triple(const TwoVectorBundle<T>& v, Rng& rng) {
  const auto& n = *v.nerve;
  std::map<const void*, bool> csa;
  for (const auto& a : v.algebras) {
    auto it = csa.find(a.get());
    if (it == csa.end()) it = csa.emplace(a.get(), is_central_simple(a).central_simple).first;
    if (!it->second) throw std::invalid_argument("invariant_triple: fibre " + a->name() + " is not central simple");
  }
  ClassTriple<T> out;
  auto comp = n.components();
  std::map<int, int> base;
  for (int x = 0; x < n.count(0); ++x) base.emplace(comp[x], x);
  for (const auto& [c, x] : base) out.bw.push_back(bw_class(v.algebras[x]));

  AlgebraPtr<T> a = v.algebras.at(0);
  std::vector<BimodulePtr<T>> eq;
  bool uniform = true;
  for (const auto& x : v.algebras) uniform = uniform && same_algebra(x, a);
  if (!uniform) {
    if (n.num_components() != 1)
      throw std::invalid_argument("invariant_triple: differing fibres on a disconnected nerve");
    // P_x along a spanning tree: P_b = P_a (x) M_ab^{-1} or P_a (x) M_ba.
    eq.assign(n.count(0), nullptr);
    eq[0] = regular_bimodule(a);
    std::vector<int> queue = {0};
    for (size_t head = 0; head < queue.size(); ++head) {
      const int x = queue[head];
      for (int e = 0; e < n.count(1); ++e) {
        const auto& s = n.simplices(1)[e];
        int y = s[0] == x ? s[1] : s[1] == x ? s[0] : -1;
        if (y < 0 || eq[y]) continue;
        BimodulePtr<T> step = v.modules[e];
        if (s[0] == x) step = certify_invertible(step)->inverse;
        eq[y] = rel_tensor(eq[x], step).module;
        queue.push_back(y);
      }
    }
  }
  if (hh1(a).dimension != 0) throw std::invalid_argument("invariant_triple: HH1 of the fibre is not zero");
  std::optional<Extraction<T>> x;
  try {
    x = extract_cocycle(v, a, rng, eq, false);
  } catch (const std::runtime_error&) {
    // Not Picard-surjective: pass to E = End_A(P)^op through the E-A bimodule.
    auto ps = picard_surjectify(a, rng);
    const auto& to_e = ps.certificate.inverse;
    std::vector<BimodulePtr<T>> eq2;
    for (int y = 0; y < n.count(0); ++y) eq2.push_back(eq.empty() ? to_e : rel_tensor(to_e, eq[y]).module);
    x = extract_cocycle(v, ps.algebra, rng, eq2, false);
  }
  auto inv = csa_invariants(x->cocycle, rng);
  out.epsilon = inv.cocycle.epsilon;
  out.x = inv.cocycle.x;
  return out;
}

template <class T>
ClassTriple<T> triple_product(const ClassTriple<T>& a, const ClassTriple<T>& b) {
  if (a.bw.size() != b.bw.size() || !(*a.epsilon.nerve == *b.epsilon.nerve))
    throw std::invalid_argument("triple_product: triples on different nerves");
  ClassTriple<T> out;
  for (size_t i = 0; i < a.bw.size(); ++i) {
    if (a.bw[i].modulus != b.bw[i].modulus) throw std::invalid_argument("triple_product: BW moduli differ");
    out.bw.push_back({(a.bw[i].residue + b.bw[i].residue) % a.bw[i].modulus, a.bw[i].modulus});
  }
  auto s = twisted_product(ScalarCocycle<T>{a.epsilon, a.x}, ScalarCocycle<T>{b.epsilon, b.x});
  out.epsilon = s.epsilon;
  out.x = s.x;
  return out;
}

template <class T>
ClassTriple<T> triple_inverse(const ClassTriple<T>& a) {
  ClassTriple<T> out = a;
  for (auto& b : out.bw) b.residue = (b.modulus - b.residue) % b.modulus;
  out.x = a.x.inverse();
  AbelianCochain cup = cup_product(a.epsilon, a.epsilon);
  for (size_t k = 0; k < out.x.values.size(); ++k)
    if (cup.values[k] % 2 != 0) out.x.values[k] = -out.x.values[k];
  return out;
}

template <class T>
ClassTriple<T> unit_triple(const NervePtr& nerve) {
  ClassTriple<T> out;
  out.bw.assign(nerve->num_components(), BWClass{0, bw_modulus<T>()});
  out.epsilon = AbelianCochain::zero(nerve, 1, 2);
  out.x = UnitCochain<T>::one(nerve, 2);
  return out;
}

template <class T>
bool same_class(const ClassTriple<T>& a, const ClassTriple<T>& b) {
  if (a.bw.size() != b.bw.size()) return false;
  for (size_t i = 0; i < a.bw.size(); ++i)
    if (a.bw[i].residue != b.bw[i].residue || a.bw[i].modulus != b.bw[i].modulus) return false;
  return same_class(ScalarCocycle<T>{a.epsilon, a.x}, ScalarCocycle<T>{b.epsilon, b.x});
}

template <class T>
std::string describe(const ClassTriple<T>& t) {
  std::ostringstream os;
  os << "(bw ";
  for (size_t i = 0; i < t.bw.size(); ++i) os << (i ? "," : "") << t.bw[i].residue << " mod " << t.bw[i].modulus;
  os << "; eps " << to_string(t.epsilon) << "; x [";
  for (size_t k = 0; k < t.x.values.size(); ++k) os << (k ? " " : "") << t.x.values[k];
  os << "])";
  return os.str();
}

template <class T>
std::optional<int> torsion_order(const UnitCochain<T>& x, int max_order) {
  UnitCochain<T> p = x;
  for (int m = 1; m <= max_order; ++m) {
    if (coboundary_preimage(p)) return m;
    p = p * x;
  }
  return std::nullopt;
}

#define S2V_INSTANTIATE(T)                                                                                      \
  template TwoVectorBundle<T> assemble_bundle<T>(NervePtr, std::vector<AlgebraPtr<T>>,                          \
                                                 std::vector<BimodulePtr<T>>, const PairValue<T>&);             \
  template TwoVectorBundle<T> assemble_bundle<T>(NervePtr, std::vector<AlgebraPtr<T>>,                          \
                                                 std::vector<BimodulePtr<T>>, std::vector<Mat<T>>);             \
  template Report validate_bundle<T>(const TwoVectorBundle<T>&, bool);                                          \
  template TwoVectorBundle<T> constant_bundle<T>(const NervePtr&, const AlgebraPtr<T>&);                        \
  template TwoVectorBundle<T> gerbe<T>(const NervePtr&, const AlgebraPtr<T>&, const AbelianCochain&,            \
                                       const UnitCochain<T>&);                                                  \
  template TwoVectorBundle<T> reconstruct<T>(const CMCocycle<T>&);                                              \
  template Extraction<T> extract_cocycle<T>(const TwoVectorBundle<T>&, const AlgebraPtr<T>&, Rng&,              \
                                            const std::vector<BimodulePtr<T>>&, bool);                          \
  template TwoVectorBundle<T> tensor<T>(const TwoVectorBundle<T>&, const TwoVectorBundle<T>&);                  \
  template TwoVectorBundle<T> direct_sum<T>(const TwoVectorBundle<T>&, const TwoVectorBundle<T>&);              \
  template TwoVectorBundle<T> refine<T>(const TwoVectorBundle<T>&, const SimplicialMap&);                       \
  template BundleMorphism<T> assemble_morphism<T>(BundlePtr<T>, BundlePtr<T>, std::vector<BimodulePtr<T>>,      \
                                                  const PairValue<T>&);                                         \
  template Report validate_morphism<T>(const BundleMorphism<T>&);                                               \
  template BundleMorphism<T> identity_morphism<T>(const BundlePtr<T>&);                                         \
  template BundleMorphism<T> extraction_morphism<T>(const BundlePtr<T>&, const BundlePtr<T>&,                   \
                                                    const Extraction<T>&);                                      \
  template TwistedModuleBundle<T> assemble_twisted<T>(const BundlePtr<T>&, const AlgebraPtr<T>&,                \
                                                      std::vector<AlgebraHom<T>>, std::vector<BimodulePtr<T>>,  \
                                                      const std::function<Mat<T>(int, const RelTensor<T>&)>&);  \
  template TwistedReport validate_twisted_module<T>(const TwistedModuleBundle<T>&);                             \
  template CMCocycle<T> end_descent<T>(const TwistedModuleBundle<T>&);                                          \
  template ClassTriple<T> invariant_triple<T>(const TwoVectorBundle<T>&, Rng&);                                 \
  template ClassTriple<T> triple_product<T>(const ClassTriple<T>&, const ClassTriple<T>&);                      \
  template ClassTriple<T> triple_inverse<T>(const ClassTriple<T>&);                                             \
  template ClassTriple<T> unit_triple<T>(const NervePtr&);                                                      \
  template bool same_class<T>(const ClassTriple<T>&, const ClassTriple<T>&);                                    \
  template std::string describe<T>(const ClassTriple<T>&);                                                      \
  template std::optional<int> torsion_order<T>(const UnitCochain<T>&, int);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
