#include "super2vec/lifting.hpp"

#include <sstream>
#include <stdexcept>

#include "super2vec/morita.hpp"

namespace super2vec {

namespace {

template <class T>
std::optional<int> find_element(const std::vector<Mat<T>>& elements, const Mat<T>& m) {
  for (size_t i = 0; i < elements.size(); ++i)
    if (elements[i].rows() == m.rows() && elements[i].cols() == m.cols() && elements[i] == m)
      return static_cast<int>(i);
  return std::nullopt;
}

template <class T>
std::string element_name(const ExtensionData<T>& d, int x) {
  if (x < static_cast<int>(d.names.size())) return d.names[x];
  return "#" + std::to_string(x);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "; " : "") + v[i];
  return out;
}

std::string simplex_name(const Simplex& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

// Graded conjugation x -> (-1)^{|u||x|} u x u^{-1}.
template <class T>
AlgebraHom<T> graded_conjugation(const UnitElement<T>& u) {
  AlgebraHom<T> c = conjugation(u);
  return u.parity ? compose(parity_operator(u.algebra), c) : c;
}

}  // namespace

template <class T>
int CentralExtension<T>::lift(int g) const {
  for (int x = 0; x < size(); ++x)
    if (data.projection[x] == g) return x;
  throw std::invalid_argument("extension: no lift of group element " + std::to_string(g));
}

template <class T>
std::optional<int> CentralExtension<T>::central_phase(int x) const {
  for (size_t k = 0; k < center.size(); ++k)
    if (center[k] == x) return static_cast<int>(k);
  return std::nullopt;
}

template <class T>
std::vector<std::string> check_extension(const ExtensionData<T>& d) {
  std::vector<std::string> f;
  const int n = static_cast<int>(d.elements.size()), ng = static_cast<int>(d.g_table.size());
  if (n == 0 || ng == 0) return {"empty group"};
  if (static_cast<int>(d.parity.size()) != n || static_cast<int>(d.projection.size()) != n)
    return {"parity and projection need one entry per element"};
  if (static_cast<int>(d.grading.size()) != ng) return {"grading needs one entry per element of G"};
  if (d.z_order < 1) return {"Z must have positive order"};
  const Index dim = d.elements[0].rows();
  for (int x = 0; x < n; ++x) {
    const auto& m = d.elements[x];
    if (m.rows() != dim || m.cols() != dim) f.push_back(element_name(d, x) + ": wrong shape");
    else if (!inverse<T>(m)) f.push_back(element_name(d, x) + ": not invertible");
    if (d.projection[x] < 0 || d.projection[x] >= ng) f.push_back(element_name(d, x) + ": projection out of range");
  }
  for (const auto& row : d.g_table)
    if (static_cast<int>(row.size()) != ng) f.push_back("G table is not square");
  if (!f.empty()) return f;
  for (const auto& row : d.g_table)
    for (int v : row)
      if (v < 0 || v >= ng) return {"G table entry out of range"};

  // G is a group.
  int e = -1;
  for (int x = 0; x < ng && e < 0; ++x) {
    bool unit = true;
    for (int y = 0; y < ng; ++y) unit = unit && d.g_table[x][y] == y && d.g_table[y][x] == y;
    if (unit) e = x;
  }
  if (e < 0) return {"G has no identity"};
  for (int x = 0; x < ng; ++x) {
    bool has_inverse = false;
    for (int y = 0; y < ng; ++y) has_inverse = has_inverse || d.g_table[x][y] == e;
    if (!has_inverse) f.push_back("G element " + std::to_string(x) + " has no inverse");
    for (int y = 0; y < ng; ++y) {
      if ((d.grading[d.g_table[x][y]] - d.grading[x] - d.grading[y]) % 2 != 0)
        f.push_back("grading is not a homomorphism at (" + std::to_string(x) + "," + std::to_string(y) + ")");
      for (int z = 0; z < ng; ++z)
        if (d.g_table[d.g_table[x][y]][z] != d.g_table[x][d.g_table[y][z]]) {
          f.push_back("G table is not associative");
          return f;
        }
    }
  }

  // Closure, projection and parity.
  std::vector<bool> hit(ng, false);
  for (int x = 0; x < n; ++x) {
    hit[d.projection[x]] = true;
    if (d.parity[x] != d.grading[d.projection[x]] % 2)
      f.push_back(element_name(d, x) + ": parity label differs from the grading of its image");
    for (int y = 0; y < n; ++y) {
      auto xy = find_element(d.elements, Mat<T>(mul<T>(d.elements[x], d.elements[y])));
      if (!xy) {
        f.push_back("not closed: " + element_name(d, x) + " * " + element_name(d, y));
        continue;
      }
      if (d.projection[*xy] != d.g_table[d.projection[x]][d.projection[y]])
        f.push_back("projection is not a homomorphism at (" + element_name(d, x) + "," + element_name(d, y) + ")");
      if (d.parity[*xy] != (d.parity[x] + d.parity[y]) % 2)
        f.push_back("parity labels are not multiplicative at (" + element_name(d, x) + "," + element_name(d, y) +
                    ")");
    }
  }
  for (int g = 0; g < ng; ++g)
    if (!hit[g]) f.push_back("projection misses G element " + std::to_string(g));

  // Kernel is exactly Z.
  Mat<T> id = Mat<T>::Identity(dim, dim);
  for (int k = 0; k < d.z_order; ++k) {
    Mat<T> z = Field<T>::root_of_unity(d.z_order, k) * id;
    auto x = find_element(d.elements, z);
    if (!x) f.push_back("Z element of phase " + std::to_string(k) + " is missing");
    else if (d.projection[*x] != e) f.push_back("Z element of phase " + std::to_string(k) + " is not in the kernel");
  }
  for (int x = 0; x < n; ++x) {
    if (d.projection[x] != e) continue;
    bool central = false;
    for (int k = 0; k < d.z_order && !central; ++k)
      central = d.elements[x] == Mat<T>(Field<T>::root_of_unity(d.z_order, k) * id);
    if (!central) f.push_back("kernel element " + element_name(d, x) + " is not in Z");
  }
  return f;
}

template <class T>
CentralExtension<T> make_extension(ExtensionData<T> d) {
  auto f = check_extension(d);
  if (!f.empty()) throw std::invalid_argument("extension: " + join(f));
  CentralExtension<T> ext;
  const int n = static_cast<int>(d.elements.size()), ng = static_cast<int>(d.g_table.size());
  ext.hat_table.assign(n, std::vector<int>(n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) ext.hat_table[x][y] = *find_element(d.elements, Mat<T>(mul<T>(d.elements[x], d.elements[y])));
  const Index dim = d.elements[0].rows();
  ext.hat_identity = *find_element(d.elements, Mat<T>(Mat<T>::Identity(dim, dim)));
  ext.hat_inverse.resize(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (ext.hat_table[x][y] == ext.hat_identity) ext.hat_inverse[x] = y;
  ext.g_identity = d.projection[ext.hat_identity];
  ext.g_inverse.resize(ng);
  for (int x = 0; x < ng; ++x)
    for (int y = 0; y < ng; ++y)
      if (d.g_table[x][y] == ext.g_identity) ext.g_inverse[x] = y;
  for (int k = 0; k < d.z_order; ++k)
    ext.center.push_back(
        *find_element(d.elements, Mat<T>(Field<T>::root_of_unity(d.z_order, k) * Mat<T>::Identity(dim, dim))));
  ext.data = std::move(d);
  return ext;
}

template <class T>
CentralExtension<T> pin_minus_1() {
  auto cl = clifford<T>(0, 1);
  const Vec<T> one = cl->unit(), e = cl->basis(1);
  ExtensionData<T> d;
  for (const Vec<T>& v : {one, Vec<T>(-one), e, Vec<T>(-e)}) d.elements.push_back(cl->left_mult(v));
  d.parity = {0, 0, 1, 1};
  d.projection = {0, 0, 1, 1};
  d.g_table = {{0, 1}, {1, 0}};
  d.grading = {0, 1};
  d.z_order = 2;
  d.names = {"1", "-1", "e", "-e"};
  return make_extension(std::move(d));
}

template <class T>
CentralExtension<T> split_extension(const std::vector<std::vector<int>>& g_table, const std::vector<int>& grading,
                                    int z_order) {
  const int ng = static_cast<int>(g_table.size());
  ExtensionData<T> d;
  for (int k = 0; k < z_order; ++k)
    for (int g = 0; g < ng; ++g) {
      Mat<T> r = Mat<T>::Zero(ng, ng);
      for (int h = 0; h < ng; ++h) r(g_table[g][h], h) = T(1);
      d.elements.push_back(Field<T>::root_of_unity(z_order, k) * r);
      d.parity.push_back(grading[g] % 2);
      d.projection.push_back(g);
      d.names.push_back("z" + std::to_string(k) + "g" + std::to_string(g));
    }
  d.g_table = g_table;
  d.grading = grading;
  d.z_order = z_order;
  return make_extension(std::move(d));
}

template <class T>
ImplementationReport validate_implementation(const CentralExtension<T>& ext, const Implementation<T>& impl) {
  ImplementationReport out;
  auto& f = out.report.failures;
  const auto& d = ext.data;
  const auto& a = impl.algebra;
  const auto& m = impl.module;
  if (static_cast<int>(impl.action.size()) != ext.group_size() || static_cast<int>(impl.hat_action.size()) != ext.size()) {
    f.push_back("implementation: need one automorphism per element of G and one map per element of G^");
    return out;
  }
  if (!same_algebra(m->left_algebra, a) || m->right_algebra->dim() != 1) {
    f.push_back("implementation: F must be an A-k bimodule");
    return out;
  }
  for (int g = 0; g < ext.group_size(); ++g) {
    const auto& h = impl.action[g];
    if (!same_algebra(h.source, a) || !h.check().empty() || !h.is_automorphism())
      f.push_back("G element " + std::to_string(g) + " does not act by an even automorphism");
  }
  if (!f.empty()) return out;
  for (int x = 0; x < ext.group_size(); ++x)
    for (int y = 0; y < ext.group_size(); ++y)
      if (!(compose(impl.action[x], impl.action[y]) == impl.action[d.g_table[x][y]]))
        f.push_back("G-action is not multiplicative at (" + std::to_string(x) + "," + std::to_string(y) + ")");
  for (int x = 0; x < ext.size(); ++x) {
    const Mat<T>& h = impl.hat_action[x];
    const std::string nx = element_name(d, x);
    if (h.rows() != m->dim() || h.cols() != m->dim()) {
      f.push_back(nx + ": wrong shape on F");
      continue;
    }
    if (!has_parity<T>(m->carrier, m->carrier, h, d.parity[x])) f.push_back(nx + ": parity differs from its label");
    if (!inverse<T>(h)) f.push_back(nx + ": not invertible on F");
  }
  if (!f.empty()) return out;
  for (int x = 0; x < ext.size(); ++x)
    for (int y = 0; y < ext.size(); ++y)
      if (mul<T>(impl.hat_action[x], impl.hat_action[y]) != impl.hat_action[ext.hat_table[x][y]])
        f.push_back("G^ action is not multiplicative at (" + element_name(d, x) + "," + element_name(d, y) + ")");
  for (int k = 0; k < d.z_order; ++k) {
    Mat<T> z = Field<T>::root_of_unity(d.z_order, k) * Mat<T>::Identity(m->dim(), m->dim());
    if (impl.hat_action[ext.center[k]] != z)
      f.push_back("Z element of phase " + std::to_string(k) + " does not act by its scalar");
  }
  for (int x = 0; x < ext.size(); ++x) {
    const auto& g = impl.action[d.projection[x]];
    for (int i = 0; i < a->dim(); ++i) {
      Mat<T> lhs = mul<T>(impl.hat_action[x], m->left[i]);
      Mat<T> rhs = mul<T>(m->act_left(g(a->basis(i))), impl.hat_action[x]);
      if (d.parity[x] && a->parity(i)) rhs = -rhs;
      if (lhs == rhs) continue;
      for (int v = 0; v < m->dim(); ++v)
        if (lhs.col(v) != rhs.col(v)) {
          f.push_back("violation at (" + element_name(d, x) + ", " + a->carrier().labels[i] +
                      (a->parity(i) ? " odd" : " even") + ", v" + std::to_string(v) + ")");
          break;
        }
    }
  }
  if (f.empty()) out.morita = certify_invertible(m).has_value();
  return out;
}

template <class T>
Implementation<T> inner_implementation(const CentralExtension<T>& ext, const AlgebraPtr<T>& a,
                                       const std::vector<Vec<T>>& images, const BimodulePtr<T>& f) {
  if (static_cast<int>(images.size()) != ext.size())
    throw std::invalid_argument("inner implementation: need one image per element of G^");
  Implementation<T> impl{a, {}, f, {}};
  std::vector<UnitElement<T>> units;
  for (int x = 0; x < ext.size(); ++x) {
    auto u = UnitElement<T>::from(a, images[x]);
    if (!u) throw std::invalid_argument("inner implementation: image of " + element_name(ext.data, x) +
                                        " is not a homogeneous unit");
    units.push_back(*u);
    impl.hat_action.push_back(f->act_left(images[x]));
  }
  for (int g = 0; g < ext.group_size(); ++g) impl.action.push_back(graded_conjugation(units[ext.lift(g)]));
  return impl;
}

template <class T>
Implementation<T> pin_implementation(const CentralExtension<T>& ext) {
  auto c01 = clifford<T>(0, 1), c10 = clifford<T>(1, 0);
  auto a = graded_tensor(c01, c10);
  PairLayout lay(c01->carrier(), c10->carrier());
  const Vec<T> e = tensor_element(lay, c01->basis(1), c10->unit());
  auto mt = morita_trivial(a);
  if (mt.status != MoritaStatus::Trivial) throw std::logic_error("pin implementation: A is not Morita trivial");
  std::vector<Vec<T>> images;
  for (int x = 0; x < ext.size(); ++x) {
    const Mat<T>& m = ext.data.elements[x];
    // Elements of Pin-_1 are left multiplications in Cl(0,1): read c + d e off the first column.
    if (m.rows() != 2) throw std::invalid_argument("pin implementation: expected the Pin-_1 extension");
    images.push_back(m(0, 0) * a->unit() + m(1, 0) * e);
  }
  return inner_implementation(ext, a, images, mt.module);
}

template <class T>
std::vector<std::string> check_g_cocycle(const CentralExtension<T>& ext, const NervePtr& nerve, const GCocycle& g) {
  std::vector<std::string> f;
  if (static_cast<int>(g.size()) != nerve->count(1)) return {"G-cocycle: need one group element per edge"};
  for (int v : g)
    if (v < 0 || v >= ext.group_size()) return {"G-cocycle: value out of range"};
  for (const auto& t : nerve->simplices(2)) {
    const int ab = g[nerve->index_of({t[0], t[1]})], bc = g[nerve->index_of({t[1], t[2]})];
    const int ac = g[nerve->index_of({t[0], t[2]})];
    if (ext.data.g_table[bc][ab] != ac) f.push_back("triangle " + simplex_name(t) + ": g_bc g_ab != g_ac");
  }
  return f;
}

GCocycle tautological_o1(const AbelianCochain& w) {
  GCocycle g;
  for (long v : w.values) g.push_back(static_cast<int>(((v % 2) + 2) % 2));
  return g;
}

template <class T>
LiftingGerbe<T> lifting_gerbe(const CentralExtension<T>& ext, const NervePtr& nerve, const GCocycle& g,
                              std::vector<int> lifts) {
  auto f = check_g_cocycle(ext, nerve, g);
  if (!f.empty()) throw std::invalid_argument("lifting gerbe: " + join(f));
  const auto& n = *nerve;
  if (lifts.empty())
    for (int v : g) lifts.push_back(ext.lift(v));
  if (static_cast<int>(lifts.size()) != n.count(1)) throw std::invalid_argument("lifting gerbe: need one lift per edge");
  for (int e = 0; e < n.count(1); ++e)
    if (lifts[e] < 0 || lifts[e] >= ext.size() || ext.data.projection[lifts[e]] != g[e])
      throw std::invalid_argument("lifting gerbe: lift on edge " + simplex_name(n.simplices(1)[e]) +
                                  " does not project to g");
  LiftingGerbe<T> out;
  out.lifts = lifts;
  out.epsilon = AbelianCochain::zero(nerve, 1, 2);
  for (int e = 0; e < n.count(1); ++e) out.epsilon.values[e] = ext.data.grading[g[e]] % 2;
  out.z = UnitCochain<T>::one(nerve, 2);
  out.z_phase = AbelianCochain::zero(nerve, 2, ext.data.z_order);
  auto s = UnitCochain<T>::one(nerve, 2);
  for (int t = 0; t < n.count(2); ++t) {
    const auto& tri = n.simplices(2)[t];
    const int ab = n.index_of({tri[0], tri[1]}), bc = n.index_of({tri[1], tri[2]}), ac = n.index_of({tri[0], tri[2]});
    const int x = ext.hat_table[ext.hat_inverse[lifts[ac]]][ext.hat_table[lifts[bc]][lifts[ab]]];
    auto k = ext.central_phase(x);
    if (!k) throw std::logic_error("lifting gerbe: obstruction outside Z");
    out.z.values[t] = Field<T>::root_of_unity(ext.data.z_order, *k);
    out.z_phase.values[t] = *k;
    s.values[t] = T(1) / out.z.values[t];
    if (out.epsilon.values[ab] && out.epsilon.values[bc]) s.values[t] = -s.values[t];
  }
  auto v = gerbe(nerve, ground_field<T>(), out.epsilon, s);
  v.name = "lifting gerbe";
  out.bundle = std::make_shared<const TwoVectorBundle<T>>(std::move(v));
  return out;
}

template <class T>
std::vector<int> random_lifts(const CentralExtension<T>& ext, const GCocycle& g, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, ext.data.z_order - 1);
  std::vector<int> out;
  for (int v : g) out.push_back(ext.hat_table[ext.lift(v)][ext.center[pick(rng)]]);
  return out;
}

template <class T>
UnitCochain<T> lift_change(const CentralExtension<T>& ext, const LiftingGerbe<T>& a, const LiftingGerbe<T>& b) {
  if (a.lifts.size() != b.lifts.size()) throw std::invalid_argument("lift change: different nerves");
  auto zeta = UnitCochain<T>::one(a.z.nerve, 1);
  for (size_t e = 0; e < a.lifts.size(); ++e) {
    auto k = ext.central_phase(ext.hat_table[ext.hat_inverse[a.lifts[e]]][b.lifts[e]]);
    if (!k) throw std::invalid_argument("lift change: lifts differ by a non-central element");
    zeta.values[e] = Field<T>::root_of_unity(ext.data.z_order, *k);
  }
  if (!(b.z == a.z * coboundary(zeta))) throw std::logic_error("lift change: z2 != z1 * coboundary(zeta)");
  return zeta;
}

template <class T>
std::optional<std::vector<int>> find_cocycle_lift(const CentralExtension<T>& ext, const NervePtr& nerve,
                                                  const GCocycle& g, int max_edges) {
  auto f = check_g_cocycle(ext, nerve, g);
  if (!f.empty()) throw std::invalid_argument("cocycle lift: " + join(f));
  const auto& n = *nerve;
  if (n.count(1) > max_edges)
    throw std::invalid_argument("cocycle lift: exhaustive search is capped at " + std::to_string(max_edges) + " edges");
  // Triangles grouped by their last-assigned edge.
  struct Tri {
    int ab, bc, ac;
  };
  std::vector<std::vector<Tri>> closing(n.count(1));
  for (const auto& t : n.simplices(2)) {
    Tri tri{n.index_of({t[0], t[1]}), n.index_of({t[1], t[2]}), n.index_of({t[0], t[2]})};
    closing[std::max({tri.ab, tri.bc, tri.ac})].push_back(tri);
  }
  std::vector<std::vector<int>> candidates(n.count(1));
  for (int e = 0; e < n.count(1); ++e)
    for (int x = 0; x < ext.size(); ++x)
      if (ext.data.projection[x] == g[e]) candidates[e].push_back(x);
  std::vector<int> lifts(n.count(1), -1);
  std::vector<size_t> next(n.count(1), 0);
  int e = 0;
  while (e >= 0) {
    if (e == n.count(1)) return lifts;
    if (next[e] == candidates[e].size()) {
      next[e] = 0;
      --e;
      continue;
    }
    lifts[e] = candidates[e][next[e]++];
    bool ok = true;
    for (const auto& t : closing[e]) ok = ok && ext.hat_table[lifts[t.bc]][lifts[t.ab]] == lifts[t.ac];
    if (ok) ++e;
  }
  return std::nullopt;
}

template <class T>
AlgebraBundle<T> associated_algebra_bundle(const NervePtr& nerve, const GCocycle& g,
                                           const std::vector<AlgebraHom<T>>& action) {
  if (action.empty()) throw std::invalid_argument("associated bundle: empty action");
  const auto& a = action[0].source;
  AlgebraBundle<T> out;
  out.cocycle = CMCocycle<T>{nerve, a, {}, std::vector<UnitElement<T>>(nerve->count(2), UnitElement<T>::one(a))};
  if (static_cast<int>(g.size()) != nerve->count(1)) throw std::invalid_argument("associated bundle: need g per edge");
  for (int v : g) out.cocycle.g.push_back(action.at(v));
  auto v = reconstruct(out.cocycle);
  v.name = "associated algebra bundle";
  out.bundle = std::make_shared<const TwoVectorBundle<T>>(std::move(v));
  return out;
}

template <class T>
CanonicalMorphism<T> canonical_morphism(const CentralExtension<T>& ext, const Implementation<T>& impl,
                                        const NervePtr& nerve, const GCocycle& g, std::vector<int> lifts) {
  auto rep = validate_implementation(ext, impl);
  if (!rep.report.ok()) throw std::invalid_argument("canonical morphism: " + rep.report.failures.front());
  const auto& n = *nerve;
  const auto& f = impl.module;
  CanonicalMorphism<T> out{lifting_gerbe(ext, nerve, g, std::move(lifts)),
                           associated_algebra_bundle(nerve, g, impl.action),
                           {},
                           {},
                           {},
                           false,
                           ""};
  const auto& lifted = out.gerbe.lifts;
  std::vector<AlgebraHom<T>> twist;
  for (int v : g) twist.push_back(impl.action[v]);
  const Vec<T> l = Vec<T>::Constant(1, T(1));
  out.twisted = assemble_twisted<T>(out.gerbe.bundle, impl.algebra, twist,
                                    std::vector<BimodulePtr<T>>(n.count(0), f), [&](int e, const RelTensor<T>& tgt) {
                                      const int p = ext.data.parity[lifted[e]];
                                      const Mat<T>& h = impl.hat_action[lifted[e]];
                                      Mat<T> m(tgt.module->dim(), f->dim());
                                      for (int v = 0; v < f->dim(); ++v) {
                                        m.col(v) = tgt.pure(h.col(v), l);
                                        if (p && f->carrier.parity(v)) m.col(v) = -m.col(v);
                                      }
                                      return m;
                                    });
  const auto& twisted = out.twisted;
  out.morphism = assemble_morphism<T>(out.gerbe.bundle, out.algebra.bundle, std::vector<BimodulePtr<T>>(n.count(0), f),
                                      [&](int e, int i, int j) -> Vec<T> {
                                        const auto& tgt = twisted.targets[e].module;
                                        return mul<T>(tgt->act_left(impl.algebra->basis(i)), twisted.eps[e]).col(j);
                                      });
  auto trep = validate_twisted_module(out.twisted);
  for (const auto& s : trep.report.failures) out.report.failures.push_back("twisted module: " + s);
  for (const auto& s : validate_morphism(out.morphism).failures) out.report.failures.push_back("morphism: " + s);
  out.isomorphism = out.report.ok() && trep.fibres_invertible && rep.morita;
  out.verdict = out.isomorphism ? "isomorphism" : "not an isomorphism";
  return out;
}

#define S2V_INSTANTIATE(T)                                                                                      \
  template struct CentralExtension<T>;                                                                          \
  template std::vector<std::string> check_extension<T>(const ExtensionData<T>&);                                \
  template CentralExtension<T> make_extension<T>(ExtensionData<T>);                                             \
  template CentralExtension<T> pin_minus_1<T>();                                                                \
  template CentralExtension<T> split_extension<T>(const std::vector<std::vector<int>>&, const std::vector<int>&, \
                                                  int);                                                         \
  template ImplementationReport validate_implementation<T>(const CentralExtension<T>&, const Implementation<T>&); \
  template Implementation<T> inner_implementation<T>(const CentralExtension<T>&, const AlgebraPtr<T>&,          \
                                                     const std::vector<Vec<T>>&, const BimodulePtr<T>&);        \
  template Implementation<T> pin_implementation<T>(const CentralExtension<T>&);                                 \
  template std::vector<std::string> check_g_cocycle<T>(const CentralExtension<T>&, const NervePtr&,             \
                                                       const GCocycle&);                                        \
  template LiftingGerbe<T> lifting_gerbe<T>(const CentralExtension<T>&, const NervePtr&, const GCocycle&,       \
                                            std::vector<int>);                                                  \
  template std::vector<int> random_lifts<T>(const CentralExtension<T>&, const GCocycle&, Rng&);                 \
  template UnitCochain<T> lift_change<T>(const CentralExtension<T>&, const LiftingGerbe<T>&,                    \
                                         const LiftingGerbe<T>&);                                               \
  template std::optional<std::vector<int>> find_cocycle_lift<T>(const CentralExtension<T>&, const NervePtr&,    \
                                                                const GCocycle&, int);                          \
  template AlgebraBundle<T> associated_algebra_bundle<T>(const NervePtr&, const GCocycle&,                      \
                                                         const std::vector<AlgebraHom<T>>&);                    \
  template CanonicalMorphism<T> canonical_morphism<T>(const CentralExtension<T>&, const Implementation<T>&,     \
                                                      const NervePtr&, const GCocycle&, std::vector<int>);

S2V_INSTANTIATE(Rational)
S2V_INSTANTIATE(Gaussian)

}  // namespace super2vec
