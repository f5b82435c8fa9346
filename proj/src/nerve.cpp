#include "super2vec/nerve.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

namespace super2vec {

Simplex face(const Simplex& s, int i) {
  Simplex f;
  for (int k = 0; k < static_cast<int>(s.size()); ++k)
    if (k != i) f.push_back(s[k]);
  return f;
}

namespace {

std::string show(const Simplex& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

}  // namespace

Nerve Nerve::from_simplices(const std::vector<Simplex>& simplices, std::string name) {
  Nerve n;
  n.name_ = std::move(name);
  std::vector<std::set<Simplex>> cells(kMaxDim + 1);
  std::function<void(const Simplex&)> add = [&](const Simplex& s) {
    int d = static_cast<int>(s.size()) - 1;
    if (cells[d].count(s)) return;
    cells[d].insert(s);
    if (d > 0)
      for (int i = 0; i <= d; ++i) add(face(s, i));
  };
  for (const auto& s : simplices) {
    if (s.empty()) throw std::invalid_argument("empty simplex");
    if (s.size() > kMaxDim + 1) throw std::invalid_argument("simplex " + show(s) + " exceeds dimension 3");
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0) throw std::invalid_argument("negative vertex in " + show(s));
      if (i > 0 && s[i] <= s[i - 1]) throw std::invalid_argument("vertices not increasing in " + show(s));
    }
    add(s);
  }
  int nv = static_cast<int>(cells[0].size());
  int k = 0;
  for (const auto& v : cells[0])
    if (v[0] != k++) throw std::invalid_argument("vertices must be numbered 0.." + std::to_string(nv - 1));
  for (int d = 0; d <= kMaxDim; ++d) {
    n.cells_[d].assign(cells[d].begin(), cells[d].end());
    for (int i = 0; i < static_cast<int>(n.cells_[d].size()); ++i) n.index_[n.cells_[d][i]] = i;
  }
  return n;
}

int Nerve::dimension() const {
  int d = 0;
  for (int k = 0; k <= kMaxDim; ++k)
    if (!cells_[k].empty()) d = k;
  return d;
}

int Nerve::index_of(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw std::out_of_range("simplex " + show(s) + " not in nerve");
  return it->second;
}

bool Nerve::contains(const Simplex& s) const { return index_.count(s) > 0; }

std::vector<Simplex> Nerve::maximal_simplices() const {
  std::vector<Simplex> out;
  for (int d = 0; d <= kMaxDim; ++d)
    for (const auto& s : cells_[d]) {
      bool maximal = true;
      if (d < kMaxDim)
        for (const auto& t : cells_[d + 1])
          if (std::includes(t.begin(), t.end(), s.begin(), s.end())) {
            maximal = false;
            break;
          }
      if (maximal) out.push_back(s);
    }
  return out;
}

std::vector<int> Nerve::cofaces(const Simplex& s, int dim) const {
  std::vector<int> out;
  if (dim > kMaxDim) return out;
  for (int i = 0; i < count(dim); ++i) {
    const auto& t = cells_[dim][i];
    if (std::includes(t.begin(), t.end(), s.begin(), s.end())) out.push_back(i);
  }
  return out;
}

std::vector<int> Nerve::components() const {
  std::vector<int> parent(num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& e : cells_[1]) parent[find(e[0])] = find(e[1]);
  std::map<int, int> label;
  std::vector<int> out(num_vertices());
  for (int v = 0; v < num_vertices(); ++v) {
    int r = find(v);
    if (!label.count(r)) label[r] = static_cast<int>(label.size());
    out[v] = label[r];
  }
  return out;
}

int Nerve::num_components() const {
  auto c = components();
  return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
}

IntegerChainComplex Nerve::cochain_complex() const {
  IntegerChainComplex c;
  int top = dimension();
  for (int d = 0; d <= top; ++d) c.ranks.push_back(count(d));
  for (int d = 0; d < top; ++d) {
    IntMatrix m(count(d + 1), count(d));
    for (int r = 0; r < count(d + 1); ++r) {
      const auto& s = cells_[d + 1][r];
      for (int i = 0; i <= d + 1; ++i) m(r, index_of(face(s, i))) += (i % 2 == 0) ? 1 : -1;
    }
    c.delta.push_back(std::move(m));
  }
  return c;
}

namespace nerves {

NervePtr point() { return std::make_shared<Nerve>(Nerve::from_simplices({{0}}, "point")); }

NervePtr sphere(int n) {
  if (n < 0 || n > 3) throw std::invalid_argument("sphere nerve supported for n = 0..3 (dimension cap 3)");
  std::vector<Simplex> faces;
  for (int skip = 0; skip <= n + 1; ++skip) {
    Simplex s;
    for (int v = 0; v <= n + 1; ++v)
      if (v != skip) s.push_back(v);
    faces.push_back(s);
  }
  return std::make_shared<Nerve>(Nerve::from_simplices(faces, "sphere" + std::to_string(n)));
}

NervePtr circle() {
  return std::make_shared<Nerve>(Nerve::from_simplices({{0, 1}, {1, 2}, {0, 2}}, "circle"));
}

NervePtr rp2() {
  std::vector<Simplex> t = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 1, 5},
                            {1, 2, 4}, {2, 3, 5}, {1, 3, 4}, {2, 4, 5}, {1, 3, 5}};
  return std::make_shared<Nerve>(Nerve::from_simplices(t, "rp2"));
}

NervePtr torus7() {
  std::vector<Simplex> t;
  for (int i = 0; i < 7; ++i) {
    Simplex a = {i, (i + 1) % 7, (i + 3) % 7};
    Simplex b = {i, (i + 2) % 7, (i + 3) % 7};
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    t.push_back(a);
    t.push_back(b);
  }
  return std::make_shared<Nerve>(Nerve::from_simplices(t, "torus7"));
}

NervePtr torus9() {
  // Vertex 3*i + j stands for U_i x V_j; a set of vertices spans a simplex
  // when neither projection covers all three arcs.
  std::vector<Simplex> out;
  for (int mask = 1; mask < (1 << 9); ++mask) {
    if (__builtin_popcount(mask) > 4) continue;
    int p1 = 0, p2 = 0;
    Simplex s;
    for (int v = 0; v < 9; ++v)
      if (mask & (1 << v)) {
        s.push_back(v);
        p1 |= 1 << (v / 3);
        p2 |= 1 << (v % 3);
      }
    if (p1 != 7 && p2 != 7) out.push_back(s);
  }
  return std::make_shared<Nerve>(Nerve::from_simplices(out, "torus9"));
}

NervePtr by_name(const std::string& name) {
  if (name == "point") return point();
  if (name == "circle") return circle();
  if (name == "rp2") return rp2();
  if (name == "torus7") return torus7();
  if (name == "torus9") return torus9();
  if (name == "sphere0") return sphere(0);
  if (name == "sphere1") return sphere(1);
  if (name == "sphere2") return sphere(2);
  if (name == "sphere3") return sphere(3);
  throw std::invalid_argument("unknown builtin nerve '" + name + "'");
}

}  // namespace nerves

void SimplicialMap::validate() const {
  if (!source || !target) throw std::invalid_argument("simplicial map without nerves");
  if (static_cast<int>(vertex_map.size()) != source->num_vertices())
    throw std::invalid_argument("simplicial map: vertex map has wrong length");
  for (int v : vertex_map)
    if (v < 0 || v >= target->num_vertices()) throw std::invalid_argument("simplicial map: vertex out of range");
  for (int d = 1; d <= source->dimension(); ++d)
    for (const auto& s : source->simplices(d)) {
      auto img = image(s);
      for (size_t i = 1; i < img.size(); ++i)
        if (img[i] < img[i - 1]) throw std::invalid_argument("simplicial map is not order preserving on " + show(s));
      Simplex dedup(img.begin(), img.end());
      dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
      if (!target->contains(dedup))
        throw std::invalid_argument("simplicial map: image of " + show(s) + " is not a simplex");
    }
}

std::vector<int> SimplicialMap::image(const Simplex& s) const {
  std::vector<int> out;
  for (int v : s) out.push_back(vertex_map.at(v));
  return out;
}

}  // namespace super2vec
