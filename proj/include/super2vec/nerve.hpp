#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "super2vec/integer.hpp"

namespace super2vec {

using Simplex = std::vector<int>;

// Finite ordered simplicial complex of dimension at most 3, closed under faces.
class Nerve {
 public:
  static constexpr int kMaxDim = 3;

  // Closes the given simplices under faces; vertices must be 0..n-1 and each
  // simplex strictly increasing.
  static Nerve from_simplices(const std::vector<Simplex>& simplices, std::string name = "");

  const std::string& name() const { return name_; }
  int num_vertices() const { return static_cast<int>(cells_[0].size()); }
  int dimension() const;
  int count(int dim) const { return dim <= kMaxDim ? static_cast<int>(cells_[dim].size()) : 0; }
  const std::vector<Simplex>& simplices(int dim) const { return cells_.at(dim); }
  int index_of(const Simplex& s) const;
  bool contains(const Simplex& s) const;
  // All listed simplices that are maximal.
  std::vector<Simplex> maximal_simplices() const;
  // Top-dimensional simplices having the given simplex as a face.
  std::vector<int> cofaces(const Simplex& s, int dim) const;
  // Connected component label per vertex.
  std::vector<int> components() const;
  int num_components() const;

  // Coboundary matrices with integer coefficients, degree 0..dimension.
  IntegerChainComplex cochain_complex() const;

  bool operator==(const Nerve& o) const { return cells_ == o.cells_; }

 private:
  std::string name_;
  std::vector<std::vector<Simplex>> cells_ = std::vector<std::vector<Simplex>>(kMaxDim + 1);
  std::map<Simplex, int> index_;
};

using NervePtr = std::shared_ptr<const Nerve>;

// Face of an ordered simplex with vertex i removed.
Simplex face(const Simplex& s, int i);

namespace nerves {
NervePtr point();
// Boundary of the (n+1)-simplex: an n-sphere with n+2 vertices.
NervePtr sphere(int n);
NervePtr circle();
// Six-vertex real projective plane (quotient of the icosahedron).
NervePtr rp2();
// Seven-vertex torus; two-dimensional, so it has no tetrahedra.
NervePtr torus7();
// Nerve of the product of two three-arc covers of the circle: nine vertices,
// contains tetrahedra, homotopy equivalent to the torus.
NervePtr torus9();
NervePtr by_name(const std::string& name);
}  // namespace nerves

// Vertex map between nerves, checked to be simplicial and order preserving.
struct SimplicialMap {
  NervePtr source;
  NervePtr target;
  std::vector<int> vertex_map;

  void validate() const;
  // Image of an ordered simplex, which may be degenerate (repeated vertices).
  std::vector<int> image(const Simplex& s) const;
};

}  // namespace super2vec
