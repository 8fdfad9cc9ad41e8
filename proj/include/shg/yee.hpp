#pragma once

// Staggered layout used internally by the linear solvers. E component a lives
// on edges (half index along a, node index along the other two axes); H
// component a lives on faces (node index along a, half index elsewhere).
// Public fields stay on nodes; the maps below move data between the two.

#include <array>
#include <memory>
#include <vector>

#include "shg/field.hpp"

namespace shg {

using CVector = std::vector<cplx>;

class YeeGrid {
 public:
  explicit YeeGrid(const BoxGrid& g);

  const BoxGrid& grid() const { return g_; }
  const std::array<int, 3>& edim(int a) const { return edim_[a]; }
  const std::array<int, 3>& fdim(int a) const { return fdim_[a]; }
  std::size_t eoff(int a) const { return eoff_[a]; }
  std::size_t foff(int a) const { return foff_[a]; }
  std::size_t nedges() const { return eoff_[3]; }
  std::size_t nfaces() const { return foff_[3]; }
  std::size_t eidx(int a, int i, int j, int k) const {
    return eoff_[a] + i + std::size_t(edim_[a][0]) * (j + std::size_t(edim_[a][1]) * k);
  }
  std::size_t fidx(int a, int i, int j, int k) const {
    return foff_[a] + i + std::size_t(fdim_[a][0]) * (j + std::size_t(fdim_[a][1]) * k);
  }
  // edge position within its component block
  std::array<int, 3> eunindex(int a, std::size_t local) const;
  Vec3 epos(int a, int i, int j, int k) const;
  Vec3 fpos(int a, int i, int j, int k) const;
  bool boundary_edge(int a, const std::array<int, 3>& p) const;

  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  // position of edge e in the interior list, or -1
  long interior_slot(std::size_t e) const { return islot_[e]; }
  double cell_volume() const { return g_.h[0] * g_.h[1] * g_.h[2]; }

  // discrete curl from edges to faces, and its transpose
  void curl(const cplx* e, cplx* f) const;
  void curl_t(const cplx* f, cplx* e) const;
  CVector curl(const CVector& e) const;
  CVector curl_t(const CVector& f) const;

  CVector nodes_to_edges(const ComplexVectorField& u) const;
  ComplexVectorField edges_to_nodes(const CVector& e) const;
  ComplexVectorField faces_to_nodes(const CVector& f) const;
  CVector nodes_to_faces(const ComplexVectorField& u) const;
  CVector scalar_to_edges(const ScalarField& s) const;
  CVector scalar_to_faces(const ScalarField& s) const;

  // boundary edge values from a tangential trace (node average along the edge)
  CVector trace_to_edges(const TangentialTrace& t) const;

 private:
  BoxGrid g_;
  std::array<std::array<int, 3>, 3> edim_, fdim_;
  std::array<std::size_t, 4> eoff_, foff_;
  std::vector<std::size_t> interior_, boundary_;
  std::vector<long> islot_;
};

using YeeGridPtr = std::shared_ptr<const YeeGrid>;
YeeGridPtr make_yee(const BoxGrid& g);

// Direct solver for the constant-coefficient curl-curl system on interior
// edges, diagonalized by sine/cosine transforms. Also provides the exact
// extreme singular values of that operator.
class ConstantCurlCurlSolver {
 public:
  ConstantCurlCurlSolver(YeeGridPtr yee, double k, cplx eps, cplx mu);
  ~ConstantCurlCurlSolver();
  ConstantCurlCurlSolver(const ConstantCurlCurlSolver&) = delete;
  ConstantCurlCurlSolver& operator=(const ConstantCurlCurlSolver&) = delete;

  // r, x indexed by the interior list
  void solve(const CVector& r, CVector& x) const;
  double sigma_min() const { return smin_; }
  double sigma_max() const { return smax_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double smin_ = 0, smax_ = 0;
};

}  // namespace shg
