#include <random>
#include <sstream>

#include "doctest.h"
#include "shg/io.hpp"
#include "shg/yee.hpp"

using namespace shg;

namespace {

ComplexVectorField random_smooth(const BoxGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  CVec3 a, b;
  Vec3 k;
  for (int i = 0; i < 3; ++i) {
    a(i) = cplx(u(rng), u(rng));
    b(i) = cplx(u(rng), u(rng));
    k(i) = 2 * u(rng);
  }
  return sample_field(g, [&](const Vec3& x) {
    return CVec3(a * std::exp(cplx(0, k.dot(x))) + b * x.squaredNorm());
  });
}

}  // namespace

TEST_CASE("grid construction validates sizes") {
  CHECK_THROWS_AS(BoxGrid::cube(3, 1.0), Error);
  CHECK_THROWS_AS(BoxGrid::make({0, 0, 0}, {1, -1, 1}, {8, 8, 8}), Error);
  BoxGrid g = BoxGrid::cube(9, 2.0);
  CHECK(g.h[0] == doctest::Approx(0.25));
  CHECK(g.position(4, 4, 4).norm() == doctest::Approx(0.0));
  double w = 0;
  for (std::size_t i = 0; i < g.size(); ++i) w += g.node_weight(i);
  CHECK(w == doctest::Approx(g.volume()));
}

TEST_CASE("tangential trace is nu x w") {
  BoxGrid g = BoxGrid::make({0, 0, 0}, {1, 1, 1}, {6, 6, 6});
  auto t = tangential_trace(sample_field(g, [](const Vec3&) { return CVec3(1, 0, 0); }));
  // face 5 is the top face, nu = e3
  for (const auto& v : t.faces[5]) CHECK((v - CVec3(0, 1, 0)).norm() < 1e-15);

  auto z = tangential_trace(ComplexVectorField(g));
  CHECK(z.max_abs() == 0);

  ComplexVectorField w = sample_field(g, [](const Vec3& x) { return CVec3(0, x(2), 0); });
  auto tw = tangential_trace(w);
  for (int f = 0; f < 6; ++f) {
    FaceInfo fi = tw.face(f);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        CVec3 wx = w[tw.node_of(f, iu, iv)];
        CVec3 nu = fi.normal.cast<cplx>();
        CVec3 expect = crossc(nu, wx);
        const CVec3& got = tw.faces[f][iu + std::size_t(fi.nu_count) * iv];
        CHECK((got - expect).norm() < 1e-15);
        CHECK(std::abs(dotu(got, nu)) == 0.0);
      }
  }
  CHECK((tw.faces[5][0] - CVec3(-1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("surface divergence of simple traces") {
  BoxGrid g = BoxGrid::make({0, 0, 0}, {1, 1, 1}, {8, 8, 8});
  TangentialTrace t(g);
  for (auto& v : t.faces[5]) v = CVec3(0.3, -2, 0);
  auto d = surface_divergence(t);
  for (auto v : d[5]) CHECK(std::abs(v) < 1e-12);

  FaceInfo fi = t.face(5);
  for (int iv = 0; iv < fi.nv_count; ++iv)
    for (int iu = 0; iu < fi.nu_count; ++iu)
      t.faces[5][iu + std::size_t(fi.nu_count) * iv] = CVec3(g.position(t.node_of(5, iu, iv))(0), 0, 0);
  d = surface_divergence(t);
  for (auto v : d[5]) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("surface divergence converges to the analytic value") {
  // trace nu x w on the top face of w = (sin y, sin x, 0): t = (-sin x, sin y, 0), Div = -cos x + cos y
  double prev = 0;
  for (int n : {9, 17, 33}) {
    BoxGrid g = BoxGrid::make({0, 0, 0}, {1, 1, 1}, {n, n, n});
    auto w = sample_field(g, [](const Vec3& x) { return CVec3(std::sin(x(1)), std::sin(x(0)), 0); });
    auto t = tangential_trace(w);
    auto d = surface_divergence(t);
    double err = 0;
    FaceInfo fi = t.face(5);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        Vec3 x = g.position(t.node_of(5, iu, iv));
        err = std::max(err, std::abs(d[5][iu + std::size_t(fi.nu_count) * iv] -
                                     (-std::cos(x(0)) + std::cos(x(1)))));
      }
    if (prev > 0) CHECK(err < 0.6 * prev);
    prev = err;
  }
}

TEST_CASE("norms are homogeneous and satisfy the triangle inequality") {
  std::mt19937_64 rng(7);
  BoxGrid g = BoxGrid::cube(8, 1.0);
  NormExponent p = NormExponent::make(4.0);
  CHECK(trace_norm_div(TangentialTrace(g), p) == 0);
  CHECK(field_norm_w1p(ComplexVectorField(g), p) == 0);
  for (int s = 0; s < 20; ++s) {
    auto f = random_smooth(g, rng), h = random_smooth(g, rng);
    auto tf = tangential_trace(f), th = tangential_trace(h);
    cplx a(0.7, -1.9);
    double nf = trace_norm_div(tf, p);
    CHECK(trace_norm_div(a * tf, p) == doctest::Approx(std::abs(a) * nf).epsilon(1e-12));
    CHECK(trace_norm_div(tf + th, p) <= nf + trace_norm_div(th, p) + 1e-12);
    double wf = field_norm_w1p(f, p);
    CHECK(field_norm_w1p(a * f, p) == doctest::Approx(std::abs(a) * wf).epsilon(1e-12));
    CHECK(field_norm_w1p(f + h, p) <= wf + field_norm_w1p(h, p) + 1e-12);
  }
}

TEST_CASE("constant field norm is |c| |Omega|^{1/p}") {
  BoxGrid g = BoxGrid::make({0, 0, 0}, {1, 2, 0.5}, {6, 7, 5});
  CVec3 c(cplx(1, 2), 0, -1);
  auto f = sample_field(g, [&](const Vec3&) { return c; });
  NormExponent p = NormExponent::make(5.0);
  CHECK(field_norm_w1p(f, p) == doctest::Approx(c.norm() * std::pow(1.0, 1 / 5.0)).epsilon(1e-12));
}

TEST_CASE("trace norm matches direct summation") {
  BoxGrid g = BoxGrid::cube(6, 1.0);
  std::mt19937_64 rng(3);
  auto t = tangential_trace(random_smooth(g, rng));
  NormExponent p = NormExponent::make(4.0);
  auto div = surface_divergence(t);
  double s0 = 0, s2 = 0;
  for (int f = 0; f < 6; ++f) {
    FaceInfo fi = t.face(f);
    for (int iv = 0; iv < fi.nv_count; ++iv)
      for (int iu = 0; iu < fi.nu_count; ++iu) {
        std::size_t i = iu + std::size_t(fi.nu_count) * iv;
        s0 += t.area_weight(f, iu, iv) * std::pow(t.faces[f][i].norm(), 4);
        s2 += t.area_weight(f, iu, iv) * std::pow(std::abs(div[f][i]), 4);
      }
  }
  // the gradient part is bounded by the full norm; value and divergence parts exactly
  double full = trace_norm_div(t, p);
  CHECK(full >= std::pow(s0, 0.25) + std::pow(s2, 0.25) - 1e-12);
  TangentialTrace c(g);
  for (int f = 0; f < 6; ++f)
    for (auto& v : c.faces[f]) {
      Vec3 nu = c.face(f).normal;
      v = (Vec3(1, 1, 1) - nu * nu.sum()).cast<cplx>();
    }
  // constant trace: only the l^p term survives, total area is 6
  double a = std::pow(6.0 * std::pow(std::sqrt(2.0), 4), 0.25);
  CHECK(trace_norm_div(c, p) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("norm exponent and material validation") {
  CHECK_THROWS_AS(NormExponent::make(3.0), Error);
  CHECK_THROWS_AS(NormExponent::make(4.0, 0.4), Error);
  BoxGrid g = BoxGrid::cube(6, 1.0);
  MaterialModel m = MaterialModel::vacuum(g);
  CHECK_NOTHROW(m.validate());
  m.eps[3] = cplx(-1, 0);
  CHECK_THROWS_AS(m.validate(), Error);
  m = MaterialModel::vacuum(g);
  m.chi2[m.grid.index(0, 2, 2)] = CVec3(1, 0, 0);
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(FrequencyPair::make(0.0), Error);
}

TEST_CASE("field and trace files round trip") {
  BoxGrid g = BoxGrid::make({-0.1, 0.2, 0}, {1, 1.5, 2}, {5, 6, 4});
  std::mt19937_64 rng(11);
  auto f = random_smooth(g, rng);
  std::stringstream ss;
  write_field(ss, f);
  auto r = read_field(ss);
  CHECK(r.grid.same_as(g));
  double d = 0;
  for (std::size_t i = 0; i < g.size(); ++i) d = std::max(d, (r[i] - f[i]).norm());
  CHECK(d == 0.0);

  auto t = tangential_trace(f);
  std::stringstream st;
  write_trace(st, t);
  auto rt = read_trace(st);
  CHECK((rt - t).max_abs() == 0.0);

  std::stringstream bad("grid 4 4\n");
  CHECK_THROWS_AS(read_field(bad), Error);
}

TEST_CASE("staggered transfers reproduce linear fields") {
  BoxGrid g = BoxGrid::cube(7, 1.0);
  YeeGrid y(g);
  auto f = sample_field(g, [](const Vec3& x) { return CVec3(1 + x(0), 2 * x(1) - x(2), cplx(0, 1) * x(2)); });
  auto back = y.edges_to_nodes(y.nodes_to_edges(f));
  double d = 0;
  for (std::size_t i = 0; i < g.size(); ++i) d = std::max(d, (back[i] - f[i]).norm());
  CHECK(d < 1e-13);
  // curl of a gradient vanishes
  CVector phi_e(y.nedges());
  for (int a = 0; a < 3; ++a) {
    auto dim = y.edim(a);
    for (int k = 0; k < dim[2]; ++k)
      for (int j = 0; j < dim[1]; ++j)
        for (int i = 0; i < dim[0]; ++i) {
          std::array<int, 3> p{i, j, k}, q = p;
          q[a] += 1;
          auto phi = [&](std::array<int, 3> r) { return std::sin(1.0 * r[0]) * r[1] + r[2] * r[2]; };
          phi_e[y.eidx(a, i, j, k)] = (phi(q) - phi(p)) / g.h[a];
        }
  }
  auto c = y.curl(phi_e);
  double m = 0;
  for (auto v : c) m = std::max(m, std::abs(v));
  CHECK(m < 1e-9);
}
