#include "shg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace shg {

namespace {

void write_header(std::ostream& os, const BoxGrid& g) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "grid %d %d %d %.17g %.17g %.17g origin %.17g %.17g %.17g\n",
                g.n[0], g.n[1], g.n[2], g.h[0], g.h[1], g.h[2], g.origin[0], g.origin[1],
                g.origin[2]);
  os << buf;
}

BoxGrid read_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::IoError, "missing header");
  std::istringstream ls(line);
  std::string tag, otag;
  std::array<int, 3> n{};
  std::array<double, 3> h{}, o{};
  ls >> tag >> n[0] >> n[1] >> n[2] >> h[0] >> h[1] >> h[2] >> otag >> o[0] >> o[1] >> o[2];
  if (!ls || tag != "grid" || otag != "origin") throw Error(Errc::IoError, "bad header: " + line);
  std::array<double, 3> ext{};
  for (int a = 0; a < 3; ++a) ext[a] = h[a] * (n[a] - 1);
  BoxGrid g = BoxGrid::make(o, ext, n);
  g.h = h;
  return g;
}

void write_vec(std::ostream& os, const CVec3& v) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g\n", v(0).real(),
                v(0).imag(), v(1).real(), v(1).imag(), v(2).real(), v(2).imag());
  os << buf;
}

CVec3 read_vec(std::istream& is) {
  double r[6];
  for (double& x : r) is >> x;
  if (!is) throw Error(Errc::IoError, "truncated data");
  return CVec3(cplx(r[0], r[1]), cplx(r[2], r[3]), cplx(r[4], r[5]));
}

}  // namespace

void write_field(std::ostream& os, const ComplexVectorField& f) {
  write_header(os, f.grid);
  for (const auto& v : f.v) write_vec(os, v);
}

ComplexVectorField read_field(std::istream& is) {
  ComplexVectorField f(read_header(is));
  for (auto& v : f.v) v = read_vec(is);
  return f;
}

void write_trace(std::ostream& os, const TangentialTrace& t) {
  write_header(os, t.grid);
  for (int f = 0; f < 6; ++f)
    for (const auto& v : t.faces[f]) {
      os << f << ' ';
      write_vec(os, v);
    }
}

TangentialTrace read_trace(std::istream& is) {
  TangentialTrace t(read_header(is));
  for (int f = 0; f < 6; ++f)
    for (auto& v : t.faces[f]) {
      int tag = -1;
      is >> tag;
      if (tag != f) throw Error(Errc::IoError, "face tag mismatch");
      v = read_vec(is);
    }
  return t;
}

void save_field(const std::string& path, const ComplexVectorField& f) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot write " + path);
  write_field(os, f);
}

ComplexVectorField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::IoError, "cannot read " + path);
  return read_field(is);
}

void save_trace(const std::string& path, const TangentialTrace& t) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot write " + path);
  write_trace(os, t);
}

TangentialTrace load_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::IoError, "cannot read " + path);
  return read_trace(is);
}

}  // namespace shg
