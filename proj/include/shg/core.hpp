#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace shg {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr cplx kI{0.0, 1.0};

enum class Errc {
  InvalidGrid,
  ConstraintViolated,
  IllConditionedSymbol,
  SupportViolation,
  DegenerateFrequency,
  ResonantFrequency,
  SolveFailed,
  SmallnessViolated,
  ContractionFailed,
  NoConvergence,
  ExtrapolationUnreliable,
  InvalidTau,
  InvalidXi,
  BranchError,
  NeumannDiverged,
  IllPosedDirections,
  TauNotAsymptotic,
  InvalidConfig,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// unconjugated bilinear dot product
inline cplx dotu(const CVec3& a, const CVec3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

inline CVec3 crossc(const CVec3& a, const CVec3& b) {
  return CVec3(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

}  // namespace shg
