#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sld {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// Sentinel for "pair never coupled" / "no finite value".
inline constexpr double kNotCoupled = std::numeric_limits<double>::infinity();

// Magnitude beyond which a trajectory is declared blown up.
inline constexpr double kBlowupSentinel = 1e12;

struct SldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw SldError(msg);
}

// Vector-field callbacks operate on raw spans so the integrator inner loops
// stay allocation-free; Eigen is used at API boundaries and for linear algebra.
using DriftFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
// Writes the d x d matrix row-major into `out` (size d*d).
using SigmaFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

enum class SigmaKind { Identity, Constant, Diagonal, General };

inline const char* to_string(SigmaKind k) {
  switch (k) {
    case SigmaKind::Identity: return "identity";
    case SigmaKind::Constant: return "constant";
    case SigmaKind::Diagonal: return "diagonal";
    case SigmaKind::General: return "general";
  }
  return "?";
}

}  // namespace sld
