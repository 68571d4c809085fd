#pragma once

#include <utility>
#include <vector>

#include "sld/common.hpp"
#include "sld/constants.hpp"

namespace sld::transport {

using constants::Convention;

// Empirical measures are equal-size point clouds, flattened row-major (n x d).
struct Cloud {
  int d = 1;
  std::vector<double> pts;  // n*d values
  size_t size() const { return d > 0 ? pts.size() / d : 0; }
};

enum class Method { Sorted1d, Assignment };

struct WassersteinEstimate {
  double value = 0.0;
  double p = 2.0;
  Convention convention = Convention::Standard;
  Method method = Method::Sorted1d;
  size_t n = 0;
};

inline constexpr size_t kAssignmentBudget = 4096;

// Exact W_p between equal-size clouds: sorted pairing in d=1, exact
// assignment on the p-th power cost matrix otherwise. The paper-half
// convention divides by sqrt(2) and is defined for p=2 only.
WassersteinEstimate wasserstein(const Cloud& A, const Cloud& B, double p,
                                Convention conv = Convention::Standard);

// Same but forcing the assignment solver regardless of dimension (used to
// cross-validate the two methods in d=1).
WassersteinEstimate wasserstein_assignment(const Cloud& A, const Cloud& B, double p,
                                           Convention conv = Convention::Standard);

// 1-d interpolation inequality data: lhs = W2 (standard convention),
// rhs = W1^{1/(2q)} W_{(2-1/q)p}^{1-1/(2q)} with p = q/(q-1), all three
// distances computed from one sorted matching.
std::pair<double, double> holder_interpolation(const std::vector<double>& A,
                                               const std::vector<double>& B, double q);

// Closed-form Gaussian W2 (standard convention), used as a test oracle.
double wasserstein_gaussian_oracle(const Vec& mean1, const Mat& cov1,
                                   const Vec& mean2, const Mat& cov2);

// Dense exact linear assignment (shortest augmenting path with dual updates);
// returns the optimal total cost, optionally the row -> column map.
double solve_assignment(const std::vector<double>& cost, int n,
                        std::vector<int>* rowsol = nullptr);

}  // namespace sld::transport
