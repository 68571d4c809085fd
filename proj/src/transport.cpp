#include "sld/transport.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace sld::transport {
namespace {

// Dense Jonker-Volgenant: column reduction, augmenting row reduction, then
// shortest augmenting paths. The row-reduction phase is only an accelerator;
// a re-queue cap keeps it finite under heavy cost ties, after which the
// augmenting-path phase finishes exactly.
double lapjv(const std::vector<double>& cost, int n, std::vector<int>& rowsol) {
  require(n > 0 && cost.size() == static_cast<size_t>(n) * n,
          "assignment: cost matrix must be n*n");
  const double big = std::numeric_limits<double>::max();
  auto c = [&](int i, int j) { return cost[static_cast<size_t>(i) * n + j]; };

  rowsol.assign(n, -1);
  std::vector<int> colsol(n, -1), matches(n, 0), freerows(n), collist(n), pred(n);
  std::vector<double> v(n, 0.0), d(n, 0.0);

  // Column reduction.
  for (int j = n - 1; j >= 0; --j) {
    double mn = c(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i)
      if (c(i, j) < mn) {
        mn = c(i, j);
        imin = i;
      }
    v[j] = mn;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else {
      colsol[j] = -1;
    }
  }

  // Reduction transfer.
  int numfree = 0;
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      freerows[numfree++] = i;
    } else if (matches[i] == 1) {
      const int j1 = rowsol[i];
      double mn = big;
      for (int j = 0; j < n; ++j)
        if (j != j1) mn = std::min(mn, c(i, j) - v[j]);
      v[j1] -= mn;
    }
  }

  // Augmenting row reduction (two sweeps, tie-guarded).
  long guard = 50L * n + 1000;
  for (int sweep = 0; sweep < 2 && guard > 0; ++sweep) {
    int k = 0;
    const int prevnumfree = numfree;
    numfree = 0;
    while (k < prevnumfree && guard-- > 0) {
      const int i = freerows[k++];
      double umin = c(i, 0) - v[0], usubmin = big;
      int j1 = 0, j2 = -1;
      for (int j = 1; j < n; ++j) {
        const double h = c(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            j2 = j1;
            umin = h;
            j1 = j;
          }
        }
      }
      int i0 = colsol[j1];
      if (umin < usubmin) {
        v[j1] -= usubmin - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[j1];
      }
      rowsol[i] = j1;
      colsol[j1] = i;
      if (i0 >= 0) {
        if (umin < usubmin)
          freerows[--k] = i0;
        else
          freerows[numfree++] = i0;
      }
    }
    if (guard <= 0) {
      // Abandon the accelerator: re-collect every unassigned row.
      numfree = 0;
      for (int i = 0; i < n; ++i)
        if (rowsol[i] < 0 || colsol[rowsol[i]] != i) rowsol[i] = -1;
      for (int j = 0; j < n; ++j)
        if (colsol[j] >= 0) rowsol[colsol[j]] = j;
      for (int i = 0; i < n; ++i)
        if (rowsol[i] < 0) freerows[numfree++] = i;
    }
  }

  // Shortest augmenting paths for the remaining free rows.
  for (int f = 0; f < numfree; ++f) {
    const int freerow = freerows[f];
    for (int j = 0; j < n; ++j) {
      d[j] = c(freerow, j) - v[j];
      pred[j] = freerow;
      collist[j] = j;
    }
    int low = 0, up = 0, last = -1, endofpath = -1;
    double mn = 0.0;
    bool found = false;
    do {
      if (up == low) {
        last = low - 1;
        mn = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = d[j];
          if (h <= mn) {
            if (h < mn) {
              up = low;
              mn = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k)
          if (colsol[collist[k]] < 0) {
            endofpath = collist[k];
            found = true;
            break;
          }
      }
      if (!found) {
        const int j1 = collist[low++];
        const int i = colsol[j1];
        const double h = c(i, j1) - v[j1] - mn;
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double v2 = c(i, j) - v[j] - h;
          if (v2 < d[j]) {
            pred[j] = i;
            if (v2 == mn) {
              if (colsol[j] < 0) {
                endofpath = j;
                found = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
            d[j] = v2;
          }
        }
      }
    } while (!found);
    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += d[j1] - mn;
    }
    int i = -1, j1 = endofpath;
    do {
      i = pred[j1];
      colsol[j1] = i;
      std::swap(rowsol[i], j1);
    } while (i != freerow);
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i) total += c(i, rowsol[i]);
  return total;
}

double mean_power_from_assignment(const Cloud& A, const Cloud& B, double p) {
  const int n = static_cast<int>(A.size());
  const int d = A.d;
  std::vector<double> cost(static_cast<size_t>(n) * n);
  const double half_p = p / 2.0;
  for (int i = 0; i < n; ++i) {
    const double* a = A.pts.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < n; ++j) {
      const double* b = B.pts.data() + static_cast<size_t>(j) * d;
      double d2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        d2 += diff * diff;
      }
      cost[static_cast<size_t>(i) * n + j] = (p == 2.0) ? d2 : std::pow(d2, half_p);
    }
  }
  std::vector<int> rowsol;
  return lapjv(cost, n, rowsol) / n;
}

double mean_power_sorted(const Cloud& A, const Cloud& B, double p) {
  std::vector<double> a = A.pts, b = B.pts;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
  return acc / a.size();
}

void validate_pair(const Cloud& A, const Cloud& B, double p, Convention conv) {
  require(A.d >= 1 && A.d == B.d, "wasserstein: dimension mismatch");
  require(A.size() > 0 && A.size() == B.size(),
          "wasserstein: clouds must be nonempty and of equal size");
  require(A.pts.size() % A.d == 0 && B.pts.size() % B.d == 0,
          "wasserstein: flattened cloud size must be a multiple of d");
  require(p >= 1.0 && std::isfinite(p), "wasserstein: order p must be >= 1");
  require(conv == Convention::Standard || p == 2.0,
          "wasserstein: paper-half convention is defined for p = 2 only");
}

double apply_convention(double value, Convention conv) {
  return conv == Convention::PaperHalf ? value / std::sqrt(2.0) : value;
}

}  // namespace

double solve_assignment(const std::vector<double>& cost, int n, std::vector<int>* rowsol) {
  std::vector<int> sol;
  const double total = lapjv(cost, n, sol);
  if (rowsol) *rowsol = std::move(sol);
  return total;
}

WassersteinEstimate wasserstein(const Cloud& A, const Cloud& B, double p, Convention conv) {
  validate_pair(A, B, p, conv);
  WassersteinEstimate est;
  est.p = p;
  est.convention = conv;
  est.n = A.size();
  if (A.d == 1) {
    est.method = Method::Sorted1d;
    est.value = apply_convention(std::pow(mean_power_sorted(A, B, p), 1.0 / p), conv);
    return est;
  }
  require(A.size() <= kAssignmentBudget,
          "wasserstein: cloud size exceeds the exact-assignment budget in d >= 2");
  est.method = Method::Assignment;
  est.value = apply_convention(std::pow(mean_power_from_assignment(A, B, p), 1.0 / p), conv);
  return est;
}

WassersteinEstimate wasserstein_assignment(const Cloud& A, const Cloud& B, double p,
                                           Convention conv) {
  validate_pair(A, B, p, conv);
  require(A.size() <= kAssignmentBudget,
          "wasserstein: cloud size exceeds the exact-assignment budget");
  WassersteinEstimate est;
  est.p = p;
  est.convention = conv;
  est.n = A.size();
  est.method = Method::Assignment;
  est.value = apply_convention(std::pow(mean_power_from_assignment(A, B, p), 1.0 / p), conv);
  return est;
}

std::pair<double, double> holder_interpolation(const std::vector<double>& A,
                                               const std::vector<double>& B, double q) {
  require(q > 1.0 && std::isfinite(q), "holder_interpolation: q must lie in (1, inf)");
  require(!A.empty() && A.size() == B.size(),
          "holder_interpolation: samples must be nonempty and of equal size");
  const double p = q / (q - 1.0);
  const double m = (2.0 - 1.0 / q) * p;
  std::vector<double> a = A, b = B;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s2 = 0.0, s1 = 0.0, sm = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double r = std::abs(a[i] - b[i]);
    s2 += r * r;
    s1 += r;
    sm += std::pow(r, m);
  }
  const double n = static_cast<double>(a.size());
  const double w2 = std::sqrt(s2 / n);
  const double w1 = s1 / n;
  const double wm = std::pow(sm / n, 1.0 / m);
  const double rhs = std::pow(w1, 1.0 / (2.0 * q)) * std::pow(wm, 1.0 - 1.0 / (2.0 * q));
  return {w2, rhs};
}

double wasserstein_gaussian_oracle(const Vec& mean1, const Mat& cov1, const Vec& mean2,
                                   const Mat& cov2) {
  const auto n = mean1.size();
  require(n > 0 && mean2.size() == n && cov1.rows() == n && cov1.cols() == n &&
              cov2.rows() == n && cov2.cols() == n,
          "gaussian oracle: dimension mismatch");
  const double scale = std::max({1.0, cov1.cwiseAbs().maxCoeff(), cov2.cwiseAbs().maxCoeff()});
  auto sqrt_psd = [&](const Mat& C) {
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    require(es.info() == Eigen::Success, "gaussian oracle: eigendecomposition failed");
    Vec ev = es.eigenvalues();
    for (auto k = 0; k < ev.size(); ++k) {
      require(ev[k] > -1e-10 * scale, "gaussian oracle: covariance is not PSD");
      ev[k] = std::sqrt(std::max(0.0, ev[k]));
    }
    return Mat(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  };
  const Mat r1 = sqrt_psd(cov1);
  const Mat cross = sqrt_psd(Mat(r1 * cov2 * r1));
  const double bures =
      std::max(0.0, (cov1 + cov2).trace() - 2.0 * cross.trace());
  return std::sqrt((mean1 - mean2).squaredNorm() + bures);
}

}  // namespace sld::transport
