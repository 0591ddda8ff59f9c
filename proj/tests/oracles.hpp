#pragma once

// Independent reference implementations used only to check the library.
// Everything here is deliberately brute force and shares no code with the
// implementation paths under test.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lscl/dataset.hpp"
#include "lscl/neighbors.hpp"

namespace oracle {

// 1-nearest-neighbor by exhaustive scan.
inline int nn1_classify(const lscl::FeatureVector& y, const lscl::Dataset& ds) {
  int best_label = -1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const double d = (y - ds.sample_vector(i)).norm();
    if (d < best) {
      best = d;
      best_label = ds.label(i);
    }
  }
  return best_label;
}

// Local-mean classifier via a full distance table and explicit sorting;
// ties broken by lower sample index, then lower class id.
inline int lmc_classify(const lscl::FeatureVector& y, const lscl::Dataset& ds, int k,
                        lscl::Metric metric) {
  int best_class = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < ds.class_count(); ++c) {
    std::vector<std::pair<double, Eigen::Index>> table;
    for (Eigen::Index i : ds.class_members(c)) {
      double score;
      if (metric == lscl::Metric::euclidean) {
        score = (y - ds.sample_vector(i)).norm();
      } else {
        score = 1.0 - y.dot(ds.sample_vector(i)) / (y.norm() * ds.sample_vector(i).norm());
      }
      table.emplace_back(score, i);
    }
    std::sort(table.begin(), table.end());
    lscl::FeatureVector mean = lscl::FeatureVector::Zero(ds.dim());
    for (int i = 0; i < k; ++i) mean += ds.sample_vector(table[static_cast<std::size_t>(i)].second);
    mean /= static_cast<double>(k);
    double d;
    if (metric == lscl::Metric::euclidean)
      d = (y - mean).norm();
    else
      d = 1.0 - y.dot(mean) / (y.norm() * mean.norm());
    if (d < best) {
      best = d;
      best_class = c;
    }
  }
  return best_class;
}

// Per-class reconstruction residues by a dense nested loop.
inline std::vector<std::pair<int, double>> class_residues(const Eigen::MatrixXd& dictionary,
                                                          const std::vector<int>& atom_class,
                                                          const Eigen::VectorXd& coefficients,
                                                          const lscl::FeatureVector& y) {
  std::vector<int> classes(atom_class);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<std::pair<int, double>> out;
  for (int c : classes) {
    Eigen::VectorXd rec = Eigen::VectorXd::Zero(y.size());
    for (Eigen::Index j = 0; j < dictionary.cols(); ++j)
      if (atom_class[static_cast<std::size_t>(j)] == c)
        for (Eigen::Index r = 0; r < y.size(); ++r) rec[r] += coefficients[j] * dictionary(r, j);
    double sq = 0.0;
    for (Eigen::Index r = 0; r < y.size(); ++r) sq += (y[r] - rec[r]) * (y[r] - rec[r]);
    out.emplace_back(c, std::sqrt(sq));
  }
  return out;
}

// Exact minimum of ||Ax-y||^2 + lambda*sum_j w_j |x_j| over the uniform grid
// [lo,hi]^p, p <= 3. The outer coordinates are enumerated point by point; the
// innermost axis of each line is a convex 1-d section, so its grid optimum
// sits at a grid point bracketing the continuous minimizer and is found in
// O(1). The result equals full enumeration (grid_enumerate below validates
// that) at a fraction of the cost.
class GridSearch {
 public:
  GridSearch(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
             const Eigen::VectorXd& weights, double lo = -5.0, double hi = 5.0,
             double step = 1e-3)
      : gram_(A.transpose() * A),
        linear_(A.transpose() * y),
        y_sq_(y.squaredNorm()),
        lambda_(lambda),
        weights_(weights),
        lo_(lo),
        hi_(hi),
        step_(step),
        points_(static_cast<long>(std::llround((hi - lo) / step)) + 1) {
    if (gram_.rows() > 3) throw std::invalid_argument("grid search supports p <= 3");
  }

  double minimum() const {
    const Eigen::Index p = gram_.rows();
    const double a0 = gram_(0, 0);
    const double pen0 = lambda_ * weights_[0];
    double best = std::numeric_limits<double>::infinity();
    minimizer_ = Eigen::VectorXd::Zero(p);

    if (p == 1) {
      const auto [g, v] = best_axis0(a0, -2.0 * linear_[0], pen0, y_sq_);
      best = g;
      minimizer_[0] = v;
    } else if (p == 2) {
      const double pen1 = lambda_ * weights_[1];
      for (long i1 = 0; i1 < points_; ++i1) {
        const double x1 = value(i1);
        const double b0 = -2.0 * linear_[0] + 2.0 * gram_(0, 1) * x1;
        const double rest =
            y_sq_ + (gram_(1, 1) * x1 - 2.0 * linear_[1]) * x1 + pen1 * std::abs(x1);
        const auto [g, v] = best_axis0(a0, b0, pen0, rest);
        if (g < best) {
          best = g;
          minimizer_ << v, x1;
        }
      }
    } else {
      const double pen1 = lambda_ * weights_[1];
      const double pen2 = lambda_ * weights_[2];
      for (long i2 = 0; i2 < points_; ++i2) {
        const double x2 = value(i2);
        const double b0_base = -2.0 * linear_[0] + 2.0 * gram_(0, 2) * x2;
        const double lin1 = 2.0 * gram_(1, 2) * x2 - 2.0 * linear_[1];
        const double rest2 =
            y_sq_ + (gram_(2, 2) * x2 - 2.0 * linear_[2]) * x2 + pen2 * std::abs(x2);
        for (long i1 = 0; i1 < points_; ++i1) {
          const double x1 = value(i1);
          const double b0 = b0_base + 2.0 * gram_(0, 1) * x1;
          const double rest = rest2 + (gram_(1, 1) * x1 + lin1) * x1 + pen1 * std::abs(x1);
          const auto [g, v] = best_axis0(a0, b0, pen0, rest);
          if (g < best) {
            best = g;
            minimizer_ << v, x1, x2;
          }
        }
      }
    }
    return best;
  }

  // Valid after minimum() has run.
  const Eigen::VectorXd& minimizer() const { return minimizer_; }

 private:
  double value(long i) const { return lo_ + static_cast<double>(i) * step_; }

  // Grid minimum of a*v^2 + b*v + pen*|v| + rest over [lo,hi]; a > 0.
  std::pair<double, double> best_axis0(double a, double b, double pen, double rest) const {
    double v;
    if (b + pen < 0.0)
      v = -(b + pen) / (2.0 * a);
    else if (b - pen > 0.0)
      v = -(b - pen) / (2.0 * a);
    else
      v = 0.0;
    v = std::clamp(v, lo_, hi_);
    // one extra point each side absorbs rounding when v lands on a grid point
    long i = static_cast<long>((v - lo_) / step_) - 1;
    i = std::clamp(i, 0L, points_ - 4);
    double best = std::numeric_limits<double>::infinity();
    double best_v = value(i);
    for (long d = 0; d < 4; ++d) {
      const double vd = value(i + d);
      const double g = (a * vd + b) * vd + pen * std::abs(vd);
      if (g < best) {
        best = g;
        best_v = vd;
      }
    }
    return {best + rest, best_v};
  }

  Eigen::MatrixXd gram_;
  Eigen::VectorXd linear_;
  double y_sq_;
  double lambda_;
  Eigen::VectorXd weights_;
  double lo_, hi_, step_;
  long points_;
  mutable Eigen::VectorXd minimizer_;
};

// Plain full enumeration, only tractable on coarse grids; used to validate
// GridSearch itself.
inline double grid_enumerate(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
                             const Eigen::VectorXd& weights, double lo, double hi, double step) {
  const Eigen::Index p = A.cols();
  const long points = static_cast<long>(std::llround((hi - lo) / step)) + 1;
  Eigen::VectorXd x(p);
  double best = std::numeric_limits<double>::infinity();
  std::vector<long> idx(static_cast<std::size_t>(p), 0);
  for (;;) {
    for (Eigen::Index j = 0; j < p; ++j)
      x[j] = lo + static_cast<double>(idx[static_cast<std::size_t>(j)]) * step;
    const double obj =
        (A * x - y).squaredNorm() + lambda * (weights.array() * x.array().abs()).sum();
    best = std::min(best, obj);
    Eigen::Index carry = 0;
    while (carry < p) {
      if (++idx[static_cast<std::size_t>(carry)] < points) break;
      idx[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == p) break;
  }
  return best;
}

}  // namespace oracle
