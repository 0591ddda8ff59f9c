#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lscl/dataset.hpp"
#include "lscl/error.hpp"

namespace lscl {

/// One weighted-l1 coding instance:
///   minimize ||A x - y||_2^2 + lambda * sum_j weights[j] * |x_j|
/// Dictionary columns must be unit l2-norm; all-ones weights give the plain
/// lasso. atom_class maps each column to the class of the sample behind it.
struct CodingProblem {
  Eigen::MatrixXd dictionary;  // m x p, unit-norm columns
  FeatureVector target;        // m
  double lambda = 0.01;
  Eigen::VectorXd weights;     // p, all >= 0
  std::vector<int> atom_class; // p entries (may be empty when residues are not needed)
};

enum class SolverMode { proximal, closed_form };

inline const char* solver_mode_name(SolverMode m) {
  return m == SolverMode::proximal ? "proximal" : "closed_form";
}

inline SolverMode parse_solver_mode(const std::string& name) {
  if (name == "proximal") return SolverMode::proximal;
  if (name == "closed-form" || name == "closed_form") return SolverMode::closed_form;
  fail(errc::invalid_argument, "unknown solver mode '" + name + "'");
}

struct SolverConfig {
  SolverMode mode = SolverMode::proximal;
  int max_iters = 1000;
  double tol = 1e-8;              // relative change in objective
  double epsilon_residual = 0.0;  // admissible reconstruction residue, kept for diagnostics
};

struct SparseSolution {
  Eigen::VectorXd coefficients;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  SolverMode mode = SolverMode::proximal;  // closed_form marks the ridge-style shortcut
  std::vector<double> objective_trace;     // per-iteration objective (proximal mode)
};

namespace detail {

inline void validate_problem(const CodingProblem& problem) {
  const Eigen::Index p = problem.dictionary.cols();
  if (p == 0) fail(errc::invalid_argument, "empty dictionary");
  if (problem.dictionary.rows() != problem.target.size())
    fail(errc::dimension_mismatch,
         "dictionary rows " + std::to_string(problem.dictionary.rows()) +
             " do not match target dimension " + std::to_string(problem.target.size()));
  if (problem.weights.size() != p)
    fail(errc::invalid_argument, "weight count does not match dictionary columns");
  if (!(problem.lambda > 0)) fail(errc::invalid_argument, "lambda must be > 0");
  if (!problem.dictionary.allFinite() || !problem.target.allFinite() ||
      !problem.weights.allFinite())
    fail(errc::non_finite_value, "coding problem contains non-finite values");
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = problem.dictionary.col(j).norm();
    if (norm == 0.0) fail(errc::zero_norm, "dictionary column " + std::to_string(j) + " is zero");
    if (std::abs(norm - 1.0) > 1e-9)
      fail(errc::invalid_argument,
           "dictionary column " + std::to_string(j) + " is not unit-norm (norm=" +
               std::to_string(norm) + ")");
    if (problem.weights[j] < 0) fail(errc::invalid_argument, "negative weight");
  }
}

// Largest eigenvalue of A^T A by power iteration; used to size the step.
inline double spectral_norm_sq(const Eigen::MatrixXd& A) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
  double value = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    value = norm;
  }
  return value;
}

inline double soft_threshold(double z, double threshold) {
  if (z > threshold) return z - threshold;
  if (z < -threshold) return z + threshold;
  return 0.0;
}

}  // namespace detail

inline double weighted_l1_objective(const CodingProblem& problem, const Eigen::VectorXd& x) {
  return (problem.dictionary * x - problem.target).squaredNorm() +
         problem.lambda * (problem.weights.array() * x.array().abs()).sum();
}

/// Largest violation of the stationarity conditions at x: for x_j != 0,
/// |2 A_j^T (Ax - y) + lambda w_j sign(x_j)|; for x_j = 0 the excess of
/// |2 A_j^T (Ax - y)| over lambda w_j. Zero at an exact minimizer.
inline double kkt_violation(const CodingProblem& problem, const Eigen::VectorXd& x) {
  const Eigen::VectorXd gradient =
      2.0 * problem.dictionary.transpose() * (problem.dictionary * x - problem.target);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double penalty = problem.lambda * problem.weights[j];
    double violation;
    if (x[j] != 0.0)
      violation = std::abs(gradient[j] + (x[j] > 0 ? penalty : -penalty));
    else
      violation = std::max(0.0, std::abs(gradient[j]) - penalty);
    worst = std::max(worst, violation);
  }
  return worst;
}

/// Proximal gradient with backtracking. The step eta multiplies the
/// half-gradient A^T(Ax - y), so the matching shrinkage threshold is
/// eta*lambda*w_j/2 (the quadratic term carries no 1/2 factor). Stops when
/// the relative objective change drops below cfg.tol.
inline SparseSolution solve_weighted_l1(const CodingProblem& problem,
                                        const SolverConfig& cfg = {}) {
  detail::validate_problem(problem);
  const Eigen::MatrixXd& A = problem.dictionary;
  const FeatureVector& y = problem.target;

  const double spectral = detail::spectral_norm_sq(A);
  double step = spectral > 0 ? 1.0 / spectral : 1.0;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  double smooth = y.squaredNorm();  // ||A*0 - y||^2
  double objective = smooth;
  SparseSolution solution;
  solution.mode = SolverMode::proximal;

  Eigen::VectorXd candidate(A.cols());
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Eigen::VectorXd residual = A * x - y;
    const Eigen::VectorXd half_gradient = A.transpose() * residual;

    double smooth_next = 0.0;
    for (;;) {
      for (Eigen::Index j = 0; j < x.size(); ++j)
        candidate[j] = detail::soft_threshold(x[j] - step * half_gradient[j],
                                              0.5 * step * problem.lambda * problem.weights[j]);
      const Eigen::VectorXd delta = candidate - x;
      smooth_next = (A * candidate - y).squaredNorm();
      const double bound =
          smooth + 2.0 * half_gradient.dot(delta) + delta.squaredNorm() / step;
      if (smooth_next <= bound + 1e-12 * std::max(1.0, std::abs(bound))) break;
      step *= 0.5;
      if (step < 1e-300) fail(errc::non_finite_value, "line search underflow");
    }

    const double objective_next =
        smooth_next + problem.lambda * (problem.weights.array() * candidate.array().abs()).sum();
    if (!std::isfinite(objective_next))
      fail(errc::non_finite_value, "solver produced non-finite objective");

    x.swap(candidate);
    smooth = smooth_next;
    solution.iterations = iter;
    solution.objective_trace.push_back(objective_next);
    const double change = std::abs(objective - objective_next);
    objective = objective_next;
    if (change <= cfg.tol * std::max(1.0, std::abs(objective))) {
      solution.converged = true;
      break;
    }
  }

  solution.coefficients = std::move(x);
  solution.objective = objective;
  return solution;
}

/// Direct solve of (A^T A + lambda diag(w)) x = A^T y. This is the
/// ridge-style shortcut, not the l1 minimizer; it is kept as a separate mode
/// for comparison runs. Errors out when the system is ill-conditioned.
inline SparseSolution solve_closed_form(const CodingProblem& problem) {
  detail::validate_problem(problem);
  const Eigen::MatrixXd& A = problem.dictionary;
  Eigen::MatrixXd gram = A.transpose() * A;
  gram.diagonal() += problem.lambda * problem.weights;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    fail(errc::singular_system, "closed-form system is singular or ill-conditioned");

  SparseSolution solution;
  solution.coefficients = ldlt.solve(A.transpose() * problem.target);
  if (!solution.coefficients.allFinite())
    fail(errc::non_finite_value, "closed-form solve produced non-finite coefficients");
  solution.objective = weighted_l1_objective(problem, solution.coefficients);
  solution.iterations = 0;
  solution.converged = true;
  solution.mode = SolverMode::closed_form;
  return solution;
}

inline SparseSolution solve_problem(const CodingProblem& problem, const SolverConfig& cfg) {
  return cfg.mode == SolverMode::closed_form ? solve_closed_form(problem)
                                             : solve_weighted_l1(problem, cfg);
}

/// Plain lasso: weighted solve with all weights equal to one.
inline SparseSolution solve_lasso(const Eigen::MatrixXd& A, const FeatureVector& y, double lambda,
                                  const SolverConfig& cfg = {}) {
  CodingProblem problem{A, y, lambda, Eigen::VectorXd::Ones(A.cols()), {}};
  return solve_problem(problem, cfg);
}

/// Per-class reconstruction residues r_c = ||y - sum_{j in class c} x_j A_j||.
struct ClassResidues {
  std::vector<std::pair<int, double>> per_class;  // ascending class id

  double residue(int class_id) const {
    for (const auto& [c, r] : per_class)
      if (c == class_id) return r;
    fail(errc::invalid_argument, "class " + std::to_string(class_id) + " has no residue");
  }
};

inline ClassResidues class_residues(const CodingProblem& problem, const SparseSolution& solution,
                                    const FeatureVector& y) {
  if (problem.atom_class.size() != static_cast<std::size_t>(problem.dictionary.cols()))
    fail(errc::invalid_argument, "atom_class is not populated");

  std::vector<int> classes(problem.atom_class);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  ClassResidues residues;
  for (int c : classes) {
    FeatureVector reconstruction = FeatureVector::Zero(y.size());
    for (Eigen::Index j = 0; j < problem.dictionary.cols(); ++j)
      if (problem.atom_class[static_cast<std::size_t>(j)] == c)
        reconstruction += solution.coefficients[j] * problem.dictionary.col(j);
    residues.per_class.emplace_back(c, (y - reconstruction).norm());
  }
  return residues;
}

/// Smallest residue wins; ties go to the smaller class id.
inline int argmin_residue(const ClassResidues& residues) {
  if (residues.per_class.empty()) fail(errc::invalid_argument, "no residues");
  int best_class = residues.per_class.front().first;
  double best = residues.per_class.front().second;
  for (const auto& [c, r] : residues.per_class)
    if (r < best) {
      best = r;
      best_class = c;
    }
  return best_class;
}

namespace detail {

// Dictionary over the given sample indices, columns normalized to unit norm.
inline CodingProblem make_problem(const Dataset& ds, const std::vector<Eigen::Index>& indices,
                                  const FeatureVector& y, double lambda, bool distance_weights) {
  CodingProblem problem;
  problem.dictionary.resize(ds.dim(), static_cast<Eigen::Index>(indices.size()));
  problem.weights.resize(static_cast<Eigen::Index>(indices.size()));
  problem.atom_class.resize(indices.size());
  problem.target = y;
  problem.lambda = lambda;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto sample = ds.sample_vector(indices[i]);
    const double norm = sample.norm();
    if (norm == 0.0)
      fail(errc::zero_norm, "training sample " + std::to_string(indices[i]) + " has zero norm");
    const Eigen::Index col = static_cast<Eigen::Index>(i);
    problem.dictionary.col(col) = sample / norm;
    problem.weights[col] = distance_weights ? (y - sample).norm() : 1.0;
    problem.atom_class[i] = ds.label(indices[i]);
  }
  return problem;
}

inline std::vector<Eigen::Index> all_indices(const Dataset& ds) {
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(ds.size()));
  for (Eigen::Index i = 0; i < ds.size(); ++i) indices[static_cast<std::size_t>(i)] = i;
  return indices;
}

}  // namespace detail

/// Sparse-representation classifier over the full training set: code y
/// against every (unit-normalized) training sample, assign the class with the
/// smallest reconstruction residue.
inline int src_classify(const FeatureVector& y, const Dataset& ds, double lambda,
                        const SolverConfig& cfg = {}) {
  CodingProblem problem = detail::make_problem(ds, detail::all_indices(ds), y, lambda, false);
  SparseSolution solution = solve_problem(problem, cfg);
  return argmin_residue(class_residues(problem, solution, y));
}

/// Distance-weighted variant: atom j's l1 penalty is scaled by the Euclidean
/// distance from y to the training sample behind it, so nearby samples are
/// cheaper to use.
inline int wsrc_classify(const FeatureVector& y, const Dataset& ds, double lambda,
                         const SolverConfig& cfg = {}) {
  CodingProblem problem = detail::make_problem(ds, detail::all_indices(ds), y, lambda, true);
  SparseSolution solution = solve_problem(problem, cfg);
  return argmin_residue(class_residues(problem, solution, y));
}

/// Local variant: the dictionary is restricted to the k class-agnostic
/// nearest neighbors of y (unweighted l1); only classes present in that
/// neighborhood can be returned.
inline int lsrc_classify(const FeatureVector& y, const Dataset& ds, int k, double lambda,
                         const SolverConfig& cfg = {}) {
  if (k < 1 || k > ds.size())
    fail(errc::invalid_argument,
         "k=" + std::to_string(k) + " must be in [1, " + std::to_string(ds.size()) + "]");
  std::vector<std::pair<double, Eigen::Index>> scored;
  scored.reserve(static_cast<std::size_t>(ds.size()));
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    scored.emplace_back((y - ds.sample_vector(i)).norm(), i);
  std::sort(scored.begin(), scored.end());
  std::vector<Eigen::Index> neighborhood;
  neighborhood.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) neighborhood.push_back(scored[static_cast<std::size_t>(i)].second);

  CodingProblem problem = detail::make_problem(ds, neighborhood, y, lambda, false);
  SparseSolution solution = solve_problem(problem, cfg);
  return argmin_residue(class_residues(problem, solution, y));
}

}  // namespace lscl
