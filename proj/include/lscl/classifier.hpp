#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "lscl/dataset.hpp"
#include "lscl/error.hpp"
#include "lscl/neighbors.hpp"
#include "lscl/sparse.hpp"

namespace lscl {

/// Two-stage classifier configuration. Defaults: k=13 neighbors per class,
/// 70 candidate subsets (clamped to the class count when the default is
/// used), lambda=0.01. An explicitly set s_candidates larger than the class
/// count is an error; the unset default clamps silently.
struct LsclConfig {
  int k = 13;
  std::optional<int> s_candidates;  // unset: min(70, class count)
  double lambda = 0.01;
  SolverConfig solver;
  Metric metric = Metric::euclidean;  // used by the LMC baseline; stage 1 is always Euclidean

  int effective_candidates(int class_count) const {
    if (!s_candidates) return std::min(70, class_count);
    if (*s_candidates < 1 || *s_candidates > class_count)
      fail(errc::invalid_argument, "s_candidates=" + std::to_string(*s_candidates) +
                                       " must be in [1, " + std::to_string(class_count) + "]");
    return *s_candidates;
  }
};

struct StageCandidate {
  int class_id;
  double mean_distance;
};

struct LsclDecision {
  int class_id = -1;
  std::vector<StageCandidate> stage1_candidates;  // ascending mean distance
  ClassResidues residues;                         // over candidate classes only
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  double stage1_seconds = 0.0;
  double stage2_seconds = 0.0;
};

/// Two-stage classification: per-class k-NN means prune the classes to S
/// candidate subsets (stage 1), then a distance-weighted l1 coding over the
/// k*S retained samples picks the candidate with the smallest reconstruction
/// residue (stage 2). The answer is always one of the stage-1 candidates.
inline LsclDecision lscl_classify(const FeatureVector& y, const Dataset& ds,
                                  const LsclConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  const int S = cfg.effective_candidates(ds.class_count());

  const auto t0 = clock::now();
  CandidateSet candidates = select_candidates(y, ds, cfg.k, S);
  const auto t1 = clock::now();

  CodingProblem problem{candidates.dictionary, y, cfg.lambda, candidates.weights,
                        candidates.atom_class};
  SparseSolution solution = solve_problem(problem, cfg.solver);

  LsclDecision decision;
  decision.residues = class_residues(problem, solution, y);
  decision.class_id = argmin_residue(decision.residues);
  const auto t2 = clock::now();

  for (const NeighborSubset& subset : candidates.subsets)
    decision.stage1_candidates.push_back({subset.class_id, subset.mean_distance});
  decision.iterations = solution.iterations;
  decision.objective = solution.objective;
  decision.converged = solution.converged;
  decision.stage1_seconds = std::chrono::duration<double>(t1 - t0).count();
  decision.stage2_seconds = std::chrono::duration<double>(t2 - t1).count();
  return decision;
}

enum class Method { lscl, lmc, src, wsrc, lsrc };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::lscl: return "lscl";
    case Method::lmc: return "lmc";
    case Method::src: return "src";
    case Method::wsrc: return "wsrc";
    case Method::lsrc: return "lsrc";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  if (name == "lscl") return Method::lscl;
  if (name == "lmc") return Method::lmc;
  if (name == "src") return Method::src;
  if (name == "wsrc") return Method::wsrc;
  if (name == "lsrc") return Method::lsrc;
  fail(errc::invalid_argument, "unknown method '" + name + "'");
}

/// One per-sample outcome of a batch run. class_id is -1 when the sample
/// failed; the error message is kept so a batch never aborts as a whole.
struct BatchDecision {
  int class_id = -1;
  double seconds = 0.0;
  std::string error;
  std::optional<LsclDecision> detail;  // populated for the two-stage method

  bool ok() const { return error.empty(); }
};

/// Runs one method over a list of test vectors, collecting per-sample
/// decisions, timings, and errors in input order.
inline std::vector<BatchDecision> classify_batch(const std::vector<FeatureVector>& tests,
                                                 const Dataset& ds, const LsclConfig& cfg,
                                                 Method method) {
  using clock = std::chrono::steady_clock;
  std::vector<BatchDecision> decisions;
  decisions.reserve(tests.size());
  for (const FeatureVector& y : tests) {
    BatchDecision out;
    const auto start = clock::now();
    try {
      switch (method) {
        case Method::lscl: {
          LsclDecision decision = lscl_classify(y, ds, cfg);
          out.class_id = decision.class_id;
          out.detail = std::move(decision);
          break;
        }
        case Method::lmc:
          out.class_id = lmc_classify(y, ds, cfg.k, cfg.metric);
          break;
        case Method::src:
          out.class_id = src_classify(y, ds, cfg.lambda, cfg.solver);
          break;
        case Method::wsrc:
          out.class_id = wsrc_classify(y, ds, cfg.lambda, cfg.solver);
          break;
        case Method::lsrc:
          out.class_id = lsrc_classify(y, ds, cfg.k, cfg.lambda, cfg.solver);
          break;
      }
    } catch (const std::exception& e) {
      out.class_id = -1;
      out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(clock::now() - start).count();
    decisions.push_back(std::move(out));
  }
  return decisions;
}

}  // namespace lscl
