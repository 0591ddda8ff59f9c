#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lscl/dataset.hpp"
#include "lscl/error.hpp"

namespace lscl {

enum class Metric { euclidean, cosine };

inline const char* metric_name(Metric m) {
  return m == Metric::euclidean ? "euclidean" : "cosine";
}

inline Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "cosine") return Metric::cosine;
  fail(errc::invalid_argument, "unknown metric '" + name + "'");
}

/// Euclidean: returns the distance ||u - v||. Cosine: returns the similarity
/// <u,v>/(||u|| ||v||) in [-1,1], larger meaning more similar.
inline double distance(const FeatureVector& u, const FeatureVector& v, Metric metric) {
  if (u.size() != v.size())
    fail(errc::dimension_mismatch, "distance: dimensions " + std::to_string(u.size()) + " vs " +
                                       std::to_string(v.size()));
  if (metric == Metric::euclidean) return (u - v).norm();
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) fail(errc::zero_norm, "cosine similarity of a zero vector");
  return u.dot(v) / (nu * nv);
}

namespace detail {

// Ordering key: smaller is closer under both metrics.
inline double dissimilarity(const FeatureVector& u, const FeatureVector& v, Metric metric) {
  return metric == Metric::euclidean ? distance(u, v, metric) : 1.0 - distance(u, v, metric);
}

}  // namespace detail

/// The k nearest same-class neighbors of a query, their arithmetic mean, and
/// the distance from the query to that mean. Under the cosine metric the
/// stored mean_distance is 1 - similarity, so smaller is always closer.
struct NeighborSubset {
  int class_id = -1;
  std::vector<Eigen::Index> member_indices;  // dataset indices, closest first
  FeatureVector local_mean;
  double mean_distance = 0.0;
};

/// Selects the k members of `class_id` closest to y (ties broken by lower
/// sample index) and computes their mean.
inline NeighborSubset knn_in_class(const FeatureVector& y, const Dataset& ds, int class_id, int k,
                                   Metric metric = Metric::euclidean) {
  if (class_id < 0 || class_id >= ds.class_count())
    fail(errc::invalid_argument, "class id " + std::to_string(class_id) + " out of range");
  const auto& members = ds.class_members(class_id);
  if (k < 1 || static_cast<std::size_t>(k) > members.size())
    fail(errc::invalid_argument, "k=" + std::to_string(k) + " exceeds class " +
                                     std::to_string(class_id) + " size " +
                                     std::to_string(members.size()));

  std::vector<std::pair<double, Eigen::Index>> scored;
  scored.reserve(members.size());
  for (Eigen::Index idx : members)
    scored.emplace_back(detail::dissimilarity(y, ds.sample_vector(idx), metric), idx);
  std::sort(scored.begin(), scored.end());  // pair ordering breaks ties by index

  NeighborSubset subset;
  subset.class_id = class_id;
  subset.local_mean = FeatureVector::Zero(ds.dim());
  for (int i = 0; i < k; ++i) {
    subset.member_indices.push_back(scored[static_cast<std::size_t>(i)].second);
    subset.local_mean += ds.sample_vector(scored[static_cast<std::size_t>(i)].second);
  }
  subset.local_mean /= static_cast<double>(k);
  subset.mean_distance = detail::dissimilarity(y, subset.local_mean, metric);
  return subset;
}

/// Local mean classifier: the class whose k-neighbor mean is closest to y
/// (most similar, under cosine). Ties go to the smaller class id.
inline int lmc_classify(const FeatureVector& y, const Dataset& ds, int k,
                        Metric metric = Metric::euclidean) {
  if (k < 1 || k > ds.min_class_size())
    fail(errc::invalid_argument,
         "k=" + std::to_string(k) + " exceeds the smallest class size " +
             std::to_string(ds.min_class_size()));
  int best_class = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < ds.class_count(); ++c) {
    const double d = knn_in_class(y, ds, c, k, metric).mean_distance;
    if (d < best) {
      best = d;
      best_class = c;
    }
  }
  return best_class;
}

/// Pruned coding dictionary: the S per-class neighbor subsets closest to the
/// query, their stacked (unit-normalized) atoms, and per-atom weights equal
/// to the Euclidean distance from the query to the sample behind the atom.
struct CandidateSet {
  std::vector<NeighborSubset> subsets;  // ordered by ascending mean distance
  Eigen::MatrixXd dictionary;           // m x (k*S), subset-major column order
  Eigen::VectorXd weights;              // distances d(y, x_ij), pre-normalization
  std::vector<int> atom_class;          // class id per column
};

/// Stage-1 selection: per-class k-NN means under the Euclidean metric, keep
/// the S classes with the smallest mean distance (ties to the smaller class
/// id). Dictionary columns are laid out subset by subset, each subset's atoms
/// ordered closest first.
inline CandidateSet select_candidates(const FeatureVector& y, const Dataset& ds, int k, int S) {
  if (S < 1 || S > ds.class_count())
    fail(errc::invalid_argument, "S=" + std::to_string(S) + " must be in [1, " +
                                     std::to_string(ds.class_count()) + "]");
  if (k < 1 || k > ds.min_class_size())
    fail(errc::invalid_argument,
         "k=" + std::to_string(k) + " exceeds the smallest class size " +
             std::to_string(ds.min_class_size()));

  std::vector<NeighborSubset> all;
  all.reserve(static_cast<std::size_t>(ds.class_count()));
  for (int c = 0; c < ds.class_count(); ++c)
    all.push_back(knn_in_class(y, ds, c, k, Metric::euclidean));
  std::stable_sort(all.begin(), all.end(), [](const NeighborSubset& a, const NeighborSubset& b) {
    return a.mean_distance < b.mean_distance;
  });
  all.resize(static_cast<std::size_t>(S));

  const Eigen::Index p = static_cast<Eigen::Index>(k) * S;
  CandidateSet cs;
  cs.dictionary.resize(ds.dim(), p);
  cs.weights.resize(p);
  cs.atom_class.resize(static_cast<std::size_t>(p));
  Eigen::Index col = 0;
  for (const NeighborSubset& subset : all) {
    for (Eigen::Index idx : subset.member_indices) {
      const auto sample = ds.sample_vector(idx);
      const double norm = sample.norm();
      if (norm == 0.0)
        fail(errc::zero_norm, "training sample " + std::to_string(idx) + " has zero norm");
      cs.dictionary.col(col) = sample / norm;
      cs.weights[col] = (y - sample).norm();
      cs.atom_class[static_cast<std::size_t>(col)] = subset.class_id;
      ++col;
    }
  }
  cs.subsets = std::move(all);
  return cs;
}

}  // namespace lscl
