#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lscl/error.hpp"

namespace lscl {

using FeatureVector = Eigen::VectorXd;

struct LabeledSample {
  FeatureVector vector;
  int class_id = 0;
};

/// Immutable collection of labeled samples. Samples are stored column-wise
/// (one column per sample) so that sub-dictionaries are cheap column gathers.
/// Class ids are dense integers 0..C-1; the original label tokens are kept
/// for reporting.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd features, std::vector<int> labels,
          std::vector<std::string> class_names = {})
      : features_(std::move(features)), labels_(std::move(labels)) {
    if (features_.cols() != static_cast<Eigen::Index>(labels_.size()))
      fail(errc::invalid_argument, "label count does not match sample count");
    if (features_.cols() == 0) fail(errc::invalid_argument, "dataset has no samples");
    if (features_.rows() < 1) fail(errc::invalid_argument, "feature dimension must be >= 1");
    if (!features_.allFinite()) fail(errc::non_finite_value, "dataset contains non-finite values");

    int class_count = 0;
    for (int label : labels_) {
      if (label < 0) fail(errc::invalid_argument, "negative class id");
      class_count = std::max(class_count, label + 1);
    }
    members_.resize(class_count);
    for (Eigen::Index i = 0; i < features_.cols(); ++i) members_[labels_[i]].push_back(i);
    for (int c = 0; c < class_count; ++c)
      if (members_[c].empty())
        fail(errc::empty_class, "class " + std::to_string(c) + " has no samples");

    if (class_names.empty()) {
      for (int c = 0; c < class_count; ++c) class_names.push_back("class_" + std::to_string(c));
    } else if (static_cast<int>(class_names.size()) != class_count) {
      fail(errc::invalid_argument, "class name count does not match class count");
    }
    class_names_ = std::move(class_names);
  }

  static Dataset from_samples(const std::vector<LabeledSample>& samples,
                              std::vector<std::string> class_names = {}) {
    if (samples.empty()) fail(errc::invalid_argument, "dataset has no samples");
    Eigen::Index dim = samples.front().vector.size();
    Eigen::MatrixXd features(dim, static_cast<Eigen::Index>(samples.size()));
    std::vector<int> labels(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].vector.size() != dim)
        fail(errc::dimension_mismatch, "sample " + std::to_string(i) + " has dimension " +
                                           std::to_string(samples[i].vector.size()) +
                                           ", expected " + std::to_string(dim));
      features.col(static_cast<Eigen::Index>(i)) = samples[i].vector;
      labels[i] = samples[i].class_id;
    }
    return Dataset(std::move(features), std::move(labels), std::move(class_names));
  }

  Eigen::Index dim() const { return features_.rows(); }
  Eigen::Index size() const { return features_.cols(); }
  int class_count() const { return static_cast<int>(members_.size()); }

  const Eigen::MatrixXd& features() const { return features_; }
  auto sample_vector(Eigen::Index i) const { return features_.col(i); }
  int label(Eigen::Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& labels() const { return labels_; }

  LabeledSample sample(Eigen::Index i) const { return {features_.col(i), label(i)}; }

  const std::vector<Eigen::Index>& class_members(int c) const {
    return members_[static_cast<std::size_t>(c)];
  }
  Eigen::Index class_size(int c) const {
    return static_cast<Eigen::Index>(members_[static_cast<std::size_t>(c)].size());
  }
  Eigen::Index min_class_size() const {
    Eigen::Index smallest = size();
    for (const auto& m : members_)
      smallest = std::min(smallest, static_cast<Eigen::Index>(m.size()));
    return smallest;
  }

  const std::string& class_name(int c) const { return class_names_[static_cast<std::size_t>(c)]; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  bool operator==(const Dataset& other) const {
    return features_ == other.features_ && labels_ == other.labels_ &&
           class_names_ == other.class_names_;
  }

 private:
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::vector<std::vector<Eigen::Index>> members_;
  std::vector<std::string> class_names_;
};

/// Parameters for the seeded Gaussian-cluster generator. Identical specs
/// produce bit-identical datasets.
struct SyntheticSpec {
  int class_count = 2;
  int samples_per_class = 10;
  int dim = 2;
  double class_separation = 1.0;
  double noise_scale = 0.1;
  std::uint64_t seed = 0;
};

namespace detail {

inline double parse_double(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    fail(errc::malformed_row,
         "line " + std::to_string(line_no) + ": cannot parse number '" + std::string(token) + "'");
  return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

/// Loads a dataset from CSV. First line is the header `label,f0,...,f{m-1}`;
/// each following line is one sample. Labels are arbitrary non-empty tokens
/// without commas and are renumbered to dense class ids in first-appearance
/// order.
inline Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail(errc::malformed_row, "empty file: " + path.string());
  detail::strip_cr(line);
  auto header = detail::split_csv(line);
  if (header.size() < 2 || header[0] != "label")
    fail(errc::malformed_row, "line 1: header must be 'label,f0,...'");
  const std::size_t dim = header.size() - 1;

  std::vector<LabeledSample> samples;
  std::vector<std::string> class_names;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields[0].empty())
      fail(errc::malformed_row, "line " + std::to_string(line_no) + ": empty label");
    if (fields.size() != dim + 1)
      fail(errc::dimension_mismatch, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(dim) + " features, got " +
                                         std::to_string(fields.size() - 1));
    FeatureVector v(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
      double value = detail::parse_double(fields[j + 1], line_no);
      if (!std::isfinite(value))
        fail(errc::non_finite_value,
             "line " + std::to_string(line_no) + ": non-finite value in column " +
                 std::to_string(j));
      v[static_cast<Eigen::Index>(j)] = value;
    }
    std::string token(fields[0]);
    auto it = std::find(class_names.begin(), class_names.end(), token);
    int class_id;
    if (it == class_names.end()) {
      class_id = static_cast<int>(class_names.size());
      class_names.push_back(token);
    } else {
      class_id = static_cast<int>(it - class_names.begin());
    }
    samples.push_back({std::move(v), class_id});
  }
  if (samples.empty()) fail(errc::malformed_row, "no samples in " + path.string());
  return Dataset::from_samples(samples, std::move(class_names));
}

/// Writes the canonical CSV form. Doubles are printed with shortest
/// round-trip precision so save/load is an identity.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot write " + path.string());
  out << "label";
  for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ",f" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    out << ds.class_name(ds.label(i));
    for (Eigen::Index j = 0; j < ds.dim(); ++j)
      out << ',' << detail::format_double(ds.features()(j, i));
    out << '\n';
  }
  if (!out) fail(errc::io_failure, "write failed: " + path.string());
}

/// JSON sidecar mapping dense class id -> original label token.
inline void save_manifest(const Dataset& ds, const std::filesystem::path& path) {
  nlohmann::ordered_json manifest;
  for (int c = 0; c < ds.class_count(); ++c) manifest[std::to_string(c)] = ds.class_name(c);
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot write " + path.string());
  out << manifest.dump(2) << '\n';
}

/// Seeded Gaussian clusters: class centers are drawn with rejection until all
/// pairs are at least class_separation apart (capped at 10000 proposals),
/// then samples are centers plus isotropic noise of scale noise_scale.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.class_count < 1) fail(errc::invalid_argument, "class_count must be >= 1");
  if (spec.samples_per_class < 1) fail(errc::invalid_argument, "samples_per_class must be >= 1");
  if (spec.dim < 1) fail(errc::invalid_argument, "dim must be >= 1");
  if (spec.class_separation < 0) fail(errc::invalid_argument, "class_separation must be >= 0");
  if (spec.noise_scale < 0) fail(errc::invalid_argument, "noise_scale must be >= 0");
  const std::int64_t total =
      static_cast<std::int64_t>(spec.class_count) * static_cast<std::int64_t>(spec.samples_per_class);
  if (total > 50'000'000)
    fail(errc::invalid_argument, "requested sample count " + std::to_string(total) + " is too large");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int C = spec.class_count;
  const int m = spec.dim;
  // Proposal spread sized so that separated centers are findable when the
  // dimension allows it at all.
  double center_scale = 1.0;
  if (spec.class_separation > 0)
    center_scale = 2.0 * spec.class_separation * std::pow(static_cast<double>(C), 1.0 / m) /
                   std::sqrt(static_cast<double>(m));

  Eigen::MatrixXd centers(m, C);
  if (spec.class_separation == 0) {
    for (int c = 0; c < C; ++c)
      for (int j = 0; j < m; ++j) centers(j, c) = center_scale * normal(rng);
  } else {
    int attempts = 0;
    const int max_attempts = 10000;
    for (int c = 0; c < C;) {
      if (attempts++ >= max_attempts)
        fail(errc::invalid_argument,
             "could not place " + std::to_string(C) + " centers at separation " +
                 std::to_string(spec.class_separation) + " in dimension " + std::to_string(m) +
                 " within " + std::to_string(max_attempts) + " proposals");
      FeatureVector candidate(m);
      for (int j = 0; j < m; ++j) candidate[j] = center_scale * normal(rng);
      bool separated = true;
      for (int prev = 0; prev < c && separated; ++prev)
        separated = (candidate - centers.col(prev)).norm() >= spec.class_separation;
      if (separated) centers.col(c++) = candidate;
    }
  }

  Eigen::MatrixXd features(m, total);
  std::vector<int> labels(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (int c = 0; c < C; ++c) {
    for (int s = 0; s < spec.samples_per_class; ++s, ++col) {
      for (int j = 0; j < m; ++j)
        features(j, col) = centers(j, c) + spec.noise_scale * normal(rng);
      labels[static_cast<std::size_t>(col)] = c;
    }
  }
  return Dataset(std::move(features), std::move(labels));
}

namespace detail {

inline Dataset subset(const Dataset& ds, const std::vector<Eigen::Index>& indices) {
  Eigen::MatrixXd features(ds.dim(), static_cast<Eigen::Index>(indices.size()));
  std::vector<int> labels(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    features.col(static_cast<Eigen::Index>(i)) = ds.sample_vector(indices[i]);
    labels[i] = ds.label(indices[i]);
  }
  return Dataset(std::move(features), std::move(labels), ds.class_names());
}

}  // namespace detail

/// Per-class random halves; with odd class sizes the training half gets the
/// extra sample. Same seed, same split.
inline std::pair<Dataset, Dataset> split_two_fold(const Dataset& ds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> train_idx, test_idx;
  for (int c = 0; c < ds.class_count(); ++c) {
    auto members = ds.class_members(c);
    if (members.size() < 2)
      fail(errc::invalid_argument,
           "class " + std::to_string(c) + " has fewer than 2 samples, cannot split");
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t train_count = (members.size() + 1) / 2;
    train_idx.insert(train_idx.end(), members.begin(), members.begin() + train_count);
    test_idx.insert(test_idx.end(), members.begin() + train_count, members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {detail::subset(ds, train_idx), detail::subset(ds, test_idx)};
}

/// Lazy leave-one-out folds: fold i trains on everything except sample i.
/// The referenced dataset must outlive the view.
class LeaveOneOutFolds {
 public:
  struct Fold {
    Dataset train;
    LabeledSample test;
    Eigen::Index test_index;
  };

  explicit LeaveOneOutFolds(const Dataset& ds) : ds_(&ds) {
    for (int c = 0; c < ds.class_count(); ++c)
      if (ds.class_size(c) < 2)
        fail(errc::invalid_argument,
             "class " + std::to_string(c) + " has fewer than 2 samples, cannot leave one out");
  }

  Eigen::Index fold_count() const { return ds_->size(); }

  Fold fold(Eigen::Index i) const {
    std::vector<Eigen::Index> train_idx;
    train_idx.reserve(static_cast<std::size_t>(ds_->size() - 1));
    for (Eigen::Index j = 0; j < ds_->size(); ++j)
      if (j != i) train_idx.push_back(j);
    return {detail::subset(*ds_, train_idx), ds_->sample(i), i};
  }

  class iterator {
   public:
    using value_type = Fold;
    using difference_type = std::ptrdiff_t;

    iterator(const LeaveOneOutFolds* owner, Eigen::Index pos) : owner_(owner), pos_(pos) {}
    Fold operator*() const { return owner_->fold(pos_); }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    bool operator!=(const iterator& other) const { return pos_ != other.pos_; }
    bool operator==(const iterator& other) const { return pos_ == other.pos_; }

   private:
    const LeaveOneOutFolds* owner_;
    Eigen::Index pos_;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, ds_->size()}; }

 private:
  const Dataset* ds_;
};

inline LeaveOneOutFolds leave_one_out_folds(const Dataset& ds) { return LeaveOneOutFolds(ds); }

}  // namespace lscl
