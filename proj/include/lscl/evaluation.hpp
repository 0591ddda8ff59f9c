#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lscl/classifier.hpp"
#include "lscl/dataset.hpp"
#include "lscl/error.hpp"

namespace lscl {

enum class Scheme { two_fold, leave_one_out };

inline const char* scheme_name(Scheme s) {
  return s == Scheme::two_fold ? "two_fold" : "leave_one_out";
}

inline Scheme parse_scheme(const std::string& name) {
  if (name == "two_fold" || name == "two-fold") return Scheme::two_fold;
  if (name == "leave_one_out" || name == "leave-one-out" || name == "loo")
    return Scheme::leave_one_out;
  fail(errc::invalid_argument, "unknown scheme '" + name + "'");
}

/// Cross-validation summary. Wall time covers classification only (data
/// handling and splitting are excluded). For the two-fold scheme the std is
/// taken over repetitions; for leave-one-out it is taken across per-class
/// accuracies, and std_kind says which.
struct EvaluationReport {
  std::string method;
  Scheme scheme = Scheme::two_fold;
  int repetitions = 1;
  std::vector<double> per_class_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::string std_kind;  // "repetitions" or "classes"
  double total_wall_time_s = 0.0;
  double stage1_time_s = 0.0;  // nonzero for the two-stage method only
  double stage2_time_s = 0.0;
  long correct = 0;
  long incorrect = 0;
  long errored = 0;
  nlohmann::ordered_json config;

  bool operator==(const EvaluationReport& other) const {
    return method == other.method && scheme == other.scheme && repetitions == other.repetitions &&
           per_class_accuracy == other.per_class_accuracy &&
           mean_accuracy == other.mean_accuracy && std_accuracy == other.std_accuracy &&
           std_kind == other.std_kind && total_wall_time_s == other.total_wall_time_s &&
           stage1_time_s == other.stage1_time_s && stage2_time_s == other.stage2_time_s &&
           correct == other.correct && incorrect == other.incorrect && errored == other.errored &&
           config == other.config;
  }
};

/// A batch runner maps (training set, test samples) to per-sample decisions.
/// The label travels with the test sample so harness-level stubs can be
/// exact; real classifiers only look at the vector.
using BatchRunner = std::function<std::vector<BatchDecision>(
    const Dataset& train, const std::vector<LabeledSample>& tests)>;

inline BatchRunner make_method_runner(Method method, const LsclConfig& cfg) {
  return [method, cfg](const Dataset& train, const std::vector<LabeledSample>& tests) {
    std::vector<FeatureVector> vectors;
    vectors.reserve(tests.size());
    for (const LabeledSample& t : tests) vectors.push_back(t.vector);
    return classify_batch(vectors, train, cfg, method);
  };
}

/// Wraps a plain per-sample classifier (used for test stubs).
using ClassifierFn = std::function<int(const LabeledSample& test, const Dataset& train)>;

inline BatchRunner make_fn_runner(ClassifierFn fn) {
  return [fn = std::move(fn)](const Dataset& train, const std::vector<LabeledSample>& tests) {
    using clock = std::chrono::steady_clock;
    std::vector<BatchDecision> decisions;
    decisions.reserve(tests.size());
    for (const LabeledSample& t : tests) {
      BatchDecision out;
      const auto start = clock::now();
      try {
        out.class_id = fn(t, train);
      } catch (const std::exception& e) {
        out.class_id = -1;
        out.error = e.what();
      }
      out.seconds = std::chrono::duration<double>(clock::now() - start).count();
      decisions.push_back(std::move(out));
    }
    return decisions;
  };
}

inline nlohmann::ordered_json config_snapshot(const LsclConfig& cfg) {
  nlohmann::ordered_json j;
  j["k"] = cfg.k;
  if (cfg.s_candidates)
    j["s_candidates"] = *cfg.s_candidates;
  else
    j["s_candidates"] = nullptr;
  j["lambda"] = cfg.lambda;
  j["solver"] = {{"mode", solver_mode_name(cfg.solver.mode)},
                 {"max_iters", cfg.solver.max_iters},
                 {"tol", cfg.solver.tol}};
  j["metric"] = metric_name(cfg.metric);
  return j;
}

namespace detail {

struct Tally {
  std::vector<long> class_correct, class_total;
  long correct = 0, incorrect = 0, errored = 0;
  double wall = 0.0, stage1 = 0.0, stage2 = 0.0;

  explicit Tally(int class_count)
      : class_correct(static_cast<std::size_t>(class_count), 0),
        class_total(static_cast<std::size_t>(class_count), 0) {}

  void add(const std::vector<LabeledSample>& tests, const std::vector<BatchDecision>& decisions) {
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto c = static_cast<std::size_t>(tests[i].class_id);
      ++class_total[c];
      const BatchDecision& d = decisions[i];
      if (!d.ok()) {
        ++errored;
      } else if (d.class_id == tests[i].class_id) {
        ++correct;
        ++class_correct[c];
      } else {
        ++incorrect;
      }
      wall += d.seconds;
      if (d.detail) {
        stage1 += d.detail->stage1_seconds;
        stage2 += d.detail->stage2_seconds;
      }
    }
  }
};

inline double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

inline void finish_report(EvaluationReport& report, const Tally& tally) {
  report.per_class_accuracy.resize(tally.class_total.size());
  for (std::size_t c = 0; c < tally.class_total.size(); ++c)
    report.per_class_accuracy[c] =
        tally.class_total[c] > 0
            ? static_cast<double>(tally.class_correct[c]) / static_cast<double>(tally.class_total[c])
            : 0.0;
  report.total_wall_time_s = tally.wall;
  report.stage1_time_s = tally.stage1;
  report.stage2_time_s = tally.stage2;
  report.correct = tally.correct;
  report.incorrect = tally.incorrect;
  report.errored = tally.errored;
}

}  // namespace detail

/// Repeated per-class half splits (seeded): each repetition draws a fresh
/// split, classifies the held-out half, and contributes one accuracy value.
inline EvaluationReport run_two_fold(const Dataset& ds, const std::string& method_label,
                                     const BatchRunner& runner, int repetitions,
                                     std::uint64_t seed) {
  if (repetitions < 1) fail(errc::invalid_argument, "repetitions must be >= 1");
  std::mt19937_64 seeder(seed);
  detail::Tally tally(ds.class_count());
  std::vector<double> rep_accuracy;
  rep_accuracy.reserve(static_cast<std::size_t>(repetitions));

  for (int rep = 0; rep < repetitions; ++rep) {
    const std::uint64_t split_seed = seeder();
    auto [train, test] = split_two_fold(ds, split_seed);
    std::vector<LabeledSample> tests;
    tests.reserve(static_cast<std::size_t>(test.size()));
    for (Eigen::Index i = 0; i < test.size(); ++i) tests.push_back(test.sample(i));

    const auto decisions = runner(train, tests);
    long rep_correct = 0;
    for (std::size_t i = 0; i < tests.size(); ++i)
      if (decisions[i].ok() && decisions[i].class_id == tests[i].class_id) ++rep_correct;
    rep_accuracy.push_back(static_cast<double>(rep_correct) / static_cast<double>(tests.size()));
    tally.add(tests, decisions);
  }

  EvaluationReport report;
  report.method = method_label;
  report.scheme = Scheme::two_fold;
  report.repetitions = repetitions;
  double mean = 0.0;
  for (double a : rep_accuracy) mean += a;
  mean /= static_cast<double>(rep_accuracy.size());
  report.mean_accuracy = mean;
  report.std_accuracy = detail::sample_std(rep_accuracy, mean);
  report.std_kind = "repetitions";
  detail::finish_report(report, tally);
  return report;
}

inline EvaluationReport run_two_fold(const Dataset& ds, Method method, const LsclConfig& cfg,
                                     int repetitions, std::uint64_t seed) {
  EvaluationReport report =
      run_two_fold(ds, method_name(method), make_method_runner(method, cfg), repetitions, seed);
  report.config = config_snapshot(cfg);
  return report;
}

/// Classical leave-one-out: one fold per sample. The reported std is across
/// per-class accuracies (a single pass has no repetition spread).
inline EvaluationReport run_leave_one_out(const Dataset& ds, const std::string& method_label,
                                          const BatchRunner& runner) {
  detail::Tally tally(ds.class_count());
  for (const auto& fold : leave_one_out_folds(ds)) {
    std::vector<LabeledSample> tests{fold.test};
    tally.add(tests, runner(fold.train, tests));
  }

  EvaluationReport report;
  report.method = method_label;
  report.scheme = Scheme::leave_one_out;
  report.repetitions = 1;
  detail::finish_report(report, tally);
  report.mean_accuracy =
      static_cast<double>(tally.correct) / static_cast<double>(ds.size());
  double class_mean = 0.0;
  for (double a : report.per_class_accuracy) class_mean += a;
  class_mean /= static_cast<double>(report.per_class_accuracy.size());
  report.std_accuracy = detail::sample_std(report.per_class_accuracy, class_mean);
  report.std_kind = "classes";
  return report;
}

inline EvaluationReport run_leave_one_out(const Dataset& ds, Method method,
                                          const LsclConfig& cfg) {
  EvaluationReport report =
      run_leave_one_out(ds, method_name(method), make_method_runner(method, cfg));
  report.config = config_snapshot(cfg);
  return report;
}

enum class ReportFormat { text_table, json };

inline nlohmann::ordered_json report_to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["scheme"] = scheme_name(r.scheme);
  j["repetitions"] = r.repetitions;
  j["mean_accuracy"] = r.mean_accuracy;
  j["std_accuracy"] = r.std_accuracy;
  j["std_kind"] = r.std_kind;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["total_wall_time_s"] = r.total_wall_time_s;
  j["stage1_time_s"] = r.stage1_time_s;
  j["stage2_time_s"] = r.stage2_time_s;
  j["correct"] = r.correct;
  j["incorrect"] = r.incorrect;
  j["errored"] = r.errored;
  j["config"] = r.config;
  return j;
}

inline EvaluationReport report_from_json(const nlohmann::ordered_json& j) {
  EvaluationReport r;
  r.method = j.at("method").get<std::string>();
  r.scheme = parse_scheme(j.at("scheme").get<std::string>());
  r.repetitions = j.at("repetitions").get<int>();
  r.mean_accuracy = j.at("mean_accuracy").get<double>();
  r.std_accuracy = j.at("std_accuracy").get<double>();
  r.std_kind = j.at("std_kind").get<std::string>();
  r.per_class_accuracy = j.at("per_class_accuracy").get<std::vector<double>>();
  r.total_wall_time_s = j.at("total_wall_time_s").get<double>();
  r.stage1_time_s = j.at("stage1_time_s").get<double>();
  r.stage2_time_s = j.at("stage2_time_s").get<double>();
  r.correct = j.at("correct").get<long>();
  r.incorrect = j.at("incorrect").get<long>();
  r.errored = j.at("errored").get<long>();
  r.config = j.at("config");
  return r;
}

/// "0.8139 ± 0.204 / 86" — mean accuracy, accuracy spread, seconds.
inline std::string format_result_row(double mean, double std_dev, double seconds) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.4f ± %.3f / %g", mean, std_dev, seconds);
  return buf;
}

inline std::string render_report(const EvaluationReport& r, ReportFormat format) {
  if (format == ReportFormat::json) return report_to_json(r).dump(2);

  std::string out;
  out += "method:   " + r.method + "\n";
  out += "scheme:   " + std::string(scheme_name(r.scheme)) + " (" +
         std::to_string(r.repetitions) + " repetitions, std over " + r.std_kind + ")\n";
  out += "result:   " + format_result_row(r.mean_accuracy, r.std_accuracy, r.total_wall_time_s) +
         "\n";
  char buf[64];
  out += "per-class:";
  for (double a : r.per_class_accuracy) {
    std::snprintf(buf, sizeof(buf), " %.4f", a);
    out += buf;
  }
  out += "\n";
  std::snprintf(buf, sizeof(buf), "counts:   %ld correct / %ld incorrect / %ld errored\n",
                r.correct, r.incorrect, r.errored);
  out += buf;
  return out;
}

}  // namespace lscl
