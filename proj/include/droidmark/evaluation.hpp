#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "droidmark/arff.hpp"
#include "droidmark/bayesnet.hpp"
#include "droidmark/errors.hpp"
#include "droidmark/json_util.hpp"

namespace droidmark {

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long>> counts; // rows = actual, cols = predicted

    long total() const;
    long correct() const;
};

struct ClassMetrics {
    double tpr = 0;
    double fpr = 0;
    double precision = 0;
    double recall = 0;
    double f_measure = 0;
    double mcc = 0;
    double roc_area = 0;
    double prc_area = 0;
    long support = 0;
};

// Metric cells whose denominator is zero report 0 and are listed in
// undefined_cells.
struct EvaluationReport {
    ConfusionMatrix confusion;
    long correct = 0;
    long incorrect = 0;
    double accuracy = 0;
    double kappa = 0;
    double mae = 0;
    double rmse = 0;
    double rae = 0;  // fraction, not percent
    double rrse = 0; // fraction, not percent
    std::vector<ClassMetrics> per_class;
    ClassMetrics weighted;
    std::vector<std::string> undefined_cells;
};

struct TooFewInstances : Error {
    TooFewInstances(int k, std::size_t n)
        : Error("cannot build " + std::to_string(k) + " folds from " + std::to_string(n) +
                " instances") {}
};

struct EmptyMatrix : Error {
    EmptyMatrix() : Error("confusion matrix has no counts") {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string &detail) : Error("length mismatch: " + detail) {}
};

struct DegenerateClass : Error {
    explicit DegenerateClass(const std::string &detail)
        : Error("need at least one positive and one negative: " + detail) {}
};

// Disjoint index sets covering the dataset; per-class counts across folds
// differ by at most one. Instances of each class are shuffled with the seed
// and dealt round-robin with a cursor that persists across classes.
std::vector<std::vector<int>> stratified_folds(const Dataset &ds, int k, std::uint64_t seed,
                                               int class_index);

// Everything derivable from counts alone (no score-based columns).
EvaluationReport metrics_from_confusion(const ConfusionMatrix &cm);

struct ProbabilisticErrors {
    double mae = 0;
    double rmse = 0;
    double rae = 0;
    double rrse = 0;
};

// Errors of probability vectors against 0/1 class indicators; the relative
// variants normalize by a priors-only predictor. The two-argument form uses
// the class frequencies of `truths` as those priors.
ProbabilisticErrors probabilistic_errors(const std::vector<int> &truths,
                                         const std::vector<std::vector<double>> &probs);
ProbabilisticErrors probabilistic_errors(const std::vector<int> &truths,
                                         const std::vector<std::vector<double>> &probs,
                                         const std::vector<std::vector<double>> &priors);

struct CurveAreas {
    double roc_area = 0;
    double prc_area = 0;
};

// ROC by rank statistic with half credit for ties; PRC by trapezoid over the
// precision/recall points at every distinct threshold.
CurveAreas roc_prc_area(const std::vector<bool> &truths, const std::vector<double> &scores);

struct LearnerConfig {
    double alpha = 0.5;
    int max_parents = 2;
    int class_index = -1; // -1: attribute named "Class"
};

EvaluationReport cross_validate(const Dataset &ds, int k, std::uint64_t seed,
                                const LearnerConfig &learner = {});

std::string report_to_text(const EvaluationReport &report);
json report_to_json(const EvaluationReport &report);

int resolve_class_index(const Dataset &ds, int configured);

} // namespace droidmark
