#include "droidmark/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "droidmark/rng.hpp"

namespace droidmark {

long ConfusionMatrix::total() const {
    long t = 0;
    for (const auto &row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

long ConfusionMatrix::correct() const {
    long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

int resolve_class_index(const Dataset &ds, int configured) {
    if (configured >= 0) {
        if (static_cast<std::size_t>(configured) >= ds.attributes.size())
            throw Error("class index out of range");
        return configured;
    }
    int idx = ds.attribute_index("Class");
    if (idx < 0) throw Error("dataset has no attribute named 'Class'");
    return idx;
}

std::vector<std::vector<int>> stratified_folds(const Dataset &ds, int k, std::uint64_t seed,
                                               int class_index) {
    std::size_t n = ds.rows.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw TooFewInstances(k, n);

    int classes = static_cast<int>(ds.attributes[class_index].values.size());
    std::vector<std::vector<int>> by_class(classes);
    for (std::size_t i = 0; i < n; ++i) {
        int c = ds.rows[i][class_index];
        if (c == kUnknownValue)
            throw Error("cannot stratify unlabeled instance " + std::to_string(i + 1));
        by_class[c].push_back(static_cast<int>(i));
    }

    Rng rng(seed);
    std::vector<std::vector<int>> folds(k);
    std::size_t cursor = 0; // persists across classes to even out fold sizes
    for (auto &group : by_class) {
        rng.shuffle(group);
        for (int idx : group) {
            folds[cursor % k].push_back(idx);
            ++cursor;
        }
    }
    for (auto &fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

namespace {

double safe_div(double num, double den, const std::string &cell,
                std::vector<std::string> &undefined) {
    if (den == 0) {
        undefined.push_back(cell);
        return 0;
    }
    return num / den;
}

std::string trim_number(double value, int decimals) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << value;
    std::string s = out.str();
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::string fixed_number(double value, int decimals) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << value;
    return out.str();
}

} // namespace

EvaluationReport metrics_from_confusion(const ConfusionMatrix &cm) {
    long total = cm.total();
    if (total == 0) throw EmptyMatrix();
    std::size_t c = cm.counts.size();

    EvaluationReport report;
    report.confusion = cm;
    report.correct = cm.correct();
    report.incorrect = total - report.correct;
    report.accuracy = static_cast<double>(report.correct) / total;

    std::vector<long> row_sum(c, 0), col_sum(c, 0);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            row_sum[i] += cm.counts[i][j];
            col_sum[j] += cm.counts[i][j];
        }
    }

    double p_e = 0;
    for (std::size_t i = 0; i < c; ++i) {
        p_e += static_cast<double>(row_sum[i]) * col_sum[i] / total / total;
    }
    report.kappa = safe_div(report.accuracy - p_e, 1.0 - p_e, "kappa", report.undefined_cells);

    report.per_class.resize(c);
    for (std::size_t i = 0; i < c; ++i) {
        ClassMetrics &m = report.per_class[i];
        double tp = static_cast<double>(cm.counts[i][i]);
        double fn = static_cast<double>(row_sum[i]) - tp;
        double fp = static_cast<double>(col_sum[i]) - tp;
        double tn = static_cast<double>(total) - tp - fn - fp;
        const std::string &name = cm.classes[i];

        m.support = row_sum[i];
        m.tpr = safe_div(tp, tp + fn, "tpr(" + name + ")", report.undefined_cells);
        m.recall = m.tpr;
        m.fpr = safe_div(fp, fp + tn, "fpr(" + name + ")", report.undefined_cells);
        m.precision = safe_div(tp, tp + fp, "precision(" + name + ")", report.undefined_cells);
        m.f_measure = safe_div(2 * m.precision * m.recall, m.precision + m.recall,
                               "f_measure(" + name + ")", report.undefined_cells);
        double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
        if (denom == 0) {
            report.undefined_cells.push_back("mcc(" + name + ")");
            m.mcc = 0;
        } else {
            m.mcc = (tp * tn - fp * fn) / std::sqrt(denom);
        }
    }

    ClassMetrics &w = report.weighted;
    for (std::size_t i = 0; i < c; ++i) {
        const ClassMetrics &m = report.per_class[i];
        double weight = static_cast<double>(m.support) / total;
        w.tpr += weight * m.tpr;
        w.fpr += weight * m.fpr;
        w.precision += weight * m.precision;
        w.recall += weight * m.recall;
        w.f_measure += weight * m.f_measure;
        w.mcc += weight * m.mcc;
        w.support += m.support;
    }
    return report;
}

ProbabilisticErrors probabilistic_errors(const std::vector<int> &truths,
                                         const std::vector<std::vector<double>> &probs) {
    if (truths.size() != probs.size())
        throw LengthMismatch("one probability vector per instance required");
    if (probs.empty()) throw LengthMismatch("no instances");
    std::size_t classes = probs.front().size();
    std::vector<double> prior(classes, 0);
    for (int t : truths) {
        if (t < 0 || static_cast<std::size_t>(t) >= classes)
            throw LengthMismatch("truth label out of range");
        prior[t] += 1.0;
    }
    for (auto &p : prior) p /= static_cast<double>(truths.size());
    std::vector<std::vector<double>> priors(truths.size(), prior);
    return probabilistic_errors(truths, probs, priors);
}

ProbabilisticErrors probabilistic_errors(const std::vector<int> &truths,
                                         const std::vector<std::vector<double>> &probs,
                                         const std::vector<std::vector<double>> &priors) {
    std::size_t n = truths.size();
    if (probs.size() != n || priors.size() != n)
        throw LengthMismatch("one probability vector per instance required");
    if (n == 0) throw LengthMismatch("no instances");
    std::size_t classes = probs.front().size();

    double abs_err = 0, sq_err = 0, abs_base = 0, sq_base = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (probs[i].size() != classes || priors[i].size() != classes)
            throw LengthMismatch("inconsistent class count in instance " + std::to_string(i));
        for (std::size_t j = 0; j < classes; ++j) {
            double target = truths[i] == static_cast<int>(j) ? 1.0 : 0.0;
            double e = probs[i][j] - target;
            double b = priors[i][j] - target;
            abs_err += std::abs(e);
            sq_err += e * e;
            abs_base += std::abs(b);
            sq_base += b * b;
        }
    }

    ProbabilisticErrors out;
    double cells = static_cast<double>(n * classes);
    out.mae = abs_err / cells;
    out.rmse = std::sqrt(sq_err / cells);
    out.rae = abs_base > 0 ? abs_err / abs_base : 0;
    out.rrse = sq_base > 0 ? std::sqrt(sq_err / sq_base) : 0;
    return out;
}

CurveAreas roc_prc_area(const std::vector<bool> &truths, const std::vector<double> &scores) {
    if (truths.size() != scores.size()) throw LengthMismatch("one score per truth required");
    std::size_t n = truths.size();
    long pos = std::count(truths.begin(), truths.end(), true);
    long neg = static_cast<long>(n) - pos;
    if (pos == 0 || neg == 0)
        throw DegenerateClass(std::to_string(pos) + " positives, " + std::to_string(neg) +
                              " negatives");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mann-Whitney with averaged ranks for ties
    double pos_rank_sum = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (truths[order[t]]) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    CurveAreas areas;
    areas.roc_area = (pos_rank_sum - static_cast<double>(pos) * (pos + 1) / 2.0) /
                     (static_cast<double>(pos) * neg);

    // precision/recall staircase from the highest threshold down
    std::reverse(order.begin(), order.end());
    double prev_recall = 0, prev_precision = 1, area = 0;
    long tp = 0, fp = 0;
    bool first = true;
    i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t t = i; t < j; ++t) {
            if (truths[order[t]]) ++tp;
            else ++fp;
        }
        double recall = static_cast<double>(tp) / pos;
        double precision = static_cast<double>(tp) / (tp + fp);
        if (first) {
            prev_precision = precision; // anchor the curve at recall 0
            first = false;
        }
        area += (recall - prev_recall) * (precision + prev_precision) / 2.0;
        prev_recall = recall;
        prev_precision = precision;
        i = j;
    }
    areas.prc_area = area;
    return areas;
}

EvaluationReport cross_validate(const Dataset &ds, int k, std::uint64_t seed,
                                const LearnerConfig &learner) {
    int class_index = resolve_class_index(ds, learner.class_index);
    int classes = static_cast<int>(ds.attributes[class_index].values.size());

    ConfusionMatrix cm;
    cm.classes = ds.attributes[class_index].values;
    cm.counts.assign(classes, std::vector<long>(classes, 0));

    std::vector<int> truths;
    std::vector<std::vector<double>> probs;
    std::vector<std::vector<double>> priors;

    std::vector<int> ordering(ds.attributes.size());
    std::iota(ordering.begin(), ordering.end(), 0);

    auto folds = stratified_folds(ds, k, seed, class_index);
    std::vector<bool> held_out(ds.rows.size(), false);
    for (const auto &fold : folds) {
        std::fill(held_out.begin(), held_out.end(), false);
        for (int idx : fold) held_out[idx] = true;

        Dataset train;
        train.relation = ds.relation;
        train.attributes = ds.attributes;
        for (std::size_t i = 0; i < ds.rows.size(); ++i) {
            if (!held_out[i]) train.rows.push_back(ds.rows[i]);
        }

        auto structure = learn_structure_k2(train, ordering, learner.max_parents);
        BayesNetwork net = fit_parameters(structure, train, learner.alpha, class_index);

        std::vector<double> train_prior(classes, 0);
        for (const auto &row : train.rows) {
            if (row[class_index] == kUnknownValue)
                throw Error("cross-validation requires labeled instances");
            train_prior[row[class_index]] += 1.0;
        }
        for (auto &p : train_prior) p /= static_cast<double>(train.rows.size());

        for (int idx : fold) {
            const auto &row = ds.rows[idx];
            if (row[class_index] == kUnknownValue)
                throw Error("cross-validation requires labeled instances");
            ClassifyResult res = classify(net, row);
            cm.counts[row[class_index]][res.label] += 1;
            truths.push_back(row[class_index]);
            probs.push_back(res.posterior);
            priors.push_back(train_prior);
        }
    }

    EvaluationReport report = metrics_from_confusion(cm);
    ProbabilisticErrors pe = probabilistic_errors(truths, probs, priors);
    report.mae = pe.mae;
    report.rmse = pe.rmse;
    report.rae = pe.rae;
    report.rrse = pe.rrse;

    double total = static_cast<double>(cm.total());
    for (int c = 0; c < classes; ++c) {
        std::vector<bool> is_class;
        std::vector<double> scores;
        is_class.reserve(truths.size());
        scores.reserve(truths.size());
        for (std::size_t i = 0; i < truths.size(); ++i) {
            is_class.push_back(truths[i] == c);
            scores.push_back(probs[i][c]);
        }
        try {
            CurveAreas areas = roc_prc_area(is_class, scores);
            report.per_class[c].roc_area = areas.roc_area;
            report.per_class[c].prc_area = areas.prc_area;
        } catch (const DegenerateClass &) {
            report.undefined_cells.push_back("roc(" + cm.classes[c] + ")");
        }
        double weight = static_cast<double>(report.per_class[c].support) / total;
        report.weighted.roc_area += weight * report.per_class[c].roc_area;
        report.weighted.prc_area += weight * report.per_class[c].prc_area;
    }
    return report;
}

std::string report_to_text(const EvaluationReport &report) {
    std::ostringstream out;
    out << "=== Stratified cross-validation ===\n";
    out << "=== Summary ===\n\n";
    long total = report.confusion.total();
    out << "Correctly Classified Instances      " << report.correct << "    "
        << trim_number(report.accuracy * 100, 4) << " %\n";
    out << "Incorrectly Classified Instances    " << report.incorrect << "    "
        << trim_number((1.0 - report.accuracy) * 100, 4) << " %\n";
    out << "Kappa statistic                     " << trim_number(report.kappa, 4) << "\n";
    out << "Mean absolute error                 " << trim_number(report.mae, 4) << "\n";
    out << "Root mean squared error             " << trim_number(report.rmse, 4) << "\n";
    out << "Relative absolute error             " << trim_number(report.rae * 100, 4) << " %\n";
    out << "Root relative squared error         " << trim_number(report.rrse * 100, 4) << " %\n";
    out << "Total Number of Instances           " << total << "\n";

    out << "\n=== Detailed Accuracy By Class ===\n\n";
    out << "                 TP Rate  FP Rate  Precision  Recall   F-Measure  MCC      "
           "ROC Area  PRC Area  Class\n";
    auto metric_row = [&](const ClassMetrics &m, const std::string &name) {
        out << "                 " << fixed_number(m.tpr, 3) << "    " << fixed_number(m.fpr, 3)
            << "    " << fixed_number(m.precision, 3) << "      " << fixed_number(m.recall, 3)
            << "    " << fixed_number(m.f_measure, 3) << "      " << fixed_number(m.mcc, 3)
            << "    " << fixed_number(m.roc_area, 3) << "     " << fixed_number(m.prc_area, 3)
            << "     " << name << "\n";
    };
    for (std::size_t i = 0; i < report.per_class.size(); ++i) {
        metric_row(report.per_class[i], report.confusion.classes[i]);
    }
    out << "Weighted Avg.    " << fixed_number(report.weighted.tpr, 3) << "    "
        << fixed_number(report.weighted.fpr, 3) << "    "
        << fixed_number(report.weighted.precision, 3) << "      "
        << fixed_number(report.weighted.recall, 3) << "    "
        << fixed_number(report.weighted.f_measure, 3) << "      "
        << fixed_number(report.weighted.mcc, 3) << "    "
        << fixed_number(report.weighted.roc_area, 3) << "     "
        << fixed_number(report.weighted.prc_area, 3) << "\n";

    out << "\n=== Confusion Matrix ===\n\n";
    int width = 2;
    for (const auto &row : report.confusion.counts) {
        for (long v : row) {
            width = std::max(width, static_cast<int>(std::to_string(v).size()));
        }
    }
    out << " ";
    for (std::size_t j = 0; j < report.confusion.classes.size(); ++j) {
        out << std::string(width - 1, ' ') << static_cast<char>('a' + j) << " ";
    }
    out << "  <-- classified as\n";
    for (std::size_t i = 0; i < report.confusion.counts.size(); ++i) {
        out << " ";
        for (long v : report.confusion.counts[i]) {
            std::string s = std::to_string(v);
            out << std::string(width - s.size(), ' ') << s << " ";
        }
        out << "|  " << static_cast<char>('a' + i) << " = " << report.confusion.classes[i]
            << "\n";
    }
    return out.str();
}

json report_to_json(const EvaluationReport &report) {
    json j;
    j["summary"] = {
        {"correct", report.correct},
        {"incorrect", report.incorrect},
        {"accuracy", report.accuracy},
        {"kappa", report.kappa},
        {"mean_absolute_error", report.mae},
        {"root_mean_squared_error", report.rmse},
        {"relative_absolute_error", report.rae},
        {"root_relative_squared_error", report.rrse},
        {"total", report.confusion.total()},
    };
    j["confusion"] = {
        {"classes", report.confusion.classes},
        {"matrix", report.confusion.counts},
    };
    j["per_class"] = json::array();
    auto metrics_json = [](const ClassMetrics &m) {
        return json{
            {"tp_rate", m.tpr},         {"fp_rate", m.fpr},
            {"precision", m.precision}, {"recall", m.recall},
            {"f_measure", m.f_measure}, {"mcc", m.mcc},
            {"roc_area", m.roc_area},   {"prc_area", m.prc_area},
            {"support", m.support},
        };
    };
    for (std::size_t i = 0; i < report.per_class.size(); ++i) {
        json entry = metrics_json(report.per_class[i]);
        entry["class"] = report.confusion.classes[i];
        j["per_class"].push_back(std::move(entry));
    }
    j["weighted_avg"] = metrics_json(report.weighted);
    j["undefined_cells"] = report.undefined_cells;
    return j;
}

} // namespace droidmark
