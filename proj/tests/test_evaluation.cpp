#include "doctest.h"

#include <cmath>
#include <set>

#include "droidmark/evaluation.hpp"
#include "droidmark/event_sim.hpp"
#include "oracles.hpp"

using namespace droidmark;

namespace {

ConfusionMatrix matrix(const std::vector<std::vector<long>> &counts) {
    ConfusionMatrix cm;
    cm.counts = counts;
    for (std::size_t i = 0; i < counts.size(); ++i) cm.classes.push_back("c" + std::to_string(i));
    return cm;
}

} // namespace

TEST_CASE("stratified folds") {
    Dataset ds = generate_dataset(1, 32); // 16/16
    int class_index = 6;

    SUBCASE("32 instances over 10 folds: sizes 4,4,3,... and balanced classes") {
        auto folds = stratified_folds(ds, 10, 1, class_index);
        REQUIRE(folds.size() == 10);
        std::multiset<std::size_t> sizes;
        std::set<int> all;
        for (const auto &fold : folds) {
            sizes.insert(fold.size());
            for (int idx : fold) CHECK(all.insert(idx).second); // disjoint
        }
        CHECK(all.size() == 32);
        CHECK(sizes == std::multiset<std::size_t>{4, 4, 3, 3, 3, 3, 3, 3, 3, 3});

        // per-class counts differ by at most one across folds
        for (int cls = 0; cls <= 1; ++cls) {
            long lo = 32, hi = 0;
            for (const auto &fold : folds) {
                long n = 0;
                for (int idx : fold) {
                    if (ds.rows[idx][class_index] == cls) ++n;
                }
                lo = std::min(lo, n);
                hi = std::max(hi, n);
            }
            CHECK(hi - lo <= 1);
        }
    }
    SUBCASE("k = 1 is the whole set") {
        auto folds = stratified_folds(ds, 1, 1, class_index);
        REQUIRE(folds.size() == 1);
        CHECK(folds[0].size() == 32);
    }
    SUBCASE("k = n is leave-one-out") {
        auto folds = stratified_folds(ds, 32, 1, class_index);
        CHECK(folds.size() == 32);
        for (const auto &fold : folds) CHECK(fold.size() == 1);
    }
    SUBCASE("k beyond n is rejected") {
        CHECK_THROWS_AS(stratified_folds(ds, 33, 1, class_index), TooFewInstances);
        CHECK_THROWS_AS(stratified_folds(ds, 0, 1, class_index), TooFewInstances);
    }
    SUBCASE("same seed, same folds; different seed, different shuffle") {
        auto a = stratified_folds(ds, 10, 42, class_index);
        auto b = stratified_folds(ds, 10, 42, class_index);
        CHECK(a == b);
    }
}

TEST_CASE("confusion metrics reproduce the published two-class example") {
    ConfusionMatrix cm = matrix({{16, 0}, {1, 15}});
    cm.classes = {"Regular", "Malicious"};
    EvaluationReport r = metrics_from_confusion(cm);

    CHECK(r.correct == 31);
    CHECK(r.incorrect == 1);
    CHECK(r.accuracy == doctest::Approx(0.96875).epsilon(1e-12)); // exact
    CHECK(r.kappa == doctest::Approx(0.9375).epsilon(1e-12));     // exact

    CHECK(r.per_class[0].tpr == doctest::Approx(1.000).epsilon(5e-4));
    CHECK(r.per_class[0].fpr == doctest::Approx(0.063).epsilon(5e-3));
    CHECK(std::abs(r.per_class[0].fpr - 0.0625) < 1e-12);
    CHECK(std::abs(r.per_class[0].precision - 0.941) < 5e-4);
    CHECK(std::abs(r.per_class[0].f_measure - 0.970) < 5e-4);
    CHECK(std::abs(r.per_class[0].mcc - 0.939) < 5e-4);

    CHECK(std::abs(r.per_class[1].tpr - 0.938) < 5e-4);
    CHECK(r.per_class[1].fpr == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(r.per_class[1].precision - 1.000) < 5e-4);
    CHECK(std::abs(r.per_class[1].f_measure - 0.968) < 5e-4);
    CHECK(std::abs(r.per_class[1].mcc - 0.939) < 5e-4);

    CHECK(std::abs(r.weighted.tpr - 0.969) < 5e-4);
    CHECK(std::abs(r.weighted.fpr - 0.031) < 5e-4);
    CHECK(std::abs(r.weighted.precision - 0.971) < 5e-4);
}

TEST_CASE("identity confusion matrix is perfect") {
    EvaluationReport r = metrics_from_confusion(matrix({{5, 0, 0}, {0, 7, 0}, {0, 0, 3}}));
    CHECK(r.accuracy == doctest::Approx(1.0));
    CHECK(r.kappa == doctest::Approx(1.0));
    for (const auto &m : r.per_class) {
        CHECK(m.mcc == doctest::Approx(1.0));
        CHECK(m.f_measure == doctest::Approx(1.0));
    }
}

TEST_CASE("kappa is one exactly when the off-diagonal is empty") {
    Rng rng(1312);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<long>> counts(2, std::vector<long>(2, 0));
        for (auto &row : counts) {
            for (auto &cell : row) cell = static_cast<long>(rng.below(6));
        }
        long diag = counts[0][0] + counts[1][1];
        long off = counts[0][1] + counts[1][0];
        long row0 = counts[0][0] + counts[0][1];
        long row1 = counts[1][0] + counts[1][1];
        if (diag + off == 0 || row0 == 0 || row1 == 0) continue; // both classes present
        EvaluationReport r = metrics_from_confusion(matrix(counts));
        CAPTURE(counts[0][0]);
        CAPTURE(counts[0][1]);
        CAPTURE(counts[1][0]);
        CAPTURE(counts[1][1]);
        CHECK((off == 0) == (std::abs(r.kappa - 1.0) < 1e-12));
    }
}

TEST_CASE("random matrices match a direct formula evaluation") {
    Rng rng(90210);
    for (int trial = 0; trial < 300; ++trial) {
        long tp = rng.below(20), fn = rng.below(20), fp = rng.below(20), tn = rng.below(20);
        if (tp + fn + fp + tn == 0) continue;
        EvaluationReport r = metrics_from_confusion(matrix({{tp, fn}, {fp, tn}}));

        double total = static_cast<double>(tp + fn + fp + tn);
        CHECK(r.accuracy == doctest::Approx((tp + tn) / total).epsilon(1e-12));
        double tpr0 = tp + fn > 0 ? tp / double(tp + fn) : 0;
        CHECK(r.per_class[0].tpr == doctest::Approx(tpr0).epsilon(1e-12));
        double prec0 = tp + fp > 0 ? tp / double(tp + fp) : 0;
        CHECK(r.per_class[0].precision == doctest::Approx(prec0).epsilon(1e-12));
        double fpr0 = fp + tn > 0 ? fp / double(fp + tn) : 0;
        CHECK(r.per_class[0].fpr == doctest::Approx(fpr0).epsilon(1e-12));
        double denom = std::sqrt(double(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
        double mcc = denom > 0 ? (double(tp) * tn - double(fp) * fn) / denom : 0;
        CHECK(r.per_class[0].mcc == doctest::Approx(mcc).epsilon(1e-9));
    }
    CHECK_THROWS_AS(metrics_from_confusion(matrix({{0, 0}, {0, 0}})), EmptyMatrix);
}

TEST_CASE("probabilistic errors") {
    SUBCASE("exactly right one-hot predictions have zero error") {
        ProbabilisticErrors e = probabilistic_errors({0, 1, 0}, {{1, 0}, {0, 1}, {1, 0}});
        CHECK(e.mae == doctest::Approx(0.0));
        CHECK(e.rmse == doctest::Approx(0.0));
        CHECK(e.rae == doctest::Approx(0.0));
        CHECK(e.rrse == doctest::Approx(0.0));
    }
    SUBCASE("uniform predictions on balanced data: MAE 0.5, RAE 100%") {
        std::vector<int> truths = {0, 1, 0, 1};
        std::vector<std::vector<double>> probs(4, {0.5, 0.5});
        ProbabilisticErrors e = probabilistic_errors(truths, probs);
        CHECK(e.mae == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(e.rae == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.rrse == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("skewed priors against a hand-computed denominator") {
        // three instances of class0, one of class1: prior = (0.75, 0.25)
        std::vector<int> truths = {0, 0, 0, 1};
        std::vector<std::vector<double>> probs(4, {0.5, 0.5});
        // numerator per instance: |0.5-1| + |0.5-0| = 1.0 -> total 4
        // baseline class0 rows: |0.75-1| + |0.25-0| = 0.5 (x3)
        // baseline class1 row:  |0.75-0| + |0.25-1| = 1.5
        ProbabilisticErrors e = probabilistic_errors(truths, probs);
        CHECK(e.rae == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        double base_sq = 3 * (0.0625 + 0.0625) + (0.5625 + 0.5625);
        CHECK(e.rrse == doctest::Approx(std::sqrt(4 * 0.5 / base_sq)).epsilon(1e-12));
    }
    SUBCASE("length mismatches are rejected") {
        CHECK_THROWS_AS(probabilistic_errors({0, 1}, {{1, 0}}), LengthMismatch);
        CHECK_THROWS_AS(probabilistic_errors({0}, {{1, 0}, {0, 1}}), LengthMismatch);
        CHECK_THROWS_AS(
            probabilistic_errors({0, 1}, {{1, 0}, {0, 1}}, {{1, 0}}), LengthMismatch);
    }
}

TEST_CASE("curve areas") {
    SUBCASE("perfect separation scores 1.000 on both curves") {
        CurveAreas a = roc_prc_area({true, true, false, false}, {0.9, 0.8, 0.2, 0.1});
        CHECK(a.roc_area == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.prc_area == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("constant scores give half the ROC area") {
        CurveAreas a = roc_prc_area({true, false, true, false}, {0.5, 0.5, 0.5, 0.5});
        CHECK(a.roc_area == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(a.prc_area == doctest::Approx(0.5).epsilon(1e-12)); // positive prior
    }
    SUBCASE("degenerate truth vectors are rejected") {
        CHECK_THROWS_AS(roc_prc_area({true, true}, {0.5, 0.1}), DegenerateClass);
        CHECK_THROWS_AS(roc_prc_area({false}, {0.5}), DegenerateClass);
    }
    SUBCASE("matches exhaustive pair counting on random cases") {
        Rng rng(60601);
        for (int trial = 0; trial < 300; ++trial) {
            std::size_t n = 2 + rng.below(20);
            std::vector<bool> truths(n);
            std::vector<double> scores(n);
            bool any_pos = false, any_neg = false;
            for (std::size_t i = 0; i < n; ++i) {
                truths[i] = rng.chance(0.5);
                scores[i] = static_cast<double>(rng.below(6)) / 5.0; // force ties
                (truths[i] ? any_pos : any_neg) = true;
            }
            if (!any_pos || !any_neg) continue;
            double expected = oracle::roc_area_pairwise(truths, scores);
            CHECK(roc_prc_area(truths, scores).roc_area ==
                  doctest::Approx(expected).epsilon(1e-9));
        }
    }
    SUBCASE("ROC is invariant under strictly monotone score transforms") {
        Rng rng(11);
        std::vector<bool> truths;
        std::vector<double> scores, transformed;
        for (int i = 0; i < 40; ++i) {
            truths.push_back(rng.chance(0.4));
            double s = rng.unit();
            scores.push_back(s);
            transformed.push_back(std::exp(3 * s) + 7); // strictly increasing
        }
        double a = roc_prc_area(truths, scores).roc_area;
        double b = roc_prc_area(truths, transformed).roc_area;
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("cross-validation") {
    SUBCASE("perfectly separable labels are learned exactly") {
        // label is a copy of the only informative attribute
        Dataset ds;
        ds.relation = "sep";
        ds.attributes = {{"A", {"0", "1"}}, {"Noise", {"0", "1"}},
                         {"Class", {"Regular", "Malicious"}}};
        Rng rng(5150);
        for (int i = 0; i < 20; ++i) {
            int a = i % 2;
            ds.rows.push_back({a, static_cast<int>(rng.below(2)), a});
        }
        EvaluationReport r = cross_validate(ds, 2, 1);
        CHECK(r.accuracy == doctest::Approx(1.0));
        CHECK(r.per_class[0].roc_area == doctest::Approx(1.0));
    }
    SUBCASE("labels independent of attributes give near-zero kappa") {
        Dataset ds;
        ds.relation = "noise";
        ds.attributes = {{"A", {"0", "1"}}, {"B", {"0", "1"}},
                         {"Class", {"Regular", "Malicious"}}};
        Rng rng(1999);
        for (int i = 0; i < 200; ++i) {
            ds.rows.push_back({static_cast<int>(rng.below(2)),
                               static_cast<int>(rng.below(2)),
                               static_cast<int>(rng.below(2))});
        }
        EvaluationReport r = cross_validate(ds, 10, 1);
        CHECK(std::abs(r.kappa) < 0.3);
    }
    SUBCASE("rule-labeled monitoring data is learned to high accuracy") {
        Dataset ds = generate_dataset(1, 32);
        EvaluationReport r = cross_validate(ds, 10, 1);
        CHECK(r.accuracy >= 0.90);
        CHECK(r.confusion.total() == 32);
    }
    SUBCASE("same seed is bit-reproducible") {
        Dataset ds = generate_dataset(1, 32);
        std::string a = dump_json(report_to_json(cross_validate(ds, 10, 1)));
        std::string b = dump_json(report_to_json(cross_validate(ds, 10, 1)));
        CHECK(a == b);
    }
    SUBCASE("unlabeled data is rejected") {
        Dataset ds = generate_dataset(1, 8);
        ds.rows[3][6] = kUnknownValue;
        CHECK_THROWS_AS(cross_validate(ds, 2, 1), Error);
    }
}

TEST_CASE("report rendering carries the headline numbers") {
    ConfusionMatrix cm = matrix({{16, 0}, {1, 15}});
    cm.classes = {"Regular", "Malicious"};
    EvaluationReport r = metrics_from_confusion(cm);
    std::string text = report_to_text(r);
    CHECK(text.find("=== Summary ===") != std::string::npos);
    CHECK(text.find("=== Confusion Matrix ===") != std::string::npos);
    CHECK(text.find("=== Detailed Accuracy By Class ===") != std::string::npos);
    CHECK(text.find("96.875 %") != std::string::npos);
    CHECK(text.find("0.9375") != std::string::npos);
    CHECK(text.find("16  0 |") != std::string::npos);
    CHECK(text.find(" 1 15 |") != std::string::npos);

    json j = report_to_json(r);
    CHECK(j.at("summary").at("correct") == 31);
    CHECK(j.at("summary").at("kappa") == doctest::Approx(0.9375));
    CHECK(j.at("confusion").at("matrix")[1][0] == 1);
}
