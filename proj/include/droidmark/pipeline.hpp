#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "droidmark/app_ir.hpp"
#include "droidmark/arff.hpp"
#include "droidmark/bayesnet.hpp"
#include "droidmark/evaluation.hpp"
#include "droidmark/event_sim.hpp"
#include "droidmark/feature_extract.hpp"
#include "droidmark/susi_catalog.hpp"
#include "droidmark/taint_engine.hpp"

namespace droidmark {

struct PipelineConfig {
    std::string catalog_path; // empty: built-in catalog
    std::vector<std::string> system_processes = {
        "com.samsung.ui",
        "com.android.bluetooth",
        "com.sec.imsservice",
        "datapole.rathi.monitor",
    };
    bool alias = true;
    int access_path_k = 2;
    long max_iterations = 10000;
    std::int64_t window_ms = 5000;
    double alpha = 0.5;
    int max_parents = 2;
    int folds = 10;
    std::uint64_t seed = 1;

    AnalysisConfig analysis() const { return {alias, access_path_k, max_iterations}; }
    LearnerConfig learner() const { return {alpha, max_parents, -1}; }
    SourceSinkCatalog catalog() const;
    void validate() const;
};

// key=value config files, '#' comments. Keys mirror the field names:
// catalog, system_processes (comma separated), alias (on|off),
// access_path_k, max_iterations, window_ms, alpha, max_parents, folds, seed.
PipelineConfig load_config_file(const std::string &path);
void apply_config_line(PipelineConfig &config, const std::string &key,
                       const std::string &value);

struct PipelineResult {
    AppModel app;
    std::vector<TaintFlow> flows;
    SuspectList suspects;
    FlowFeatureVector features;
    Dataset dataset;     // labeled monitoring instances
    std::string arff_text;
    BayesNetwork model;  // trained on the full dataset
    ScoreReport scores;
    EvaluationReport report;
};

// analyze -> suspects -> replay -> label -> ARFF round-trip -> learn + fit
// -> cross-validate.
PipelineResult run_pipeline(const AppModel &app, const std::string &trace_text,
                            const PipelineConfig &config);

} // namespace droidmark
