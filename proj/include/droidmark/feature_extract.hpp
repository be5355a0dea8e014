#pragma once

#include <string>
#include <vector>

#include "droidmark/arff.hpp"
#include "droidmark/susi_catalog.hpp"
#include "droidmark/taint_engine.hpp"

namespace droidmark {

// Binary matrix over the category taxonomy: bit (i, j) is set when some flow
// leaks data from source category row i into sink category row j.
struct FlowFeatureVector {
    std::string app_name;
    std::vector<std::vector<int>> bits; // 17 x 19, values 0/1

    FlowFeatureVector();
    int set_bit_count() const;
    int bit(const std::string &source_category, const std::string &sink_category) const;
    // (source row, sink row) pairs of set bits, row-major order
    std::vector<std::pair<int, int>> set_pairs() const;
};

struct UnclassifiedEndpoint : Error {
    explicit UnclassifiedEndpoint(const std::string &signature)
        : Error("flow endpoint does not classify under the catalog: " + signature),
          signature(signature) {}
    std::string signature;
};

using SuspectList = std::vector<std::string>;

FlowFeatureVector build_flow_features(const std::string &app_name,
                                      const std::vector<TaintFlow> &flows,
                                      const SourceSinkCatalog &catalog);

// Class names on any flow path plus the configured always-monitored system
// processes, deduplicated and sorted.
SuspectList extract_suspects(const std::vector<TaintFlow> &flows,
                             const std::vector<std::string> &system_processes = {});

json features_to_json(const FlowFeatureVector &features);

// One-row dataset with a {0,1} attribute per category pair.
Dataset features_to_dataset(const FlowFeatureVector &features);

} // namespace droidmark
