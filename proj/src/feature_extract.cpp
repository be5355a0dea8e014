#include "droidmark/feature_extract.hpp"

#include <algorithm>
#include <set>

namespace droidmark {

FlowFeatureVector::FlowFeatureVector()
    : bits(source_categories().size(), std::vector<int>(sink_categories().size(), 0)) {}

int FlowFeatureVector::set_bit_count() const {
    int n = 0;
    for (const auto &row : bits) {
        for (int b : row) n += b;
    }
    return n;
}

int FlowFeatureVector::bit(const std::string &source_category,
                           const std::string &sink_category) const {
    int i = source_category_index(source_category);
    int j = sink_category_index(sink_category);
    if (i < 0 || j < 0) return 0;
    return bits[i][j];
}

std::vector<std::pair<int, int>> FlowFeatureVector::set_pairs() const {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        for (std::size_t j = 0; j < bits[i].size(); ++j) {
            if (bits[i][j]) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return pairs;
}

FlowFeatureVector build_flow_features(const std::string &app_name,
                                      const std::vector<TaintFlow> &flows,
                                      const SourceSinkCatalog &catalog) {
    FlowFeatureVector features;
    features.app_name = app_name;
    for (const auto &flow : flows) {
        Classification src = catalog.classify(flow.source_signature);
        if (!src.source_category) throw UnclassifiedEndpoint(flow.source_signature);
        Classification snk = catalog.classify(flow.sink_signature);
        if (!snk.sink_category) throw UnclassifiedEndpoint(flow.sink_signature);
        int i = source_category_index(*src.source_category);
        int j = sink_category_index(*snk.sink_category);
        features.bits[i][j] = 1;
    }
    return features;
}

SuspectList extract_suspects(const std::vector<TaintFlow> &flows,
                             const std::vector<std::string> &system_processes) {
    std::set<std::string> names(system_processes.begin(), system_processes.end());
    for (const auto &flow : flows) {
        for (const auto &method : flow.path) {
            std::string cls = class_of_method(method);
            if (!cls.empty()) names.insert(cls);
        }
    }
    return SuspectList(names.begin(), names.end());
}

json features_to_json(const FlowFeatureVector &features) {
    json j;
    j["app"] = features.app_name;
    j["set_bits"] = json::array();
    for (const auto &[i, k] : features.set_pairs()) {
        j["set_bits"].push_back({{"source_category", source_categories()[i]},
                                 {"sink_category", sink_categories()[k]},
                                 {"source_row", i + 1},
                                 {"sink_row", k + 1}});
    }
    j["matrix"] = features.bits;
    return j;
}

Dataset features_to_dataset(const FlowFeatureVector &features) {
    Dataset ds;
    ds.relation = "FlowFeatureVectors";
    const auto &src = source_categories();
    const auto &snk = sink_categories();
    std::vector<int> row;
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < snk.size(); ++j) {
            Attribute attr;
            // duplicated taxonomy rows need positional names to stay unique
            attr.name = "src" + std::to_string(i + 1) + "_" + src[i] + "__snk" +
                        std::to_string(j + 1) + "_" + snk[j];
            attr.values = {"0", "1"};
            ds.attributes.push_back(std::move(attr));
            row.push_back(features.bits[i][j]);
        }
    }
    ds.rows.push_back(std::move(row));
    return ds;
}

} // namespace droidmark
