#include "droidmark/pipeline.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace droidmark {

namespace {

std::string trim(const std::string &s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

long parse_long(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception &) {
        throw Error("config key '" + key + "' needs an integer, got '" + value + "'");
    }
}

double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception &) {
        throw Error("config key '" + key + "' needs a number, got '" + value + "'");
    }
}

} // namespace

SourceSinkCatalog PipelineConfig::catalog() const {
    if (catalog_path.empty()) return builtin_catalog();
    return load_catalog(catalog_path);
}

void PipelineConfig::validate() const {
    if (access_path_k < 1) throw Error("access_path_k must be >= 1");
    if (max_iterations < 1) throw Error("max_iterations must be >= 1");
    if (window_ms < 1) throw Error("window_ms must be >= 1");
    if (alpha < 0) throw Error("alpha must be >= 0");
    if (max_parents < 0) throw Error("max_parents must be >= 0");
    if (folds < 1) throw Error("folds must be >= 1");
}

void apply_config_line(PipelineConfig &config, const std::string &key,
                       const std::string &value) {
    if (key == "catalog") config.catalog_path = value;
    else if (key == "system_processes") config.system_processes = split_list(value);
    else if (key == "alias") {
        if (value == "on") config.alias = true;
        else if (value == "off") config.alias = false;
        else throw Error("config key 'alias' must be on or off");
    } else if (key == "access_path_k") config.access_path_k = static_cast<int>(parse_long(key, value));
    else if (key == "max_iterations") config.max_iterations = parse_long(key, value);
    else if (key == "window_ms") config.window_ms = parse_long(key, value);
    else if (key == "alpha") config.alpha = parse_double(key, value);
    else if (key == "max_parents") config.max_parents = static_cast<int>(parse_long(key, value));
    else if (key == "folds") config.folds = static_cast<int>(parse_long(key, value));
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_long(key, value));
    else throw Error("unknown config key '" + key + "'");
}

PipelineConfig load_config_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path);
    PipelineConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + " is not key=value");
        apply_config_line(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    config.validate();
    return config;
}

PipelineResult run_pipeline(const AppModel &app, const std::string &trace_text,
                            const PipelineConfig &config) {
    config.validate();
    const SourceSinkCatalog &catalog = config.catalog();

    PipelineResult result;
    result.app = app;
    result.flows = analyze(app, catalog, config.analysis());
    result.suspects = extract_suspects(result.flows, config.system_processes);
    result.features = build_flow_features(app.app_name, result.flows, catalog);

    std::vector<MonitorInstance> instances =
        replay_trace(trace_text, result.suspects, config.window_ms);
    for (auto &inst : instances) inst.label = label_instance(inst);

    Dataset labeled = instances_to_dataset(instances);
    result.arff_text = emit_arff(labeled);
    result.dataset = parse_arff(result.arff_text); // exchange through the wire format

    int class_index = resolve_class_index(result.dataset, -1);
    std::vector<int> ordering(result.dataset.attributes.size());
    std::iota(ordering.begin(), ordering.end(), 0);
    auto structure = learn_structure_k2(result.dataset, ordering, config.max_parents);
    result.model = fit_parameters(structure, result.dataset, config.alpha, class_index);
    result.scores = score_network(result.model, result.dataset);

    result.report = cross_validate(result.dataset, config.folds, config.seed, config.learner());
    return result;
}

} // namespace droidmark
