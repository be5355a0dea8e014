// droidmark: taint-analysis driven malware triage pipeline.
//
// Subcommands mirror the pipeline stages so each stage can run standalone:
//   analyze, features, simulate, arff convert, train, classify, evaluate,
//   pipeline, catalog validate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"

#include "droidmark/pipeline.hpp"

using namespace droidmark;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

void emit(const std::string &output_path, const std::string &content) {
    if (output_path.empty()) std::cout << content;
    else write_file(output_path, content);
}

struct CommonOpts {
    std::string config_file;
    std::string out_format = "text";
    PipelineConfig config;

    // flag storage; applied only when the flag was passed
    std::string catalog;
    std::string alias;
    std::string system_processes;
    int access_path_k = 2;
    long max_iterations = 10000;
    long window_ms = 5000;
    double alpha = 0.5;
    int max_parents = 2;
    int folds = 10;
    long seed = 1;
};

// Config file first, explicit flags second.
void add_common(CLI::App *cmd, CommonOpts &opts) {
    cmd->add_option("--config", opts.config_file, "key=value config file");
    cmd->add_option("--out", opts.out_format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--catalog", opts.catalog, "source/sink catalog TSV");
    cmd->add_option("--alias", opts.alias, "alias pass: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--system-processes", opts.system_processes,
                    "comma-separated always-monitored processes");
    cmd->add_option("--k", opts.access_path_k, "max access-path length");
    cmd->add_option("--max-iterations", opts.max_iterations, "analysis step budget");
    cmd->add_option("--window-ms", opts.window_ms, "trace bucketing window");
    cmd->add_option("--alpha", opts.alpha, "CPT smoothing");
    cmd->add_option("--max-parents", opts.max_parents, "parent limit for structure search");
    cmd->add_option("--folds", opts.folds, "cross-validation folds");
    cmd->add_option("--seed", opts.seed, "RNG seed");
}

PipelineConfig resolve_config(const CLI::App *cmd, CommonOpts &opts) {
    PipelineConfig config;
    if (!opts.config_file.empty()) config = load_config_file(opts.config_file);
    auto passed = [&](const std::string &name) { return cmd->count(name) > 0; };
    if (passed("--catalog")) config.catalog_path = opts.catalog;
    if (passed("--alias")) config.alias = opts.alias == "on";
    if (passed("--system-processes")) {
        config.system_processes.clear();
        std::istringstream in(opts.system_processes);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (!item.empty()) config.system_processes.push_back(item);
        }
    }
    if (passed("--k")) config.access_path_k = opts.access_path_k;
    if (passed("--max-iterations")) config.max_iterations = opts.max_iterations;
    if (passed("--window-ms")) config.window_ms = opts.window_ms;
    if (passed("--alpha")) config.alpha = opts.alpha;
    if (passed("--max-parents")) config.max_parents = opts.max_parents;
    if (passed("--folds")) config.folds = opts.folds;
    if (passed("--seed")) config.seed = static_cast<std::uint64_t>(opts.seed);
    config.validate();
    return config;
}

SuspectList suspects_for(const AppModel &app, const PipelineConfig &config,
                         std::vector<TaintFlow> *flows_out = nullptr) {
    auto flows = analyze(app, config.catalog(), config.analysis());
    auto suspects = extract_suspects(flows, config.system_processes);
    if (flows_out) *flows_out = std::move(flows);
    return suspects;
}

int cmd_analyze_one(const std::string &path, const PipelineConfig &config,
                    const std::string &out_format, const std::string &output) {
    AppModel app = load_app(path);
    std::vector<TaintFlow> flows;
    SuspectList suspects;
    bool unsound = false;
    try {
        suspects = suspects_for(app, config, &flows);
    } catch (const BudgetExceeded &e) {
        flows = e.partial_flows;
        suspects = extract_suspects(flows, config.system_processes);
        unsound = true;
        std::cerr << "error: " << e.what() << "\n";
    }

    json report = flows_to_json(app.app_name, flows);
    if (unsound) report["unsound"] = true;
    std::string flows_path = output.empty() ? "flows.json" : output;
    write_file(flows_path, dump_json(report));

    if (out_format == "json") {
        json j;
        j["app"] = app.app_name;
        j["flows_file"] = flows_path;
        j["flow_count"] = flows.size();
        j["suspects"] = suspects;
        if (unsound) j["unsound"] = true;
        std::cout << dump_json(j);
    } else {
        std::cout << "app: " << app.app_name << "\n";
        std::cout << "flows: " << flows.size() << " -> " << flows_path << "\n";
        std::cout << "suspects (" << suspects.size() << "):\n";
        for (const auto &s : suspects) std::cout << "  " << s << "\n";
    }
    return unsound ? 2 : 0;
}

std::string score_block(const ScoreReport &scores) {
    std::ostringstream out;
    out.precision(14);
    out << "LogScore Bayes: " << scores.bayes << "\n";
    out << "LogScore BDeu: " << scores.bdeu << "\n";
    out << "LogScore MDL: " << scores.mdl << "\n";
    out << "LogScore ENTROPY: " << scores.entropy << "\n";
    out << "LogScore AIC: " << scores.aic << "\n";
    return out.str();
}

json scores_to_json(const ScoreReport &scores) {
    return json{
        {"bayes", scores.bayes}, {"bdeu", scores.bdeu},       {"mdl", scores.mdl},
        {"entropy", scores.entropy}, {"aic", scores.aic},
        {"parameter_count", scores.parameter_count},
    };
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"droidmark: lifecycle-aware taint analysis with a Bayesian-network classifier"};
    app.require_subcommand(1);

    // analyze
    auto *analyze_cmd = app.add_subcommand("analyze", "taint-analyze an IR app");
    CommonOpts analyze_opts;
    std::string analyze_input, analyze_dir, analyze_output;
    analyze_cmd->add_option("app", analyze_input, "IR file");
    analyze_cmd->add_option("--dir", analyze_dir, "analyze every .ir file in a directory");
    analyze_cmd->add_option("--output", analyze_output, "flow report path (default flows.json)");
    add_common(analyze_cmd, analyze_opts);

    // features
    auto *features_cmd = app.add_subcommand("features", "category-pair feature matrix");
    CommonOpts features_opts;
    std::string features_input, features_arff;
    features_cmd->add_option("app", features_input, "IR file")->required();
    features_cmd->add_option("--arff", features_arff, "also write the one-row ARFF form");
    add_common(features_cmd, features_opts);

    // simulate
    auto *simulate_cmd = app.add_subcommand("simulate", "replay a monitoring trace");
    CommonOpts simulate_opts;
    std::string simulate_trace, simulate_app, simulate_suspects, simulate_output;
    bool simulate_label = false;
    simulate_cmd->add_option("trace", simulate_trace, "trace CSV")->required();
    simulate_cmd->add_option("--app", simulate_app, "IR file to derive suspects from");
    simulate_cmd->add_option("--suspects", simulate_suspects, "suspect list file, one per line");
    simulate_cmd->add_flag("--label", simulate_label, "apply the ground-truth labeling rule");
    simulate_cmd->add_option("--output", simulate_output, "write result here instead of stdout");
    add_common(simulate_cmd, simulate_opts);

    // arff convert
    auto *arff_cmd = app.add_subcommand("arff", "dataset format utilities");
    auto *convert_cmd = arff_cmd->add_subcommand("convert", "convert between .arff and .json");
    std::string convert_input, convert_to, convert_out_fmt, convert_output;
    convert_cmd->add_option("input", convert_input, "input file (.arff or .json)")->required();
    convert_cmd->add_option("--to", convert_to, "target format: arff|json")
        ->check(CLI::IsMember({"arff", "json"}));
    convert_cmd->add_option("--out", convert_out_fmt, "output format: text (ARFF) | json")
        ->check(CLI::IsMember({"text", "json"}));
    convert_cmd->add_option("--output", convert_output, "write result here instead of stdout");

    // train
    auto *train_cmd = app.add_subcommand("train", "learn structure and fit parameters");
    CommonOpts train_opts;
    std::string train_input, train_output, train_class_attr = "Class";
    train_cmd->add_option("data", train_input, "labeled ARFF dataset")->required();
    train_cmd->add_option("--output", train_output, "network JSON path");
    train_cmd->add_option("--class-attr", train_class_attr, "class attribute name");
    add_common(train_cmd, train_opts);

    // classify
    auto *classify_cmd = app.add_subcommand("classify", "predict with a trained network");
    CommonOpts classify_opts;
    std::string classify_input, classify_net;
    classify_cmd->add_option("data", classify_input, "ARFF dataset")->required();
    classify_cmd->add_option("--net", classify_net, "network JSON")->required();
    add_common(classify_cmd, classify_opts);

    // evaluate
    auto *evaluate_cmd = app.add_subcommand("evaluate", "stratified cross-validation");
    CommonOpts evaluate_opts;
    std::string evaluate_input, evaluate_class_attr = "Class";
    evaluate_cmd->add_option("data", evaluate_input, "labeled ARFF dataset")->required();
    evaluate_cmd->add_option("--class-attr", evaluate_class_attr, "class attribute name");
    add_common(evaluate_cmd, evaluate_opts);

    // pipeline
    auto *pipeline_cmd = app.add_subcommand("pipeline", "full analyze-to-evaluation run");
    CommonOpts pipeline_opts;
    std::string pipeline_app, pipeline_trace, pipeline_arff_out;
    pipeline_cmd->add_option("app", pipeline_app, "IR file")->required();
    pipeline_cmd->add_option("trace", pipeline_trace, "trace CSV")->required();
    pipeline_cmd->add_option("--arff-out", pipeline_arff_out, "write the labeled dataset here");
    add_common(pipeline_cmd, pipeline_opts);

    // catalog validate
    auto *catalog_cmd = app.add_subcommand("catalog", "catalog utilities");
    auto *validate_cmd = catalog_cmd->add_subcommand("validate", "validate a catalog TSV");
    std::string validate_input, validate_out_format = "text";
    validate_cmd->add_option("file", validate_input, "catalog TSV")->required();
    validate_cmd->add_option("--out", validate_out_format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems are input errors
    }

    try {
        if (analyze_cmd->parsed()) {
            PipelineConfig config = resolve_config(analyze_cmd, analyze_opts);
            if (!analyze_dir.empty()) {
                std::vector<std::filesystem::path> inputs;
                for (const auto &entry : std::filesystem::directory_iterator(analyze_dir)) {
                    if (entry.path().extension() == ".ir") inputs.push_back(entry.path());
                }
                std::sort(inputs.begin(), inputs.end());
                if (inputs.empty()) throw Error("no .ir files in " + analyze_dir);
                int rc = 0;
                for (const auto &input : inputs) {
                    std::string out = input.string() + ".flows.json";
                    rc = std::max(rc, cmd_analyze_one(input.string(), config,
                                                      analyze_opts.out_format, out));
                }
                return rc;
            }
            if (analyze_input.empty()) throw Error("need an IR file or --dir");
            return cmd_analyze_one(analyze_input, config, analyze_opts.out_format,
                                   analyze_output);
        }

        if (features_cmd->parsed()) {
            PipelineConfig config = resolve_config(features_cmd, features_opts);
            AppModel model = load_app(features_input);
            auto flows = analyze(model, config.catalog(), config.analysis());
            FlowFeatureVector features =
                build_flow_features(model.app_name, flows, config.catalog());
            if (!features_arff.empty())
                write_file(features_arff, emit_arff(features_to_dataset(features)));
            if (features_opts.out_format == "json") {
                std::cout << dump_json(features_to_json(features));
            } else {
                std::cout << "app: " << features.app_name << "\n";
                std::cout << "set bits: " << features.set_bit_count() << " of "
                          << source_categories().size() * sink_categories().size() << "\n";
                for (const auto &[i, j] : features.set_pairs()) {
                    std::cout << "  " << source_categories()[i] << " -> "
                              << sink_categories()[j] << "\n";
                }
            }
            return 0;
        }

        if (simulate_cmd->parsed()) {
            PipelineConfig config = resolve_config(simulate_cmd, simulate_opts);
            SuspectList suspects;
            if (!simulate_app.empty()) {
                suspects = suspects_for(load_app(simulate_app), config);
            } else if (!simulate_suspects.empty()) {
                std::istringstream in(read_file(simulate_suspects));
                std::string line;
                while (std::getline(in, line)) {
                    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                        line.pop_back();
                    if (!line.empty() && line[0] != '#') suspects.push_back(line);
                }
            } else {
                throw Error("need --app or --suspects to know what to monitor");
            }
            auto instances =
                replay_trace(read_file(simulate_trace), suspects, config.window_ms);
            if (simulate_label) {
                for (auto &inst : instances) inst.label = label_instance(inst);
            }
            Dataset ds = instances_to_dataset(instances);
            std::string content = simulate_opts.out_format == "json"
                                      ? dump_json(dataset_to_json(ds))
                                      : emit_arff(ds);
            emit(simulate_output, content);
            return 0;
        }

        if (convert_cmd->parsed()) {
            std::string text = read_file(convert_input);
            std::size_t first = text.find_first_not_of(" \t\r\n");
            bool json_input = first != std::string::npos && text[first] == '{';
            Dataset ds = json_input ? dataset_from_json(json::parse(text)) : parse_arff(text);
            std::string target = convert_to;
            if (target.empty() && !convert_out_fmt.empty())
                target = convert_out_fmt == "json" ? "json" : "arff";
            if (target.empty()) target = json_input ? "arff" : "json";
            emit(convert_output,
                 target == "json" ? dump_json(dataset_to_json(ds)) : emit_arff(ds));
            return 0;
        }

        if (train_cmd->parsed()) {
            PipelineConfig config = resolve_config(train_cmd, train_opts);
            Dataset ds = load_arff(train_input);
            int class_index = ds.attribute_index(train_class_attr);
            if (class_index < 0) throw Error("no attribute named " + train_class_attr);
            std::vector<int> ordering(ds.attributes.size());
            std::iota(ordering.begin(), ordering.end(), 0);
            auto structure = learn_structure_k2(ds, ordering, config.max_parents);
            BayesNetwork net = fit_parameters(structure, ds, config.alpha, class_index);
            ScoreReport scores = score_network(net, ds);
            if (!train_output.empty()) write_file(train_output, dump_json(network_to_json(net)));
            if (train_opts.out_format == "json") {
                json j;
                j["network"] = network_to_json(net);
                j["scores"] = scores_to_json(scores);
                std::cout << dump_json(j);
            } else {
                std::cout << "Bayes Network Classifier\n";
                std::cout << "#attributes=" << ds.attributes.size()
                          << " #classindex=" << class_index << "\n";
                std::cout << "Network structure (nodes followed by parents)\n";
                std::cout << structure_to_text(net);
                std::cout << score_block(scores);
                if (!train_output.empty())
                    std::cout << "network written to " << train_output << "\n";
            }
            return 0;
        }

        if (classify_cmd->parsed()) {
            Dataset ds = load_arff(classify_input);
            BayesNetwork net = network_from_json(json::parse(read_file(classify_net)));
            if (net.class_index < 0 ||
                static_cast<std::size_t>(net.class_index) >= ds.attributes.size())
                throw Error("network class index does not fit the dataset");
            const Variable &class_var = net.variables[net.class_index];
            json predictions = json::array();
            for (std::size_t i = 0; i < ds.rows.size(); ++i) {
                ClassifyResult res = classify(net, align_row(net, ds, ds.rows[i]));
                json p;
                p["row"] = i + 1;
                p["label"] = class_var.values[res.label];
                p["posterior"] = res.posterior;
                predictions.push_back(std::move(p));
            }
            if (classify_opts.out_format == "json") {
                std::cout << dump_json(json{{"predictions", predictions}});
            } else {
                for (const auto &p : predictions) {
                    std::cout << "row " << p["row"] << ": " << p["label"].get<std::string>()
                              << "  posterior=[";
                    const auto &post = p["posterior"];
                    for (std::size_t c = 0; c < post.size(); ++c) {
                        if (c) std::cout << ", ";
                        std::cout << post[c].get<double>();
                    }
                    std::cout << "]\n";
                }
            }
            return 0;
        }

        if (evaluate_cmd->parsed()) {
            PipelineConfig config = resolve_config(evaluate_cmd, evaluate_opts);
            Dataset ds = load_arff(evaluate_input);
            LearnerConfig learner = config.learner();
            learner.class_index = ds.attribute_index(evaluate_class_attr);
            if (learner.class_index < 0)
                throw Error("no attribute named " + evaluate_class_attr);
            EvaluationReport report =
                cross_validate(ds, config.folds, config.seed, learner);
            if (evaluate_opts.out_format == "json")
                std::cout << dump_json(report_to_json(report));
            else
                std::cout << report_to_text(report);
            return 0;
        }

        if (pipeline_cmd->parsed()) {
            PipelineConfig config = resolve_config(pipeline_cmd, pipeline_opts);
            AppModel model = load_app(pipeline_app);
            PipelineResult result =
                run_pipeline(model, read_file(pipeline_trace), config);
            if (!pipeline_arff_out.empty()) write_file(pipeline_arff_out, result.arff_text);
            if (pipeline_opts.out_format == "json") {
                json j;
                j["app"] = model.app_name;
                j["suspects"] = result.suspects;
                j["flows"] = flows_to_json(model.app_name, result.flows)["flows"];
                j["instances"] = result.dataset.rows.size();
                j["scores"] = scores_to_json(result.scores);
                j["report"] = report_to_json(result.report);
                std::cout << dump_json(j);
            } else {
                std::cout << "=== Run information ===\n\n";
                std::cout << "Relation:    " << result.dataset.relation << "\n";
                std::cout << "Instances:   " << result.dataset.rows.size() << "\n";
                std::cout << "Attributes:  " << result.dataset.attributes.size() << "\n";
                std::cout << "Test mode:   " << config.folds
                          << "-fold cross-validation (seed " << config.seed << ")\n\n";
                std::cout << "=== Classifier model (full training set) ===\n\n";
                std::cout << "Bayes Network Classifier\n";
                std::cout << "Network structure (nodes followed by parents)\n";
                std::cout << structure_to_text(result.model);
                std::cout << score_block(result.scores) << "\n";
                std::cout << report_to_text(result.report);
            }
            return 0;
        }

        if (validate_cmd->parsed()) {
            SourceSinkCatalog catalog = load_catalog(validate_input);
            if (validate_out_format == "json") {
                json j;
                j["entries"] = catalog.size();
                j["sources"] = catalog.sources().size();
                j["sinks"] = catalog.sinks().size();
                std::cout << dump_json(j);
            } else {
                std::cout << "ok: " << catalog.size() << " entries ("
                          << catalog.sources().size() << " sources, "
                          << catalog.sinks().size() << " sinks)\n";
            }
            return 0;
        }

        throw Error("no subcommand given");
    } catch (const BudgetExceeded &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
