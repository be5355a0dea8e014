#pragma once

#include <string>
#include <vector>

#include "droidmark/app_ir.hpp"
#include "droidmark/json_util.hpp"
#include "droidmark/susi_catalog.hpp"

namespace droidmark {

struct AnalysisConfig {
    bool alias = true;        // backward copy-chain alias pass at field stores
    int access_path_k = 2;    // max field-chain length before widening
    long max_iterations = 10000; // statement-interpretation budget per app
};

// Synthetic per-component driver. Setup and teardown run once in lifecycle
// order; the callback loop set is iterated to a fixpoint in between. Every
// call receives the component's shared context value for each parameter, so
// field state written by one callback is visible to the others.
struct ComponentDriver {
    std::string component;
    std::vector<std::string> setup;         // onCreate/onStart/onResume subset
    std::vector<std::string> callback_loop; // registered callbacks + onReceive
    std::vector<std::string> teardown;      // onPause/onStop/onDestroy subset
};

struct DummyMain {
    std::vector<ComponentDriver> drivers;

    std::vector<std::string> all_callback_methods() const;
};

// One source-to-sink witness. Sites are statement indices within their
// methods; path lists the app methods the value traversed, starting at the
// source's method and ending at the sink's.
struct TaintFlow {
    std::string source_method;
    int source_site = 0;
    std::string sink_method;
    int sink_site = 0;
    std::string source_signature;
    std::string sink_signature;
    std::string source_category;
    std::string sink_category;
    std::vector<std::string> path;
};

struct BudgetExceeded : Error {
    BudgetExceeded(long budget, std::vector<TaintFlow> partial)
        : Error("analysis budget of " + std::to_string(budget) +
                " steps exceeded; partial result is unsound"),
          budget(budget), partial_flows(std::move(partial)) {}
    long budget;
    std::vector<TaintFlow> partial_flows;
};

DummyMain synthesize_dummy_main(const AppModel &app);

// Whole-app taint analysis over the dummy-main drivers: forward propagation
// through copies, field loads/stores, calls and returns, with taint born at
// catalogued source invokes and reported at sink invokes that receive a
// tainted argument. sorted by (source_method, sink_method, sites).
std::vector<TaintFlow> analyze(const AppModel &app, const SourceSinkCatalog &catalog,
                               const AnalysisConfig &config = {});

json flows_to_json(const std::string &app_name, const std::vector<TaintFlow> &flows);
std::vector<TaintFlow> flows_from_json(const json &report);

} // namespace droidmark
