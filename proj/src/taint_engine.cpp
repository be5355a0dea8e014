#include "droidmark/taint_engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace droidmark {

namespace {

using Chain = std::vector<std::string>;

struct FactKey {
    std::string root;
    Chain chain;
    std::string origin_method;
    int origin_site;

    auto operator<=>(const FactKey &) const = default;
};

struct FactVal {
    std::string signature;
    std::string category;
    std::vector<std::string> path; // app methods traversed; first = origin_method
};

using FactSet = std::map<FactKey, FactVal>;

struct MethodResult {
    FactSet returned;                  // rooted at the returned local
    std::vector<FactSet> param_effects; // per param: facts added to the argument object
};

void append_path(std::vector<std::string> &path, const std::string &method) {
    if (method.empty()) return; // synthetic driver frame stays out of witnesses
    if (!path.empty() && path.back() == method) return;
    path.push_back(method);
}

std::vector<FactKey> keys_of(const FactSet &facts) {
    std::vector<FactKey> keys;
    keys.reserve(facts.size());
    for (const auto &[k, v] : facts) keys.push_back(k);
    return keys;
}

bool same_shape(const MethodResult &a, const MethodResult &b) {
    if (keys_of(a.returned) != keys_of(b.returned)) return false;
    if (a.param_effects.size() != b.param_effects.size()) return false;
    for (std::size_t i = 0; i < a.param_effects.size(); ++i) {
        if (keys_of(a.param_effects[i]) != keys_of(b.param_effects[i])) return false;
    }
    return true;
}

std::string pattern_key(const std::string &method, const FactSet &init) {
    std::ostringstream out;
    out << method;
    for (const auto &[k, v] : init) {
        out << '|' << k.root;
        for (const auto &f : k.chain) out << '.' << f;
        out << '@' << k.origin_method << ':' << k.origin_site;
    }
    return out.str();
}

struct ActiveCall {
    MethodResult assumed;
    bool used = false;
};

using FlowKey = std::tuple<std::string, std::string, int, int>; // src_m, snk_m, src_site, snk_site

struct Interpreter {
    const AppModel &app;
    const SourceSinkCatalog &catalog;
    const AnalysisConfig &config;

    long steps = 0;
    std::map<FlowKey, TaintFlow> flows;
    std::map<std::string, ActiveCall> active;

    Interpreter(const AppModel &app, const SourceSinkCatalog &catalog,
                const AnalysisConfig &config)
        : app(app), catalog(catalog), config(config) {}

    std::vector<TaintFlow> sorted_flows() const {
        std::vector<TaintFlow> out;
        out.reserve(flows.size());
        for (const auto &[k, f] : flows) out.push_back(f);
        return out;
    }

    void tick() {
        if (++steps > config.max_iterations)
            throw BudgetExceeded(config.max_iterations, sorted_flows());
    }

    void record_flow(const FactKey &key, const FactVal &val, const std::string &sink_method,
                     int sink_site, const std::string &sink_signature,
                     const std::string &sink_category) {
        FlowKey fk{key.origin_method, sink_method, key.origin_site, sink_site};
        if (flows.count(fk)) return;
        TaintFlow flow;
        flow.source_method = key.origin_method;
        flow.source_site = key.origin_site;
        flow.sink_method = sink_method;
        flow.sink_site = sink_site;
        flow.source_signature = val.signature;
        flow.source_category = val.category;
        flow.sink_signature = sink_signature;
        flow.sink_category = sink_category;
        flow.path = val.path;
        flows.emplace(fk, std::move(flow));
    }

    // Facts rooted at `from`, re-rooted onto `to` in the frame of `method`.
    static void rebase_into(FactSet &dst, const FactSet &src, const std::string &from,
                            const std::string &to, const std::string &method) {
        for (const auto &[k, v] : src) {
            if (k.root != from) continue;
            FactKey nk{to, k.chain, k.origin_method, k.origin_site};
            if (dst.count(nk)) continue;
            FactVal nv = v;
            append_path(nv.path, method);
            dst.emplace(std::move(nk), std::move(nv));
        }
    }

    static void kill_root(FactSet &facts, const std::string &root) {
        std::erase_if(facts, [&](const auto &entry) { return entry.first.root == root; });
    }

    MethodResult call(const std::string &name, const FactSet &init) {
        std::string key = pattern_key(name, init);
        if (auto it = active.find(key); it != active.end()) {
            it->second.used = true;
            return it->second.assumed;
        }
        ActiveCall fresh;
        fresh.assumed.param_effects.resize(app.methods.at(name).params.size());
        active.emplace(key, std::move(fresh));
        MethodResult result;
        while (true) {
            result = interpret_body(name, init);
            ActiveCall &entry = active.at(key);
            if (!entry.used || same_shape(result, entry.assumed)) break;
            entry.assumed = result; // recursion: iterate until the summary is stable
        }
        active.erase(key);
        return result;
    }

    // Locals that alias `base` through copy statements preceding `upto`.
    std::set<std::string> alias_closure(const MethodBody &body, std::size_t upto,
                                        const std::string &base) {
        std::set<std::string> aliases{base};
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t j = 0; j < upto; ++j) {
                const Statement &s = body.statements[j];
                if (s.kind != Statement::Kind::Copy) continue;
                if (aliases.count(s.dst) && !aliases.count(s.src)) {
                    aliases.insert(s.src);
                    changed = true;
                }
                if (aliases.count(s.src) && !aliases.count(s.dst)) {
                    aliases.insert(s.dst);
                    changed = true;
                }
            }
        }
        return aliases;
    }

    MethodResult interpret_body(const std::string &method, const FactSet &init) {
        const MethodBody &body = app.methods.at(method);
        FactSet state = init;
        std::set<std::string> rebound;
        MethodResult result;
        result.param_effects.resize(body.params.size());

        auto note_rebound = [&](const std::string &dst) {
            for (const auto &p : body.params) {
                if (p == dst) rebound.insert(dst);
            }
        };

        bool returned = false;
        for (std::size_t i = 0; i < body.statements.size() && !returned; ++i) {
            tick();
            const Statement &stmt = body.statements[i];
            switch (stmt.kind) {
            case Statement::Kind::Copy: {
                FactSet gen;
                rebase_into(gen, state, stmt.src, stmt.dst, "");
                kill_root(state, stmt.dst);
                note_rebound(stmt.dst);
                state.insert(gen.begin(), gen.end());
                break;
            }
            case Statement::Kind::LoadField: {
                FactSet gen;
                for (const auto &[k, v] : state) {
                    if (k.root != stmt.src) continue;
                    if (k.chain.empty()) {
                        // whole object tainted: every field read is tainted
                        gen.emplace(FactKey{stmt.dst, {}, k.origin_method, k.origin_site}, v);
                    } else if (k.chain.front() == stmt.field) {
                        Chain rest(k.chain.begin() + 1, k.chain.end());
                        gen.emplace(FactKey{stmt.dst, rest, k.origin_method, k.origin_site}, v);
                    }
                }
                kill_root(state, stmt.dst);
                note_rebound(stmt.dst);
                state.insert(gen.begin(), gen.end());
                break;
            }
            case Statement::Kind::StoreField: {
                FactSet gen;
                for (const auto &[k, v] : state) {
                    if (k.root != stmt.src) continue;
                    Chain chain;
                    chain.push_back(stmt.field);
                    chain.insert(chain.end(), k.chain.begin(), k.chain.end());
                    if (static_cast<int>(chain.size()) > config.access_path_k)
                        chain.clear(); // widen to the whole object
                    gen.emplace(FactKey{stmt.dst, chain, k.origin_method, k.origin_site}, v);
                }
                // strong update on the exact stored field
                std::erase_if(state, [&](const auto &entry) {
                    return entry.first.root == stmt.dst && !entry.first.chain.empty() &&
                           entry.first.chain.front() == stmt.field;
                });
                if (!gen.empty() && config.alias) {
                    FactSet alias_gen;
                    for (const auto &a : alias_closure(body, i, stmt.dst)) {
                        if (a == stmt.dst) continue;
                        for (const auto &[k, v] : gen) {
                            alias_gen.emplace(FactKey{a, k.chain, k.origin_method, k.origin_site},
                                              v);
                        }
                    }
                    state.insert(alias_gen.begin(), alias_gen.end());
                }
                state.insert(gen.begin(), gen.end());
                break;
            }
            case Statement::Kind::Invoke:
                interpret_invoke(method, body, state, rebound, i, stmt);
                break;
            case Statement::Kind::Return: {
                if (stmt.has_value) rebase_into(result.returned, state, stmt.src, stmt.src, "");
                returned = true; // anything after a return is dead
                break;
            }
            }
        }

        for (std::size_t j = 0; j < body.params.size(); ++j) {
            const std::string &p = body.params[j];
            if (rebound.count(p)) continue;
            for (const auto &[k, v] : state) {
                if (k.root != p) continue;
                if (init.count(k)) continue; // only taint the callee added
                result.param_effects[j].emplace(k, v);
            }
        }
        return result;
    }

    void interpret_invoke(const std::string &method, const MethodBody &body, FactSet &state,
                          std::set<std::string> &rebound, std::size_t site,
                          const Statement &stmt) {
        auto local = app.methods.find(stmt.callee);
        // Declared methods are stepped into and never treated as API
        // endpoints, even if the catalog lists their name.
        Classification cls =
            local == app.methods.end() ? catalog.classify(stmt.callee) : Classification{};

        if (cls.sink_category) {
            std::set<std::string> seen;
            for (const auto &arg : stmt.args) {
                if (!seen.insert(arg).second) continue;
                for (const auto &[k, v] : state) {
                    if (k.root != arg) continue;
                    record_flow(k, v, method, static_cast<int>(site), stmt.callee,
                                *cls.sink_category);
                }
            }
        }

        if (local != app.methods.end()) {
            const MethodBody &callee = local->second;
            FactSet init;
            for (std::size_t j = 0; j < callee.params.size(); ++j) {
                rebase_into(init, state, stmt.args[j], callee.params[j], stmt.callee);
            }
            MethodResult res = call(stmt.callee, init);
            if (stmt.has_dst) {
                kill_root(state, stmt.dst);
                auto add_rebound = [&]() {
                    for (const auto &p : body.params) {
                        if (p == stmt.dst) rebound.insert(stmt.dst);
                    }
                };
                add_rebound();
            }
            for (std::size_t j = 0; j < callee.params.size(); ++j) {
                for (const auto &[k, v] : res.param_effects[j]) {
                    FactKey nk{stmt.args[j], k.chain, k.origin_method, k.origin_site};
                    if (state.count(nk)) continue;
                    FactVal nv = v;
                    append_path(nv.path, method);
                    state.emplace(std::move(nk), std::move(nv));
                }
            }
            if (stmt.has_dst) {
                for (const auto &[k, v] : res.returned) {
                    FactKey nk{stmt.dst, k.chain, k.origin_method, k.origin_site};
                    if (state.count(nk)) continue;
                    FactVal nv = v;
                    append_path(nv.path, method);
                    state.emplace(std::move(nk), std::move(nv));
                }
            }
            return;
        }

        // External API
        if (stmt.has_dst) {
            kill_root(state, stmt.dst);
            for (const auto &p : body.params) {
                if (p == stmt.dst) rebound.insert(stmt.dst);
            }
            if (cls.source_category) {
                FactKey k{stmt.dst, {}, method, static_cast<int>(site)};
                FactVal v;
                v.signature = stmt.callee;
                v.category = *cls.source_category;
                v.path = {method};
                state.emplace(std::move(k), std::move(v));
            }
        }
    }

    void run_driver(const ComponentDriver &driver) {
        FactSet ctx; // shared component context; facts rooted at "<ctx>"
        auto call_with_ctx = [&](const std::string &m) {
            const MethodBody &body = app.methods.at(m);
            FactSet init;
            for (const auto &p : body.params) {
                rebase_into(init, ctx, "<ctx>", p, m);
            }
            MethodResult res = call(m, init);
            for (const auto &effects : res.param_effects) {
                // driver frame never appears in witness paths
                rebase_into(ctx, effects, effects.empty() ? "" : effects.begin()->first.root,
                            "<ctx>", "");
            }
        };

        for (const auto &m : driver.setup) call_with_ctx(m);
        while (true) {
            auto before = keys_of(ctx);
            for (const auto &cb : driver.callback_loop) call_with_ctx(cb);
            if (keys_of(ctx) == before) break;
        }
        for (const auto &m : driver.teardown) call_with_ctx(m);
    }
};

} // namespace

std::vector<std::string> DummyMain::all_callback_methods() const {
    std::vector<std::string> out;
    for (const auto &d : drivers) {
        for (const auto &cb : d.callback_loop) {
            if (std::find(out.begin(), out.end(), cb) == out.end()) out.push_back(cb);
        }
    }
    return out;
}

DummyMain synthesize_dummy_main(const AppModel &app) {
    static const std::vector<std::string> setup_order = {"onCreate", "onStart", "onResume"};
    static const std::vector<std::string> teardown_order = {"onPause", "onStop", "onDestroy"};

    DummyMain dm;
    for (const auto &comp : app.components) {
        ComponentDriver driver;
        driver.component = comp.name;
        auto declared = [&](const std::string &name) {
            return std::find(comp.lifecycle.begin(), comp.lifecycle.end(), name) !=
                   comp.lifecycle.end();
        };
        for (const auto &name : setup_order) {
            if (declared(name)) driver.setup.push_back(comp.name + "." + name);
        }
        for (const auto &name : teardown_order) {
            if (declared(name)) driver.teardown.push_back(comp.name + "." + name);
        }
        if (declared("onReceive")) driver.callback_loop.push_back(comp.name + ".onReceive");
        auto already_driven = [&](const std::string &m) {
            auto in = [&](const std::vector<std::string> &v) {
                return std::find(v.begin(), v.end(), m) != v.end();
            };
            return in(driver.setup) || in(driver.teardown) || in(driver.callback_loop);
        };
        for (const auto &cb : comp.callbacks) {
            // each method appears once per component, whatever declared it
            if (!already_driven(cb)) driver.callback_loop.push_back(cb);
        }
        dm.drivers.push_back(std::move(driver));
    }
    return dm;
}

std::vector<TaintFlow> analyze(const AppModel &app, const SourceSinkCatalog &catalog,
                               const AnalysisConfig &config) {
    Interpreter interp(app, catalog, config);
    DummyMain dm = synthesize_dummy_main(app);
    for (const auto &driver : dm.drivers) interp.run_driver(driver);
    return interp.sorted_flows();
}

json flows_to_json(const std::string &app_name, const std::vector<TaintFlow> &flows) {
    json report;
    report["app"] = app_name;
    report["flows"] = json::array();
    for (const auto &f : flows) {
        json jf;
        jf["source_method"] = f.source_method;
        jf["source_site"] = f.source_site;
        jf["sink_method"] = f.sink_method;
        jf["sink_site"] = f.sink_site;
        jf["source_category"] = f.source_category;
        jf["sink_category"] = f.sink_category;
        jf["path"] = f.path;
        report["flows"].push_back(std::move(jf));
    }
    return report;
}

std::vector<TaintFlow> flows_from_json(const json &report) {
    std::vector<TaintFlow> flows;
    for (const auto &jf : report.at("flows")) {
        TaintFlow f;
        f.source_method = jf.at("source_method").get<std::string>();
        f.source_site = jf.at("source_site").get<int>();
        f.sink_method = jf.at("sink_method").get<std::string>();
        f.sink_site = jf.at("sink_site").get<int>();
        f.source_category = jf.at("source_category").get<std::string>();
        f.sink_category = jf.at("sink_category").get<std::string>();
        for (const auto &p : jf.at("path")) f.path.push_back(p.get<std::string>());
        flows.push_back(std::move(f));
    }
    return flows;
}

} // namespace droidmark
