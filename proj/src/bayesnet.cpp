#include "droidmark/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace droidmark {

long BayesNetwork::config_count(int var) const {
    long q = 1;
    for (int p : parents[var]) q *= cardinality(p);
    return q;
}

long BayesNetwork::config_index(int var, const std::vector<int> &assignment) const {
    long idx = 0;
    for (int p : parents[var]) {
        idx = idx * cardinality(p) + assignment[p];
    }
    return idx;
}

double joint_probability(const BayesNetwork &net, const std::vector<int> &assignment) {
    if (assignment.size() != net.variables.size()) throw IncompleteAssignment();
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == kUnknownValue) throw IncompleteAssignment();
        if (assignment[i] < 0 || assignment[i] >= net.cardinality(static_cast<int>(i)))
            throw UnknownAttributeValue(net.variables[i].name);
    }
    double p = 1.0;
    for (std::size_t i = 0; i < net.variables.size(); ++i) {
        int var = static_cast<int>(i);
        long cfg = net.config_index(var, assignment);
        p *= net.cpt[i][cfg * net.cardinality(var) + assignment[i]];
    }
    return p;
}

namespace {

void check_acyclic(const std::vector<std::vector<int>> &parents) {
    int n = static_cast<int>(parents.size());
    std::vector<int> state(n, 0); // 0 new, 1 active, 2 done
    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (state[start]) continue;
        stack.push_back(start);
        while (!stack.empty()) {
            int v = stack.back();
            if (state[v] == 0) {
                state[v] = 1;
                for (int p : parents[v]) {
                    if (state[p] == 1) throw CyclicStructure();
                    if (state[p] == 0) stack.push_back(p);
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
}

// Per-variable count table: counts[config][value].
struct CountTable {
    long configs = 1;
    int cardinality = 1;
    std::vector<long> n_xv;  // configs * cardinality
    std::vector<long> n_cfg; // configs

    CountTable(const Dataset &data, const std::vector<int> &parent_set, int var) {
        cardinality = static_cast<int>(data.attributes[var].values.size());
        for (int p : parent_set) configs *= static_cast<long>(data.attributes[p].values.size());
        n_xv.assign(configs * cardinality, 0);
        n_cfg.assign(configs, 0);
        int row_no = 0;
        for (const auto &row : data.rows) {
            ++row_no;
            if (row[var] == kUnknownValue)
                throw UnknownValuePresent(row_no, data.attributes[var].name);
            long cfg = 0;
            for (int p : parent_set) {
                if (row[p] == kUnknownValue)
                    throw UnknownValuePresent(row_no, data.attributes[p].name);
                cfg = cfg * static_cast<long>(data.attributes[p].values.size()) + row[p];
            }
            ++n_xv[cfg * cardinality + row[var]];
            ++n_cfg[cfg];
        }
    }
};

// Dirichlet marginal-likelihood family score with symmetric prior alpha.
double family_log_score(const CountTable &counts, double alpha) {
    double score = 0;
    for (long cfg = 0; cfg < counts.configs; ++cfg) {
        score += std::lgamma(counts.cardinality * alpha) -
                 std::lgamma(counts.n_cfg[cfg] + counts.cardinality * alpha);
        for (int v = 0; v < counts.cardinality; ++v) {
            score += std::lgamma(counts.n_xv[cfg * counts.cardinality + v] + alpha) -
                     std::lgamma(alpha);
        }
    }
    return score;
}

constexpr double kBayesPriorAlpha = 0.5;
constexpr double kBdeuEquivalentSampleSize = 1.0;

} // namespace

BayesNetwork fit_parameters(const std::vector<std::vector<int>> &parents, const Dataset &data,
                            double alpha, int class_index) {
    if (data.rows.empty()) throw EmptyData();
    if (alpha < 0) throw Error("smoothing alpha must be >= 0");
    if (parents.size() != data.attributes.size())
        throw Error("structure size does not match attribute count");
    check_acyclic(parents);

    BayesNetwork net;
    net.class_index = class_index;
    for (const auto &attr : data.attributes) net.variables.push_back({attr.name, attr.values});
    net.parents = parents;
    for (auto &ps : net.parents) std::sort(ps.begin(), ps.end());

    for (std::size_t i = 0; i < net.variables.size(); ++i) {
        int var = static_cast<int>(i);
        CountTable counts(data, net.parents[i], var);
        std::vector<double> table(counts.configs * counts.cardinality);
        for (long cfg = 0; cfg < counts.configs; ++cfg) {
            double denom = counts.n_cfg[cfg] + alpha * counts.cardinality;
            for (int v = 0; v < counts.cardinality; ++v) {
                if (denom == 0) {
                    table[cfg * counts.cardinality + v] = 1.0 / counts.cardinality;
                } else {
                    table[cfg * counts.cardinality + v] =
                        (counts.n_xv[cfg * counts.cardinality + v] + alpha) / denom;
                }
            }
        }
        net.cpt.push_back(std::move(table));
    }
    return net;
}

std::vector<std::vector<int>> learn_structure_k2(const Dataset &data,
                                                 const std::vector<int> &ordering,
                                                 int max_parents) {
    std::size_t n = data.attributes.size();
    if (ordering.size() != n) throw Error("ordering must be a permutation of the variables");
    std::vector<bool> seen(n, false);
    for (int v : ordering) {
        if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v])
            throw Error("ordering must be a permutation of the variables");
        seen[v] = true;
    }

    std::vector<std::vector<int>> parents(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        int var = ordering[pos];
        std::vector<int> current;
        double current_score = family_log_score(CountTable(data, current, var), kBayesPriorAlpha);
        while (static_cast<int>(current.size()) < max_parents) {
            int best = -1;
            double best_score = current_score;
            for (std::size_t prev = 0; prev < pos; ++prev) {
                int cand = ordering[prev];
                if (std::find(current.begin(), current.end(), cand) != current.end()) continue;
                std::vector<int> trial = current;
                trial.push_back(cand);
                std::sort(trial.begin(), trial.end());
                double s = family_log_score(CountTable(data, trial, var), kBayesPriorAlpha);
                if (s > best_score || (best >= 0 && s == best_score && cand < best)) {
                    best = cand;
                    best_score = s;
                }
            }
            if (best < 0) break;
            current.push_back(best);
            std::sort(current.begin(), current.end());
            current_score = best_score;
        }
        parents[var] = current;
    }
    return parents;
}

ScoreReport score_network(const BayesNetwork &net, const Dataset &data) {
    if (data.rows.empty()) throw EmptyData();
    if (net.variables.size() != data.attributes.size())
        throw Error("network does not match the dataset schema");

    ScoreReport report;
    double n_total = static_cast<double>(data.rows.size());
    for (std::size_t i = 0; i < net.variables.size(); ++i) {
        int var = static_cast<int>(i);
        CountTable counts(data, net.parents[i], var);

        report.parameter_count += (counts.cardinality - 1) * counts.configs;
        for (long cfg = 0; cfg < counts.configs; ++cfg) {
            if (counts.n_cfg[cfg] == 0) continue;
            for (int v = 0; v < counts.cardinality; ++v) {
                long c = counts.n_xv[cfg * counts.cardinality + v];
                if (c > 0)
                    report.entropy +=
                        c * std::log(static_cast<double>(c) / counts.n_cfg[cfg]);
            }
        }
        report.bayes += family_log_score(counts, kBayesPriorAlpha);
        double bdeu_alpha = kBdeuEquivalentSampleSize /
                            (static_cast<double>(counts.cardinality) * counts.configs);
        report.bdeu += family_log_score(counts, bdeu_alpha);
    }
    report.aic = report.entropy - report.parameter_count;
    report.mdl = report.entropy - report.parameter_count / 2.0 * std::log(n_total);
    return report;
}

ClassifyResult classify(const BayesNetwork &net, const std::vector<int> &row) {
    if (net.class_index < 0 ||
        static_cast<std::size_t>(net.class_index) >= net.variables.size())
        throw Error("network has no class variable configured");
    if (row.size() != net.variables.size()) throw IncompleteAssignment();
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (static_cast<int>(i) == net.class_index) continue;
        if (row[i] == kUnknownValue || row[i] < 0 ||
            row[i] >= net.cardinality(static_cast<int>(i)))
            throw UnknownAttributeValue(net.variables[i].name);
    }

    int r = net.cardinality(net.class_index);
    std::vector<double> joint(r);
    double total = 0;
    std::vector<int> asg = row;
    for (int c = 0; c < r; ++c) {
        asg[net.class_index] = c;
        joint[c] = joint_probability(net, asg);
        total += joint[c];
    }

    ClassifyResult result;
    result.posterior.resize(r);
    for (int c = 0; c < r; ++c) {
        result.posterior[c] = total > 0 ? joint[c] / total : 1.0 / r;
    }
    result.label = 0;
    for (int c = 1; c < r; ++c) {
        if (result.posterior[c] > result.posterior[result.label]) result.label = c;
    }
    return result;
}

json network_to_json(const BayesNetwork &net) {
    json j;
    j["variables"] = json::array();
    for (const auto &v : net.variables)
        j["variables"].push_back({{"name", v.name}, {"values", v.values}});
    j["edges"] = json::array();
    for (std::size_t child = 0; child < net.parents.size(); ++child) {
        for (int p : net.parents[child]) {
            j["edges"].push_back({net.variables[p].name, net.variables[child].name});
        }
    }
    j["cpts"] = json::object();
    for (std::size_t i = 0; i < net.variables.size(); ++i) {
        int r = net.cardinality(static_cast<int>(i));
        long q = net.config_count(static_cast<int>(i));
        json rows = json::array();
        for (long cfg = 0; cfg < q; ++cfg) {
            json row = json::array();
            for (int v = 0; v < r; ++v) row.push_back(net.cpt[i][cfg * r + v]);
            rows.push_back(std::move(row));
        }
        j["cpts"][net.variables[i].name] = std::move(rows);
    }
    j["class_index"] = net.class_index;
    return j;
}

BayesNetwork network_from_json(const json &j) {
    BayesNetwork net;
    for (const auto &v : j.at("variables")) {
        Variable var;
        var.name = v.at("name").get<std::string>();
        for (const auto &val : v.at("values")) var.values.push_back(val.get<std::string>());
        net.variables.push_back(std::move(var));
    }
    auto index_of = [&](const std::string &name) {
        for (std::size_t i = 0; i < net.variables.size(); ++i) {
            if (net.variables[i].name == name) return static_cast<int>(i);
        }
        throw Error("unknown variable in network file: " + name);
    };
    net.parents.assign(net.variables.size(), {});
    for (const auto &e : j.at("edges")) {
        int parent = index_of(e.at(0).get<std::string>());
        int child = index_of(e.at(1).get<std::string>());
        net.parents[child].push_back(parent);
    }
    for (auto &ps : net.parents) std::sort(ps.begin(), ps.end());
    check_acyclic(net.parents);
    for (std::size_t i = 0; i < net.variables.size(); ++i) {
        const json &rows = j.at("cpts").at(net.variables[i].name);
        int r = net.cardinality(static_cast<int>(i));
        long q = net.config_count(static_cast<int>(i));
        if (static_cast<long>(rows.size()) != q)
            throw Error("CPT for " + net.variables[i].name + " has wrong config count");
        std::vector<double> table;
        for (const auto &row : rows) {
            if (static_cast<int>(row.size()) != r)
                throw Error("CPT row for " + net.variables[i].name + " has wrong width");
            double sum = 0;
            for (const auto &cell : row) {
                table.push_back(cell.get<double>());
                sum += table.back();
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw Error("CPT row for " + net.variables[i].name + " sums to " +
                            std::to_string(sum));
        }
        net.cpt.push_back(std::move(table));
    }
    net.class_index = j.at("class_index").get<int>();
    return net;
}

std::vector<int> align_row(const BayesNetwork &net, const Dataset &ds,
                           const std::vector<int> &row) {
    if (ds.attributes.size() != net.variables.size())
        throw Error("dataset does not match the network's variable count");
    std::vector<int> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (ds.attributes[i].name != net.variables[i].name)
            throw Error("attribute " + ds.attributes[i].name +
                        " does not match network variable " + net.variables[i].name);
        if (row[i] == kUnknownValue) {
            out[i] = kUnknownValue;
            continue;
        }
        const std::string &value = ds.attributes[i].values[row[i]];
        const auto &domain = net.variables[i].values;
        auto it = std::find(domain.begin(), domain.end(), value);
        if (it == domain.end()) throw UnknownAttributeValue(net.variables[i].name);
        out[i] = static_cast<int>(it - domain.begin());
    }
    return out;
}

std::string structure_to_text(const BayesNetwork &net) {
    std::ostringstream out;
    for (std::size_t i = 0; i < net.variables.size(); ++i) {
        out << net.variables[i].name << "(" << net.cardinality(static_cast<int>(i)) << "):";
        for (int p : net.parents[i]) out << " " << net.variables[p].name;
        out << "\n";
    }
    return out.str();
}

} // namespace droidmark
