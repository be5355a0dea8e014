#pragma once

#include <string>
#include <vector>

#include "droidmark/arff.hpp"
#include "droidmark/errors.hpp"
#include "droidmark/json_util.hpp"

namespace droidmark {

// Discrete Bayesian network over nominal variables. Parent configurations
// are indexed in mixed radix over the (index-sorted) parent list, first
// parent most significant; CPT cell = config * cardinality + value.

struct Variable {
    std::string name;
    std::vector<std::string> values;

    bool operator==(const Variable &) const = default;
};

struct BayesNetwork {
    std::vector<Variable> variables;
    std::vector<std::vector<int>> parents; // per variable, ascending indices
    std::vector<std::vector<double>> cpt;  // per variable, size q_i * r_i
    int class_index = -1;

    int cardinality(int var) const { return static_cast<int>(variables[var].values.size()); }
    long config_count(int var) const;
    long config_index(int var, const std::vector<int> &assignment) const;
};

struct ScoreReport {
    double bayes = 0;
    double bdeu = 0;
    double mdl = 0;
    double entropy = 0;
    double aic = 0;
    long parameter_count = 0; // K
};

struct IncompleteAssignment : Error {
    IncompleteAssignment() : Error("assignment does not cover every variable") {}
};

struct EmptyData : Error {
    EmptyData() : Error("dataset has no rows") {}
};

struct UnknownValuePresent : Error {
    UnknownValuePresent(int row, const std::string &attr)
        : Error("unknown value in row " + std::to_string(row) + ", attribute " + attr) {}
};

struct UnknownAttributeValue : Error {
    explicit UnknownAttributeValue(const std::string &attr)
        : Error("instance has no value for attribute " + attr) {}
};

struct CyclicStructure : Error {
    CyclicStructure() : Error("parent structure contains a cycle") {}
};

double joint_probability(const BayesNetwork &net, const std::vector<int> &assignment);

// theta = (N_{x,pi} + alpha) / (N_pi + alpha * r); unobserved parent
// configurations fall back to the uniform row when alpha is 0.
BayesNetwork fit_parameters(const std::vector<std::vector<int>> &parents, const Dataset &data,
                            double alpha, int class_index);

// Greedy parent search under a fixed ordering, scored by the Bayes
// (Dirichlet alpha = 0.5) family score. Ties break to the lowest variable
// index; parents are added only on strict improvement.
std::vector<std::vector<int>> learn_structure_k2(const Dataset &data,
                                                 const std::vector<int> &ordering,
                                                 int max_parents);

ScoreReport score_network(const BayesNetwork &net, const Dataset &data);

struct ClassifyResult {
    int label = 0;
    std::vector<double> posterior;
};

// Posterior over class values by substituting each one into the joint;
// the class cell of `row` is ignored. Ties break to the first class value.
ClassifyResult classify(const BayesNetwork &net, const std::vector<int> &row);

json network_to_json(const BayesNetwork &net);
BayesNetwork network_from_json(const json &j);

// Re-index a dataset row against the network's value domains, matching
// attributes and values by name. Unknown cells stay unknown.
std::vector<int> align_row(const BayesNetwork &net, const Dataset &ds,
                           const std::vector<int> &row);

// One "Var(r): parents" line per variable.
std::string structure_to_text(const BayesNetwork &net);

} // namespace droidmark
