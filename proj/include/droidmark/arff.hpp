#pragma once

#include <string>
#include <vector>

#include "droidmark/errors.hpp"
#include "droidmark/json_util.hpp"

namespace droidmark {

// Nominal-only ARFF dialect: case-insensitive @relation/@attribute/@data,
// '%' comments, single-quoted values, '?' for unknown. Numeric, string and
// date attributes are rejected.

inline constexpr int kUnknownValue = -1;

struct Attribute {
    std::string name;
    std::vector<std::string> values;

    int value_index(const std::string &v) const;
    bool operator==(const Attribute &) const = default;
};

struct Dataset {
    std::string relation;
    std::vector<Attribute> attributes;
    std::vector<std::vector<int>> rows; // value index into attribute, or kUnknownValue

    int attribute_index(const std::string &name) const;
    bool operator==(const Dataset &) const = default;
};

struct MissingHeader : Error {
    explicit MissingHeader(const std::string &detail) : Error("missing header: " + detail) {}
};

struct UnknownNominalValue : Error {
    UnknownNominalValue(int row, const std::string &attr, const std::string &value)
        : Error("row " + std::to_string(row) + ": value '" + value +
                "' not in nominal set of attribute " + attr),
          row(row), attribute(attr), value(value) {}
    int row;
    std::string attribute;
    std::string value;
};

struct ArityMismatch : Error {
    ArityMismatch(int row, std::size_t got, std::size_t expected)
        : Error("row " + std::to_string(row) + ": " + std::to_string(got) +
                " values, expected " + std::to_string(expected)),
          row(row) {}
    int row;
};

struct UnsupportedAttributeType : Error {
    UnsupportedAttributeType(int line, const std::string &spec)
        : Error("line " + std::to_string(line) + ": unsupported attribute type '" + spec +
                "' (only nominal {v1,v2,...} is supported)"),
          line(line) {}
    int line;
};

struct ArffSyntaxError : Error {
    ArffSyntaxError(int line, const std::string &detail)
        : Error("ARFF line " + std::to_string(line) + ": " + detail), line(line) {}
    int line;
};

Dataset parse_arff(const std::string &text);
Dataset load_arff(const std::string &path);
std::string emit_arff(const Dataset &ds);

// JSON form of a dataset; unknown cells serialize as null.
json dataset_to_json(const Dataset &ds);
Dataset dataset_from_json(const json &j);

} // namespace droidmark
