#include "droidmark/arff.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace droidmark {

int Attribute::value_index(const std::string &v) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == v) return static_cast<int>(i);
    }
    return -1;
}

int Dataset::attribute_index(const std::string &name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

std::string trim(const std::string &s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct Token {
    std::string value;
    bool quoted = false;
};

// Splits on top-level commas; tokens may be single-quoted with \' and \\ escapes.
std::vector<Token> split_values(const std::string &text, int line_no) {
    std::vector<Token> out;
    std::string current;
    bool in_quote = false;
    bool quoted_token = false;
    bool after_quote = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quote) {
            if (c == '\\' && i + 1 < text.size()) {
                current += text[++i];
            } else if (c == '\'') {
                in_quote = false;
                after_quote = true;
            } else {
                current += c;
            }
            continue;
        }
        if (c == '\'') {
            if (after_quote || !trim(current).empty())
                throw ArffSyntaxError(line_no, "unexpected quote inside value");
            in_quote = true;
            quoted_token = true;
            current.clear();
            continue;
        }
        if (c == ',') {
            out.push_back({quoted_token ? current : trim(current), quoted_token});
            current.clear();
            quoted_token = false;
            after_quote = false;
            continue;
        }
        if (after_quote && !std::isspace(static_cast<unsigned char>(c)))
            throw ArffSyntaxError(line_no, "unexpected text after closing quote");
        if (!after_quote) current += c;
    }
    if (in_quote) throw ArffSyntaxError(line_no, "unterminated quoted value");
    out.push_back({quoted_token ? current : trim(current), quoted_token});
    return out;
}

// A value or name parsed from free text (possibly quoted).
std::string parse_token(const std::string &text, std::size_t &pos, int line_no) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) throw ArffSyntaxError(line_no, "unexpected end of line");
    std::string token;
    if (text[pos] == '\'') {
        ++pos;
        while (pos < text.size() && text[pos] != '\'') {
            if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
            token += text[pos++];
        }
        if (pos >= text.size()) throw ArffSyntaxError(line_no, "unterminated quoted name");
        ++pos;
    } else {
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '{')
            token += text[pos++];
    }
    return token;
}

struct ArffParser {
    std::istringstream in;
    int line_no = 0;

    explicit ArffParser(const std::string &text) : in(text) {}

    bool next_line(std::string &out) {
        while (std::getline(in, out)) {
            ++line_no;
            if (!out.empty() && out.back() == '\r') out.pop_back();
            std::string t = trim(out);
            if (t.empty() || t[0] == '%') continue;
            return true;
        }
        return false;
    }

    // Raw continuation line for multi-line nominal specs.
    bool next_raw_line(std::string &out) {
        if (!std::getline(in, out)) return false;
        ++line_no;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return true;
    }

    Dataset run() {
        Dataset ds;
        bool have_relation = false;
        bool in_data = false;
        int data_row = 0;
        std::string line;
        auto directive_is = [](const std::string &low, const std::string &name) {
            if (low.rfind(name, 0) != 0) return false;
            return low.size() == name.size() ||
                   std::isspace(static_cast<unsigned char>(low[name.size()]));
        };
        while (next_line(line)) {
            std::string t = trim(line);
            std::string low = lower(t);
            if (directive_is(low, "@relation")) {
                std::size_t pos = 9;
                ds.relation = parse_token(t, pos, line_no);
                if (ds.relation.empty())
                    throw ArffSyntaxError(line_no, "empty relation name");
                have_relation = true;
            } else if (directive_is(low, "@attribute")) {
                if (!have_relation) throw MissingHeader("@attribute before @relation");
                if (in_data) throw ArffSyntaxError(line_no, "@attribute after @data");
                parse_attribute(ds, t);
            } else if (directive_is(low, "@data")) {
                if (!have_relation) throw MissingHeader("@data before @relation");
                if (trim(t.substr(5)).size() > 0)
                    throw ArffSyntaxError(line_no, "unexpected text after @data");
                in_data = true;
            } else if (t[0] == '@') {
                throw ArffSyntaxError(line_no, "unknown directive: " + t);
            } else {
                if (!in_data) {
                    if (!have_relation) throw MissingHeader("data before @relation");
                    throw ArffSyntaxError(line_no, "data row before @data");
                }
                ++data_row;
                parse_row(ds, t, data_row);
            }
        }
        if (!have_relation) throw MissingHeader("no @relation declaration");
        return ds;
    }

    void parse_attribute(Dataset &ds, const std::string &line) {
        std::size_t pos = 10; // past "@attribute"
        Attribute attr;
        attr.name = parse_token(line, pos, line_no);
        if (attr.name.empty()) throw ArffSyntaxError(line_no, "empty attribute name");
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos >= line.size())
            throw ArffSyntaxError(line_no, "attribute " + attr.name + " has no type");
        if (line[pos] != '{') {
            std::string spec = trim(line.substr(pos));
            throw UnsupportedAttributeType(line_no, spec);
        }

        // Nominal spec, possibly spanning lines.
        std::string spec = line.substr(pos + 1);
        std::string closing;
        while (!find_closing_brace(spec, closing)) {
            std::string more;
            if (!next_raw_line(more))
                throw ArffSyntaxError(line_no, "unterminated nominal specification");
            spec += " " + more;
        }
        if (!trim(closing).empty())
            throw ArffSyntaxError(line_no, "unexpected text after '}'");

        for (auto &token : split_values(spec, line_no)) {
            if (token.value.empty()) throw ArffSyntaxError(line_no, "empty nominal value");
            attr.values.push_back(token.value);
        }
        if (attr.values.empty())
            throw ArffSyntaxError(line_no, "empty nominal set for " + attr.name);
        for (const auto &existing : ds.attributes) {
            if (existing.name == attr.name)
                throw ArffSyntaxError(line_no, "duplicate attribute " + attr.name);
        }
        ds.attributes.push_back(std::move(attr));
    }

    // Trims spec at the top-level '}'; returns false if none found yet.
    static bool find_closing_brace(std::string &spec, std::string &rest) {
        bool in_quote = false;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            char c = spec[i];
            if (in_quote) {
                if (c == '\\') ++i;
                else if (c == '\'') in_quote = false;
            } else if (c == '\'') {
                in_quote = true;
            } else if (c == '}') {
                rest = spec.substr(i + 1);
                spec = spec.substr(0, i);
                return true;
            }
        }
        return false;
    }

    void parse_row(Dataset &ds, const std::string &line, int row_no) {
        if (ds.attributes.empty())
            throw ArffSyntaxError(line_no, "data row but no attributes declared");
        std::vector<Token> tokens = split_values(line, line_no);
        if (tokens.size() != ds.attributes.size())
            throw ArityMismatch(row_no, tokens.size(), ds.attributes.size());
        std::vector<int> row(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            // a bare question mark is the unknown marker; a quoted one is data
            if (tokens[i].value == "?" && !tokens[i].quoted) {
                row[i] = kUnknownValue;
                continue;
            }
            int idx = ds.attributes[i].value_index(tokens[i].value);
            if (idx < 0)
                throw UnknownNominalValue(row_no, ds.attributes[i].name, tokens[i].value);
            row[i] = idx;
        }
        ds.rows.push_back(std::move(row));
    }
};

bool needs_value_quote(const std::string &v) {
    if (v.empty() || v == "?") return true;
    for (char c : v) {
        if (c == '.' || c == ' ' || c == '\t' || c == ',' || c == '\'' || c == '"' ||
            c == '{' || c == '}' || c == '%' || c == '\\')
            return true;
    }
    return false;
}

bool needs_name_quote(const std::string &v) {
    if (v.empty()) return true;
    for (char c : v) {
        if (c == ' ' || c == '\t' || c == ',' || c == '\'' || c == '"' || c == '{' ||
            c == '}' || c == '%' || c == '\\')
            return true;
    }
    return false;
}

std::string quoted(const std::string &v) {
    std::string out = "'";
    for (char c : v) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    out += '\'';
    return out;
}

std::string emit_value(const std::string &v) {
    return needs_value_quote(v) ? quoted(v) : v;
}

std::string emit_name(const std::string &v) {
    return needs_name_quote(v) ? quoted(v) : v;
}

} // namespace

Dataset parse_arff(const std::string &text) { return ArffParser(text).run(); }

Dataset load_arff(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open ARFF file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_arff(buf.str());
}

std::string emit_arff(const Dataset &ds) {
    std::ostringstream out;
    out << "@relation " << emit_name(ds.relation) << "\n";
    for (const auto &attr : ds.attributes) {
        out << "@attribute " << emit_name(attr.name) << " {";
        for (std::size_t i = 0; i < attr.values.size(); ++i) {
            if (i) out << ",";
            out << emit_value(attr.values[i]);
        }
        out << "}\n";
    }
    out << "@data\n";
    for (const auto &row : ds.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << (row[i] == kUnknownValue ? "?" : emit_value(ds.attributes[i].values[row[i]]));
        }
        out << "\n";
    }
    return out.str();
}

json dataset_to_json(const Dataset &ds) {
    json j;
    j["relation"] = ds.relation;
    j["attributes"] = json::array();
    for (const auto &attr : ds.attributes) {
        j["attributes"].push_back({{"name", attr.name}, {"values", attr.values}});
    }
    j["rows"] = json::array();
    for (const auto &row : ds.rows) {
        json r = json::array();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] == kUnknownValue) r.push_back(nullptr);
            else r.push_back(ds.attributes[i].values[row[i]]);
        }
        j["rows"].push_back(std::move(r));
    }
    return j;
}

Dataset dataset_from_json(const json &j) {
    Dataset ds;
    ds.relation = j.at("relation").get<std::string>();
    for (const auto &a : j.at("attributes")) {
        Attribute attr;
        attr.name = a.at("name").get<std::string>();
        for (const auto &v : a.at("values")) attr.values.push_back(v.get<std::string>());
        ds.attributes.push_back(std::move(attr));
    }
    int row_no = 0;
    for (const auto &r : j.at("rows")) {
        ++row_no;
        if (r.size() != ds.attributes.size())
            throw ArityMismatch(row_no, r.size(), ds.attributes.size());
        std::vector<int> row;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i].is_null()) {
                row.push_back(kUnknownValue);
                continue;
            }
            std::string v = r[i].get<std::string>();
            int idx = ds.attributes[i].value_index(v);
            if (idx < 0) throw UnknownNominalValue(row_no, ds.attributes[i].name, v);
            row.push_back(idx);
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

} // namespace droidmark
