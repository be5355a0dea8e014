#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "droidmark/errors.hpp"

namespace droidmark {

enum class Role { Source, Sink };

// The category taxonomy is reproduced exactly as published, including the
// misspelling LOCATTON_INFORMATION and the duplicated sink rows
// PHONE_CONNECTION and SYNCHRONIZATION_DATA. Validation is keyed on the raw
// names; normalized_category() exposes the corrected spelling for display.
const std::vector<std::string> &source_categories(); // 17 rows
const std::vector<std::string> &sink_categories();   // 19 rows, 17 distinct

bool is_source_category(const std::string &raw);
bool is_sink_category(const std::string &raw);

// First taxonomy row carrying the name, -1 if absent. Duplicated rows keep
// their later columns permanently empty in feature matrices.
int source_category_index(const std::string &raw);
int sink_category_index(const std::string &raw);

std::string normalized_category(const std::string &raw);

struct CatalogEntry {
    std::string api_signature;
    Role role;
    std::string category;
};

struct Classification {
    std::optional<std::string> source_category;
    std::optional<std::string> sink_category;
};

struct UnknownCategory : Error {
    explicit UnknownCategory(const std::string &name)
        : Error("unknown category: " + name), name(name) {}
    std::string name;
};

struct DuplicateEntry : Error {
    DuplicateEntry(const std::string &signature, Role role)
        : Error("duplicate catalog entry: " + signature),
          signature(signature), role(role) {}
    std::string signature;
    Role role;
};

struct MalformedLine : Error {
    explicit MalformedLine(int line_no, const std::string &detail)
        : Error("malformed catalog line " + std::to_string(line_no) + ": " + detail),
          line_no(line_no) {}
    int line_no;
};

// Signature -> role x category map. A signature may carry at most one source
// entry and at most one sink entry; both at once is legal.
class SourceSinkCatalog {
public:
    void add(const CatalogEntry &entry);
    Classification classify(const std::string &api_signature) const;

    std::size_t size() const { return sources_.size() + sinks_.size(); }
    const std::map<std::string, std::string> &sources() const { return sources_; }
    const std::map<std::string, std::string> &sinks() const { return sinks_; }

    bool operator==(const SourceSinkCatalog &) const = default;

private:
    std::map<std::string, std::string> sources_;
    std::map<std::string, std::string> sinks_;
};

// TSV catalog files: signature<TAB>SOURCE|SINK<TAB>CATEGORY, '#' comments.
SourceSinkCatalog parse_catalog(const std::string &text);
SourceSinkCatalog load_catalog(const std::string &path);
std::string emit_catalog(const SourceSinkCatalog &catalog);

// Catalog shipped with the tool: ~40 signatures covering every taxonomy
// category at least once.
const SourceSinkCatalog &builtin_catalog();
std::string builtin_catalog_text();

} // namespace droidmark
