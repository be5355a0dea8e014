#pragma once

#include "json.hpp"

namespace droidmark {

// Reports preserve insertion order so repeated runs are byte-identical.
using json = nlohmann::ordered_json;

inline std::string dump_json(const json &j) { return j.dump(2) + "\n"; }

} // namespace droidmark
