#pragma once

#include <stdexcept>
#include <string>

namespace droidmark {

// Base class for every structured error thrown by the library. The CLI maps
// these to exit code 1 (bad input) unless a subclass overrides the mapping.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace droidmark
