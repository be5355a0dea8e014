#pragma once

#include <map>
#include <string>
#include <vector>

#include "droidmark/errors.hpp"

namespace droidmark {

// Textual IR for an app: components with lifecycle/callback declarations and
// straight-line method bodies. Grammar (line oriented, '#' comments):
//
//   app NAME
//   component QNAME kind=activity|service|receiver {
//     lifecycle onCreate            # name from the fixed lifecycle set
//     callback  some.Class.method   # qualified method name
//   }
//   method QNAME(p1, p2) {
//     x = y                         # copy
//     x = y.f                       # field load
//     x.f = y                       # field store
//     x = call a.b.C.m(p1, x)       # invoke with result
//     call a.b.C.m(x)               # invoke, result discarded
//     return x                      # or bare `return`
//   }
//
// Call targets are opaque dotted signatures; a target that names a declared
// method is a local call (arity checked), anything else is an external API.

enum class ComponentKind { Activity, Service, Receiver };

struct Component {
    std::string name; // qualified class name, unique per app
    ComponentKind kind;
    std::vector<std::string> lifecycle; // short names, fixed-set, declaration order
    std::vector<std::string> callbacks; // qualified method names
};

struct Statement {
    enum class Kind { Copy, LoadField, StoreField, Invoke, Return };
    Kind kind;
    std::string dst;   // Copy/LoadField/Invoke result; StoreField base
    std::string src;   // Copy/StoreField source; LoadField base; Return value
    std::string field; // LoadField/StoreField
    std::string callee;
    std::vector<std::string> args;
    bool has_dst = false;   // Invoke result present
    bool has_value = false; // Return carries a value

    bool operator==(const Statement &) const = default;
};

struct MethodBody {
    std::string name; // qualified
    std::vector<std::string> params;
    std::vector<Statement> statements;

    bool operator==(const MethodBody &) const = default;
};

struct AppModel {
    std::string app_name;
    std::vector<Component> components;
    std::map<std::string, MethodBody> methods;

    const Component *find_component(const std::string &name) const;
    bool operator==(const AppModel &) const = default;
};

inline bool operator==(const Component &a, const Component &b) {
    return a.name == b.name && a.kind == b.kind && a.lifecycle == b.lifecycle &&
           a.callbacks == b.callbacks;
}

struct SyntaxError : Error {
    SyntaxError(int line, int col, const std::string &message)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(col) +
                ": " + message),
          line(line), col(col) {}
    int line;
    int col;
};

struct DuplicateComponent : Error {
    explicit DuplicateComponent(const std::string &name)
        : Error("duplicate component: " + name), name(name) {}
    std::string name;
};

struct UndefinedMethodReference : Error {
    UndefinedMethodReference(const std::string &component, const std::string &method)
        : Error("component " + component + " references undefined method " + method),
          component(component), method(method) {}
    std::string component;
    std::string method;
};

struct UndeclaredLocal : Error {
    UndeclaredLocal(const std::string &method, const std::string &local, int line)
        : Error("use of undeclared local '" + local + "' in " + method + " (line " +
                std::to_string(line) + ")"),
          method(method), local(local), line(line) {}
    std::string method;
    std::string local;
    int line;
};

const std::vector<std::string> &lifecycle_method_names();

std::string to_string(ComponentKind kind);

// Deterministic parse; throws the structured errors above.
AppModel parse_app(const std::string &text);
AppModel load_app(const std::string &path);

// Canonical form: two-space indent, one statement per line.
// parse_app(emit_ir(m)) == m for every valid model.
std::string emit_ir(const AppModel &model);

// Declaring class of a qualified method name (everything before the last dot).
std::string class_of_method(const std::string &qualified_method);

} // namespace droidmark
