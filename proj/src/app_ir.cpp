#include "droidmark/app_ir.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace droidmark {

const std::vector<std::string> &lifecycle_method_names() {
    static const std::vector<std::string> names = {
        "onCreate", "onStart", "onResume", "onPause", "onStop", "onDestroy", "onReceive",
    };
    return names;
}

std::string to_string(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::Activity: return "activity";
    case ComponentKind::Service: return "service";
    case ComponentKind::Receiver: return "receiver";
    }
    return "?";
}

const Component *AppModel::find_component(const std::string &name) const {
    for (const auto &c : components) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string class_of_method(const std::string &qualified_method) {
    std::size_t dot = qualified_method.rfind('.');
    return dot == std::string::npos ? std::string() : qualified_method.substr(0, dot);
}

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_reserved(const std::string &w) {
    static const std::set<std::string> words = {
        "app", "component", "method", "lifecycle", "callback", "call", "return", "kind",
    };
    return words.count(w) > 0;
}

// One-line cursor with 1-based column reporting.
struct LineScanner {
    const std::string &text;
    int line;
    std::size_t pos = 0;

    LineScanner(const std::string &text, int line) : text(text), line(line) {}

    int col() const { return static_cast<int>(pos) + 1; }

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const std::string &what) {
        if (!consume(c))
            throw SyntaxError(line, col(), "expected '" + std::string(1, c) + "' " + what);
    }

    std::string raw_ident(const std::string &what) {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos]))
            throw SyntaxError(line, col(), "expected " + what);
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return text.substr(start, pos - start);
    }

    std::string ident(const std::string &what) {
        skip_ws();
        int c = col();
        std::string w = raw_ident(what);
        if (is_reserved(w))
            throw SyntaxError(line, c, "'" + w + "' is a reserved word");
        return w;
    }

    // ident(.ident)*; later segments may collide with reserved words.
    std::string qname(const std::string &what) {
        std::string name = ident(what);
        while (pos < text.size() && text[pos] == '.') {
            ++pos;
            name += '.';
            name += raw_ident("identifier after '.'");
        }
        return name;
    }

    void expect_end() {
        if (!at_end())
            throw SyntaxError(line, col(), "unexpected trailing input");
    }
};

struct PendingMethod {
    MethodBody body;
    std::vector<int> stmt_lines; // for post-parse arity diagnostics
    int decl_line = 0;
};

struct Parser {
    std::istringstream in;
    int line_no = 0;
    std::string app_name;
    std::vector<Component> components;
    std::vector<PendingMethod> methods;

    explicit Parser(const std::string &text) : in(text) {}

    static std::string strip_comment(const std::string &line) {
        std::size_t hash = line.find('#');
        return hash == std::string::npos ? line : line.substr(0, hash);
    }

    bool next_content_line(std::string &out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            std::string stripped = strip_comment(raw);
            bool blank = stripped.find_first_not_of(" \t") == std::string::npos;
            if (!blank) {
                out = stripped;
                return true;
            }
        }
        return false;
    }

    AppModel run() {
        std::string line;
        if (!next_content_line(line))
            throw SyntaxError(1, 1, "missing 'app' header");
        {
            LineScanner sc(line, line_no);
            if (strip_keyword(sc) != "app")
                throw SyntaxError(line_no, 1, "missing 'app' header");
            app_name = sc.qname("app name");
            sc.expect_end();
        }

        while (next_content_line(line)) {
            LineScanner sc(line, line_no);
            std::string kw = strip_keyword(sc);
            if (kw == "component") {
                parse_component(sc);
            } else if (kw == "method") {
                parse_method(sc);
            } else {
                throw SyntaxError(line_no, 1, "expected 'component' or 'method', got '" + kw + "'");
            }
        }

        return finish();
    }

    // Reads the leading keyword without reserved-word filtering.
    static std::string strip_keyword(LineScanner &sc) {
        sc.skip_ws();
        return sc.raw_ident("keyword");
    }

    void parse_component(LineScanner &header) {
        Component comp;
        comp.name = header.qname("component name");
        {
            header.skip_ws();
            int c = header.col();
            std::string kw = header.raw_ident("'kind='");
            if (kw != "kind") throw SyntaxError(header.line, c, "expected 'kind='");
        }
        header.expect('=', "after 'kind'");
        {
            header.skip_ws();
            int c = header.col();
            std::string kind = header.raw_ident("component kind");
            if (kind == "activity") comp.kind = ComponentKind::Activity;
            else if (kind == "service") comp.kind = ComponentKind::Service;
            else if (kind == "receiver") comp.kind = ComponentKind::Receiver;
            else throw SyntaxError(header.line, c, "unknown component kind '" + kind + "'");
        }
        header.expect('{', "to open component block");
        header.expect_end();

        for (const auto &existing : components) {
            if (existing.name == comp.name) throw DuplicateComponent(comp.name);
        }

        std::string line;
        while (true) {
            if (!next_content_line(line))
                throw SyntaxError(line_no, 1, "unterminated component block for " + comp.name);
            LineScanner sc(line, line_no);
            if (sc.consume('}')) {
                sc.expect_end();
                break;
            }
            std::string kw = strip_keyword(sc);
            if (kw == "lifecycle") {
                sc.skip_ws();
                int c = sc.col();
                std::string name = sc.raw_ident("lifecycle method name");
                sc.expect_end();
                validate_lifecycle_name(comp, name, c);
                if (std::find(comp.lifecycle.begin(), comp.lifecycle.end(), name) !=
                    comp.lifecycle.end())
                    throw SyntaxError(line_no, c, "duplicate lifecycle declaration " + name);
                comp.lifecycle.push_back(name);
            } else if (kw == "callback") {
                sc.skip_ws();
                int c = sc.col();
                std::string name = sc.qname("callback method name");
                sc.expect_end();
                if (std::find(comp.callbacks.begin(), comp.callbacks.end(), name) !=
                    comp.callbacks.end())
                    throw SyntaxError(line_no, c, "duplicate callback declaration " + name);
                comp.callbacks.push_back(name);
            } else {
                throw SyntaxError(line_no, 1, "expected 'lifecycle', 'callback' or '}'");
            }
        }
        components.push_back(std::move(comp));
    }

    void validate_lifecycle_name(const Component &comp, const std::string &name, int col) const {
        const auto &all = lifecycle_method_names();
        if (std::find(all.begin(), all.end(), name) == all.end())
            throw SyntaxError(line_no, col, "unknown lifecycle method '" + name + "'");
        if (comp.kind == ComponentKind::Receiver) {
            if (name != "onReceive")
                throw SyntaxError(line_no, col, "receivers only have onReceive");
        } else if (name == "onReceive") {
            throw SyntaxError(line_no, col,
                              "onReceive is only valid on receiver components");
        }
    }

    void parse_method(LineScanner &header) {
        PendingMethod pending;
        pending.decl_line = line_no;
        pending.body.name = header.qname("method name");
        header.expect('(', "to open parameter list");
        if (!header.consume(')')) {
            while (true) {
                pending.body.params.push_back(header.ident("parameter name"));
                if (header.consume(')')) break;
                header.expect(',', "between parameters");
            }
        }
        header.expect('{', "to open method body");
        header.expect_end();

        for (const auto &m : methods) {
            if (m.body.name == pending.body.name)
                throw SyntaxError(pending.decl_line, 1,
                                  "duplicate method declaration " + pending.body.name);
        }
        for (std::size_t i = 0; i < pending.body.params.size(); ++i) {
            for (std::size_t j = i + 1; j < pending.body.params.size(); ++j) {
                if (pending.body.params[i] == pending.body.params[j])
                    throw SyntaxError(pending.decl_line, 1,
                                      "duplicate parameter " + pending.body.params[i]);
            }
        }

        std::set<std::string> defined(pending.body.params.begin(), pending.body.params.end());
        std::string line;
        while (true) {
            if (!next_content_line(line))
                throw SyntaxError(line_no, 1, "unterminated method body for " + pending.body.name);
            LineScanner sc(line, line_no);
            if (sc.consume('}')) {
                sc.expect_end();
                break;
            }
            Statement stmt = parse_statement(sc, pending.body.name, defined);
            pending.body.statements.push_back(std::move(stmt));
            pending.stmt_lines.push_back(line_no);
        }
        methods.push_back(std::move(pending));
    }

    void require_defined(const std::string &method, const std::string &local,
                         const std::set<std::string> &defined) const {
        if (!defined.count(local)) throw UndeclaredLocal(method, local, line_no);
    }

    Statement parse_statement(LineScanner &sc, const std::string &method,
                              std::set<std::string> &defined) {
        Statement stmt;
        sc.skip_ws();
        std::size_t save = sc.pos;
        std::string first = sc.raw_ident("statement");

        if (first == "return") {
            stmt.kind = Statement::Kind::Return;
            if (!sc.at_end()) {
                stmt.src = sc.ident("local after 'return'");
                stmt.has_value = true;
                require_defined(method, stmt.src, defined);
            }
            sc.expect_end();
            return stmt;
        }

        if (first == "call") {
            stmt.kind = Statement::Kind::Invoke;
            parse_call_tail(sc, stmt, method, defined);
            return stmt;
        }

        if (is_reserved(first))
            throw SyntaxError(sc.line, static_cast<int>(save) + 1,
                              "'" + first + "' is a reserved word");

        // Assignment forms: x = ..., x.f = y
        if (sc.consume('.')) {
            stmt.kind = Statement::Kind::StoreField;
            stmt.dst = first;
            stmt.field = sc.raw_ident("field name");
            sc.expect('=', "in field store");
            stmt.src = sc.ident("source local");
            sc.expect_end();
            require_defined(method, stmt.dst, defined);
            require_defined(method, stmt.src, defined);
            return stmt;
        }

        sc.expect('=', "in assignment");
        sc.skip_ws();
        std::size_t rhs_start = sc.pos;
        std::string rhs = sc.raw_ident("assignment source");
        if (rhs == "call") {
            stmt.kind = Statement::Kind::Invoke;
            stmt.dst = first;
            stmt.has_dst = true;
            parse_call_tail(sc, stmt, method, defined);
            defined.insert(stmt.dst);
            return stmt;
        }
        if (is_reserved(rhs))
            throw SyntaxError(sc.line, static_cast<int>(rhs_start) + 1,
                              "'" + rhs + "' is a reserved word");
        if (sc.consume('.')) {
            stmt.kind = Statement::Kind::LoadField;
            stmt.dst = first;
            stmt.src = rhs;
            stmt.field = sc.raw_ident("field name");
            if (sc.peek() == '.')
                throw SyntaxError(sc.line, sc.col(),
                                  "chained field access is not supported; split the statement");
            sc.expect_end();
            require_defined(method, stmt.src, defined);
            defined.insert(stmt.dst);
            return stmt;
        }
        stmt.kind = Statement::Kind::Copy;
        stmt.dst = first;
        stmt.src = rhs;
        sc.expect_end();
        require_defined(method, stmt.src, defined);
        defined.insert(stmt.dst);
        return stmt;
    }

    void parse_call_tail(LineScanner &sc, Statement &stmt, const std::string &method,
                         const std::set<std::string> &defined) {
        stmt.callee = sc.qname("call target");
        sc.expect('(', "to open argument list");
        if (!sc.consume(')')) {
            while (true) {
                std::string arg = sc.ident("argument name");
                require_defined(method, arg, defined);
                stmt.args.push_back(arg);
                if (sc.consume(')')) break;
                sc.expect(',', "between arguments");
            }
        }
        sc.expect_end();
    }

    AppModel finish() {
        AppModel model;
        model.app_name = app_name;
        model.components = std::move(components);
        for (auto &m : methods) {
            model.methods.emplace(m.body.name, m.body);
        }

        // Component references must resolve to declared methods.
        for (const auto &comp : model.components) {
            for (const auto &lc : comp.lifecycle) {
                std::string qualified = comp.name + "." + lc;
                if (!model.methods.count(qualified))
                    throw UndefinedMethodReference(comp.name, qualified);
            }
            for (const auto &cb : comp.callbacks) {
                if (!model.methods.count(cb))
                    throw UndefinedMethodReference(comp.name, cb);
            }
        }

        // Local call arity.
        for (const auto &pending : methods) {
            for (std::size_t i = 0; i < pending.body.statements.size(); ++i) {
                const Statement &stmt = pending.body.statements[i];
                if (stmt.kind != Statement::Kind::Invoke) continue;
                auto it = model.methods.find(stmt.callee);
                if (it == model.methods.end()) continue;
                if (it->second.params.size() != stmt.args.size())
                    throw SyntaxError(pending.stmt_lines[i], 1,
                                      "call to " + stmt.callee + " passes " +
                                          std::to_string(stmt.args.size()) + " args, expected " +
                                          std::to_string(it->second.params.size()));
            }
        }
        return model;
    }
};

} // namespace

AppModel parse_app(const std::string &text) { return Parser(text).run(); }

AppModel load_app(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open IR file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_app(buf.str());
}

static void emit_statement(std::ostream &out, const Statement &stmt) {
    switch (stmt.kind) {
    case Statement::Kind::Copy:
        out << stmt.dst << " = " << stmt.src;
        break;
    case Statement::Kind::LoadField:
        out << stmt.dst << " = " << stmt.src << "." << stmt.field;
        break;
    case Statement::Kind::StoreField:
        out << stmt.dst << "." << stmt.field << " = " << stmt.src;
        break;
    case Statement::Kind::Invoke: {
        if (stmt.has_dst) out << stmt.dst << " = ";
        out << "call " << stmt.callee << "(";
        for (std::size_t i = 0; i < stmt.args.size(); ++i) {
            if (i) out << ", ";
            out << stmt.args[i];
        }
        out << ")";
        break;
    }
    case Statement::Kind::Return:
        out << "return";
        if (stmt.has_value) out << " " << stmt.src;
        break;
    }
}

std::string emit_ir(const AppModel &model) {
    std::ostringstream out;
    out << "app " << model.app_name << "\n";
    for (const auto &comp : model.components) {
        out << "\ncomponent " << comp.name << " kind=" << to_string(comp.kind) << " {\n";
        for (const auto &lc : comp.lifecycle) out << "  lifecycle " << lc << "\n";
        for (const auto &cb : comp.callbacks) out << "  callback " << cb << "\n";
        out << "}\n";
    }
    for (const auto &[name, body] : model.methods) {
        out << "\nmethod " << name << "(";
        for (std::size_t i = 0; i < body.params.size(); ++i) {
            if (i) out << ", ";
            out << body.params[i];
        }
        out << ") {\n";
        for (const auto &stmt : body.statements) {
            out << "  ";
            emit_statement(out, stmt);
            out << "\n";
        }
        out << "}\n";
    }
    return out.str();
}

} // namespace droidmark
