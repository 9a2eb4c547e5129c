#include "nusrec/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nusrec::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

const char* kind_name(Value::Kind k) {
    switch (k) {
        case Value::Kind::String: return "string";
        case Value::Kind::Integer: return "integer";
        case Value::Kind::Float: return "float";
        case Value::Kind::Boolean: return "boolean";
        case Value::Kind::Array: return "array";
    }
    return "?";
}

[[noreturn]] void type_error(const Value& v, const char* wanted) {
    fail(v.line, std::string("expected ") + wanted + ", got " + kind_name(v.kind));
}

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

Value parse_value(Cursor& c);

Value parse_string(Cursor& c) {
    Value v;
    v.kind = Value::Kind::String;
    v.line = c.line;
    ++c.pos; // opening quote
    while (true) {
        if (c.done()) fail(c.line, "unterminated string");
        char ch = c.s[c.pos++];
        if (ch == '"') break;
        if (ch == '\\') {
            if (c.done()) fail(c.line, "unterminated escape");
            char esc = c.s[c.pos++];
            switch (esc) {
                case '"': v.str += '"'; break;
                case '\\': v.str += '\\'; break;
                case 'n': v.str += '\n'; break;
                case 't': v.str += '\t'; break;
                default: fail(c.line, std::string("unsupported escape \\") + esc);
            }
        } else {
            v.str += ch;
        }
    }
    return v;
}

Value parse_array(Cursor& c) {
    Value v;
    v.kind = Value::Kind::Array;
    v.line = c.line;
    ++c.pos; // '['
    while (true) {
        c.skip_ws();
        if (c.done()) fail(c.line, "unterminated array");
        if (c.peek() == ']') {
            ++c.pos;
            return v;
        }
        v.array.push_back(parse_value(c));
        c.skip_ws();
        if (c.done()) fail(c.line, "unterminated array");
        if (c.peek() == ',') {
            ++c.pos;
            continue;
        }
        if (c.peek() == ']') {
            ++c.pos;
            return v;
        }
        fail(c.line, "expected ',' or ']' in array");
    }
}

Value parse_scalar_token(Cursor& c) {
    std::size_t start = c.pos;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == '#' || ch == ' ' || ch == '\t') break;
        ++c.pos;
    }
    std::string tok = c.s.substr(start, c.pos - start);
    if (tok.empty()) fail(c.line, "expected a value");
    Value v;
    v.line = c.line;
    if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                       tok.find("inf") != std::string::npos ||
                       tok.find("nan") != std::string::npos;
    const char* begin = tok.c_str();
    char* end = nullptr;
    if (!looks_float) {
        long long n = std::strtoll(begin, &end, 10);
        if (end == begin + tok.size()) {
            v.kind = Value::Kind::Integer;
            v.integer = n;
            v.number = static_cast<double>(n);
            return v;
        }
    }
    double d = std::strtod(begin, &end);
    if (end != begin + tok.size())
        fail(c.line, "cannot parse value '" + tok + "'");
    v.kind = Value::Kind::Float;
    v.number = d;
    return v;
}

Value parse_value(Cursor& c) {
    c.skip_ws();
    if (c.done()) fail(c.line, "expected a value");
    char ch = c.peek();
    if (ch == '"') return parse_string(c);
    if (ch == '[') return parse_array(c);
    return parse_scalar_token(c);
}

// strips comments outside strings; returns trimmed content
std::string strip_comment(const std::string& raw, int line) {
    std::string out;
    bool in_string = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char ch = raw[i];
        if (in_string) {
            out += ch;
            if (ch == '\\' && i + 1 < raw.size()) {
                out += raw[++i];
            } else if (ch == '"') {
                in_string = false;
            }
            continue;
        }
        if (ch == '"') {
            in_string = true;
            out += ch;
            continue;
        }
        if (ch == '#') break;
        out += ch;
    }
    if (in_string) fail(line, "unterminated string");
    std::size_t a = out.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = out.find_last_not_of(" \t\r");
    return out.substr(a, b - a + 1);
}

} // namespace

const std::string& Value::as_string() const {
    if (kind != Kind::String) type_error(*this, "string");
    return str;
}

std::int64_t Value::as_integer() const {
    if (kind != Kind::Integer) type_error(*this, "integer");
    return integer;
}

double Value::as_number() const {
    if (kind != Kind::Float && kind != Kind::Integer) type_error(*this, "number");
    return number;
}

bool Value::as_boolean() const {
    if (kind != Kind::Boolean) type_error(*this, "boolean");
    return boolean;
}

const std::vector<Value>& Value::as_array() const {
    if (kind != Kind::Array) type_error(*this, "array");
    return array;
}

std::vector<double> Value::as_number_array() const {
    const auto& items = as_array();
    std::vector<double> out;
    out.reserve(items.size());
    for (const Value& v : items) out.push_back(v.as_number());
    return out;
}

std::vector<std::vector<double>> Value::as_matrix() const {
    const auto& items = as_array();
    std::vector<std::vector<double>> out;
    out.reserve(items.size());
    for (const Value& v : items) out.push_back(v.as_number_array());
    return out;
}

const Value& Table::at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end())
        throw ParseError("missing required key '" + key + "'" +
                         (line > 0 ? " (table at line " + std::to_string(line) + ")"
                                   : ""));
    return it->second;
}

void Table::allow_only(const std::vector<std::string>& allowed,
                       const std::string& context) const {
    for (const auto& [key, value] : entries) {
        bool ok = false;
        for (const std::string& a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw ParseError("line " + std::to_string(value.line) +
                             ": unknown key '" + key + "' in " + context);
    }
}

const Table* Document::find(const std::string& name) const {
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
}

const std::vector<Table>* Document::find_array(const std::string& name) const {
    auto it = arrays.find(name);
    return it == arrays.end() ? nullptr : &it->second;
}

Document parse(const std::string& text) {
    Document doc;
    Table* target = &doc.root;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = strip_comment(raw, line);
        if (s.empty()) continue;
        if (s.front() == '[') {
            bool is_array = s.size() > 1 && s[1] == '[';
            std::string close = is_array ? "]]" : "]";
            std::size_t end = s.find(close);
            if (end == std::string::npos || end + close.size() != s.size())
                fail(line, "malformed table header");
            std::string name = s.substr(is_array ? 2 : 1, end - (is_array ? 2 : 1));
            if (name.empty()) fail(line, "empty table name");
            for (char ch : name)
                if (!is_bare_key_char(ch))
                    fail(line, "invalid table name '" + name + "'");
            if (is_array) {
                if (doc.tables.count(name))
                    fail(line, "'" + name + "' already used as a plain table");
                doc.arrays[name].push_back(Table{});
                target = &doc.arrays[name].back();
            } else {
                if (doc.tables.count(name))
                    fail(line, "duplicate table '" + name + "'");
                if (doc.arrays.count(name))
                    fail(line, "'" + name + "' already used as an array of tables");
                target = &doc.tables[name];
            }
            target->line = line;
            continue;
        }
        std::size_t eq = std::string::npos;
        {
            bool in_string = false;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] == '"') in_string = !in_string;
                if (!in_string && s[i] == '=') {
                    eq = i;
                    break;
                }
            }
        }
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        std::string key = s.substr(0, eq);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
            key.pop_back();
        if (key.empty()) fail(line, "empty key");
        for (char ch : key)
            if (!is_bare_key_char(ch)) fail(line, "invalid key '" + key + "'");
        if (target->entries.count(key)) fail(line, "duplicate key '" + key + "'");
        std::string rest = s.substr(eq + 1);
        Cursor c{rest, 0, line};
        Value v = parse_value(c);
        c.skip_ws();
        if (!c.done()) fail(line, "trailing characters after value");
        target->entries.emplace(key, std::move(v));
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

} // namespace nusrec::toml
