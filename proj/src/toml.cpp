#include "sdq/toml.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sdq::toml {

bool Value::as_bool() const {
    if (type != Type::Bool) throw ConfigError("expected a boolean", line);
    return b;
}

long long Value::as_int() const {
    if (type != Type::Int) throw ConfigError("expected an integer", line);
    return i;
}

double Value::as_float() const {
    if (type == Type::Int) return static_cast<double>(i);
    if (type != Type::Float) throw ConfigError("expected a number", line);
    return f;
}

const std::string& Value::as_string() const {
    if (type != Type::String) throw ConfigError("expected a string", line);
    return s;
}

std::vector<double> Value::as_float_array() const {
    if (type != Type::Array) throw ConfigError("expected an array", line);
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) out.push_back(v.as_float());
    return out;
}

std::vector<long long> Value::as_int_array() const {
    if (type != Type::Array) throw ConfigError("expected an array of integers", line);
    std::vector<long long> out;
    out.reserve(arr.size());
    for (const auto& v : arr) out.push_back(v.as_int());
    return out;
}

namespace {

struct Cursor {
    std::string_view text;
    size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }
    void skip_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) advance();
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
    std::string key;
    while (!c.done() && is_bare_key_char(c.peek())) {
        key.push_back(c.peek());
        c.advance();
    }
    if (key.empty()) throw ConfigError("expected a key", c.line);
    return key;
}

Value parse_scalar(Cursor& c);

Value parse_string(Cursor& c) {
    Value v;
    v.type = Value::Type::String;
    v.line = c.line;
    c.advance();  // opening quote
    while (true) {
        if (c.done() || c.peek() == '\n')
            throw ConfigError("unterminated string", v.line);
        char ch = c.peek();
        c.advance();
        if (ch == '"') break;
        if (ch == '\\') {
            if (c.done()) throw ConfigError("unterminated escape", v.line);
            char esc = c.peek();
            c.advance();
            switch (esc) {
                case 'n': v.s.push_back('\n'); break;
                case 't': v.s.push_back('\t'); break;
                case '"': v.s.push_back('"'); break;
                case '\\': v.s.push_back('\\'); break;
                default: throw ConfigError("unsupported escape sequence", v.line);
            }
        } else {
            v.s.push_back(ch);
        }
    }
    return v;
}

Value parse_number_or_bool(Cursor& c) {
    Value v;
    v.line = c.line;
    std::string tok;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '#') break;
        tok.push_back(ch);
        c.advance();
    }
    if (tok == "true" || tok == "false") {
        v.type = Value::Type::Bool;
        v.b = (tok == "true");
        return v;
    }
    bool is_float = tok.find_first_of(".eE") != std::string::npos &&
                    tok.find("0x") != 0;
    const char* begin = tok.c_str();
    char* end = nullptr;
    if (is_float) {
        v.type = Value::Type::Float;
        v.f = std::strtod(begin, &end);
    } else {
        v.type = Value::Type::Int;
        v.i = std::strtoll(begin, &end, 10);
    }
    if (end == begin || *end != '\0')
        throw ConfigError("malformed value '" + tok + "'", v.line);
    return v;
}

Value parse_array(Cursor& c) {
    Value v;
    v.type = Value::Type::Array;
    v.line = c.line;
    c.advance();  // '['
    while (true) {
        c.skip_ws();
        if (c.done() || c.peek() == '\n')
            throw ConfigError("unterminated array (arrays must be single-line)", v.line);
        if (c.peek() == ']') {
            c.advance();
            break;
        }
        v.arr.push_back(parse_scalar(c));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            c.advance();
            continue;
        }
        if (!c.done() && c.peek() == ']') {
            c.advance();
            break;
        }
        throw ConfigError("expected ',' or ']' in array", c.line);
    }
    return v;
}

Value parse_scalar(Cursor& c) {
    if (c.peek() == '"') return parse_string(c);
    if (c.peek() == '[') return parse_array(c);
    return parse_number_or_bool(c);
}

}  // namespace

Table parse(std::string_view text) {
    Table table;
    Cursor c{text};
    std::string section;
    while (!c.done()) {
        c.skip_ws();
        if (c.done()) break;
        char ch = c.peek();
        if (ch == '\n') {
            c.advance();
            continue;
        }
        if (ch == '#') {
            while (!c.done() && c.peek() != '\n') c.advance();
            continue;
        }
        if (ch == '[') {
            int line = c.line;
            c.advance();
            c.skip_ws();
            section = parse_bare_key(c);
            while (!c.done() && c.peek() == '.') {
                c.advance();
                section += "." + parse_bare_key(c);
            }
            c.skip_ws();
            if (c.done() || c.peek() != ']')
                throw ConfigError("expected ']' to close section header", line);
            c.advance();
            continue;
        }
        int line = c.line;
        std::string key = parse_bare_key(c);
        c.skip_ws();
        if (c.done() || c.peek() != '=')
            throw ConfigError("expected '=' after key '" + key + "'", line);
        c.advance();
        c.skip_ws();
        if (c.done() || c.peek() == '\n' || c.peek() == '#')
            throw ConfigError("missing value for key '" + key + "'", line);
        Value v = parse_scalar(c);
        v.line = line;
        std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full))
            throw ConfigError("duplicate key '" + full + "'", line);
        table.emplace(std::move(full), std::move(v));
        c.skip_ws();
        if (!c.done() && c.peek() == '#')
            while (!c.done() && c.peek() != '\n') c.advance();
        if (!c.done() && c.peek() != '\n')
            throw ConfigError("trailing characters after value for '" + key + "'", line);
    }
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

void dump_value(std::string& out, const Value& v) {
    char buf[64];
    switch (v.type) {
        case Value::Type::Bool:
            out += v.b ? "true" : "false";
            break;
        case Value::Type::Int:
            std::snprintf(buf, sizeof buf, "%lld", v.i);
            out += buf;
            break;
        case Value::Type::Float:
            std::snprintf(buf, sizeof buf, "%.17g", v.f);
            out += buf;
            break;
        case Value::Type::String:
            out += '"';
            for (char ch : v.s) {
                if (ch == '"' || ch == '\\') out += '\\';
                out += ch;
            }
            out += '"';
            break;
        case Value::Type::Array:
            out += '[';
            for (size_t i = 0; i < v.arr.size(); ++i) {
                if (i) out += ',';
                dump_value(out, v.arr[i]);
            }
            out += ']';
            break;
    }
}

}  // namespace

std::string canonical(const Table& table) {
    std::string out;
    for (const auto& [key, value] : table) {  // std::map iterates sorted
        out += key;
        out += '=';
        dump_value(out, value);
        out += '\n';
    }
    return out;
}

Value make_bool(bool v) { Value x; x.type = Value::Type::Bool; x.b = v; return x; }
Value make_int(long long v) { Value x; x.type = Value::Type::Int; x.i = v; return x; }
Value make_float(double v) { Value x; x.type = Value::Type::Float; x.f = v; return x; }
Value make_string(std::string v) { Value x; x.type = Value::Type::String; x.s = std::move(v); return x; }
Value make_float_array(const std::vector<double>& v) {
    Value x;
    x.type = Value::Type::Array;
    for (double d : v) x.arr.push_back(make_float(d));
    return x;
}
Value make_int_array(const std::vector<long long>& v) {
    Value x;
    x.type = Value::Type::Array;
    for (long long d : v) x.arr.push_back(make_int(d));
    return x;
}

}  // namespace sdq::toml
