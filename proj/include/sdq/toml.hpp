#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sdq/errors.hpp"

namespace sdq::toml {

// Minimal TOML subset good enough for flat experiment configs:
// [section] headers, key = value pairs, # comments, and values that are
// booleans, integers, floats, double-quoted strings, or single-line arrays
// of those. Keys are exposed flattened as "section.key".

struct Value {
    enum class Type { Bool, Int, Float, String, Array };
    Type type = Type::Int;
    bool b = false;
    long long i = 0;
    double f = 0.0;
    std::string s;
    std::vector<Value> arr;
    int line = 0;

    bool as_bool() const;
    long long as_int() const;
    double as_float() const;        // accepts Int
    const std::string& as_string() const;
    std::vector<double> as_float_array() const;
    std::vector<long long> as_int_array() const;
};

using Table = std::map<std::string, Value>;

Table parse(std::string_view text);
Table parse_file(const std::string& path);

// Canonical "key = value" dump with sorted keys and normalized number
// formatting; input to the config hash.
std::string canonical(const Table& table);

// Serialization helpers for writing nested values back out.
Value make_bool(bool v);
Value make_int(long long v);
Value make_float(double v);
Value make_string(std::string v);
Value make_float_array(const std::vector<double>& v);
Value make_int_array(const std::vector<long long>& v);

}  // namespace sdq::toml
