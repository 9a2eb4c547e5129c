#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nusrec::toml {

// Minimal TOML subset: top-level tables [name] and arrays of tables
// [[name]], bare keys, scalars (string, integer, float, boolean), single-line
// arrays (nesting allowed), # comments. No dotted keys, inline tables,
// datetimes, or multi-line values. Errors carry 1-based line numbers.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Value {
    enum class Kind { String, Integer, Float, Boolean, Array };
    Kind kind = Kind::String;
    std::string str;
    std::int64_t integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::vector<Value> array;
    int line = 0;

    const std::string& as_string() const;
    std::int64_t as_integer() const;
    double as_number() const; // Float or Integer
    bool as_boolean() const;
    const std::vector<Value>& as_array() const;
    std::vector<double> as_number_array() const;
    std::vector<std::vector<double>> as_matrix() const; // array of number arrays
};

struct Table {
    std::map<std::string, Value> entries;
    int line = 0;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    const Value& at(const std::string& key) const; // throws naming the key
    // Throws unless every present key appears in `allowed`; call sites use
    // this to reject misspelled configuration.
    void allow_only(const std::vector<std::string>& allowed,
                    const std::string& context) const;
};

struct Document {
    Table root;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> arrays;

    const Table* find(const std::string& name) const;
    const std::vector<Table>* find_array(const std::string& name) const;
};

Document parse(const std::string& text);
Document parse_file(const std::string& path);

} // namespace nusrec::toml
