#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "idyn/vec.hpp"

namespace idyn {

/// Value tree of the scenario config format: `key = value` lines where a value
/// is a number, boolean, quoted string, array `[v, ...]` or table `{ k = v, ... }`.
/// `#` starts a comment. Numbers serialize in shortest round-trip form, so
/// parse -> serialize -> parse is the identity.
class ConfigValue {
  public:
    enum class Type { Number, Boolean, String, Array, Table };

    ConfigValue() : type_(Type::Table) {}
    static ConfigValue number(double v);
    static ConfigValue boolean(bool v);
    static ConfigValue string(std::string v);
    static ConfigValue array(std::vector<ConfigValue> items);
    static ConfigValue table();

    static ConfigValue parse(const std::string& text);
    static ConfigValue parse_file(const std::string& path);
    std::string serialize() const;  // top-level table as key = value lines

    Type type() const { return type_; }
    bool is_table() const { return type_ == Type::Table; }

    double as_number() const;
    bool as_boolean() const;
    const std::string& as_string() const;
    const std::vector<ConfigValue>& as_array() const;
    Vec as_vector() const;  // array of numbers

    bool contains(const std::string& key) const;
    const ConfigValue& at(const std::string& key) const;
    ConfigValue& operator[](const std::string& key);  // table insert/lookup

    // typed lookups with defaults
    double number_or(const std::string& key, double fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;

    /// Keys in insertion order (serialization is deterministic).
    const std::vector<std::string>& keys() const { return order_; }

    friend bool operator==(const ConfigValue& a, const ConfigValue& b);

  private:
    std::string render_value() const;

    Type type_;
    double num_ = 0.0;
    bool bool_ = false;
    std::string str_;
    std::vector<ConfigValue> items_;
    std::map<std::string, ConfigValue> entries_;
    std::vector<std::string> order_;
};

}  // namespace idyn
