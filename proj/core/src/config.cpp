#include "idyn/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace idyn {

ConfigValue ConfigValue::number(double v) {
    ConfigValue c;
    c.type_ = Type::Number;
    c.num_ = v;
    return c;
}
ConfigValue ConfigValue::boolean(bool v) {
    ConfigValue c;
    c.type_ = Type::Boolean;
    c.bool_ = v;
    return c;
}
ConfigValue ConfigValue::string(std::string v) {
    ConfigValue c;
    c.type_ = Type::String;
    c.str_ = std::move(v);
    return c;
}
ConfigValue ConfigValue::array(std::vector<ConfigValue> items) {
    ConfigValue c;
    c.type_ = Type::Array;
    c.items_ = std::move(items);
    return c;
}
ConfigValue ConfigValue::table() { return ConfigValue(); }

double ConfigValue::as_number() const {
    if (type_ != Type::Number) throw std::runtime_error("config: expected a number");
    return num_;
}
bool ConfigValue::as_boolean() const {
    if (type_ != Type::Boolean) throw std::runtime_error("config: expected a boolean");
    return bool_;
}
const std::string& ConfigValue::as_string() const {
    if (type_ != Type::String) throw std::runtime_error("config: expected a string");
    return str_;
}
const std::vector<ConfigValue>& ConfigValue::as_array() const {
    if (type_ != Type::Array) throw std::runtime_error("config: expected an array");
    return items_;
}
Vec ConfigValue::as_vector() const {
    const auto& arr = as_array();
    Vec v;
    v.reserve(arr.size());
    for (const auto& item : arr) v.push_back(item.as_number());
    return v;
}

bool ConfigValue::contains(const std::string& key) const {
    return type_ == Type::Table && entries_.count(key) > 0;
}
const ConfigValue& ConfigValue::at(const std::string& key) const {
    if (type_ != Type::Table) throw std::runtime_error("config: expected a table");
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::runtime_error("config: missing key '" + key + "'");
    return it->second;
}
ConfigValue& ConfigValue::operator[](const std::string& key) {
    if (type_ != Type::Table) throw std::runtime_error("config: expected a table");
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        order_.push_back(key);
        return entries_[key];
    }
    return it->second;
}

double ConfigValue::number_or(const std::string& key, double fallback) const {
    return contains(key) ? at(key).as_number() : fallback;
}
bool ConfigValue::boolean_or(const std::string& key, bool fallback) const {
    return contains(key) ? at(key).as_boolean() : fallback;
}
std::string ConfigValue::string_or(const std::string& key, const std::string& fallback) const {
    return contains(key) ? at(key).as_string() : fallback;
}

bool operator==(const ConfigValue& a, const ConfigValue& b) {
    if (a.type_ != b.type_) return false;
    switch (a.type_) {
        case ConfigValue::Type::Number: return a.num_ == b.num_;
        case ConfigValue::Type::Boolean: return a.bool_ == b.bool_;
        case ConfigValue::Type::String: return a.str_ == b.str_;
        case ConfigValue::Type::Array: return a.items_ == b.items_;
        case ConfigValue::Type::Table:
            return a.entries_ == b.entries_ && a.order_ == b.order_;
    }
    return false;
}

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws(bool newlines) {
        while (pos < text.size()) {
            const char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                ++pos;
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw std::runtime_error("config parse error at line " + std::to_string(line) + ": " + what);
    }

    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string parse_key() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '-'))
            ++pos;
        if (pos == start) fail("expected a key");
        return text.substr(start, pos - start);
    }

    ConfigValue parse_value() {
        skip_ws(false);
        if (pos >= text.size()) fail("expected a value");
        const char c = text[pos];
        if (c == '{') return parse_table(true);
        if (c == '[') return parse_array();
        if (c == '"') return parse_string();
        if (text.compare(pos, 4, "true") == 0 &&
            (pos + 4 == text.size() || !std::isalnum(static_cast<unsigned char>(text[pos + 4])))) {
            pos += 4;
            return ConfigValue::boolean(true);
        }
        if (text.compare(pos, 5, "false") == 0 &&
            (pos + 5 == text.size() || !std::isalnum(static_cast<unsigned char>(text[pos + 5])))) {
            pos += 5;
            return ConfigValue::boolean(false);
        }
        return parse_number();
    }

    ConfigValue parse_string() {
        ++pos;  // opening quote
        std::string out;
        while (pos < text.size() && text[pos] != '"') {
            if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
            out.push_back(text[pos++]);
        }
        if (!eat('"')) fail("unterminated string");
        return ConfigValue::string(std::move(out));
    }

    ConfigValue parse_number() {
        const char* begin = text.data() + pos;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
        if (ec != std::errc{}) fail("expected a number");
        pos += static_cast<std::size_t>(ptr - begin);
        return ConfigValue::number(v);
    }

    ConfigValue parse_array() {
        ++pos;  // '['
        std::vector<ConfigValue> items;
        skip_ws(true);
        if (eat(']')) return ConfigValue::array(std::move(items));
        while (true) {
            items.push_back(parse_value());
            skip_ws(true);
            if (eat(']')) break;
            if (!eat(',')) fail("expected ',' or ']' in array");
            skip_ws(true);
        }
        return ConfigValue::array(std::move(items));
    }

    ConfigValue parse_table(bool braced) {
        ConfigValue table = ConfigValue::table();
        if (braced) ++pos;  // '{'
        while (true) {
            skip_ws(true);
            if (braced && eat('}')) return table;
            if (pos >= text.size()) {
                if (braced) fail("unterminated table");
                return table;
            }
            std::string key = parse_key();
            skip_ws(false);
            if (!eat('=')) fail("expected '=' after key '" + key + "'");
            if (table.contains(key)) fail("duplicate key '" + key + "'");
            table[key] = parse_value();
            skip_ws(false);
            if (braced) {
                skip_ws(true);
                if (eat('}')) return table;
                if (!eat(',')) fail("expected ',' or '}' in table");
            } else {
                if (pos < text.size() && text[pos] == '\n') ++pos;
            }
        }
    }
};

std::string render_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

ConfigValue ConfigValue::parse(const std::string& text) {
    Parser p{text};
    ConfigValue root = p.parse_table(false);
    p.skip_ws(true);
    if (p.pos != text.size()) p.fail("trailing content");
    return root;
}

ConfigValue ConfigValue::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ConfigValue::render_value() const {
    switch (type_) {
        case Type::Number: return render_number(num_);
        case Type::Boolean: return bool_ ? "true" : "false";
        case Type::String: {
            std::string out = "\"";
            for (char c : str_) {
                if (c == '"' || c == '\\') out.push_back('\\');
                out.push_back(c);
            }
            out.push_back('"');
            return out;
        }
        case Type::Array: {
            std::string out = "[";
            for (std::size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ", ";
                out += items_[i].render_value();
            }
            out += "]";
            return out;
        }
        case Type::Table: {
            std::string out = "{ ";
            for (std::size_t i = 0; i < order_.size(); ++i) {
                if (i) out += ", ";
                out += order_[i] + " = " + entries_.at(order_[i]).render_value();
            }
            out += order_.empty() ? "}" : " }";
            return out;
        }
    }
    return "";
}

std::string ConfigValue::serialize() const {
    if (type_ != Type::Table) return render_value();
    std::string out;
    for (const auto& key : order_) out += key + " = " + entries_.at(key).render_value() + "\n";
    return out;
}

}  // namespace idyn
