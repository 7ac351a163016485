// config.hpp — Reader for the model-file format: a TOML subset with [section]
// tables, repeatable [[block]] tables, and key = value pairs where values are
// numbers, booleans, strings, arrays, or inline tables.

#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "oqs/errors.hpp"
#include "oqs/textio.hpp"

namespace oqs {

class ConfigValue {
public:
    using Array = std::vector<ConfigValue>;
    using Table = std::map<std::string, ConfigValue>;

    ConfigValue() : v_(0.0) {}
    explicit ConfigValue(double d) : v_(d) {}
    explicit ConfigValue(bool b) : v_(b) {}
    explicit ConfigValue(std::string s) : v_(std::move(s)) {}
    explicit ConfigValue(Array a) : v_(std::move(a)) {}
    explicit ConfigValue(Table t) : v_(std::move(t)) {}

    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }
    bool is_table() const { return std::holds_alternative<Table>(v_); }

    double as_number(const std::string& what) const {
        if (!is_number()) throw ValidationError(what + ": expected a number");
        return std::get<double>(v_);
    }
    bool as_bool(const std::string& what) const {
        if (!is_bool()) throw ValidationError(what + ": expected true/false");
        return std::get<bool>(v_);
    }
    const std::string& as_string(const std::string& what) const {
        if (!is_string()) throw ValidationError(what + ": expected a string");
        return std::get<std::string>(v_);
    }
    const Array& as_array(const std::string& what) const {
        if (!is_array()) throw ValidationError(what + ": expected an array");
        return std::get<Array>(v_);
    }
    const Table& as_table(const std::string& what) const {
        if (!is_table()) throw ValidationError(what + ": expected an inline table");
        return std::get<Table>(v_);
    }

private:
    std::variant<double, bool, std::string, Array, Table> v_;
};

struct ConfigFile {
    ConfigValue::Table root;                                    // keys before any section
    std::map<std::string, ConfigValue::Table> sections;        // [name]
    std::map<std::string, std::vector<ConfigValue::Table>> blocks; // [[name]]

    bool has_section(const std::string& name) const { return sections.count(name) > 0; }
    const ConfigValue::Table& section(const std::string& name) const {
        auto it = sections.find(name);
        if (it == sections.end())
            throw ValidationError("config: missing section [" + name + "]");
        return it->second;
    }
    const std::vector<ConfigValue::Table>& block_list(const std::string& name) const {
        static const std::vector<ConfigValue::Table> empty;
        auto it = blocks.find(name);
        return it == blocks.end() ? empty : it->second;
    }
};

namespace detail {

class ConfigParser {
public:
    ConfigParser(std::string_view text, std::string origin)
        : text_(text), origin_(std::move(origin)) {}

    ConfigFile parse() {
        ConfigFile out;
        ConfigValue::Table* target = &out.root;
        skip_space(true);
        while (!at_end()) {
            if (peek() == '[') {
                get();
                const bool is_block = !at_end() && peek() == '[';
                if (is_block) get();
                skip_space(false);
                const std::string name = bare_key();
                skip_space(false);
                expect(']');
                if (is_block) expect(']');
                if (is_block) {
                    out.blocks[name].emplace_back();
                    target = &out.blocks[name].back();
                } else {
                    if (out.sections.count(name))
                        fail("duplicate section [" + name + "]");
                    target = &out.sections[name];
                }
            } else {
                const std::string key = bare_key();
                skip_space(false);
                expect('=');
                skip_space(true);
                if (target->count(key)) fail("duplicate key '" + key + "'");
                (*target)[key] = value();
            }
            skip_space(true);
        }
        return out;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char get() {
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError(origin_ + ":" + std::to_string(line_) + ": " + msg);
    }

    void expect(char c) {
        if (at_end() || peek() != c)
            fail(std::string("expected '") + c + "'");
        get();
    }

    // Whitespace and comments; newlines only when allowed.
    void skip_space(bool newlines) {
        while (!at_end()) {
            const char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') get();
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                get();
            } else {
                break;
            }
        }
    }

    std::string bare_key() {
        std::string out;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                             peek() == '-')) {
            out.push_back(get());
        }
        if (out.empty()) fail("expected a key");
        return out;
    }

    ConfigValue value() {
        skip_space(true);
        if (at_end()) fail("expected a value");
        const char c = peek();
        if (c == '"') return ConfigValue(quoted_string());
        if (c == '[') return ConfigValue(array());
        if (c == '{') return ConfigValue(inline_table());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::string word = bare_key();
            if (word == "true") return ConfigValue(true);
            if (word == "false") return ConfigValue(false);
            fail("unexpected bare word '" + word + "'");
        }
        return ConfigValue(number());
    }

    std::string quoted_string() {
        expect('"');
        std::string out;
        while (!at_end() && peek() != '"') {
            char c = get();
            if (c == '\\' && !at_end()) {
                const char e = get();
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out.push_back(c);
        }
        expect('"');
        return out;
    }

    double number() {
        std::string tok;
        while (!at_end()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                c == '.' || c == 'e' || c == 'E') {
                tok.push_back(get());
            } else {
                break;
            }
        }
        if (tok.empty()) fail("expected a number");
        try {
            return parse_double(tok);
        } catch (const ValidationError&) {
            fail("malformed number '" + tok + "'");
        }
    }

    ConfigValue::Array array() {
        expect('[');
        ConfigValue::Array out;
        skip_space(true);
        while (!at_end() && peek() != ']') {
            out.push_back(value());
            skip_space(true);
            if (!at_end() && peek() == ',') {
                get();
                skip_space(true);
            }
        }
        expect(']');
        return out;
    }

    ConfigValue::Table inline_table() {
        expect('{');
        ConfigValue::Table out;
        skip_space(true);
        while (!at_end() && peek() != '}') {
            const std::string key = bare_key();
            skip_space(false);
            expect('=');
            if (out.count(key)) fail("duplicate key '" + key + "'");
            out[key] = value();
            skip_space(true);
            if (!at_end() && peek() == ',') {
                get();
                skip_space(true);
            }
        }
        expect('}');
        return out;
    }

    std::string_view text_;
    std::string origin_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace detail

inline ConfigFile parse_config(std::string_view text, const std::string& origin = "<config>") {
    return detail::ConfigParser(text, origin).parse();
}

} // namespace oqs
