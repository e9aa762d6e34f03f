#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bellcav/types.hpp"

namespace bellcav::app {

/// Configuration error; the message names the offending key path.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct TomlValue {
    enum class Kind { integer, number, string, boolean, array };

    Kind kind = Kind::number;
    std::int64_t integer = 0;
    double number = 0.0;
    std::string text;
    bool boolean = false;
    std::vector<TomlValue> items;

    bool is_numeric() const { return kind == Kind::integer || kind == Kind::number; }
    double as_double() const { return kind == Kind::integer ? static_cast<double>(integer) : number; }
};

/// Tables keyed by their dotted header ("" for the root), each an ordered key list.
struct TomlDocument {
    std::map<std::string, std::vector<std::pair<std::string, TomlValue>>> tables;

    const TomlValue* find(const std::string& table, const std::string& key) const;
};

/// Parses a TOML subset: [table] headers, bare keys, strings, numbers (incl. inf), booleans,
/// arrays (may span lines) and # comments.
TomlDocument parse_toml(const std::string& text, const std::string& source = "<string>");

TomlDocument parse_toml_file(const std::string& path);

}  // namespace bellcav::app
