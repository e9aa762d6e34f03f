#include "bellcav_app/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace bellcav::app {

const TomlValue* TomlDocument::find(const std::string& table, const std::string& key) const
{
    auto it = tables.find(table);
    if (it == tables.end())
        return nullptr;
    for (const auto& [k, v] : it->second)
        if (k == key)
            return &v;
    return nullptr;
}

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::string& source) : s_(text), source_(source) {}

    TomlDocument run()
    {
        TomlDocument doc;
        doc.tables[""];
        std::string table;
        std::set<std::string> headers;
        while (true) {
            skip_blank_lines();
            if (eof())
                break;
            if (peek() == '[') {
                ++pos_;
                skip_ws();
                const std::string name = table_name();
                skip_ws();
                expect(']');
                end_of_line();
                if (!headers.insert(name).second || !doc.tables[name].empty())
                    fail("duplicate table [" + name + "]");
                doc.tables[name];
                table = name;
                continue;
            }
            const std::string key = bare_key();
            skip_ws();
            expect('=');
            skip_ws();
            TomlValue v = value();
            end_of_line();
            auto& entries = doc.tables[table];
            for (const auto& e : entries)
                if (e.first == key)
                    fail("duplicate key '" + qualified(table, key) + "'");
            entries.emplace_back(key, std::move(v));
        }
        return doc;
    }

private:
    const std::string& s_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;

    static std::string qualified(const std::string& table, const std::string& key)
    {
        return table.empty() ? key : table + "." + key;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        std::ostringstream os;
        os << source_ << ":" << line_ << ": " << msg;
        throw ConfigError(os.str());
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    void expect(char c)
    {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws()
    {
        while (!eof() && (peek() == ' ' || peek() == '\t'))
            ++pos_;
    }

    void skip_comment()
    {
        if (peek() == '#')
            while (!eof() && peek() != '\n')
                ++pos_;
    }

    void skip_blank_lines()
    {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\r')
                ++pos_;
            if (peek() == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            break;
        }
    }

    void end_of_line()
    {
        skip_ws();
        skip_comment();
        if (peek() == '\r')
            ++pos_;
        if (eof())
            return;
        if (peek() != '\n')
            fail("unexpected trailing characters");
        ++pos_;
        ++line_;
    }

    static bool key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

    std::string bare_key()
    {
        const std::size_t start = pos_;
        while (!eof() && key_char(peek()))
            ++pos_;
        if (start == pos_)
            fail("expected a key");
        return s_.substr(start, pos_ - start);
    }

    std::string table_name()
    {
        std::string name = bare_key();
        while (peek() == '.') {
            ++pos_;
            name += "." + bare_key();
        }
        return name;
    }

    // whitespace, newlines and comments inside arrays
    void skip_array_space()
    {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\r') {
                ++pos_;
                continue;
            }
            if (peek() == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            break;
        }
    }

    TomlValue value()
    {
        const char c = peek();
        if (c == '"')
            return string_value();
        if (c == '[')
            return array_value();
        if (s_.compare(pos_, 4, "true") == 0 && !key_char(s_.size() > pos_ + 4 ? s_[pos_ + 4] : ' ')) {
            pos_ += 4;
            TomlValue v;
            v.kind = TomlValue::Kind::boolean;
            v.boolean = true;
            return v;
        }
        if (s_.compare(pos_, 5, "false") == 0 && !key_char(s_.size() > pos_ + 5 ? s_[pos_ + 5] : ' ')) {
            pos_ += 5;
            TomlValue v;
            v.kind = TomlValue::Kind::boolean;
            v.boolean = false;
            return v;
        }
        return number_value();
    }

    TomlValue string_value()
    {
        expect('"');
        TomlValue v;
        v.kind = TomlValue::Kind::string;
        while (true) {
            if (eof() || peek() == '\n')
                fail("unterminated string");
            char c = s_[pos_++];
            if (c == '"')
                break;
            if (c == '\\') {
                if (eof())
                    fail("unterminated escape");
                const char e = s_[pos_++];
                switch (e) {
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            }
            v.text.push_back(c);
        }
        return v;
    }

    TomlValue array_value()
    {
        expect('[');
        TomlValue v;
        v.kind = TomlValue::Kind::array;
        skip_array_space();
        if (peek() == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            skip_array_space();
            v.items.push_back(value());
            skip_array_space();
            if (peek() == ',') {
                ++pos_;
                skip_array_space();
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                continue;
            }
            expect(']');
            break;
        }
        return v;
    }

    TomlValue number_value()
    {
        const std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-'
                          || peek() == '.' || peek() == '_'))
            ++pos_;
        std::string tok = s_.substr(start, pos_ - start);
        if (tok.empty())
            fail("expected a value");
        std::string clean;
        for (char c : tok)
            if (c != '_')
                clean.push_back(c);

        TomlValue v;
        std::string body = clean;
        bool negative = false;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            negative = body[0] == '-';
            body = body.substr(1);
        }
        if (body == "inf" || body == "nan") {
            v.kind = TomlValue::Kind::number;
            v.number = body == "inf" ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
            if (negative)
                v.number = -v.number;
            return v;
        }
        const bool integral = clean.find_first_of(".eE") == std::string::npos;
        const char* first = clean.data() + (clean[0] == '+' ? 1 : 0);
        const char* last = clean.data() + clean.size();
        if (integral) {
            std::int64_t iv = 0;
            auto [p, ec] = std::from_chars(first, last, iv);
            if (ec != std::errc() || p != last)
                fail("invalid integer '" + tok + "'");
            v.kind = TomlValue::Kind::integer;
            v.integer = iv;
            v.number = static_cast<double>(iv);
            return v;
        }
        double dv = 0.0;
        auto [p, ec] = std::from_chars(first, last, dv);
        if (ec != std::errc() || p != last)
            fail("invalid number '" + tok + "'");
        v.kind = TomlValue::Kind::number;
        v.number = dv;
        return v;
    }
};

}  // namespace

TomlDocument parse_toml(const std::string& text, const std::string& source)
{
    return Parser(text, source).run();
}

TomlDocument parse_toml_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str(), path);
}

}  // namespace bellcav::app
