#include "blockverify/args.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

namespace blockverify {

namespace {

struct Reader {
    std::string_view s;
    std::size_t pos = 0;

    void skip()
    {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }

    std::optional<Value> value()
    {
        skip();
        if (pos >= s.size())
            return std::nullopt;
        char c = s[pos];
        if (c == '[') {
            ++pos;
            Value::List items;
            skip();
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return Value::list(std::move(items));
            }
            while (true) {
                auto v = value();
                if (!v)
                    return std::nullopt;
                items.push_back(std::move(*v));
                skip();
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < s.size() && s[pos] == ']') {
                    ++pos;
                    return Value::list(std::move(items));
                }
                return std::nullopt;
            }
        }
        if (c == '"' || c == '\'') {
            auto end = s.find(c, pos + 1);
            if (end == std::string_view::npos)
                return std::nullopt;
            Value v = Value::text(std::string(s.substr(pos + 1, end - pos - 1)));
            pos = end + 1;
            return v;
        }
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && !std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
        std::string_view word = s.substr(start, pos - start);
        if (word == "true")
            return Value::boolean(true);
        if (word == "false")
            return Value::boolean(false);
        static const std::regex number(R"(-?[0-9]+(\.[0-9]+)?)");
        if (!std::regex_match(word.begin(), word.end(), number))
            return std::nullopt;
        double d = 0;
        auto [p, ec] = std::from_chars(word.data(), word.data() + word.size(), d);
        if (ec != std::errc() || p != word.data() + word.size() || !std::isfinite(d))
            return std::nullopt;
        return Value::number(d);
    }
};

[[noreturn]] void fail(std::string message)
{
    throw DiagnosticError("E_ARGS", {make_error(Phase::Parse, "E_ARGS", std::move(message))});
}

} // namespace

std::optional<Value> parse_literal(std::string_view text)
{
    Reader r{text};
    auto v = r.value();
    r.skip();
    if (!v || r.pos != text.size())
        return std::nullopt;
    return v;
}

Bindings bind_args(const std::vector<std::string>& raw, const BlockDef* block)
{
    Bindings out;
    std::size_t positional = 0;
    for (const auto& a : raw) {
        std::string name;
        std::string_view literal = a;
        auto eq = a.find('=');
        if (eq != std::string::npos && eq > 0 && is_identifier(std::string_view(a).substr(0, eq))) {
            name = a.substr(0, eq);
            literal = std::string_view(a).substr(eq + 1);
        }
        auto v = parse_literal(literal);
        if (!v)
            fail("cannot read argument '" + a + "': use an integer, true/false, [1,2,3] or \"text\"");
        if (name.empty()) {
            // Extra arguments keep a placeholder name so the runner reports
            // the arity mismatch.
            if (!block || positional >= block->params.size())
                name = "#" + std::to_string(positional++ + 1);
            else
                name = block->params[positional++].name;
        }
        for (const auto& [n, _] : out)
            if (n == name)
                fail("input '" + name + "' is given twice");
        out.emplace_back(name, std::move(*v));
    }
    return out;
}

} // namespace blockverify
