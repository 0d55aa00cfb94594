#include "blockverify/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

namespace blockverify {

bool Value::is_integer() const
{
    if (!is_number())
        return false;
    double v = as_number();
    return std::isfinite(v) && std::floor(v) == v;
}

std::string_view kind_name(Value::Kind k)
{
    switch (k) {
    case Value::Kind::Number: return "number";
    case Value::Kind::Bool: return "boolean";
    case Value::Kind::Text: return "text";
    case Value::Kind::List: return "list";
    }
    return "?";
}

std::string format_number(double v)
{
    if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 9.007199254740992e15)
        return std::to_string(static_cast<std::int64_t>(v));
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        return "nan";
    return std::string(buf, end);
}

std::string to_display(const Value& v)
{
    switch (v.kind()) {
    case Value::Kind::Number: return format_number(v.as_number());
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Text: return "\"" + v.as_text() + "\"";
    case Value::Kind::List: {
        std::string out = "[";
        bool first = true;
        for (const auto& e : v.as_list()) {
            if (!first)
                out += ",";
            first = false;
            out += to_display(e);
        }
        return out + "]";
    }
    }
    return "?";
}

} // namespace blockverify
