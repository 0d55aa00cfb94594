#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace blockverify {

/// Dynamically typed runtime value of the block language.
///
/// Lists are 1-indexed at the language level; the storage here is a plain
/// vector, callers translate indices.
class Value {
public:
    using List = std::vector<Value>;
    enum class Kind { Number, Bool, Text, List };

    Value() : data_(0.0) {}

    static Value number(double v) { return Value(Storage(v)); }
    static Value boolean(bool v) { return Value(Storage(v)); }
    static Value text(std::string v) { return Value(Storage(std::move(v))); }
    static Value list(List v) { return Value(Storage(std::move(v))); }

    Kind kind() const { return static_cast<Kind>(data_.index()); }
    bool is_number() const { return kind() == Kind::Number; }
    bool is_bool() const { return kind() == Kind::Bool; }
    bool is_text() const { return kind() == Kind::Text; }
    bool is_list() const { return kind() == Kind::List; }

    double as_number() const { return std::get<double>(data_); }
    bool as_bool() const { return std::get<bool>(data_); }
    const std::string& as_text() const { return std::get<std::string>(data_); }
    const List& as_list() const { return std::get<List>(data_); }
    List& as_list() { return std::get<List>(data_); }

    /// True for numbers with no fractional part.
    bool is_integer() const;

    bool operator==(const Value&) const = default;

private:
    using Storage = std::variant<double, bool, std::string, List>;
    explicit Value(Storage s) : data_(std::move(s)) {}
    Storage data_;
};

std::string_view kind_name(Value::Kind k);

/// Decimal rendering of a number: integral values print without a fraction.
std::string format_number(double v);

/// Display form used by reports: `4`, `true`, `"hi"`, `[1,2,3]`.
std::string to_display(const Value& v);

} // namespace blockverify
