#pragma once

// Abstract syntax of the block language and its contract constructs.
//
// Every Expr and Stmt node carries a BlockId of the form `<definition>#<n>`,
// assigned in document order by assign_block_ids(). The hat block of a
// definition is `<definition>#0`.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "blockverify/value.hpp"

namespace blockverify {

using BlockId = std::string;

/// Owning pointer with value semantics: copies are deep, equality compares
/// the pointees.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other)
    {
        if (this != &other)
            ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    bool operator==(const Box& other) const { return *ptr_ == *other.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

enum class ArithOp { Add, Sub, Mul, Div, Mod };
enum class CompareOp { Eq, Neq, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or, Not, Implies, Iff, Xor };
enum class QuantKind { ForAll, Exists };
enum class BlockKind { Command, Reporter, Predicate };

/// Optional parameter annotation. Only Int, Bool and IntList are accepted by
/// the static pipeline; Text is a runtime-only annotation.
enum class DeclaredType { Int, Bool, IntList, Text };

struct Expr;

namespace expr {

struct Literal {
    Value value;
    bool operator==(const Literal&) const = default;
};
struct VarRef {
    std::string name;
    bool operator==(const VarRef&) const = default;
};
struct Arith {
    ArithOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    bool operator==(const Arith&) const = default;
};
struct Compare {
    CompareOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    bool operator==(const Compare&) const = default;
};
struct Logic {
    LogicOp op;
    std::vector<Expr> operands;
    bool operator==(const Logic&) const = default;
};
/// `old(var)`: the variable's value on entry to the enclosing block.
struct Old {
    std::string var;
    bool operator==(const Old&) const = default;
};
/// The value reported by the enclosing reporter/predicate.
struct Result {
    bool operator==(const Result&) const = default;
};
/// Inclusive integer range; empty when lo > hi.
struct RangeDomain {
    Box<Expr> lo;
    Box<Expr> hi;
    bool operator==(const RangeDomain&) const = default;
};
struct ElementsDomain {
    Box<Expr> list;
    bool operator==(const ElementsDomain&) const = default;
};
using Domain = std::variant<RangeDomain, ElementsDomain>;

struct Quantifier {
    QuantKind kind;
    std::string var;
    Domain domain;
    Box<Expr> body;
    bool operator==(const Quantifier&) const = default;
};
struct ItemOf {
    Box<Expr> index;
    Box<Expr> list;
    bool operator==(const ItemOf&) const = default;
};
struct LengthOf {
    Box<Expr> list;
    bool operator==(const LengthOf&) const = default;
};
struct Contains {
    Box<Expr> list;
    Box<Expr> element;
    bool operator==(const Contains&) const = default;
};
struct Call {
    std::string block;
    std::vector<Expr> args;
    bool operator==(const Call&) const = default;
};

} // namespace expr

struct Expr {
    using Node = std::variant<expr::Literal, expr::VarRef, expr::Arith, expr::Compare, expr::Logic,
                              expr::Old, expr::Result, expr::Quantifier, expr::ItemOf,
                              expr::LengthOf, expr::Contains, expr::Call>;
    BlockId id;
    Node node;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }
    template <typename T>
    bool is() const { return std::holds_alternative<T>(node); }

    bool operator==(const Expr&) const = default;
};

struct Stmt;

namespace stmt {

struct DeclareLocals {
    std::vector<std::string> names;
    bool operator==(const DeclareLocals&) const = default;
};
struct SetVar {
    std::string name;
    Expr value;
    bool operator==(const SetVar&) const = default;
};
struct ChangeVar {
    std::string name;
    Expr delta;
    bool operator==(const ChangeVar&) const = default;
};
struct IfElse {
    Expr cond;
    std::vector<Stmt> then_branch;
    std::vector<Stmt> else_branch;
    bool operator==(const IfElse&) const = default;
};
struct RepeatN {
    Expr count;
    std::vector<Expr> invariant;
    std::vector<Stmt> body;
    bool operator==(const RepeatN&) const = default;
};
struct RepeatUntil {
    Expr cond;
    std::vector<Expr> invariant;
    std::vector<Stmt> body;
    bool operator==(const RepeatUntil&) const = default;
};
struct Assert {
    Expr cond;
    bool operator==(const Assert&) const = default;
};
struct Report {
    Expr value;
    bool operator==(const Report&) const = default;
};
struct CallCommand {
    std::string block;
    std::vector<Expr> args;
    bool operator==(const CallCommand&) const = default;
};
/// `add element to list`.
struct AddToList {
    Expr element;
    std::string list;
    bool operator==(const AddToList&) const = default;
};
/// `replace item index of list with element`.
struct ReplaceItem {
    Expr index;
    std::string list;
    Expr element;
    bool operator==(const ReplaceItem&) const = default;
};

} // namespace stmt

struct Stmt {
    using Node = std::variant<stmt::DeclareLocals, stmt::SetVar, stmt::ChangeVar, stmt::IfElse,
                              stmt::RepeatN, stmt::RepeatUntil, stmt::Assert, stmt::Report,
                              stmt::CallCommand, stmt::AddToList, stmt::ReplaceItem>;
    BlockId id;
    Node node;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }
    template <typename T>
    bool is() const { return std::holds_alternative<T>(node); }

    bool operator==(const Stmt&) const = default;
};

struct Param {
    std::string name;
    std::optional<DeclaredType> type;
    bool operator==(const Param&) const = default;
};

/// A user-defined ("build your own") block with its contract.
/// Empty pre/post lists mean `true`; several slots are conjoined in order.
struct BlockDef {
    std::string name;
    BlockKind kind = BlockKind::Command;
    std::vector<Param> params;
    std::vector<Expr> pre;
    std::vector<Expr> post;
    std::vector<Stmt> body;
    BlockId id;

    bool returns_value() const { return kind != BlockKind::Command; }
    bool operator==(const BlockDef&) const = default;
};

struct EntryScript {
    std::string name;
    std::vector<Stmt> body;
    BlockId id;
    bool operator==(const EntryScript&) const = default;
};

struct Global {
    std::string name;
    Value initial;
    bool operator==(const Global&) const = default;
};

struct Program {
    std::vector<Global> globals;
    std::vector<BlockDef> blocks;
    std::vector<EntryScript> entry_scripts;

    const BlockDef* find_block(std::string_view name) const;
    const EntryScript* find_entry_script(std::string_view name) const;
    const Global* find_global(std::string_view name) const;

    bool operator==(const Program&) const = default;
};

/// Assigns `<definition>#<n>` ids in document order (pre, post, body; each
/// node before its children). Re-running on an unchanged program is a no-op.
void assign_block_ids(Program& program);

std::string_view to_string(ArithOp op);
std::string_view to_string(CompareOp op);
std::string_view to_string(LogicOp op);
std::string_view to_string(QuantKind k);
std::string_view to_string(BlockKind k);
std::string_view to_string(DeclaredType t);

std::optional<ArithOp> parse_arith_op(std::string_view s);
std::optional<CompareOp> parse_compare_op(std::string_view s);
std::optional<LogicOp> parse_logic_op(std::string_view s);
std::optional<QuantKind> parse_quant_kind(std::string_view s);
std::optional<BlockKind> parse_block_kind(std::string_view s);
std::optional<DeclaredType> parse_declared_type(std::string_view s);

/// Language-level identifier: `[A-Za-z_][A-Za-z0-9_]*`.
bool is_identifier(std::string_view s);

/// Short node-kind names as used in the project format (`"set"`, `"item"`, ...).
std::string_view node_kind_name(const Expr& e);
std::string_view node_kind_name(const Stmt& s);

/// Calls `f(child)` for each direct sub-expression of `e`, in document order.
template <typename F>
void for_each_child(const Expr& e, F&& f)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, expr::Arith> || std::is_same_v<T, expr::Compare>) {
                f(*n.lhs);
                f(*n.rhs);
            } else if constexpr (std::is_same_v<T, expr::Logic>) {
                for (const auto& o : n.operands)
                    f(o);
            } else if constexpr (std::is_same_v<T, expr::Quantifier>) {
                if (const auto* r = std::get_if<expr::RangeDomain>(&n.domain)) {
                    f(*r->lo);
                    f(*r->hi);
                } else {
                    f(*std::get<expr::ElementsDomain>(n.domain).list);
                }
                f(*n.body);
            } else if constexpr (std::is_same_v<T, expr::ItemOf>) {
                f(*n.index);
                f(*n.list);
            } else if constexpr (std::is_same_v<T, expr::LengthOf>) {
                f(*n.list);
            } else if constexpr (std::is_same_v<T, expr::Contains>) {
                f(*n.list);
                f(*n.element);
            } else if constexpr (std::is_same_v<T, expr::Call>) {
                for (const auto& a : n.args)
                    f(a);
            }
        },
        e.node);
}

/// Calls `fe(expr)` for each direct expression slot and `fs(stmts)` for each
/// nested statement list of `s`, in document order.
template <typename FE, typename FS>
void for_each_part(const Stmt& s, FE&& fe, FS&& fs)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, stmt::SetVar>) {
                fe(n.value);
            } else if constexpr (std::is_same_v<T, stmt::ChangeVar>) {
                fe(n.delta);
            } else if constexpr (std::is_same_v<T, stmt::IfElse>) {
                fe(n.cond);
                fs(n.then_branch);
                fs(n.else_branch);
            } else if constexpr (std::is_same_v<T, stmt::RepeatN>) {
                fe(n.count);
                for (const auto& i : n.invariant)
                    fe(i);
                fs(n.body);
            } else if constexpr (std::is_same_v<T, stmt::RepeatUntil>) {
                fe(n.cond);
                for (const auto& i : n.invariant)
                    fe(i);
                fs(n.body);
            } else if constexpr (std::is_same_v<T, stmt::Assert>) {
                fe(n.cond);
            } else if constexpr (std::is_same_v<T, stmt::Report>) {
                fe(n.value);
            } else if constexpr (std::is_same_v<T, stmt::CallCommand>) {
                for (const auto& a : n.args)
                    fe(a);
            } else if constexpr (std::is_same_v<T, stmt::AddToList>) {
                fe(n.element);
            } else if constexpr (std::is_same_v<T, stmt::ReplaceItem>) {
                fe(n.index);
                fe(n.element);
            }
        },
        s.node);
}

} // namespace blockverify
