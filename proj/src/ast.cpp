#include "blockverify/ast.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace blockverify {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s)
{
    for (const auto& [e, name] : table)
        if (name == s)
            return e;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e)
{
    for (const auto& [k, name] : table)
        if (k == e)
            return name;
    return "?";
}

constexpr std::array<std::pair<ArithOp, std::string_view>, 5> kArithOps{{
    {ArithOp::Add, "add"}, {ArithOp::Sub, "sub"}, {ArithOp::Mul, "mul"}, {ArithOp::Div, "div"}, {ArithOp::Mod, "mod"},
}};
constexpr std::array<std::pair<CompareOp, std::string_view>, 6> kCompareOps{{
    {CompareOp::Eq, "eq"}, {CompareOp::Neq, "neq"}, {CompareOp::Lt, "lt"},
    {CompareOp::Le, "le"}, {CompareOp::Gt, "gt"},   {CompareOp::Ge, "ge"},
}};
constexpr std::array<std::pair<LogicOp, std::string_view>, 6> kLogicOps{{
    {LogicOp::And, "and"},         {LogicOp::Or, "or"},   {LogicOp::Not, "not"},
    {LogicOp::Implies, "implies"}, {LogicOp::Iff, "iff"}, {LogicOp::Xor, "xor"},
}};
constexpr std::array<std::pair<QuantKind, std::string_view>, 2> kQuantKinds{{
    {QuantKind::ForAll, "forall"}, {QuantKind::Exists, "exists"},
}};
constexpr std::array<std::pair<BlockKind, std::string_view>, 3> kBlockKinds{{
    {BlockKind::Command, "command"}, {BlockKind::Reporter, "reporter"}, {BlockKind::Predicate, "predicate"},
}};
constexpr std::array<std::pair<DeclaredType, std::string_view>, 4> kDeclaredTypes{{
    {DeclaredType::Int, "int"}, {DeclaredType::Bool, "bool"}, {DeclaredType::IntList, "intlist"},
    {DeclaredType::Text, "text"},
}};

class IdAssigner {
public:
    explicit IdAssigner(const std::string& owner) : owner_(owner) {}

    BlockId hat() const { return owner_ + "#0"; }

    void expr(Expr& e)
    {
        e.id = next();
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, expr::Arith> || std::is_same_v<T, expr::Compare>) {
                    expr(*n.lhs);
                    expr(*n.rhs);
                } else if constexpr (std::is_same_v<T, expr::Logic>) {
                    for (auto& o : n.operands)
                        expr(o);
                } else if constexpr (std::is_same_v<T, expr::Quantifier>) {
                    if (auto* r = std::get_if<expr::RangeDomain>(&n.domain)) {
                        expr(*r->lo);
                        expr(*r->hi);
                    } else {
                        expr(*std::get<expr::ElementsDomain>(n.domain).list);
                    }
                    expr(*n.body);
                } else if constexpr (std::is_same_v<T, expr::ItemOf>) {
                    expr(*n.index);
                    expr(*n.list);
                } else if constexpr (std::is_same_v<T, expr::LengthOf>) {
                    expr(*n.list);
                } else if constexpr (std::is_same_v<T, expr::Contains>) {
                    expr(*n.list);
                    expr(*n.element);
                } else if constexpr (std::is_same_v<T, expr::Call>) {
                    for (auto& a : n.args)
                        expr(a);
                }
            },
            e.node);
    }

    void stmts(std::vector<Stmt>& ss)
    {
        for (auto& s : ss)
            stmt(s);
    }

    void stmt(Stmt& s)
    {
        s.id = next();
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, stmt::SetVar>) {
                    expr(n.value);
                } else if constexpr (std::is_same_v<T, stmt::ChangeVar>) {
                    expr(n.delta);
                } else if constexpr (std::is_same_v<T, stmt::IfElse>) {
                    expr(n.cond);
                    stmts(n.then_branch);
                    stmts(n.else_branch);
                } else if constexpr (std::is_same_v<T, stmt::RepeatN>) {
                    expr(n.count);
                    for (auto& i : n.invariant)
                        expr(i);
                    stmts(n.body);
                } else if constexpr (std::is_same_v<T, stmt::RepeatUntil>) {
                    expr(n.cond);
                    for (auto& i : n.invariant)
                        expr(i);
                    stmts(n.body);
                } else if constexpr (std::is_same_v<T, stmt::Assert>) {
                    expr(n.cond);
                } else if constexpr (std::is_same_v<T, stmt::Report>) {
                    expr(n.value);
                } else if constexpr (std::is_same_v<T, stmt::CallCommand>) {
                    for (auto& a : n.args)
                        expr(a);
                } else if constexpr (std::is_same_v<T, stmt::AddToList>) {
                    expr(n.element);
                } else if constexpr (std::is_same_v<T, stmt::ReplaceItem>) {
                    expr(n.index);
                    expr(n.element);
                }
            },
            s.node);
    }

private:
    BlockId next() { return owner_ + "#" + std::to_string(++counter_); }

    const std::string& owner_;
    int counter_ = 0;
};

} // namespace

const BlockDef* Program::find_block(std::string_view name) const
{
    auto it = std::find_if(blocks.begin(), blocks.end(), [&](const BlockDef& b) { return b.name == name; });
    return it == blocks.end() ? nullptr : &*it;
}

const EntryScript* Program::find_entry_script(std::string_view name) const
{
    auto it = std::find_if(entry_scripts.begin(), entry_scripts.end(),
                           [&](const EntryScript& s) { return s.name == name; });
    return it == entry_scripts.end() ? nullptr : &*it;
}

const Global* Program::find_global(std::string_view name) const
{
    auto it = std::find_if(globals.begin(), globals.end(), [&](const Global& g) { return g.name == name; });
    return it == globals.end() ? nullptr : &*it;
}

void assign_block_ids(Program& program)
{
    for (auto& b : program.blocks) {
        IdAssigner ids(b.name);
        b.id = ids.hat();
        for (auto& e : b.pre)
            ids.expr(e);
        for (auto& e : b.post)
            ids.expr(e);
        ids.stmts(b.body);
    }
    for (auto& s : program.entry_scripts) {
        IdAssigner ids(s.name);
        s.id = ids.hat();
        ids.stmts(s.body);
    }
}

std::string_view to_string(ArithOp op) { return name_of(kArithOps, op); }
std::string_view to_string(CompareOp op) { return name_of(kCompareOps, op); }
std::string_view to_string(LogicOp op) { return name_of(kLogicOps, op); }
std::string_view to_string(QuantKind k) { return name_of(kQuantKinds, k); }
std::string_view to_string(BlockKind k) { return name_of(kBlockKinds, k); }
std::string_view to_string(DeclaredType t) { return name_of(kDeclaredTypes, t); }

std::optional<ArithOp> parse_arith_op(std::string_view s) { return lookup(kArithOps, s); }
std::optional<CompareOp> parse_compare_op(std::string_view s) { return lookup(kCompareOps, s); }
std::optional<LogicOp> parse_logic_op(std::string_view s) { return lookup(kLogicOps, s); }
std::optional<QuantKind> parse_quant_kind(std::string_view s) { return lookup(kQuantKinds, s); }
std::optional<BlockKind> parse_block_kind(std::string_view s) { return lookup(kBlockKinds, s); }
std::optional<DeclaredType> parse_declared_type(std::string_view s) { return lookup(kDeclaredTypes, s); }

bool is_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front()))
        return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

std::string_view node_kind_name(const Expr& e)
{
    static constexpr std::array<std::string_view, std::variant_size_v<Expr::Node>> names{
        "literal", "var", "arith", "compare", "logic", "old", "result", "quantifier", "item", "length", "contains",
        "call"};
    return names[e.node.index()];
}

std::string_view node_kind_name(const Stmt& s)
{
    static constexpr std::array<std::string_view, std::variant_size_v<Stmt::Node>> names{
        "declare", "set", "change", "if", "repeat", "repeatUntil", "assert", "report", "run", "addToList",
        "replaceItem"};
    return names[s.node.index()];
}

} // namespace blockverify
