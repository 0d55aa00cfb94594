#include "blockverify/boogie.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blockverify/validate.hpp"

namespace blockverify {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kPrelude =
    "// blockverify prelude v1\n"
    "function {:inline} __contains(data: [int]int, len: int, elem: int) : bool\n"
    "{ (exists __j: int :: 1 <= __j && __j <= len && data[__j] == elem) }\n";

const std::set<std::string_view> kBoogieWords = {
    "assert", "assume",   "async",     "axiom",     "bool",   "break",  "bv",      "call",   "complete",
    "const",  "div",      "else",      "ensures",   "exists", "extends", "false",  "finite", "forall",
    "free",   "function", "goto",      "havoc",     "if",     "implementation",    "int",    "invariant",
    "lambda", "mod",      "modifies",  "old",       "par",    "procedure", "real",  "requires", "result",
    "return", "returns",  "then",      "true",      "type",   "unique", "var",     "where",  "while",
    "yield"};

// Operator precedence levels of the printer, loosest first.
constexpr int kIff = 0;
constexpr int kImplies = 1;
constexpr int kAndOr = 2;
constexpr int kRel = 3;
constexpr int kAdd = 4;
constexpr int kMul = 5;
constexpr int kUnary = 6;
constexpr int kAtom = 7;

struct Printed {
    std::string text;
    int prec = kAtom;
};

std::string wrap(const Printed& p, int min) { return p.prec < min ? "(" + p.text + ")" : p.text; }

struct ListRef {
    std::string data;
    std::string len;
};

struct Obligation {
    BlockId id;
    ObligationKind kind;
    std::optional<int> slot;
};

struct Line {
    std::string text;
    std::optional<Obligation> ob;
};

std::string boogie_type(StaticType t) { return t == StaticType::Bool ? "bool" : "int"; }

std::string int_text(const Value& v) { return format_number(v.as_number()); }

class Compiler {
public:
    explicit Compiler(const TypedProgram& typed) : typed_(typed), program_(typed.program) {}

    BoogieUnit run()
    {
        check_names();
        for (const auto& g : program_.globals) {
            auto t = typed_.globals.find(g.name);
            if (t == typed_.globals.end()) {
                unsupported({}, "the type of global '" + g.name + "' is unknown");
                continue;
            }
            if (t->second == StaticType::IntList) {
                out_.push_back({"var " + g.name + "_data: [int]int;", {}});
                out_.push_back({"var " + g.name + "_len: int where " + g.name + "_len >= 0;", {}});
            } else {
                out_.push_back({"var " + g.name + ": " + boogie_type(t->second) + ";", {}});
            }
        }
        if (!program_.globals.empty())
            out_.push_back({"", {}});
        for (const auto& b : program_.blocks)
            block(b);
        for (const auto& s : program_.entry_scripts)
            script(s);
        if (!diags_.empty())
            throw DiagnosticError("E_COMPILE", std::move(diags_));
        return assemble();
    }

private:
    // ---- diagnostics and names ----

    void unsupported(const BlockId& id, std::string message)
    {
        std::optional<BlockId> at;
        if (!id.empty())
            at = id;
        if (!seen_.insert(id + "|" + message).second)
            return;
        diags_.push_back(make_error(Phase::Compile, "E_UNSUPPORTED_CONSTRUCT", std::move(message), at));
    }

    std::vector<std::string> expand(const std::string& name, std::optional<StaticType> t) const
    {
        if (t == StaticType::IntList)
            return {name + "_data", name + "_len"};
        return {name};
    }

    void check_names()
    {
        auto word = [&](const std::string& name, const BlockId& at) {
            if (kBoogieWords.contains(name))
                unsupported(at, "the name '" + name + "' is reserved in Boogie; rename it");
        };
        for (const auto& g : program_.globals) {
            word(g.name, {});
            auto t = typed_.globals.find(g.name);
            for (const auto& n : expand(g.name, t == typed_.globals.end() ? std::nullopt
                                                                           : std::optional<StaticType>(t->second)))
                if (!global_names_.insert(n).second)
                    unsupported({}, "global '" + g.name + "' collides with another global named '" + n +
                                        "' in the generated code");
        }
        auto scope_names = [&](const std::string& scope, const BlockId& hat, bool returns_value) {
            word(scope, hat);
            std::set<std::string> used = global_names_;
            if (returns_value) {
                auto r = typed_.results.find(scope);
                for (const auto& n : expand("result", r == typed_.results.end() ? std::nullopt
                                                                                 : std::optional(r->second)))
                    used.insert(n);
            }
            auto vars = typed_.variables.find(scope);
            if (vars == typed_.variables.end())
                return;
            for (const auto& [name, t] : vars->second) {
                word(name, hat);
                for (const auto& n : expand(name, t))
                    if (!used.insert(n).second)
                        unsupported(hat, "'" + name + "' collides with the generated name '" + n + "'; rename it");
            }
        };
        for (const auto& b : program_.blocks)
            scope_names(b.name, b.id, b.returns_value());
        for (const auto& s : program_.entry_scripts)
            scope_names(s.name, s.id, false);
    }

    // ---- per-procedure state ----

    void reset(const std::string& scope, const BlockDef* block)
    {
        scope_ = scope;
        lines_.clear();
        locals_.clear();
        counters_.clear();
        hoisted_.clear();
        qnames_.clear();
        bound_.clear();
        indent_ = 1;
        result_type_.reset();
        if (block && block->returns_value())
            if (auto r = typed_.results.find(block->name); r != typed_.results.end())
                result_type_ = r->second;
    }

    std::string fresh(const std::string& prefix) { return prefix + std::to_string(++counters_[prefix]); }

    void emit(std::string text, std::optional<Obligation> ob = std::nullopt)
    {
        lines_.push_back({std::string(static_cast<std::size_t>(indent_) * 2, ' ') + text, std::move(ob)});
    }

    std::optional<StaticType> var_type(const std::string& name) const { return typed_.type_of(scope_, name); }

    std::optional<StaticType> expr_type(const Expr& e) const
    {
        auto it = typed_.expressions.find(e.id);
        if (it == typed_.expressions.end())
            return std::nullopt;
        return it->second;
    }

    std::optional<StaticType> param_type(const BlockDef& callee, std::size_t i) const
    {
        if (i >= callee.params.size())
            return std::nullopt;
        return typed_.type_of(callee.name, callee.params[i].name);
    }

    // ---- expressions ----

    const std::string& qname(const BlockId& id)
    {
        auto it = qnames_.find(id);
        if (it == qnames_.end())
            it = qnames_.emplace(id, fresh("__q")).first;
        return it->second;
    }

    /// Range condition of a quantifier; pushes the bound variable.
    std::string open_quantifier(const Expr& e, const expr::Quantifier& q)
    {
        const std::string& name = qname(e.id);
        std::string cond;
        if (const auto* r = std::get_if<expr::RangeDomain>(&q.domain)) {
            cond = wrap(print(*r->lo), kAdd) + " <= " + name + " && " + name + " <= " + wrap(print(*r->hi), kAdd);
            bound_.emplace_back(q.var, name);
        } else {
            ListRef l = list_ref(*std::get<expr::ElementsDomain>(q.domain).list);
            cond = "1 <= " + name + " && " + name + " <= " + l.len;
            bound_.emplace_back(q.var, l.data + "[" + name + "]");
        }
        return cond;
    }

    ListRef list_ref(const Expr& e)
    {
        auto bad = [&](std::string why) {
            unsupported(e.id, std::move(why));
            return ListRef{"__invalid_data", "__invalid_len"};
        };
        if (const auto* v = e.as<expr::VarRef>()) {
            for (const auto& b : bound_)
                if (b.first == v->name)
                    return bad("'" + v->name + "' is a number, not a list");
            if (var_type(v->name) != StaticType::IntList)
                return bad("'" + v->name + "' is not a list");
            return {v->name + "_data", v->name + "_len"};
        }
        if (const auto* o = e.as<expr::Old>()) {
            if (var_type(o->var) != StaticType::IntList)
                return bad("'" + o->var + "' is not a list");
            return {"old(" + o->var + "_data)", "old(" + o->var + "_len)"};
        }
        if (e.is<expr::Result>()) {
            if (result_type_ != StaticType::IntList)
                return bad("the reported value is not a list");
            return {"result_data", "result_len"};
        }
        if (e.is<expr::Call>()) {
            auto it = hoisted_.find(e.id);
            if (it == hoisted_.end())
                return bad("calls can only be used in ordinary statements, not in contracts, loop conditions or "
                           "quantifiers");
            return {it->second + "_data", it->second + "_len"};
        }
        if (e.is<expr::Literal>())
            return bad("a list literal can only be stored with 'set' before it is used");
        return bad("this block does not produce a list the verifier can track");
    }

    Printed print(const Expr& e)
    {
        return std::visit(
            [&](const auto& n) -> Printed {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, expr::Literal>) {
                    const Value& v = n.value;
                    if (v.is_bool())
                        return {v.as_bool() ? "true" : "false", kAtom};
                    if (v.is_number() && v.is_integer()) {
                        std::string t = int_text(v);
                        return {t, t.front() == '-' ? kUnary : kAtom};
                    }
                    if (v.is_text())
                        unsupported(e.id, "text values cannot be verified statically");
                    else if (v.is_list())
                        unsupported(e.id, "a list literal can only be stored with 'set' before it is used");
                    else
                        unsupported(e.id, "only integer numbers can be verified statically");
                    return {"0", kAtom};
                } else if constexpr (std::is_same_v<T, expr::VarRef>) {
                    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
                        if (it->first == n.name)
                            return {it->second, kAtom};
                    auto t = var_type(n.name);
                    if (!t)
                        unsupported(e.id, "the type of '" + n.name + "' is unknown");
                    else if (*t == StaticType::IntList)
                        unsupported(e.id, "the list '" + n.name + "' cannot be used as a single value here");
                    return {n.name, kAtom};
                } else if constexpr (std::is_same_v<T, expr::Old>) {
                    if (var_type(n.var) == StaticType::IntList)
                        unsupported(e.id, "the list 'old(" + n.var + ")' cannot be used as a single value here");
                    return {"old(" + n.var + ")", kAtom};
                } else if constexpr (std::is_same_v<T, expr::Result>) {
                    if (result_type_ == StaticType::IntList)
                        unsupported(e.id, "the reported list cannot be used as a single value here");
                    return {"result", kAtom};
                } else if constexpr (std::is_same_v<T, expr::Arith>) {
                    Printed l = print(*n.lhs);
                    Printed r = print(*n.rhs);
                    switch (n.op) {
                    case ArithOp::Add: return {wrap(l, kAdd) + " + " + wrap(r, kAdd + 1), kAdd};
                    case ArithOp::Sub: return {wrap(l, kAdd) + " - " + wrap(r, kAdd + 1), kAdd};
                    case ArithOp::Mul: return {wrap(l, kMul) + " * " + wrap(r, kMul + 1), kMul};
                    case ArithOp::Div: return {wrap(l, kMul) + " div " + wrap(r, kMul + 1), kMul};
                    case ArithOp::Mod: return {wrap(l, kMul) + " mod " + wrap(r, kMul + 1), kMul};
                    }
                    return {"0", kAtom};
                } else if constexpr (std::is_same_v<T, expr::Compare>) {
                    if (expr_type(*n.lhs) == StaticType::IntList || expr_type(*n.rhs) == StaticType::IntList) {
                        unsupported(e.id, "comparing whole lists cannot be verified; compare lengths and items");
                        return {"false", kAtom};
                    }
                    static constexpr std::string_view ops[] = {" == ", " != ", " < ", " <= ", " > ", " >= "};
                    Printed l = print(*n.lhs);
                    Printed r = print(*n.rhs);
                    return {wrap(l, kRel + 1) + std::string(ops[static_cast<int>(n.op)]) + wrap(r, kRel + 1), kRel};
                } else if constexpr (std::is_same_v<T, expr::Logic>) {
                    std::vector<Printed> ops;
                    for (const auto& o : n.operands)
                        ops.push_back(print(o));
                    switch (n.op) {
                    case LogicOp::Not: return {"!" + wrap(ops.at(0), kUnary), kUnary};
                    case LogicOp::And:
                    case LogicOp::Or: {
                        if (ops.size() == 1)
                            return ops[0];
                        std::string sep = n.op == LogicOp::And ? " && " : " || ";
                        std::string t;
                        for (std::size_t i = 0; i < ops.size(); ++i)
                            t += (i ? sep : "") + wrap(ops[i], kRel);
                        return {t, kAndOr};
                    }
                    case LogicOp::Implies: return {wrap(ops.at(0), kAndOr) + " ==> " + wrap(ops.at(1), kImplies), kImplies};
                    case LogicOp::Iff: return {wrap(ops.at(0), kImplies) + " <==> " + wrap(ops.at(1), kImplies), kIff};
                    case LogicOp::Xor: return {wrap(ops.at(0), kRel + 1) + " != " + wrap(ops.at(1), kRel + 1), kRel};
                    }
                    return {"false", kAtom};
                } else if constexpr (std::is_same_v<T, expr::Quantifier>) {
                    std::string cond = open_quantifier(e, n);
                    Printed body = print(*n.body);
                    bound_.pop_back();
                    const std::string& q = qname(e.id);
                    if (n.kind == QuantKind::ForAll)
                        return {"(forall " + q + ": int :: " + cond + " ==> " + wrap(body, kImplies) + ")", kAtom};
                    return {"(exists " + q + ": int :: " + cond + " && " + wrap(body, kRel) + ")", kAtom};
                } else if constexpr (std::is_same_v<T, expr::ItemOf>) {
                    ListRef l = list_ref(*n.list);
                    return {l.data + "[" + print(*n.index).text + "]", kAtom};
                } else if constexpr (std::is_same_v<T, expr::LengthOf>) {
                    return {list_ref(*n.list).len, kAtom};
                } else if constexpr (std::is_same_v<T, expr::Contains>) {
                    ListRef l = list_ref(*n.list);
                    return {"__contains(" + l.data + ", " + l.len + ", " + print(*n.element).text + ")", kAtom};
                } else if constexpr (std::is_same_v<T, expr::Call>) {
                    auto it = hoisted_.find(e.id);
                    if (it == hoisted_.end()) {
                        unsupported(e.id, "calls can only be used in ordinary statements, not in contracts, loop "
                                          "conditions or quantifiers");
                        return {"0", kAtom};
                    }
                    if (expr_type(e) == StaticType::IntList)
                        unsupported(e.id, "the list reported by '" + n.block + "' cannot be used as a single value here");
                    return {it->second, kAtom};
                }
            },
            e.node);
    }

    /// Well-definedness conditions for every `item` inside `e`, closed over
    /// the enclosing quantifier ranges.
    void collect_bounds(const Expr& e, std::vector<std::string>& binders,
                        std::vector<std::pair<std::string, BlockId>>& out)
    {
        if (const auto* q = e.as<expr::Quantifier>()) {
            if (const auto* r = std::get_if<expr::RangeDomain>(&q->domain)) {
                collect_bounds(*r->lo, binders, out);
                collect_bounds(*r->hi, binders, out);
            }
            std::string cond = open_quantifier(e, *q);
            binders.push_back("forall " + qname(e.id) + ": int :: " + cond + " ==> ");
            collect_bounds(*q->body, binders, out);
            binders.pop_back();
            bound_.pop_back();
            return;
        }
        for_each_child(e, [&](const Expr& c) { collect_bounds(c, binders, out); });
        if (const auto* item = e.as<expr::ItemOf>()) {
            ListRef l = list_ref(*item->list);
            std::string i = wrap(print(*item->index), kAdd);
            std::string check = "1 <= " + i + " && " + i + " <= " + l.len;
            for (auto it = binders.rbegin(); it != binders.rend(); ++it)
                check = "(" + *it + check + ")";
            out.emplace_back(std::move(check), e.id);
        }
    }

    std::vector<std::pair<std::string, BlockId>> bounds_of(const Expr& e)
    {
        std::vector<std::string> binders;
        std::vector<std::pair<std::string, BlockId>> out;
        collect_bounds(e, binders, out);
        return out;
    }

    void collect_calls(const Expr& e, std::vector<const expr::Call*>& out)
    {
        if (e.is<expr::Quantifier>())
            return;
        for_each_child(e, [&](const Expr& c) { collect_calls(c, out); });
        if (const auto* c = e.as<expr::Call>())
            out.push_back(c);
    }

    std::string call_args(const std::string& callee_name, const std::vector<Expr>& args)
    {
        const BlockDef* callee = program_.find_block(callee_name);
        std::string t;
        for (std::size_t i = 0; i < args.size(); ++i) {
            t += i ? ", " : "";
            if (callee && param_type(*callee, i) == StaticType::IntList) {
                ListRef l = list_ref(args[i]);
                t += l.data + ", " + l.len;
            } else {
                t += print(args[i]).text;
            }
        }
        return t;
    }

    void emit_bounds(const Expr& e, std::set<BlockId>& done)
    {
        for (auto& [text, id] : bounds_of(e))
            if (done.insert(id).second)
                emit("assert " + text + ";", Obligation{id, ObligationKind::IndexBounds, std::nullopt});
    }

    void hoist(const Expr& e, std::set<BlockId>& done)
    {
        if (e.is<expr::Quantifier>())
            return;
        for_each_child(e, [&](const Expr& c) { hoist(c, done); });
        const auto* c = e.as<expr::Call>();
        if (!c)
            return;
        for (const auto& a : c->args)
            emit_bounds(a, done);
        std::string args = call_args(c->block, c->args);
        std::string tmp = fresh("__tmp");
        std::string outs;
        auto rt = typed_.results.find(c->block);
        StaticType t = rt == typed_.results.end() ? StaticType::Int : rt->second;
        if (t == StaticType::IntList) {
            locals_.push_back("var " + tmp + "_data: [int]int;");
            locals_.push_back("var " + tmp + "_len: int;");
            outs = tmp + "_data, " + tmp + "_len";
        } else {
            locals_.push_back("var " + tmp + ": " + boogie_type(t) + ";");
            outs = tmp;
        }
        hoisted_[e.id] = tmp;
        emit("call " + outs + " := " + c->block + "(" + args + ");",
             Obligation{e.id, ObligationKind::CallPre, std::nullopt});
    }

    bool is_global(const std::string& name) const
    {
        auto vars = typed_.variables.find(scope_);
        if (vars != typed_.variables.end() && vars->second.contains(name))
            return false;
        return program_.find_global(name) != nullptr;
    }

    /// Hoists calls and asserts index bounds for the expressions a statement
    /// evaluates, in evaluation order.
    void prepare(const BlockId& at, std::initializer_list<const Expr*> exprs)
    {
        std::vector<const expr::Call*> calls;
        for (const Expr* e : exprs)
            collect_calls(*e, calls);
        if (!calls.empty()) {
            std::set<std::string> reads;
            for (const Expr* e : exprs)
                for (const auto& v : free_variables(*e))
                    if (is_global(v))
                        reads.insert(v);
            for (const auto* c : calls) {
                auto m = typed_.modifies.find(c->block);
                if (m == typed_.modifies.end())
                    continue;
                for (const auto& g : m->second)
                    if (reads.contains(g))
                        unsupported(at, "'" + c->block + "' changes global '" + g +
                                            "', which this block also reads; store the value reported by '" +
                                            c->block + "' in a variable first");
            }
        }
        std::set<BlockId> done;
        for (const Expr* e : exprs)
            hoist(*e, done);
        for (const Expr* e : exprs)
            emit_bounds(*e, done);
    }

    void no_calls(const Expr& e)
    {
        std::vector<const expr::Call*> calls;
        collect_calls(e, calls);
        if (!calls.empty())
            print(e); // reports the unhoisted calls
    }

    // ---- statements ----

    void assign_list(const std::string& target, const Expr& value)
    {
        if (const auto* lit = value.as<expr::Literal>(); lit && lit->value.is_list()) {
            const auto& items = lit->value.as_list();
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (!items[i].is_number() || !items[i].is_integer()) {
                    unsupported(value.id, "only lists of integers can be verified statically");
                    return;
                }
                emit(target + "_data[" + std::to_string(i + 1) + "] := " + int_text(items[i]) + ";");
            }
            emit(target + "_len := " + std::to_string(items.size()) + ";");
            return;
        }
        ListRef l = list_ref(value);
        emit(target + "_data := " + l.data + ";");
        emit(target + "_len := " + l.len + ";");
    }

    void stmts(const std::vector<Stmt>& body)
    {
        for (const auto& s : body)
            stmt(s);
    }

    void invariants(const std::vector<Expr>& inv, const BlockId& loop)
    {
        for (std::size_t i = 0; i < inv.size(); ++i) {
            no_calls(inv[i]);
            for (auto& [text, id] : bounds_of(inv[i]))
                emit("invariant " + text + ";", Obligation{id, ObligationKind::IndexBounds, std::nullopt});
            emit("invariant " + print(inv[i]).text + ";",
                 Obligation{loop, ObligationKind::InvariantEntry, static_cast<int>(i + 1)});
        }
    }

    void stmt(const Stmt& s)
    {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, stmt::DeclareLocals>) {
                    for (const auto& name : n.names)
                        if (var_type(name) == StaticType::Int)
                            emit(name + " := 0;");
                } else if constexpr (std::is_same_v<T, stmt::SetVar>) {
                    prepare(s.id, {&n.value});
                    if (var_type(n.name) == StaticType::IntList)
                        assign_list(n.name, n.value);
                    else
                        emit(n.name + " := " + print(n.value).text + ";");
                } else if constexpr (std::is_same_v<T, stmt::ChangeVar>) {
                    prepare(s.id, {&n.delta});
                    emit(n.name + " := " + n.name + " + " + wrap(print(n.delta), kAdd + 1) + ";");
                } else if constexpr (std::is_same_v<T, stmt::IfElse>) {
                    prepare(s.id, {&n.cond});
                    emit("if (" + print(n.cond).text + ") {");
                    ++indent_;
                    stmts(n.then_branch);
                    --indent_;
                    if (!n.else_branch.empty()) {
                        emit("} else {");
                        ++indent_;
                        stmts(n.else_branch);
                        --indent_;
                    }
                    emit("}");
                } else if constexpr (std::is_same_v<T, stmt::RepeatN>) {
                    prepare(s.id, {&n.count});
                    std::string count = fresh("__tmp");
                    std::string k = fresh("__k");
                    locals_.push_back("var " + count + ": int;");
                    locals_.push_back("var " + k + ": int;");
                    emit(count + " := " + print(n.count).text + ";");
                    emit(k + " := 0;");
                    emit("while (" + k + " < " + count + ")");
                    ++indent_;
                    emit("invariant 0 <= " + k + " && " + k + " <= " + count + ";",
                         Obligation{s.id, ObligationKind::InvariantEntry, 0});
                    invariants(n.invariant, s.id);
                    --indent_;
                    emit("{");
                    ++indent_;
                    stmts(n.body);
                    emit(k + " := " + k + " + 1;");
                    --indent_;
                    emit("}");
                } else if constexpr (std::is_same_v<T, stmt::RepeatUntil>) {
                    no_calls(n.cond);
                    std::set<BlockId> done;
                    emit_bounds(n.cond, done);
                    emit("while (!" + wrap(print(n.cond), kUnary) + ")");
                    ++indent_;
                    invariants(n.invariant, s.id);
                    --indent_;
                    emit("{");
                    ++indent_;
                    stmts(n.body);
                    done.clear();
                    emit_bounds(n.cond, done);
                    --indent_;
                    emit("}");
                } else if constexpr (std::is_same_v<T, stmt::Assert>) {
                    prepare(s.id, {&n.cond});
                    emit("assert " + print(n.cond).text + ";", Obligation{s.id, ObligationKind::Assert, std::nullopt});
                } else if constexpr (std::is_same_v<T, stmt::Report>) {
                    prepare(s.id, {&n.value});
                    if (result_type_ == StaticType::IntList)
                        assign_list("result", n.value);
                    else
                        emit("result := " + print(n.value).text + ";");
                    emit("return;");
                } else if constexpr (std::is_same_v<T, stmt::CallCommand>) {
                    std::set<BlockId> done;
                    for (const auto& a : n.args)
                        hoist(a, done);
                    for (const auto& a : n.args)
                        emit_bounds(a, done);
                    emit("call " + n.block + "(" + call_args(n.block, n.args) + ");",
                         Obligation{s.id, ObligationKind::CallPre, std::nullopt});
                } else if constexpr (std::is_same_v<T, stmt::AddToList>) {
                    prepare(s.id, {&n.element});
                    const std::string& l = n.list;
                    emit(l + "_data[" + l + "_len + 1] := " + print(n.element).text + ";");
                    emit(l + "_len := " + l + "_len + 1;");
                } else if constexpr (std::is_same_v<T, stmt::ReplaceItem>) {
                    prepare(s.id, {&n.index, &n.element});
                    const std::string& l = n.list;
                    std::string i = wrap(print(n.index), kAdd);
                    emit("assert 1 <= " + i + " && " + i + " <= " + l + "_len;",
                         Obligation{s.id, ObligationKind::IndexBounds, std::nullopt});
                    emit(l + "_data[" + print(n.index).text + "] := " + print(n.element).text + ";");
                }
            },
            s.node);
    }

    // ---- procedures ----

    std::string modifies_clause(const std::vector<std::string>& globals)
    {
        std::vector<std::string> names;
        for (const auto& g : globals) {
            auto t = typed_.globals.find(g);
            for (auto& n : expand(g, t == typed_.globals.end() ? std::nullopt : std::optional(t->second)))
                names.push_back(std::move(n));
        }
        std::string t;
        for (std::size_t i = 0; i < names.size(); ++i)
            t += (i ? ", " : "") + names[i];
        return t;
    }

    void local_decls(const std::vector<std::string>& params)
    {
        auto vars = typed_.variables.find(scope_);
        if (vars == typed_.variables.end())
            return;
        std::vector<std::string> decls;
        for (const auto& [name, t] : vars->second) {
            if (std::find(params.begin(), params.end(), name) != params.end())
                continue;
            if (t == StaticType::IntList) {
                decls.push_back("var " + name + "_data: [int]int;");
                decls.push_back("var " + name + "_len: int where " + name + "_len >= 0;");
            } else {
                decls.push_back("var " + name + ": " + boogie_type(t) + ";");
            }
        }
        locals_.insert(locals_.begin(), decls.begin(), decls.end());
    }

    void finish_procedure(std::vector<Line> head)
    {
        out_.insert(out_.end(), head.begin(), head.end());
        out_.push_back({"{", {}});
        for (const auto& l : locals_)
            out_.push_back({"  " + l, {}});
        out_.insert(out_.end(), lines_.begin(), lines_.end());
        out_.push_back({"}", {}});
        out_.push_back({"", {}});
    }

    void block(const BlockDef& b)
    {
        reset(b.name, &b);
        std::string sig = "procedure " + b.name + "(";
        std::vector<std::string> params;
        for (std::size_t i = 0; i < b.params.size(); ++i) {
            const std::string& p = b.params[i].name;
            params.push_back(p);
            auto t = var_type(p);
            sig += i ? ", " : "";
            if (t == StaticType::IntList)
                sig += p + "_data: [int]int, " + p + "_len: int where " + p + "_len >= 0";
            else
                sig += p + ": " + boogie_type(t.value_or(StaticType::Int));
        }
        sig += ")";
        if (b.returns_value()) {
            StaticType rt = result_type_.value_or(StaticType::Bool);
            if (rt == StaticType::IntList)
                sig += " returns (result_data: [int]int, result_len: int)";
            else
                sig += " returns (result: " + boogie_type(rt) + ")";
        }

        // Contract clauses are built with the body's printer state, then
        // moved in front of the body.
        std::vector<Line> head{{sig, {}}};
        auto clauses = [&](const std::vector<Expr>& slots, std::string_view keyword, ObligationKind kind) {
            for (std::size_t i = 0; i < slots.size(); ++i) {
                no_calls(slots[i]);
                for (auto& [text, id] : bounds_of(slots[i]))
                    head.push_back({"  " + std::string(keyword) + " " + text + ";",
                                    Obligation{id, ObligationKind::IndexBounds, std::nullopt}});
                head.push_back({"  " + std::string(keyword) + " " + print(slots[i]).text + ";",
                                Obligation{b.id, kind, static_cast<int>(i + 1)}});
            }
        };
        clauses(b.pre, "requires", ObligationKind::Pre);
        auto mods = typed_.modifies.find(b.name);
        if (mods != typed_.modifies.end() && !mods->second.empty())
            head.push_back({"  modifies " +
                                modifies_clause(std::vector<std::string>(mods->second.begin(), mods->second.end())) +
                                ";",
                            {}});
        clauses(b.post, "ensures", ObligationKind::Post);

        if (b.kind == BlockKind::Predicate)
            emit("result := false;");
        stmts(b.body);
        local_decls(params);
        finish_procedure(std::move(head));
    }

    void script(const EntryScript& s)
    {
        reset(s.name, nullptr);
        std::vector<Line> head{{"procedure " + s.name + "()", {}}};
        std::vector<std::string> all;
        for (const auto& g : program_.globals)
            all.push_back(g.name);
        if (!all.empty())
            head.push_back({"  modifies " + modifies_clause(all) + ";", {}});
        for (const auto& g : program_.globals) {
            auto t = typed_.globals.find(g.name);
            if (t == typed_.globals.end())
                continue;
            if (t->second == StaticType::IntList) {
                Expr lit{g.name, expr::Literal{g.initial}};
                assign_list(g.name, lit);
            } else if (g.initial.is_bool()) {
                emit(g.name + " := " + (g.initial.as_bool() ? "true" : "false") + ";");
            } else if (g.initial.is_number() && g.initial.is_integer()) {
                emit(g.name + " := " + int_text(g.initial) + ";");
            } else {
                unsupported({}, "global '" + g.name + "' starts with a value that cannot be verified");
            }
        }
        stmts(s.body);
        local_decls({});
        finish_procedure(std::move(head));
    }

    BoogieUnit assemble()
    {
        BoogieUnit unit;
        std::ostringstream text;
        text << kPrelude << "\n";
        int line = 1;
        for (char c : kPrelude)
            line += c == '\n';
        ++line; // blank separator
        for (const auto& l : out_) {
            text << l.text;
            if (l.ob) {
                int col = static_cast<int>(l.text.find_first_not_of(' ')) + 1;
                text << " // @src " << l.ob->id << ' ' << to_string(l.ob->kind);
                if (l.ob->slot)
                    text << ' ' << *l.ob->slot;
                unit.source_map.entries.push_back({line, col, l.ob->id, l.ob->kind, l.ob->slot});
            }
            text << '\n';
            ++line;
        }
        unit.text = text.str();
        while (unit.text.size() >= 2 && unit.text.ends_with("\n\n"))
            unit.text.pop_back();
        unit.prelude_version = kPreludeVersion;
        return unit;
    }

    const TypedProgram& typed_;
    const Program& program_;
    std::vector<Line> out_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> seen_;
    std::set<std::string> global_names_;

    std::string scope_;
    std::vector<Line> lines_;
    std::vector<std::string> locals_;
    std::map<std::string, int> counters_;
    std::map<BlockId, std::string> hoisted_;
    std::map<BlockId, std::string> qnames_;
    std::vector<std::pair<std::string, std::string>> bound_;
    int indent_ = 1;
    std::optional<StaticType> result_type_;
};

// ---- verdicts ----

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct Location {
    int line;
    int col;
    std::string message;
};

struct RawError {
    Location at;
    std::vector<Location> related;
};

std::string callee_of(const BlockId& hat) { return hat.substr(0, hat.find('#')); }

std::string slot_text(std::optional<int> slot) { return slot ? " (slot " + std::to_string(*slot) + ")" : ""; }

Diagnostic verdict_diagnostic(ObligationKind kind, const SourceMapEntry& target, const SourceMapEntry* related)
{
    std::string code;
    std::string message;
    std::optional<int> slot = target.slot;
    std::vector<BlockId> rel;
    switch (kind) {
    case ObligationKind::Pre:
        code = "E_VERIFY_PRE";
        message = "the precondition" + slot_text(slot) + " might not hold";
        break;
    case ObligationKind::Post:
        code = "E_VERIFY_POST";
        message = "the postcondition" + slot_text(slot) + " might not hold for some inputs";
        break;
    case ObligationKind::Assert:
        code = "E_VERIFY_ASSERT";
        message = "this assertion might fail for some inputs";
        break;
    case ObligationKind::InvariantEntry:
        code = "E_VERIFY_INVARIANT_ENTRY";
        message = slot == 0 ? "the repeat count might be negative"
                            : "the loop invariant" + slot_text(slot) + " might not hold when the loop starts";
        break;
    case ObligationKind::InvariantMaintain:
        code = "E_VERIFY_INVARIANT_MAINTAIN";
        message = "the loop invariant" + slot_text(slot) + " might not be kept by the loop body";
        break;
    case ObligationKind::CallPre:
        code = "E_VERIFY_CALL_PRE";
        slot = related && related->kind == ObligationKind::Pre ? related->slot : std::nullopt;
        if (related) {
            rel.push_back(related->block_id);
            message = related->kind == ObligationKind::IndexBounds
                          ? "a list index in the precondition of '" + callee_of(related->block_id) +
                                "' might be out of range at this call"
                          : "the precondition" + slot_text(slot) + " of '" + callee_of(related->block_id) +
                                "' might not hold at this call";
        } else {
            message = "a precondition of the called block might not hold at this call";
        }
        break;
    case ObligationKind::IndexBounds:
        code = "E_VERIFY_INDEX_BOUNDS";
        message = "the list index might be out of range (it must be between 1 and the length of the list)";
        slot.reset();
        break;
    }
    Diagnostic d = make_error(Phase::Static, code, message, target.block_id);
    d.slot_index = slot;
    d.obligation = kind;
    d.related = std::move(rel);
    return d;
}

} // namespace

std::string_view boogie_prelude() { return kPrelude; }

const SourceMapEntry* SourceMap::lookup(int line, int col) const
{
    for (const auto& e : entries)
        if (e.line == line && e.col == col)
            return &e;
    for (const auto& e : entries)
        if (e.line == line)
            return &e;
    return nullptr;
}

BoogieUnit compile(const TypedProgram& typed) { return Compiler(typed).run(); }

std::string source_map_to_json(const BoogieUnit& unit)
{
    ordered_json doc;
    doc["preludeVersion"] = unit.prelude_version;
    doc["entries"] = ordered_json::array();
    for (const auto& e : unit.source_map.entries) {
        ordered_json j;
        j["line"] = e.line;
        j["col"] = e.col;
        j["blockId"] = e.block_id;
        j["kind"] = std::string(to_string(e.kind));
        if (e.slot)
            j["slot"] = *e.slot;
        doc["entries"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

SourceMap source_map_from_json(std::string_view text)
{
    auto fail = [](std::string message) -> SourceMap {
        Diagnostic d = make_error(Phase::Parse, "E_SCHEMA", std::move(message));
        throw DiagnosticError("E_SCHEMA", {d});
    };
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        return fail("source map must be an object with an 'entries' array");
    SourceMap map;
    for (const auto& j : doc["entries"]) {
        if (!j.is_object() || !j.contains("line") || !j.contains("col") || !j.contains("blockId") ||
            !j.contains("kind") || !j["line"].is_number_integer() || !j["col"].is_number_integer() ||
            !j["blockId"].is_string() || !j["kind"].is_string())
            return fail("malformed source map entry");
        auto kind = parse_obligation_kind(j["kind"].get<std::string>());
        if (!kind)
            return fail("unknown obligation kind '" + j["kind"].get<std::string>() + "'");
        SourceMapEntry e{j["line"].get<int>(), j["col"].get<int>(), j["blockId"].get<std::string>(), *kind, {}};
        if (j.contains("slot")) {
            if (!j["slot"].is_number_integer())
                return fail("slot must be an integer");
            e.slot = j["slot"].get<int>();
        }
        map.entries.push_back(std::move(e));
    }
    return map;
}

std::string_view to_string(StaticVerdict::Outcome o)
{
    switch (o) {
    case StaticVerdict::Outcome::Verified: return "verified";
    case StaticVerdict::Outcome::Errors: return "errors";
    case StaticVerdict::Outcome::ToolFailure: return "toolFailure";
    }
    return "?";
}

StaticVerdict parse_boogie_output(std::string_view output, const SourceMap& map)
{
    static const std::regex error_re(R"(^(.*)\((\d+),(\d+)\): Error(?: BP\d+)?: ?(.*)$)");
    static const std::regex related_re(R"(^(.*)\((\d+),(\d+)\): Related location: ?(.*)$)");
    static const std::regex summary_re(R"(^Boogie program verifier finished with (\d+) verified, (\d+) errors?(.*)$)");
    static const std::regex number_re(R"((\d+) ([a-z ]+))");
    static const std::regex tool_error_re(R"(\(\d+,\d+\): error: )");

    StaticVerdict verdict;
    std::vector<RawError> raw;
    std::optional<std::string> tool_message;
    bool summary = false;
    std::string undecided;

    std::istringstream in{std::string(output)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::smatch m;
        if (std::regex_match(line, m, error_re)) {
            raw.push_back({{std::stoi(m[2]), std::stoi(m[3]), m[4]}, {}});
        } else if (std::regex_match(line, m, related_re)) {
            if (!raw.empty())
                raw.back().related.push_back({std::stoi(m[2]), std::stoi(m[3]), m[4]});
        } else if (std::regex_match(line, m, summary_re)) {
            summary = true;
            verdict.verified = std::stoi(m[1]);
            verdict.errors = std::stoi(m[2]);
            std::string rest = m[3];
            for (std::sregex_iterator it(rest.begin(), rest.end(), number_re), end; it != end; ++it)
                if (std::stoi((*it)[1]) > 0)
                    undecided += (undecided.empty() ? "" : ", ") + (*it)[0].str();
        } else if (!tool_message && std::regex_search(line, tool_error_re)) {
            tool_message = line;
        }
    }

    auto tool_failure = [&](std::string message) {
        StaticVerdict v;
        v.outcome = StaticVerdict::Outcome::ToolFailure;
        v.verified = verdict.verified;
        v.errors = verdict.errors;
        v.diagnostics.push_back(make_error(Phase::Static, "E_BOOGIE_OUTPUT", std::move(message)));
        return v;
    };
    if (!summary) {
        if (tool_message)
            return tool_failure("Boogie rejected the generated file: " + *tool_message);
        return tool_failure("Boogie output has no summary line; the verifier did not finish");
    }
    if (!undecided.empty())
        return tool_failure("Boogie could not decide every procedure (" + undecided + ")");

    for (const auto& err : raw) {
        std::string msg = lower(err.at.message);
        const SourceMapEntry* primary = map.lookup(err.at.line, err.at.col);
        const SourceMapEntry* related =
            err.related.empty() ? nullptr : map.lookup(err.related[0].line, err.related[0].col);
        const SourceMapEntry* target = primary;
        if (msg.find("postcondition") != std::string::npos)
            target = related ? related : (primary && primary->kind == ObligationKind::Post ? primary : nullptr);
        if (!target) {
            Diagnostic d = make_error(Phase::Static, "E_UNMAPPED_LOCATION",
                                      "Boogie reported an error at line " + std::to_string(err.at.line) +
                                          ", column " + std::to_string(err.at.col) +
                                          " that has no source block (this is a compiler bug): " + err.at.message);
            verdict.diagnostics.push_back(std::move(d));
            continue;
        }
        ObligationKind kind = target->kind;
        if (kind == ObligationKind::InvariantEntry && msg.find("maintained") != std::string::npos)
            kind = ObligationKind::InvariantMaintain;
        verdict.diagnostics.push_back(
            verdict_diagnostic(kind, *target, kind == ObligationKind::CallPre ? related : nullptr));
    }
    bool clean = verdict.errors == 0 && verdict.diagnostics.empty();
    verdict.outcome = clean ? StaticVerdict::Outcome::Verified : StaticVerdict::Outcome::Errors;
    return verdict;
}

} // namespace blockverify
