#include "blockverify/validate.hpp"

#include <map>

namespace blockverify {

namespace {

enum class Context { Pre, Post, Body };

class Validator {
public:
    explicit Validator(const Program& p) : program_(p) {}

    std::vector<Diagnostic> run()
    {
        check_top_level_names();
        for (const auto& b : program_.blocks)
            check_block(b);
        for (const auto& s : program_.entry_scripts)
            check_entry(s);
        return std::move(out_);
    }

private:
    struct Scope {
        const BlockDef* block = nullptr; // null for entry scripts
        std::set<std::string> params;
        std::set<std::string> locals;
        std::vector<std::string> bound;
        Context context = Context::Body;
    };

    void report(std::string code, std::string message, const BlockId& id)
    {
        std::optional<BlockId> where;
        if (!id.empty())
            where = id;
        out_.push_back(make_error(Phase::Wellformed, std::move(code), std::move(message), where));
    }

    bool check_name(const std::string& name, const BlockId& where, std::string_view what)
    {
        if (!is_identifier(name)) {
            report("E_BAD_IDENTIFIER", std::string(what) + " name '" + name + "' is not an identifier", where);
            return false;
        }
        if (name.starts_with(kReservedPrefix)) {
            report("E_RESERVED_NAME",
                   std::string(what) + " name '" + name + "' uses the reserved prefix '__'", where);
            return false;
        }
        return true;
    }

    void check_top_level_names()
    {
        std::map<std::string, std::string> seen;
        auto claim = [&](const std::string& name, const BlockId& where, std::string_view what) {
            check_name(name, where, what);
            auto [it, inserted] = seen.emplace(name, std::string(what));
            if (!inserted)
                report("E_DUPLICATE_NAME",
                       std::string(what) + " '" + name + "' clashes with the " + it->second + " of the same name",
                       where);
        };
        for (const auto& g : program_.globals)
            claim(g.name, {}, "global");
        for (const auto& b : program_.blocks)
            claim(b.name, b.id, "block");
        for (const auto& s : program_.entry_scripts)
            claim(s.name, s.id, "script");
    }

    void check_locals(const std::vector<Stmt>& body, Scope& scope, const BlockId& owner)
    {
        scope.locals = declared_locals(body);
        for (const auto& l : scope.locals) {
            check_name(l, owner, "local");
            if (scope.params.contains(l))
                report("E_SHADOWING", "local '" + l + "' shadows the parameter of the same name", owner);
            else if (program_.find_global(l))
                report("E_SHADOWING", "local '" + l + "' shadows the global of the same name", owner);
        }
    }

    void check_block(const BlockDef& b)
    {
        Scope scope;
        scope.block = &b;
        for (const auto& p : b.params) {
            check_name(p.name, b.id, "parameter");
            if (!scope.params.insert(p.name).second)
                report("E_DUPLICATE_NAME", "parameter '" + p.name + "' is declared twice", b.id);
            if (program_.find_global(p.name))
                report("E_SHADOWING", "parameter '" + p.name + "' shadows the global of the same name", b.id);
        }
        check_locals(b.body, scope, b.id);

        scope.context = Context::Pre;
        for (const auto& e : b.pre)
            check_expr(e, scope);
        scope.context = Context::Post;
        for (const auto& e : b.post)
            check_expr(e, scope);
        scope.context = Context::Body;
        check_stmts(b.body, scope);
    }

    void check_entry(const EntryScript& s)
    {
        Scope scope;
        check_locals(s.body, scope, s.id);
        check_stmts(s.body, scope);
    }

    bool resolves(const std::string& name, const Scope& scope) const
    {
        for (const auto& b : scope.bound)
            if (b == name)
                return true;
        if (scope.params.contains(name))
            return true;
        // Locals are gone by the time a contract is evaluated.
        if (scope.context == Context::Body && scope.locals.contains(name))
            return true;
        return program_.find_global(name) != nullptr;
    }

    void check_call(const std::string& callee, std::size_t arity, bool as_command, const BlockId& where)
    {
        const BlockDef* target = program_.find_block(callee);
        if (!target) {
            report("E_UNKNOWN_BLOCK", "no block named '" + callee + "' is defined", where);
            return;
        }
        if (target->params.size() != arity)
            report("E_ARITY",
                   "block '" + callee + "' takes " + std::to_string(target->params.size()) + " input(s) but " +
                       std::to_string(arity) + " were given",
                   where);
        if (as_command && target->kind != BlockKind::Command)
            report("E_CALL_KIND", "'" + callee + "' is a " + std::string(to_string(target->kind)) +
                                      " and must be used inside an expression",
                   where);
        if (!as_command && target->kind == BlockKind::Command)
            report("E_CALL_KIND", "'" + callee + "' is a command block and does not report a value", where);
    }

    void check_expr(const Expr& e, Scope& scope)
    {
        if (const auto* v = e.as<expr::VarRef>()) {
            if (!resolves(v->name, scope))
                report("E_UNKNOWN_VARIABLE", "variable '" + v->name + "' is not defined here", e.id);
        } else if (const auto* o = e.as<expr::Old>()) {
            if (scope.context != Context::Post) {
                report("E_OLD_OUTSIDE_POST", "'old' may only be used in a postcondition", e.id);
            } else if (!scope.params.contains(o->var) && !program_.find_global(o->var)) {
                report("E_OLD_TARGET", "'old' needs a parameter or global variable, not '" + o->var + "'", e.id);
            }
        } else if (e.is<expr::Result>()) {
            if (scope.context != Context::Post)
                report("E_RESULT_OUTSIDE_POST", "'result' may only be used in a postcondition", e.id);
            else if (scope.block && scope.block->kind == BlockKind::Command)
                report("E_RESULT_IN_COMMAND", "command block '" + scope.block->name +
                                                  "' reports no value, so 'result' has no meaning",
                       e.id);
        } else if (const auto* c = e.as<expr::Call>()) {
            check_call(c->block, c->args.size(), false, e.id);
        } else if (const auto* q = e.as<expr::Quantifier>()) {
            check_name(q->var, e.id, "bound variable");
            std::visit([&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, expr::RangeDomain>) {
                    check_expr(*d.lo, scope);
                    check_expr(*d.hi, scope);
                } else {
                    check_expr(*d.list, scope);
                }
            }, q->domain);
            scope.bound.push_back(q->var);
            check_expr(*q->body, scope);
            scope.bound.pop_back();
            return;
        }
        for_each_child(e, [&](const Expr& child) { check_expr(child, scope); });
    }

    void check_target(const std::string& name, const Scope& scope, const BlockId& where)
    {
        if (scope.params.contains(name))
            report("E_ASSIGN_PARAM", "parameter '" + name + "' cannot be changed", where);
        else if (!resolves(name, scope))
            report("E_UNKNOWN_VARIABLE", "variable '" + name + "' is not defined here", where);
    }

    void check_stmts(const std::vector<Stmt>& body, Scope& scope)
    {
        for (const auto& s : body)
            check_stmt(s, scope);
    }

    void check_stmt(const Stmt& s, Scope& scope)
    {
        if (const auto* v = s.as<stmt::SetVar>())
            check_target(v->name, scope, s.id);
        else if (const auto* c = s.as<stmt::ChangeVar>())
            check_target(c->name, scope, s.id);
        else if (const auto* a = s.as<stmt::AddToList>())
            check_target(a->list, scope, s.id);
        else if (const auto* r = s.as<stmt::ReplaceItem>())
            check_target(r->list, scope, s.id);
        else if (const auto* cc = s.as<stmt::CallCommand>())
            check_call(cc->block, cc->args.size(), true, s.id);
        else if (s.is<stmt::Report>() && (!scope.block || scope.block->kind == BlockKind::Command))
            report("E_REPORT_OUTSIDE_REPORTER", "'report' may only be used inside a reporter or predicate", s.id);

        for_each_part(
            s, [&](const Expr& e) { check_expr(e, scope); },
            [&](const std::vector<Stmt>& nested) { check_stmts(nested, scope); });
    }

    const Program& program_;
    std::vector<Diagnostic> out_;
};

void collect_free(const Expr& e, std::vector<std::string>& bound, std::set<std::string>& out)
{
    auto is_bound = [&](const std::string& n) {
        for (const auto& b : bound)
            if (b == n)
                return true;
        return false;
    };
    if (const auto* v = e.as<expr::VarRef>()) {
        if (!is_bound(v->name))
            out.insert(v->name);
        return;
    }
    if (const auto* o = e.as<expr::Old>()) {
        out.insert(o->var);
        return;
    }
    if (const auto* q = e.as<expr::Quantifier>()) {
        if (const auto* r = std::get_if<expr::RangeDomain>(&q->domain)) {
            collect_free(*r->lo, bound, out);
            collect_free(*r->hi, bound, out);
        } else {
            collect_free(*std::get<expr::ElementsDomain>(q->domain).list, bound, out);
        }
        bound.push_back(q->var);
        collect_free(*q->body, bound, out);
        bound.pop_back();
        return;
    }
    for_each_child(e, [&](const Expr& c) { collect_free(c, bound, out); });
}

void collect_old(const Expr& e, std::set<std::string>& out)
{
    if (const auto* o = e.as<expr::Old>())
        out.insert(o->var);
    for_each_child(e, [&](const Expr& c) { collect_old(c, out); });
}

void collect_locals(const std::vector<Stmt>& body, std::set<std::string>& out)
{
    for (const auto& s : body) {
        if (const auto* d = s.as<stmt::DeclareLocals>())
            out.insert(d->names.begin(), d->names.end());
        for_each_part(s, [](const Expr&) {}, [&](const std::vector<Stmt>& nested) { collect_locals(nested, out); });
    }
}

} // namespace

std::vector<Diagnostic> validate(const Program& program) { return Validator(program).run(); }

std::set<std::string> free_variables(const Expr& e)
{
    std::set<std::string> out;
    std::vector<std::string> bound;
    collect_free(e, bound, out);
    return out;
}

std::set<std::string> old_variables(const Expr& e)
{
    std::set<std::string> out;
    collect_old(e, out);
    return out;
}

std::set<std::string> declared_locals(const std::vector<Stmt>& body)
{
    std::set<std::string> out;
    collect_locals(body, out);
    return out;
}

} // namespace blockverify
