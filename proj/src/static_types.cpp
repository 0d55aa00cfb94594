#include "blockverify/static_types.hpp"

#include <algorithm>
#include <functional>

#include "blockverify/validate.hpp"

namespace blockverify {

namespace {

struct TypeNode {
    int parent;
    std::optional<StaticType> type;
    BlockId origin; // site that first fixed the type
    std::string label; // variable name, when the node stands for one
};

/// How a unification site is reported when it fails.
enum class Site { Plain, ListElement };

class Inference {
public:
    explicit Inference(const Program& p) : program_(p) {}

    TypedProgram run()
    {
        for (const auto& g : program_.globals) {
            int n = fresh(g.name);
            globals_[g.name] = n;
            if (auto t = literal_type(g.initial, {}, "global '" + g.name + "'"))
                constrain(n, *t, {}, Site::Plain);
        }
        // Scopes first, so calls can refer to blocks defined later.
        for (const auto& b : program_.blocks)
            open_block_scope(b);
        for (const auto& s : program_.entry_scripts)
            open_script_scope(s);
        for (const auto& b : program_.blocks)
            infer_block(b);
        for (const auto& s : program_.entry_scripts) {
            current_ = &scopes_.at(s.name);
            stmts(s.body);
        }
        return finish();
    }

private:
    struct Scope {
        std::string name;
        BlockId hat;
        std::map<std::string, int> vars;
        std::vector<std::string> params;
        std::optional<int> result;
    };

    int fresh(std::string label = {})
    {
        nodes_.push_back({static_cast<int>(nodes_.size()), std::nullopt, {}, std::move(label)});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int concrete(StaticType t, const BlockId& origin)
    {
        int n = fresh();
        nodes_[n].type = t;
        nodes_[n].origin = origin;
        return n;
    }

    int find(int n)
    {
        while (nodes_[n].parent != n) {
            nodes_[n].parent = nodes_[nodes_[n].parent].parent;
            n = nodes_[n].parent;
        }
        return n;
    }

    void error(std::string code, std::string message, const BlockId& where, std::vector<BlockId> related = {})
    {
        std::optional<BlockId> at;
        if (!where.empty())
            at = where;
        Diagnostic d = make_error(Phase::Typecheck, std::move(code), std::move(message), at);
        for (auto& r : related)
            if (!r.empty() && r != where)
                d.related.push_back(std::move(r));
        if (d.block_id)
            failed_scopes_.insert(d.block_id->substr(0, d.block_id->find('#')));
        if (seen_.insert(d.code + "|" + d.block_id.value_or("") + "|" + d.message).second)
            errors_.push_back(std::move(d));
    }

    void unify(int a, int b, const BlockId& site, Site kind)
    {
        int ra = find(a);
        int rb = find(b);
        if (ra == rb)
            return;
        TypeNode& na = nodes_[ra];
        TypeNode& nb = nodes_[rb];
        if (na.type && nb.type && *na.type != *nb.type) {
            conflict(na, nb, site, kind);
            return;
        }
        // Keep the typed side as root; an untyped variable that becomes typed
        // here records this site as the origin of its type.
        int root = na.type ? ra : rb;
        int child = root == ra ? rb : ra;
        if (!nodes_[root].type && nodes_[child].type)
            std::swap(root, child);
        if (nodes_[root].type && !nodes_[child].type && !nodes_[child].label.empty())
            nodes_[root].origin = nodes_[root].origin.empty() || nodes_[root].label.empty() ? site : nodes_[root].origin;
        if (nodes_[root].label.empty())
            nodes_[root].label = nodes_[child].label;
        nodes_[child].parent = root;
    }

    void constrain(int n, StaticType t, const BlockId& site, Site kind) { unify(n, concrete(t, site), site, kind); }

    void conflict(const TypeNode& a, const TypeNode& b, const BlockId& site, Site kind)
    {
        const TypeNode& earlier = a.label.empty() ? b : a;
        const TypeNode& other = &earlier == &a ? b : a;
        bool nested = kind == Site::ListElement &&
                      (a.type == StaticType::IntList || b.type == StaticType::IntList);
        if (nested) {
            error("E_NESTED_LIST", "lists may only hold integers, not other lists", site, {earlier.origin});
            return;
        }
        std::string msg;
        if (earlier.label.empty()) {
            msg = "this value is " + std::string(to_string(*a.type));
            if (!a.origin.empty() && a.origin != site)
                msg += " (from " + a.origin + ")";
            msg += " but is used as " + std::string(to_string(*b.type)) + " here";
        } else {
            msg = "'" + earlier.label + "' is used as " + std::string(to_string(*earlier.type));
            if (!earlier.origin.empty())
                msg += " at " + earlier.origin;
            msg += " and as " + std::string(to_string(*other.type)) + " at " + site +
                   " (a variable must keep a single type for static verification)";
        }
        error("E_DYNAMIC_TYPING", msg, site, {earlier.origin});
    }

    std::optional<StaticType> literal_type(const Value& v, const BlockId& site, const std::string& where)
    {
        switch (v.kind()) {
        case Value::Kind::Number:
            if (!v.is_integer()) {
                error("E_NONINT_LITERAL", "the number " + to_display(v) + " in " + where +
                                              " is not an integer; only integers can be verified statically",
                      site);
                return std::nullopt;
            }
            return StaticType::Int;
        case Value::Kind::Bool: return StaticType::Bool;
        case Value::Kind::Text:
            error("E_TEXT_UNSUPPORTED", "text values in " + where + " are not supported by static verification",
                  site);
            return std::nullopt;
        case Value::Kind::List: {
            bool saw_number = false;
            bool saw_bool = false;
            for (const auto& e : v.as_list()) {
                if (e.is_list()) {
                    error("E_NESTED_LIST", "the list in " + where + " contains another list", site);
                    return std::nullopt;
                }
                if (e.is_text()) {
                    error("E_TEXT_UNSUPPORTED", "the list in " + where + " contains text", site);
                    return std::nullopt;
                }
                if (e.is_number() && !e.is_integer()) {
                    error("E_NONINT_LITERAL", "the list in " + where + " contains the non-integer " + to_display(e),
                          site);
                    return std::nullopt;
                }
                saw_number = saw_number || e.is_number();
                saw_bool = saw_bool || e.is_bool();
            }
            if (saw_bool && saw_number) {
                error("E_DYNAMIC_TYPING", "the list in " + where + " mixes numbers and booleans", site);
                return std::nullopt;
            }
            if (saw_bool) {
                error("E_UNTYPEABLE", "the list in " + where + " holds booleans; only lists of integers are supported",
                      site);
                return std::nullopt;
            }
            return StaticType::IntList;
        }
        }
        return std::nullopt;
    }

    void open_scope(const std::string& name, const BlockId& hat, const std::vector<Stmt>& body)
    {
        Scope s;
        s.name = name;
        s.hat = hat;
        for (const auto& l : declared_locals(body))
            s.vars[l] = fresh(l);
        scopes_[name] = std::move(s);
    }

    void open_block_scope(const BlockDef& b)
    {
        open_scope(b.name, b.id, b.body);
        Scope& s = scopes_.at(b.name);
        for (const auto& p : b.params) {
            int n = fresh(p.name);
            s.vars[p.name] = n;
            s.params.push_back(p.name);
            if (p.type) {
                switch (*p.type) {
                case DeclaredType::Int: constrain(n, StaticType::Int, b.id, Site::Plain); break;
                case DeclaredType::Bool: constrain(n, StaticType::Bool, b.id, Site::Plain); break;
                case DeclaredType::IntList: constrain(n, StaticType::IntList, b.id, Site::Plain); break;
                case DeclaredType::Text:
                    error("E_TEXT_UNSUPPORTED",
                          "input '" + p.name + "' of '" + b.name + "' is declared as text, which cannot be verified",
                          b.id);
                    break;
                }
            }
        }
        if (b.kind == BlockKind::Predicate)
            s.result = concrete(StaticType::Bool, b.id);
        else if (b.kind == BlockKind::Reporter)
            s.result = fresh("result of " + b.name);
    }

    void open_script_scope(const EntryScript& e) { open_scope(e.name, e.id, e.body); }

    void infer_block(const BlockDef& b)
    {
        current_ = &scopes_.at(b.name);
        div_warned_ = false;
        for (const auto& e : b.pre)
            constrain(expr(e), StaticType::Bool, e.id, Site::Plain);
        for (const auto& e : b.post)
            constrain(expr(e), StaticType::Bool, e.id, Site::Plain);
        stmts(b.body);
    }

    int var(const std::string& name)
    {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
            if (it->first == name)
                return it->second;
        if (auto it = current_->vars.find(name); it != current_->vars.end())
            return it->second;
        if (auto it = globals_.find(name); it != globals_.end())
            return it->second;
        // Unresolvable names are rejected by validate(); keep going regardless.
        return fresh(name);
    }

    void call_args(const std::string& callee, const std::vector<Expr>& args, const BlockId& site)
    {
        auto it = scopes_.find(callee);
        const BlockDef* target = program_.find_block(callee);
        for (std::size_t i = 0; i < args.size(); ++i) {
            int a = expr(args[i]);
            if (it != scopes_.end() && target && i < target->params.size())
                unify(it->second.vars.at(target->params[i].name), a, site, Site::Plain);
        }
    }

    int expr(const Expr& e)
    {
        int n = std::visit(
            [&](const auto& node) -> int {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, expr::Literal>) {
                    if (auto t = literal_type(node.value, e.id, "this block"))
                        return concrete(*t, e.id);
                    return fresh();
                } else if constexpr (std::is_same_v<T, expr::VarRef>) {
                    return var(node.name);
                } else if constexpr (std::is_same_v<T, expr::Old>) {
                    return var(node.var);
                } else if constexpr (std::is_same_v<T, expr::Result>) {
                    return current_->result ? *current_->result : fresh();
                } else if constexpr (std::is_same_v<T, expr::Arith>) {
                    if (node.op == ArithOp::Div && !div_warned_) {
                        div_warned_ = true;
                        Diagnostic w = make_error(Phase::Typecheck, "W_DIV_SEMANTICS",
                                                  "'/' divides exactly when the program runs but is integer "
                                                  "division (rounding down) in static verification",
                                                  e.id);
                        w.severity = Severity::Warning;
                        warnings_.push_back(std::move(w));
                    }
                    constrain(expr(*node.lhs), StaticType::Int, e.id, Site::Plain);
                    constrain(expr(*node.rhs), StaticType::Int, e.id, Site::Plain);
                    return concrete(StaticType::Int, e.id);
                } else if constexpr (std::is_same_v<T, expr::Compare>) {
                    int l = expr(*node.lhs);
                    int r = expr(*node.rhs);
                    if (node.op == CompareOp::Eq || node.op == CompareOp::Neq) {
                        unify(l, r, e.id, Site::Plain);
                    } else {
                        constrain(l, StaticType::Int, e.id, Site::Plain);
                        constrain(r, StaticType::Int, e.id, Site::Plain);
                    }
                    return concrete(StaticType::Bool, e.id);
                } else if constexpr (std::is_same_v<T, expr::Logic>) {
                    for (const auto& o : node.operands)
                        constrain(expr(o), StaticType::Bool, e.id, Site::Plain);
                    return concrete(StaticType::Bool, e.id);
                } else if constexpr (std::is_same_v<T, expr::Quantifier>) {
                    if (const auto* r = std::get_if<expr::RangeDomain>(&node.domain)) {
                        constrain(expr(*r->lo), StaticType::Int, e.id, Site::Plain);
                        constrain(expr(*r->hi), StaticType::Int, e.id, Site::Plain);
                    } else {
                        constrain(expr(*std::get<expr::ElementsDomain>(node.domain).list), StaticType::IntList, e.id,
                                  Site::Plain);
                    }
                    int b = concrete(StaticType::Int, e.id);
                    nodes_[b].label = node.var;
                    bound_.emplace_back(node.var, b);
                    constrain(expr(*node.body), StaticType::Bool, e.id, Site::Plain);
                    bound_.pop_back();
                    return concrete(StaticType::Bool, e.id);
                } else if constexpr (std::is_same_v<T, expr::ItemOf>) {
                    constrain(expr(*node.index), StaticType::Int, e.id, Site::Plain);
                    constrain(expr(*node.list), StaticType::IntList, e.id, Site::Plain);
                    return concrete(StaticType::Int, e.id);
                } else if constexpr (std::is_same_v<T, expr::LengthOf>) {
                    constrain(expr(*node.list), StaticType::IntList, e.id, Site::Plain);
                    return concrete(StaticType::Int, e.id);
                } else if constexpr (std::is_same_v<T, expr::Contains>) {
                    constrain(expr(*node.list), StaticType::IntList, e.id, Site::Plain);
                    constrain(expr(*node.element), StaticType::Int, e.id, Site::ListElement);
                    return concrete(StaticType::Bool, e.id);
                } else if constexpr (std::is_same_v<T, expr::Call>) {
                    call_args(node.block, node.args, e.id);
                    auto it = scopes_.find(node.block);
                    if (it != scopes_.end() && it->second.result)
                        return *it->second.result;
                    return fresh();
                }
            },
            e.node);
        expression_nodes_[e.id] = n;
        return n;
    }

    void stmts(const std::vector<Stmt>& body)
    {
        for (const auto& s : body)
            stmt(s);
    }

    void stmt(const Stmt& s)
    {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, stmt::SetVar>) {
                    unify(var(n.name), expr(n.value), s.id, Site::Plain);
                } else if constexpr (std::is_same_v<T, stmt::ChangeVar>) {
                    constrain(var(n.name), StaticType::Int, s.id, Site::Plain);
                    constrain(expr(n.delta), StaticType::Int, s.id, Site::Plain);
                } else if constexpr (std::is_same_v<T, stmt::IfElse>) {
                    constrain(expr(n.cond), StaticType::Bool, s.id, Site::Plain);
                    stmts(n.then_branch);
                    stmts(n.else_branch);
                } else if constexpr (std::is_same_v<T, stmt::RepeatN>) {
                    constrain(expr(n.count), StaticType::Int, s.id, Site::Plain);
                    for (const auto& i : n.invariant)
                        constrain(expr(i), StaticType::Bool, i.id, Site::Plain);
                    stmts(n.body);
                } else if constexpr (std::is_same_v<T, stmt::RepeatUntil>) {
                    constrain(expr(n.cond), StaticType::Bool, s.id, Site::Plain);
                    for (const auto& i : n.invariant)
                        constrain(expr(i), StaticType::Bool, i.id, Site::Plain);
                    stmts(n.body);
                } else if constexpr (std::is_same_v<T, stmt::Assert>) {
                    constrain(expr(n.cond), StaticType::Bool, s.id, Site::Plain);
                } else if constexpr (std::is_same_v<T, stmt::Report>) {
                    int v = expr(n.value);
                    if (current_->result)
                        unify(*current_->result, v, s.id, Site::Plain);
                } else if constexpr (std::is_same_v<T, stmt::CallCommand>) {
                    call_args(n.block, n.args, s.id);
                } else if constexpr (std::is_same_v<T, stmt::AddToList>) {
                    int el = expr(n.element);
                    constrain(var(n.list), StaticType::IntList, s.id, Site::Plain);
                    constrain(el, StaticType::Int, s.id, Site::ListElement);
                } else if constexpr (std::is_same_v<T, stmt::ReplaceItem>) {
                    constrain(expr(n.index), StaticType::Int, s.id, Site::Plain);
                    int el = expr(n.element);
                    constrain(var(n.list), StaticType::IntList, s.id, Site::Plain);
                    constrain(el, StaticType::Int, s.id, Site::ListElement);
                }
            },
            s.node);
    }

    std::optional<StaticType> type_of_node(int n) { return nodes_[find(n)].type; }

    TypedProgram finish()
    {
        TypedProgram out;
        out.program = program_;
        for (const auto& [name, n] : globals_)
            if (auto t = type_of_node(n))
                out.globals[name] = *t;
        // Unresolved types in a scope that already has errors are usually a
        // consequence of those errors.
        const std::set<std::string> failed = failed_scopes_;
        for (const auto& [scope_name, scope] : scopes_) {
            auto& vars = out.variables[scope_name];
            for (const auto& [name, n] : scope.vars) {
                if (auto t = type_of_node(n)) {
                    vars[name] = *t;
                    continue;
                }
                if (failed.contains(scope_name))
                    continue;
                bool is_param = std::find(scope.params.begin(), scope.params.end(), name) != scope.params.end();
                error("E_UNTYPEABLE",
                      std::string(is_param ? "input '" : "variable '") + name + "' of '" + scope_name +
                          "' is never used in a way that fixes its type" +
                          (is_param ? "; declare its type" : ""),
                      scope.hat);
            }
            if (scope.result) {
                if (auto t = type_of_node(*scope.result))
                    out.results[scope_name] = *t;
                else if (!failed.contains(scope_name))
                    error("E_UNTYPEABLE", "the type of the value reported by '" + scope_name + "' cannot be determined",
                          scope.hat);
            }
        }
        if (!errors_.empty())
            throw DiagnosticError("E_TYPECHECK", std::move(errors_));
        for (const auto& [id, n] : expression_nodes_)
            if (auto t = type_of_node(n))
                out.expressions[id] = *t;
        out.warnings = std::move(warnings_);
        return out;
    }

    const Program& program_;
    std::vector<TypeNode> nodes_;
    std::map<std::string, int> globals_;
    std::map<std::string, Scope> scopes_;
    Scope* current_ = nullptr;
    std::vector<std::pair<std::string, int>> bound_;
    std::map<BlockId, int> expression_nodes_;
    std::vector<Diagnostic> errors_;
    std::vector<Diagnostic> warnings_;
    std::set<std::string> seen_;
    std::set<std::string> failed_scopes_;
    bool div_warned_ = false;
};

void direct_effects(const std::vector<Stmt>& body, const std::set<std::string>& locals, const Program& program,
                    std::set<std::string>& assigned, std::set<std::string>& callees)
{
    auto target = [&](const std::string& name) {
        if (!locals.contains(name) && program.find_global(name))
            assigned.insert(name);
    };
    std::function<void(const Expr&)> visit_expr = [&](const Expr& e) {
        if (const auto* c = e.as<expr::Call>())
            callees.insert(c->block);
        for_each_child(e, visit_expr);
    };
    for (const auto& s : body) {
        if (const auto* v = s.as<stmt::SetVar>())
            target(v->name);
        else if (const auto* c = s.as<stmt::ChangeVar>())
            target(c->name);
        else if (const auto* a = s.as<stmt::AddToList>())
            target(a->list);
        else if (const auto* r = s.as<stmt::ReplaceItem>())
            target(r->list);
        else if (const auto* cc = s.as<stmt::CallCommand>())
            callees.insert(cc->block);
        for_each_part(s, visit_expr, [&](const std::vector<Stmt>& nested) {
            direct_effects(nested, locals, program, assigned, callees);
        });
    }
}

} // namespace

std::string_view to_string(StaticType t)
{
    switch (t) {
    case StaticType::Int: return "Int";
    case StaticType::Bool: return "Bool";
    case StaticType::IntList: return "IntList";
    }
    return "?";
}

std::optional<StaticType> TypedProgram::type_of(const std::string& scope, const std::string& name) const
{
    if (auto s = variables.find(scope); s != variables.end())
        if (auto v = s->second.find(name); v != s->second.end())
            return v->second;
    if (auto g = globals.find(name); g != globals.end())
        return g->second;
    return std::nullopt;
}

TypedProgram infer_types(const Program& program) { return Inference(program).run(); }

TypedProgram compute_modifies(TypedProgram typed)
{
    const Program& p = typed.program;
    std::map<std::string, std::set<std::string>> callees;
    std::map<std::string, std::set<std::string>> mods;
    auto seed = [&](const std::string& name, const std::vector<Stmt>& body, const std::set<std::string>& scope_vars) {
        direct_effects(body, scope_vars, p, mods[name], callees[name]);
    };
    for (const auto& b : p.blocks) {
        std::set<std::string> scope_vars = declared_locals(b.body);
        for (const auto& prm : b.params)
            scope_vars.insert(prm.name);
        seed(b.name, b.body, scope_vars);
    }
    for (const auto& s : p.entry_scripts)
        seed(s.name, s.body, declared_locals(s.body));

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [name, set] : mods) {
            for (const auto& callee : callees[name]) {
                auto it = mods.find(callee);
                if (it == mods.end())
                    continue;
                for (const auto& g : it->second)
                    changed = set.insert(g).second || changed;
            }
        }
    }
    typed.modifies = std::move(mods);
    return typed;
}

TypedProgram check_static(const Program& program) { return compute_modifies(infer_types(program)); }

} // namespace blockverify
