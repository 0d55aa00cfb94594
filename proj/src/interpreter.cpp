#include "blockverify/interpreter.hpp"

#include <pthread.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "blockverify/validate.hpp"

namespace blockverify {

namespace {

std::string describe(const Value& v)
{
    return std::string(kind_name(v.kind())) + " " + to_display(v);
}

Bindings frame_bindings(const Environment& env)
{
    Bindings out;
    if (env.frames.empty())
        return out;
    const Frame& f = env.frames.back();
    for (const auto& [k, v] : f.params)
        out.emplace_back(k, v);
    for (const auto& [k, v] : f.locals)
        out.emplace_back(k, v);
    return out;
}

std::vector<BlockId> chain_of(const Environment& env)
{
    std::vector<BlockId> chain;
    for (const auto& f : env.frames)
        chain.push_back(f.owner_id);
    return chain;
}

bool matches(DeclaredType t, const Value& v)
{
    switch (t) {
    case DeclaredType::Int: return v.is_integer();
    case DeclaredType::Bool: return v.is_bool();
    case DeclaredType::Text: return v.is_text();
    case DeclaredType::IntList:
        return v.is_list() && std::all_of(v.as_list().begin(), v.as_list().end(),
                                          [](const Value& e) { return e.is_integer(); });
    }
    return false;
}

// Remainder with the sign convention of Boogie's integer `mod`: 0 <= r < |b|.
double euclidean_mod(double a, double b)
{
    double m = std::fabs(b);
    double r = std::fmod(a, m);
    if (r < 0)
        r += m;
    return r;
}

} // namespace

std::string_view to_string(ViolationKind k)
{
    switch (k) {
    case ViolationKind::Precondition: return "Precondition";
    case ViolationKind::Postcondition: return "Postcondition";
    case ViolationKind::Assertion: return "Assertion";
    case ViolationKind::InvariantEntry: return "InvariantEntry";
    case ViolationKind::InvariantIteration: return "InvariantIteration";
    }
    return "?";
}

std::optional<ViolationKind> parse_violation_kind(std::string_view s)
{
    for (auto k : {ViolationKind::Precondition, ViolationKind::Postcondition, ViolationKind::Assertion,
                   ViolationKind::InvariantEntry, ViolationKind::InvariantIteration})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

std::string_view to_string(ExecutionReport::Status s)
{
    switch (s) {
    case ExecutionReport::Status::Passed: return "passed";
    case ExecutionReport::Status::Violation: return "violation";
    case ExecutionReport::Status::Error: return "error";
    }
    return "?";
}

Interpreter::Interpreter(const Program& program, std::size_t depth_limit)
    : program_(program), depth_limit_(depth_limit)
{
}

void Interpreter::fail(const Environment& env, std::string code, std::string message, const BlockId& where) const
{
    RuntimeFault f{std::move(code), std::move(message), where, chain_of(env)};
    if (where.empty())
        f.block_id.reset();
    throw RuntimeError(std::move(f), frame_bindings(env));
}

void Interpreter::violate(const Environment& env, ViolationKind kind, const BlockId& where, int slot,
                          std::optional<std::int64_t> iteration) const
{
    throw ViolationError(Violation{kind, where, slot, chain_of(env), iteration}, frame_bindings(env));
}

Value& Interpreter::lookup(Environment& env, const std::string& name, const BlockId& where)
{
    if (!env.frames.empty()) {
        Frame& f = env.frames.back();
        for (auto it = f.bound.rbegin(); it != f.bound.rend(); ++it)
            if (it->first == name)
                return it->second;
        if (auto it = f.locals.find(name); it != f.locals.end())
            return it->second;
        if (auto it = f.params.find(name); it != f.params.end())
            return it->second;
    }
    if (auto it = env.globals.find(name); it != env.globals.end())
        return it->second;
    fail(env, "E_UNBOUND", "variable '" + name + "' does not exist at this point", where);
}

Value& Interpreter::assignable(Environment& env, const std::string& name, const BlockId& where)
{
    if (!env.frames.empty()) {
        Frame& f = env.frames.back();
        if (auto it = f.locals.find(name); it != f.locals.end())
            return it->second;
        if (f.params.contains(name))
            fail(env, "E_TYPE", "parameter '" + name + "' cannot be changed", where);
    }
    if (auto it = env.globals.find(name); it != env.globals.end())
        return it->second;
    fail(env, "E_UNBOUND", "variable '" + name + "' does not exist at this point", where);
}

bool Interpreter::eval_bool(Environment& env, const Expr& e, std::string_view what)
{
    Value v = eval_expr(env, e);
    if (!v.is_bool())
        fail(env, "E_TYPE", std::string(what) + " expects a boolean but got " + describe(v), e.id);
    return v.as_bool();
}

double Interpreter::eval_number(Environment& env, const Expr& e, std::string_view what)
{
    Value v = eval_expr(env, e);
    if (!v.is_number())
        fail(env, "E_TYPE", std::string(what) + " expects a number but got " + describe(v), e.id);
    return v.as_number();
}

const Value::List& Interpreter::eval_list(Environment& env, const Expr& e, Value& holder)
{
    holder = eval_expr(env, e);
    if (!holder.is_list())
        fail(env, "E_TYPE", "expected a list but got " + describe(holder), e.id);
    return holder.as_list();
}

Value Interpreter::eval_expr(Environment& env, const Expr& e)
{
    return std::visit(
        [&](const auto& n) -> Value {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, expr::Literal>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, expr::VarRef>) {
                return lookup(env, n.name, e.id);
            } else if constexpr (std::is_same_v<T, expr::Arith>) {
                double a = eval_number(env, *n.lhs, to_string(n.op));
                double b = eval_number(env, *n.rhs, to_string(n.op));
                switch (n.op) {
                case ArithOp::Add: return Value::number(a + b);
                case ArithOp::Sub: return Value::number(a - b);
                case ArithOp::Mul: return Value::number(a * b);
                case ArithOp::Div:
                    if (b == 0)
                        fail(env, "E_DIV_ZERO", "division by zero", e.id);
                    return Value::number(a / b);
                case ArithOp::Mod:
                    if (b == 0)
                        fail(env, "E_DIV_ZERO", "remainder of division by zero", e.id);
                    return Value::number(euclidean_mod(a, b));
                }
                return Value{};
            } else if constexpr (std::is_same_v<T, expr::Compare>) {
                if (n.op == CompareOp::Eq || n.op == CompareOp::Neq) {
                    Value a = eval_expr(env, *n.lhs);
                    Value b = eval_expr(env, *n.rhs);
                    return Value::boolean((a == b) == (n.op == CompareOp::Eq));
                }
                double a = eval_number(env, *n.lhs, to_string(n.op));
                double b = eval_number(env, *n.rhs, to_string(n.op));
                switch (n.op) {
                case CompareOp::Lt: return Value::boolean(a < b);
                case CompareOp::Le: return Value::boolean(a <= b);
                case CompareOp::Gt: return Value::boolean(a > b);
                case CompareOp::Ge: return Value::boolean(a >= b);
                default: return Value{};
                }
            } else if constexpr (std::is_same_v<T, expr::Logic>) {
                std::vector<bool> vals;
                vals.reserve(n.operands.size());
                for (const auto& o : n.operands)
                    vals.push_back(eval_bool(env, o, to_string(n.op)));
                switch (n.op) {
                case LogicOp::And: return Value::boolean(std::all_of(vals.begin(), vals.end(), [](bool b) { return b; }));
                case LogicOp::Or: return Value::boolean(std::any_of(vals.begin(), vals.end(), [](bool b) { return b; }));
                case LogicOp::Not: return Value::boolean(!vals.at(0));
                case LogicOp::Implies: return Value::boolean(!vals.at(0) || vals.at(1));
                case LogicOp::Iff: return Value::boolean(vals.at(0) == vals.at(1));
                case LogicOp::Xor: return Value::boolean(vals.at(0) != vals.at(1));
                }
                return Value{};
            } else if constexpr (std::is_same_v<T, expr::Old>) {
                if (env.frames.empty() || !env.frames.back().has_snapshot)
                    fail(env, "E_NO_OLD", "'old' is only available in a postcondition", e.id);
                const auto& snap = env.frames.back().old_snapshot;
                auto it = snap.find(n.var);
                if (it == snap.end())
                    fail(env, "E_NO_OLD", "no entry value was recorded for '" + n.var + "'", e.id);
                return it->second;
            } else if constexpr (std::is_same_v<T, expr::Result>) {
                if (env.frames.empty() || !env.frames.back().result)
                    fail(env, "E_NO_RESULT", "'result' is only available after the block reported", e.id);
                return *env.frames.back().result;
            } else if constexpr (std::is_same_v<T, expr::Quantifier>) {
                bool transient = env.frames.empty();
                if (transient)
                    env.frames.push_back(Frame{});
                bool acc = n.kind == QuantKind::ForAll;
                auto visit = [&](Value element) {
                    env.frames.back().bound.emplace_back(n.var, std::move(element));
                    bool b = eval_bool(env, *n.body, to_string(n.kind));
                    env.frames.back().bound.pop_back();
                    acc = n.kind == QuantKind::ForAll ? acc && b : acc || b;
                };
                // Every element is visited (no short-circuit), matching the
                // whole-domain well-definedness obligations of the static side.
                if (const auto* r = std::get_if<expr::RangeDomain>(&n.domain)) {
                    Value lo = eval_expr(env, *r->lo);
                    Value hi = eval_expr(env, *r->hi);
                    if (!lo.is_integer() || !hi.is_integer())
                        fail(env, "E_TYPE", "quantifier range bounds must be integers", e.id);
                    for (double i = lo.as_number(); i <= hi.as_number(); i += 1)
                        visit(Value::number(i));
                } else {
                    Value holder;
                    for (const auto& element : eval_list(env, *std::get<expr::ElementsDomain>(n.domain).list, holder))
                        visit(element);
                }
                if (transient)
                    env.frames.pop_back();
                return Value::boolean(acc);
            } else if constexpr (std::is_same_v<T, expr::ItemOf>) {
                Value idx = eval_expr(env, *n.index);
                if (!idx.is_integer())
                    fail(env, "E_TYPE", "list index must be an integer but got " + describe(idx), e.id);
                Value holder;
                const auto& list = eval_list(env, *n.list, holder);
                double i = idx.as_number();
                if (i < 1 || i > static_cast<double>(list.size()))
                    fail(env, "E_INDEX",
                         "item " + format_number(i) + " does not exist in a list of length " +
                             std::to_string(list.size()),
                         e.id);
                return list[static_cast<std::size_t>(i) - 1];
            } else if constexpr (std::is_same_v<T, expr::LengthOf>) {
                Value holder;
                return Value::number(static_cast<double>(eval_list(env, *n.list, holder).size()));
            } else if constexpr (std::is_same_v<T, expr::Contains>) {
                Value holder;
                const auto& list = eval_list(env, *n.list, holder);
                Value needle = eval_expr(env, *n.element);
                return Value::boolean(std::find(list.begin(), list.end(), needle) != list.end());
            } else if constexpr (std::is_same_v<T, expr::Call>) {
                const BlockDef* target = program_.find_block(n.block);
                if (!target)
                    fail(env, "E_UNBOUND", "no block named '" + n.block + "'", e.id);
                std::vector<Value> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args)
                    args.push_back(eval_expr(env, a));
                auto r = call_block(env, *target, std::move(args));
                if (!r)
                    fail(env, "E_TYPE", "'" + n.block + "' does not report a value", e.id);
                return std::move(*r);
            }
        },
        e.node);
}

void Interpreter::check_slots(Environment& env, std::span<const Expr> slots, ViolationKind kind,
                              const BlockId& where, std::optional<std::int64_t> iteration)
{
    if (kind == ViolationKind::InvariantEntry || kind == ViolationKind::InvariantIteration)
        ++stats_.invariant_checks;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        Value v = eval_expr(env, slots[i]);
        if (!v.is_bool())
            fail(env, "E_NONBOOL_SPEC",
                 std::string(to_string(kind)) + " slot " + std::to_string(i + 1) + " must be true or false, not " +
                     describe(v),
                 slots[i].id);
        if (!v.as_bool())
            violate(env, kind, where, static_cast<int>(i + 1), iteration);
    }
}

Interpreter::Flow Interpreter::exec_stmts(Environment& env, std::span<const Stmt> stmts)
{
    for (const auto& s : stmts)
        if (exec_stmt(env, s) == Flow::Reported)
            return Flow::Reported;
    return Flow::Normal;
}

Interpreter::Flow Interpreter::exec_stmt(Environment& env, const Stmt& s)
{
    return std::visit(
        [&](const auto& n) -> Flow {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, stmt::DeclareLocals>) {
                if (env.frames.empty())
                    fail(env, "E_UNBOUND", "script variables need an enclosing script", s.id);
                for (const auto& name : n.names)
                    env.frames.back().locals[name] = Value::number(0);
            } else if constexpr (std::is_same_v<T, stmt::SetVar>) {
                Value v = eval_expr(env, n.value);
                assignable(env, n.name, s.id) = std::move(v);
            } else if constexpr (std::is_same_v<T, stmt::ChangeVar>) {
                double d = eval_number(env, n.delta, "change");
                Value& target = assignable(env, n.name, s.id);
                if (!target.is_number())
                    fail(env, "E_TYPE", "change expects a number in '" + n.name + "' but got " + describe(target), s.id);
                target = Value::number(target.as_number() + d);
            } else if constexpr (std::is_same_v<T, stmt::IfElse>) {
                bool c = eval_bool(env, n.cond, "if");
                return exec_stmts(env, c ? n.then_branch : n.else_branch);
            } else if constexpr (std::is_same_v<T, stmt::RepeatN>) {
                Value count = eval_expr(env, n.count);
                if (!count.is_number() || !(count.as_number() >= 0) || !std::isfinite(count.as_number()))
                    fail(env, "E_TYPE", "repeat expects a non-negative number but got " + describe(count), n.count.id);
                auto times = static_cast<std::int64_t>(std::trunc(count.as_number()));
                check_slots(env, n.invariant, ViolationKind::InvariantEntry, s.id, 0);
                for (std::int64_t k = 1; k <= times; ++k) {
                    if (exec_stmts(env, n.body) == Flow::Reported)
                        return Flow::Reported;
                    check_slots(env, n.invariant, ViolationKind::InvariantIteration, s.id, k);
                }
            } else if constexpr (std::is_same_v<T, stmt::RepeatUntil>) {
                check_slots(env, n.invariant, ViolationKind::InvariantEntry, s.id, 0);
                for (std::int64_t k = 1; !eval_bool(env, n.cond, "repeat until"); ++k) {
                    if (exec_stmts(env, n.body) == Flow::Reported)
                        return Flow::Reported;
                    check_slots(env, n.invariant, ViolationKind::InvariantIteration, s.id, k);
                }
            } else if constexpr (std::is_same_v<T, stmt::Assert>) {
                ++stats_.assertions;
                check_slots(env, std::span<const Expr>(&n.cond, 1), ViolationKind::Assertion, s.id);
            } else if constexpr (std::is_same_v<T, stmt::Report>) {
                Value v = eval_expr(env, n.value);
                if (env.frames.empty())
                    fail(env, "E_TYPE", "'report' outside a block", s.id);
                env.frames.back().result = std::move(v);
                return Flow::Reported;
            } else if constexpr (std::is_same_v<T, stmt::CallCommand>) {
                const BlockDef* target = program_.find_block(n.block);
                if (!target)
                    fail(env, "E_UNBOUND", "no block named '" + n.block + "'", s.id);
                std::vector<Value> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args)
                    args.push_back(eval_expr(env, a));
                call_block(env, *target, std::move(args));
            } else if constexpr (std::is_same_v<T, stmt::AddToList>) {
                Value v = eval_expr(env, n.element);
                Value& target = assignable(env, n.list, s.id);
                if (!target.is_list())
                    fail(env, "E_TYPE", "'" + n.list + "' holds " + describe(target) + ", not a list", s.id);
                target.as_list().push_back(std::move(v));
            } else if constexpr (std::is_same_v<T, stmt::ReplaceItem>) {
                Value idx = eval_expr(env, n.index);
                Value v = eval_expr(env, n.element);
                if (!idx.is_integer())
                    fail(env, "E_TYPE", "list index must be an integer but got " + describe(idx), n.index.id);
                Value& target = assignable(env, n.list, s.id);
                if (!target.is_list())
                    fail(env, "E_TYPE", "'" + n.list + "' holds " + describe(target) + ", not a list", s.id);
                auto& list = target.as_list();
                double i = idx.as_number();
                if (i < 1 || i > static_cast<double>(list.size()))
                    fail(env, "E_INDEX",
                         "item " + format_number(i) + " does not exist in a list of length " +
                             std::to_string(list.size()),
                         s.id);
                list[static_cast<std::size_t>(i) - 1] = std::move(v);
            }
            return Flow::Normal;
        },
        s.node);
}

std::optional<Value> Interpreter::call_block(Environment& env, const BlockDef& block, std::vector<Value> args)
{
    if (env.frames.size() >= depth_limit_)
        fail(env, "E_STACK_OVERFLOW",
             "more than " + std::to_string(depth_limit_) + " nested calls (runaway recursion?)", block.id);
    if (args.size() != block.params.size())
        fail(env, "E_ARITY",
             "'" + block.name + "' takes " + std::to_string(block.params.size()) + " input(s) but got " +
                 std::to_string(args.size()),
             block.id);
    ++stats_.calls;

    Frame frame;
    frame.owner = block.name;
    frame.owner_id = block.id;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const Param& p = block.params[i];
        if (p.type && !matches(*p.type, args[i]))
            fail(env, "E_TYPE",
                 "input '" + p.name + "' of '" + block.name + "' must be " + std::string(to_string(*p.type)) +
                     " but got " + describe(args[i]),
                 block.id);
        frame.params.emplace(p.name, std::move(args[i]));
    }
    env.frames.push_back(std::move(frame));

    // Snapshot before the precondition so `old` sees exactly the entry state.
    std::map<std::string, Value> snapshot;
    for (const auto& slot : block.post)
        for (const auto& name : old_variables(slot))
            snapshot.emplace(name, lookup(env, name, slot.id));
    env.frames.back().old_snapshot = std::move(snapshot);
    env.frames.back().has_snapshot = true;

    check_slots(env, block.pre, ViolationKind::Precondition, block.id);

    Flow flow = exec_stmts(env, block.body);
    if (block.returns_value() && flow != Flow::Reported) {
        if (block.kind == BlockKind::Predicate)
            env.frames.back().result = Value::boolean(false);
        else
            fail(env, "E_NO_REPORT", "reporter '" + block.name + "' finished without reporting a value", block.id);
    }
    if (!block.returns_value())
        env.frames.back().result.reset();

    check_slots(env, block.post, ViolationKind::Postcondition, block.id);

    std::optional<Value> result = std::move(env.frames.back().result);
    env.frames.pop_back();
    return result;
}

void Interpreter::run_script(Environment& env, const EntryScript& script)
{
    Frame frame;
    frame.owner = script.name;
    frame.owner_id = script.id;
    env.frames.push_back(std::move(frame));
    exec_stmts(env, script.body);
    env.frames.pop_back();
}

namespace {

// Runs `fn` on a thread whose stack can hold `depth` nested block calls.
void run_with_stack(std::size_t depth, const std::function<void()>& fn)
{
    constexpr std::size_t kPerCall = 64 * 1024;
    std::size_t size = std::max<std::size_t>(16u << 20, depth * kPerCall);

    pthread_attr_t attr;
    pthread_attr_init(&attr);
    pthread_attr_setstacksize(&attr, size);
    auto trampoline = [](void* arg) -> void* {
        (*static_cast<const std::function<void()>*>(arg))();
        return nullptr;
    };
    pthread_t thread;
    int rc = pthread_create(&thread, &attr, trampoline, const_cast<std::function<void()>*>(&fn));
    pthread_attr_destroy(&attr);
    if (rc != 0) {
        fn();
        return;
    }
    pthread_join(thread, nullptr);
}

} // namespace

ExecutionReport run_entry(const Program& program, std::string_view entry, const Bindings& args,
                          const RunOptions& options)
{
    ExecutionReport report;
    report.entry = std::string(entry);
    auto error = [&](std::string code, std::string message) {
        report.status = ExecutionReport::Status::Error;
        report.error = RuntimeFault{std::move(code), std::move(message), std::nullopt, {}};
        return report;
    };

    const BlockDef* block = program.find_block(entry);
    const EntryScript* script = block ? nullptr : program.find_entry_script(entry);
    if (!block && !script)
        return error("E_ENTRY_NOT_FOUND", "no block or script named '" + std::string(entry) + "'");

    Environment env;
    for (const auto& g : program.globals)
        env.globals[g.name] = g.initial;
    for (const auto& [name, v] : options.global_overrides) {
        if (!env.globals.contains(name))
            return error("E_UNBOUND", "no global named '" + name + "'");
        env.globals[name] = v;
    }

    std::vector<Value> positional;
    if (block) {
        if (args.size() != block->params.size())
            return error("E_ARITY", "'" + block->name + "' takes " + std::to_string(block->params.size()) +
                                        " input(s) but got " + std::to_string(args.size()));
        for (const auto& p : block->params) {
            auto it = std::find_if(args.begin(), args.end(), [&](const auto& a) { return a.first == p.name; });
            if (it == args.end())
                return error("E_ARITY", "missing input '" + p.name + "' for '" + block->name + "'");
            positional.push_back(it->second);
        }
    } else if (!args.empty()) {
        return error("E_ARITY", "script '" + script->name + "' takes no inputs");
    }

    Interpreter interp(program, options.depth_limit);
    run_with_stack(options.depth_limit, [&] {
        try {
            if (block)
                report.result = interp.call_block(env, *block, std::move(positional));
            else
                interp.run_script(env, *script);
        } catch (const ViolationError& v) {
            report.status = ExecutionReport::Status::Violation;
            report.violation = v.violation();
            report.frame_values = v.frame_values();
        } catch (const RuntimeError& r) {
            report.status = ExecutionReport::Status::Error;
            report.error = r.fault();
            report.frame_values = r.frame_values();
        }
    });

    for (const auto& g : program.globals)
        report.globals.emplace_back(g.name, env.globals[g.name]);
    report.stats = interp.stats();
    return report;
}

std::vector<Diagnostic> to_diagnostics(const ExecutionReport& report)
{
    std::vector<Diagnostic> out;
    if (report.violation) {
        const Violation& v = *report.violation;
        Diagnostic d;
        d.phase = Phase::Runtime;
        d.block_id = v.block_id;
        d.slot_index = v.slot_index;
        d.call_chain = v.call_chain;
        std::string slot = " (slot " + std::to_string(v.slot_index) + ")";
        switch (v.kind) {
        case ViolationKind::Precondition:
            d.code = "E_PRECONDITION";
            d.message = "the precondition" + slot + " does not hold for these inputs";
            break;
        case ViolationKind::Postcondition:
            d.code = "E_POSTCONDITION";
            d.message = "the postcondition" + slot + " does not hold when the block finishes";
            break;
        case ViolationKind::Assertion:
            d.code = "E_ASSERTION";
            d.message = "the assertion does not hold";
            break;
        case ViolationKind::InvariantEntry:
            d.code = "E_INVARIANT_ENTRY";
            d.message = "the loop invariant" + slot + " does not hold when the loop starts";
            break;
        case ViolationKind::InvariantIteration:
            d.code = "E_INVARIANT_ITERATION";
            d.message = "the loop invariant" + slot + " does not hold after iteration " +
                        std::to_string(v.iteration.value_or(0));
            break;
        }
        out.push_back(std::move(d));
    }
    if (report.error) {
        Diagnostic d = make_error(Phase::Runtime, report.error->code, report.error->message, report.error->block_id);
        d.call_chain = report.error->call_chain;
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace blockverify
