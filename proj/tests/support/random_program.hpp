#pragma once

// Random well-formed programs and random inputs for property tests.
// Names come from disjoint prefixes (g globals, p params, l locals, q bound
// variables, b blocks, s scripts), so the generator never needs to check
// shadowing.

#include <random>
#include <string>
#include <vector>

#include "blockverify/ast.hpp"
#include "blockverify/builders.hpp"
#include "blockverify/static_types.hpp"

namespace testsupport {

using namespace blockverify;
using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs)
{
    return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(xs.size()) - 1))];
}

inline Value random_value(Rng& rng, int depth = 2)
{
    switch (uniform(rng, 0, depth > 0 ? 5 : 4)) {
    case 0: return Value::number(uniform(rng, -1000, 1000));
    case 1: return Value::number(uniform(rng, -4000, 4000) / 8.0);
    case 2: return Value::boolean(chance(rng, 0.5));
    case 3: {
        static const std::vector<std::string> texts = {"", "hi", "a \"quoted\" word", "tab\there", "caf\xc3\xa9",
                                                       "line\nbreak", "back\\slash"};
        return Value::text(pick(rng, texts));
    }
    case 4: return Value::number(chance(rng, 0.5) ? 1e300 : -3.25e-7);
    default: {
        Value::List items;
        int n = uniform(rng, 0, 4);
        for (int i = 0; i < n; ++i)
            items.push_back(random_value(rng, depth - 1));
        return Value::list(std::move(items));
    }
    }
}

/// Integer-only input matching a static type: lists have at most
/// `max_len` items and every integer lies in [-max_abs, max_abs].
inline Value random_typed_value(Rng& rng, StaticType t, int max_len = 8, int max_abs = 100)
{
    switch (t) {
    case StaticType::Int: return Value::number(uniform(rng, -max_abs, max_abs));
    case StaticType::Bool: return Value::boolean(chance(rng, 0.5));
    case StaticType::IntList: {
        Value::List items;
        int n = uniform(rng, 0, max_len);
        for (int i = 0; i < n; ++i)
            items.push_back(Value::number(uniform(rng, -max_abs, max_abs)));
        return Value::list(std::move(items));
    }
    }
    return Value{};
}

class ProgramGenerator {
public:
    explicit ProgramGenerator(Rng& rng) : rng_(rng) {}

    Program generate()
    {
        Program p;
        int globals = uniform(rng_, 0, 3);
        for (int i = 0; i < globals; ++i)
            p.globals.push_back({"g" + std::to_string(i), random_value(rng_)});
        int blocks = uniform(rng_, 1, 4);
        for (int i = 0; i < blocks; ++i) {
            BlockDef b;
            b.name = "b" + std::to_string(i);
            b.kind = static_cast<BlockKind>(uniform(rng_, 0, 2));
            int params = uniform(rng_, 0, 3);
            for (int k = 0; k < params; ++k) {
                Param prm{"p" + std::to_string(k), std::nullopt};
                if (chance(rng_, 0.3))
                    prm.type = static_cast<DeclaredType>(uniform(rng_, 0, 3));
                b.params.push_back(prm);
            }
            p.blocks.push_back(std::move(b));
        }
        program_ = &p;
        for (auto& b : p.blocks) {
            Scope sc;
            sc.block = &b;
            for (const auto& prm : b.params)
                sc.params.push_back(prm.name);
            sc.locals = fresh_locals();
            sc.context = Ctx::Pre;
            for (int k = uniform(rng_, 0, 2); k > 0; --k)
                b.pre.push_back(expr(sc, 3));
            sc.context = Ctx::Post;
            for (int k = uniform(rng_, 0, 2); k > 0; --k)
                b.post.push_back(expr(sc, 3));
            sc.context = Ctx::Body;
            b.body = body(sc);
        }
        int scripts = uniform(rng_, 0, 2);
        for (int i = 0; i < scripts; ++i) {
            EntryScript s;
            s.name = "s" + std::to_string(i);
            Scope sc;
            sc.locals = fresh_locals();
            sc.context = Ctx::Body;
            s.body = body(sc);
            p.entry_scripts.push_back(std::move(s));
        }
        program_ = nullptr;
        assign_block_ids(p);
        return p;
    }

private:
    enum class Ctx { Pre, Post, Body };
    struct Scope {
        const BlockDef* block = nullptr;
        std::vector<std::string> params;
        std::vector<std::string> locals;
        std::vector<std::string> bound;
        Ctx context = Ctx::Body;
        int quantifiers = 0;
    };

    std::vector<std::string> fresh_locals()
    {
        std::vector<std::string> out;
        for (int i = uniform(rng_, 0, 3); i > 0; --i)
            out.push_back("l" + std::to_string(out.size()));
        return out;
    }

    std::vector<std::string> readable(const Scope& sc) const
    {
        std::vector<std::string> out = sc.params;
        out.insert(out.end(), sc.bound.begin(), sc.bound.end());
        if (sc.context == Ctx::Body)
            out.insert(out.end(), sc.locals.begin(), sc.locals.end());
        for (const auto& g : program_->globals)
            out.push_back(g.name);
        return out;
    }

    std::vector<std::string> assignable(const Scope& sc) const
    {
        std::vector<std::string> out = sc.locals;
        for (const auto& g : program_->globals)
            out.push_back(g.name);
        return out;
    }

    std::vector<const BlockDef*> blocks_where(bool reporters) const
    {
        std::vector<const BlockDef*> out;
        for (const auto& b : program_->blocks)
            if (b.returns_value() == reporters)
                out.push_back(&b);
        return out;
    }

    Expr expr(Scope& sc, int depth)
    {
        using namespace build;
        int choice = depth <= 0 ? uniform(rng_, 0, 1) : uniform(rng_, 0, 12);
        switch (choice) {
        case 0: return literal(random_value(rng_, 1));
        case 1: {
            auto names = readable(sc);
            if (names.empty())
                return num(uniform(rng_, 0, 9));
            return var(pick(rng_, names));
        }
        case 2: return arith(static_cast<ArithOp>(uniform(rng_, 0, 4)), expr(sc, depth - 1), expr(sc, depth - 1));
        case 3: return cmp(static_cast<CompareOp>(uniform(rng_, 0, 5)), expr(sc, depth - 1), expr(sc, depth - 1));
        case 4: {
            auto op = static_cast<LogicOp>(uniform(rng_, 0, 5));
            std::vector<Expr> xs;
            int n = op == LogicOp::Not ? 1 : op == LogicOp::And || op == LogicOp::Or ? uniform(rng_, 2, 3) : 2;
            for (int i = 0; i < n; ++i)
                xs.push_back(expr(sc, depth - 1));
            return logic(op, std::move(xs));
        }
        case 5: {
            if (sc.context != Ctx::Post)
                break;
            std::vector<std::string> targets = sc.params;
            for (const auto& g : program_->globals)
                targets.push_back(g.name);
            if (targets.empty())
                break;
            return old(pick(rng_, targets));
        }
        case 6:
            if (sc.context != Ctx::Post || !sc.block || !sc.block->returns_value())
                break;
            return result();
        case 7: {
            std::string q = "q" + std::to_string(sc.quantifiers++);
            auto kind = static_cast<QuantKind>(uniform(rng_, 0, 1));
            expr::Domain d = chance(rng_, 0.5)
                                 ? expr::Domain{expr::RangeDomain{expr(sc, depth - 1), expr(sc, depth - 1)}}
                                 : expr::Domain{expr::ElementsDomain{expr(sc, depth - 1)}};
            sc.bound.push_back(q);
            Expr body = expr(sc, depth - 1);
            sc.bound.pop_back();
            return make(expr::Quantifier{kind, q, std::move(d), std::move(body)});
        }
        case 8: return item(expr(sc, depth - 1), expr(sc, depth - 1));
        case 9: return length(expr(sc, depth - 1));
        case 10: return contains(expr(sc, depth - 1), expr(sc, depth - 1));
        default: {
            auto reporters = blocks_where(true);
            if (reporters.empty())
                break;
            const BlockDef* b = pick(rng_, reporters);
            std::vector<Expr> args;
            for (std::size_t i = 0; i < b->params.size(); ++i)
                args.push_back(expr(sc, depth - 1));
            return call(b->name, std::move(args));
        }
        }
        return num(uniform(rng_, -5, 5));
    }

    std::vector<Stmt> body(Scope& sc)
    {
        std::vector<Stmt> out;
        if (!sc.locals.empty())
            out.push_back(build::declare(sc.locals));
        for (int i = uniform(rng_, 0, 4); i > 0; --i)
            out.push_back(stmt(sc, 2));
        return out;
    }

    std::vector<Stmt> stmts(Scope& sc, int depth)
    {
        std::vector<Stmt> out;
        for (int i = uniform(rng_, 0, 2); i > 0; --i)
            out.push_back(stmt(sc, depth));
        return out;
    }

    Stmt stmt(Scope& sc, int depth)
    {
        using namespace build;
        auto targets = assignable(sc);
        int choice = depth <= 0 ? uniform(rng_, 0, 1) : uniform(rng_, 0, 9);
        switch (choice) {
        case 0:
            if (targets.empty())
                break;
            return set(pick(rng_, targets), expr(sc, 2));
        case 1:
            if (targets.empty())
                break;
            return change(pick(rng_, targets), expr(sc, 2));
        case 2: {
            Expr c = expr(sc, 2);
            auto t = stmts(sc, depth - 1);
            return if_else(std::move(c), std::move(t), stmts(sc, depth - 1));
        }
        case 3: {
            Expr c = expr(sc, 2);
            auto inv = invariants(sc);
            return repeat(std::move(c), std::move(inv), stmts(sc, depth - 1));
        }
        case 4: {
            Expr c = expr(sc, 2);
            auto inv = invariants(sc);
            return repeat_until(std::move(c), std::move(inv), stmts(sc, depth - 1));
        }
        case 5: return assert_that(expr(sc, 2));
        case 6:
            if (!sc.block || !sc.block->returns_value())
                break;
            return report(expr(sc, 2));
        case 7: {
            auto commands = blocks_where(false);
            if (commands.empty())
                break;
            const BlockDef* b = pick(rng_, commands);
            std::vector<Expr> args;
            for (std::size_t i = 0; i < b->params.size(); ++i)
                args.push_back(expr(sc, 1));
            return run(b->name, std::move(args));
        }
        case 8:
            if (targets.empty())
                break;
            return add_to(expr(sc, 1), pick(rng_, targets));
        default:
            if (targets.empty())
                break;
            return replace_item(expr(sc, 1), pick(rng_, targets), expr(sc, 1));
        }
        return assert_that(boolean(true));
    }

    std::vector<Expr> invariants(Scope& sc)
    {
        std::vector<Expr> out;
        for (int i = uniform(rng_, 0, 2); i > 0; --i)
            out.push_back(expr(sc, 2));
        return out;
    }

    Rng& rng_;
    const Program* program_ = nullptr;
};

inline Program random_program(Rng& rng) { return ProgramGenerator(rng).generate(); }

} // namespace testsupport
