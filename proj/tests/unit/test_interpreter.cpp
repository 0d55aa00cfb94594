#include <doctest.h>

#include "blockverify/builders.hpp"
#include "blockverify/interpreter.hpp"
#include "support/paths.hpp"

using namespace blockverify;
using namespace blockverify::build;

namespace {

Program single(BlockDef b, std::vector<Global> globals = {})
{
    Program p;
    p.globals = std::move(globals);
    p.blocks.push_back(std::move(b));
    assign_block_ids(p);
    return p;
}

BlockDef reporter(std::string name, std::vector<std::string> params, std::vector<Stmt> body,
                  std::vector<Expr> pre = {}, std::vector<Expr> post = {})
{
    BlockDef b;
    b.name = std::move(name);
    b.kind = BlockKind::Reporter;
    for (auto& p : params)
        b.params.push_back({p, std::nullopt});
    b.body = std::move(body);
    b.pre = std::move(pre);
    b.post = std::move(post);
    return b;
}

Value eval_closed(const Expr& e)
{
    Program p;
    Interpreter in(p);
    Environment env;
    env.frames.push_back(Frame{});
    return in.eval_expr(env, e);
}

std::string fault_code(const Expr& e)
{
    try {
        eval_closed(e);
    } catch (const RuntimeError& r) {
        return r.fault().code;
    }
    return "none";
}

} // namespace

TEST_CASE("a passing call reports its result")
{
    Program p = testsupport::lesson("increment");
    ExecutionReport r = run_entry(p, "increment", {{"x", Value::number(41)}});
    CHECK(r.status == ExecutionReport::Status::Passed);
    CHECK(r.result == Value::number(42));
    CHECK(r.stats.calls == 1);
}

TEST_CASE("the first failing precondition slot is reported")
{
    Expr first = ge(var("x"), num(0));
    Expr second = lt(var("x"), num(10));
    Program p = single(reporter("f", {"x"}, {report(var("x"))}, {first, second}));
    ExecutionReport low = run_entry(p, "f", {{"x", Value::number(-1)}});
    REQUIRE(low.violation);
    CHECK(low.violation->kind == ViolationKind::Precondition);
    CHECK(low.violation->slot_index == 1);
    CHECK(low.violation->block_id == "f#0");
    ExecutionReport high = run_entry(p, "f", {{"x", Value::number(11)}});
    REQUIRE(high.violation);
    CHECK(high.violation->slot_index == 2);
    CHECK(high.frame_values == Bindings{{"x", Value::number(11)}});
}

TEST_CASE("a failing precondition stops the body from running")
{
    Program p = single(reporter("f", {"x"}, {assert_that(boolean(false)), report(num(1))}, {boolean(false)}));
    ExecutionReport r = run_entry(p, "f", {{"x", Value::number(0)}});
    REQUIRE(r.violation);
    CHECK(r.violation->kind == ViolationKind::Precondition);
    CHECK(r.stats.assertions == 0);
}

TEST_CASE("old refers to the value on entry")
{
    BlockDef bump;
    bump.name = "bump";
    bump.body = {change("g", num(1))};
    bump.post = {eq(var("g"), add(old("g"), num(1)))};
    Program p = single(bump, {{"g", Value::number(5)}});
    ExecutionReport r = run_entry(p, "bump", {});
    CHECK(r.status == ExecutionReport::Status::Passed);
    CHECK(r.globals == Bindings{{"g", Value::number(6)}});

    p.blocks[0].post = {eq(var("g"), old("g"))};
    ExecutionReport bad = run_entry(p, "bump", {});
    REQUIRE(bad.violation);
    CHECK(bad.violation->kind == ViolationKind::Postcondition);
}

TEST_CASE("global overrides replace the declared initial value")
{
    BlockDef bump;
    bump.name = "bump";
    bump.body = {change("g", num(1))};
    Program p = single(bump, {{"g", Value::number(5)}});
    RunOptions o;
    o.global_overrides["g"] = Value::number(-3);
    CHECK(run_entry(p, "bump", {}, o).globals == Bindings{{"g", Value::number(-2)}});
    o.global_overrides = {{"nope", Value::number(1)}};
    ExecutionReport r = run_entry(p, "bump", {}, o);
    REQUIRE(r.error);
    CHECK(r.error->code == "E_UNBOUND");
}

TEST_CASE("result is visible in postconditions")
{
    Program p = single(reporter("f", {"x"}, {report(mul(var("x"), num(2)))}, {}, {eq(result(), add(var("x"), var("x")))}));
    CHECK(run_entry(p, "f", {{"x", Value::number(7)}}).status == ExecutionReport::Status::Passed);
}

TEST_CASE("report ends the block immediately")
{
    Program p = single(reporter("f", {}, {report(num(1)), assert_that(boolean(false)), report(num(2))}));
    ExecutionReport r = run_entry(p, "f", {});
    CHECK(r.result == Value::number(1));
}

TEST_CASE("a reporter that never reports is an error")
{
    Program p = single(reporter("f", {}, {}));
    ExecutionReport r = run_entry(p, "f", {});
    REQUIRE(r.error);
    CHECK(r.error->code == "E_NO_REPORT");
}

TEST_CASE("invariants are checked on entry and after every iteration")
{
    for (int n : {0, 1, 5, 100}) {
        Program p = single(reporter("f", {"n"},
                                    {declare({"i"}), set("i", num(0)),
                                     repeat(var("n"), {le(var("i"), var("n"))}, {change("i", num(1))}), report(var("i"))}));
        ExecutionReport r = run_entry(p, "f", {{"n", Value::number(n)}});
        CHECK(r.result == Value::number(n));
        CHECK(r.stats.invariant_checks == static_cast<std::uint64_t>(n + 1));
    }
}

TEST_CASE("invariant violations record the iteration")
{
    Program p = single(reporter("f", {},
                                {declare({"i"}), set("i", num(0)),
                                 repeat(num(10), {boolean(true), lt(var("i"), num(3))}, {change("i", num(1))}),
                                 report(var("i"))}));
    ExecutionReport r = run_entry(p, "f", {});
    REQUIRE(r.violation);
    CHECK(r.violation->kind == ViolationKind::InvariantIteration);
    CHECK(r.violation->slot_index == 2);
    CHECK(r.violation->iteration == 3);
    CHECK(r.violation->block_id == "f#4");

    Program q = single(reporter("f", {}, {repeat_until(boolean(true), {boolean(false)}, {}), report(num(0))}));
    ExecutionReport e = run_entry(q, "f", {});
    REQUIRE(e.violation);
    CHECK(e.violation->kind == ViolationKind::InvariantEntry);
    CHECK(e.violation->iteration == 0);
}

TEST_CASE("repeat until tests its condition before each iteration")
{
    Program p = single(reporter("f", {},
                                {declare({"i"}), set("i", num(0)),
                                 repeat_until(ge(var("i"), num(4)), {}, {change("i", num(1))}), report(var("i"))}));
    CHECK(run_entry(p, "f", {}).result == Value::number(4));
}

TEST_CASE("quantifiers over ranges and elements")
{
    CHECK(eval_closed(forall_range("i", num(1), num(0), boolean(false))) == Value::boolean(true));
    CHECK(eval_closed(exists_range("i", num(1), num(0), boolean(true))) == Value::boolean(false));
    CHECK(eval_closed(forall_range("i", num(1), num(5), le(var("i"), num(5)))) == Value::boolean(true));
    CHECK(eval_closed(exists_range("i", num(-3), num(3), eq(mul(var("i"), var("i")), num(9)))) == Value::boolean(true));
    CHECK(eval_closed(forall_in("x", literal(int_list({2, 4, 6})), eq(arith(ArithOp::Mod, var("x"), num(2)), num(0)))) ==
          Value::boolean(true));
    CHECK(eval_closed(forall_in("x", literal(int_list({})), boolean(false))) == Value::boolean(true));
    CHECK(fault_code(forall_range("i", num(0.5), num(2), boolean(true))) == "E_TYPE");
}

TEST_CASE("lists are indexed from 1")
{
    Value l = int_list({10, 20, 30});
    CHECK(eval_closed(item(num(1), literal(l))) == Value::number(10));
    CHECK(eval_closed(item(num(3), literal(l))) == Value::number(30));
    CHECK(fault_code(item(num(0), literal(l))) == "E_INDEX");
    CHECK(fault_code(item(num(4), literal(l))) == "E_INDEX");
    CHECK(fault_code(item(num(1.5), literal(l))) == "E_TYPE");
    CHECK(eval_closed(length(literal(l))) == Value::number(3));
    CHECK(eval_closed(contains(literal(l), num(20))) == Value::boolean(true));
    CHECK(eval_closed(contains(literal(l), num(25))) == Value::boolean(false));
}

TEST_CASE("arithmetic is exact division with a non-negative remainder")
{
    CHECK(eval_closed(arith(ArithOp::Div, num(3), num(2))) == Value::number(1.5));
    CHECK(eval_closed(arith(ArithOp::Mod, num(-7), num(3))) == Value::number(2));
    CHECK(eval_closed(arith(ArithOp::Mod, num(7), num(-3))) == Value::number(1));
    CHECK(fault_code(arith(ArithOp::Div, num(1), num(0))) == "E_DIV_ZERO");
    CHECK(fault_code(arith(ArithOp::Mod, num(1), num(0))) == "E_DIV_ZERO");
    CHECK(fault_code(add(num(1), boolean(true))) == "E_TYPE");
}

TEST_CASE("boolean operators")
{
    CHECK(eval_closed(logic(LogicOp::Xor, {boolean(true), boolean(true)})) == Value::boolean(false));
    CHECK(eval_closed(logic(LogicOp::Iff, {boolean(false), boolean(false)})) == Value::boolean(true));
    CHECK(eval_closed(implies(boolean(false), boolean(false))) == Value::boolean(true));
    CHECK(eval_closed(logic(LogicOp::And, {boolean(true), boolean(true), boolean(false)})) == Value::boolean(false));
    CHECK(eval_closed(lnot(boolean(false))) == Value::boolean(true));
    CHECK(fault_code(lnot(num(1))) == "E_TYPE");
}

TEST_CASE("equality compares values structurally")
{
    CHECK(eval_closed(eq(literal(int_list({1, 2})), literal(int_list({1, 2})))) == Value::boolean(true));
    CHECK(eval_closed(eq(text("a"), text("a"))) == Value::boolean(true));
    CHECK(eval_closed(eq(num(1), boolean(true))) == Value::boolean(false));
}

TEST_CASE("old and result outside their context fault at run time")
{
    CHECK(fault_code(old("g")) == "E_NO_OLD");
    CHECK(fault_code(result()) == "E_NO_RESULT");
    CHECK(fault_code(var("ghost")) == "E_UNBOUND");
}

TEST_CASE("contract slots must be boolean")
{
    Program p = single(reporter("f", {}, {report(num(1))}, {num(1)}));
    ExecutionReport r = run_entry(p, "f", {});
    REQUIRE(r.error);
    CHECK(r.error->code == "E_NONBOOL_SPEC");
}

TEST_CASE("deep recursion stops at the depth limit")
{
    Program p = single(reporter("down", {"n"}, {report(call("down", {add(var("n"), num(1))}))}));
    RunOptions o;
    o.depth_limit = 50;
    ExecutionReport r = run_entry(p, "down", {{"n", Value::number(0)}}, o);
    REQUIRE(r.error);
    CHECK(r.error->code == "E_STACK_OVERFLOW");
    CHECK(r.error->call_chain.size() >= 50);
}

TEST_CASE("callee violations carry the call chain")
{
    Program p = testsupport::lesson("bug_pre");
    ExecutionReport r = run_entry(p, "main", {});
    REQUIRE(r.violation);
    CHECK(r.violation->call_chain == std::vector<BlockId>{"main#0", "increment#0"});
    auto diags = to_diagnostics(r);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "E_PRECONDITION");
    CHECK(diags[0].phase == Phase::Runtime);
}

TEST_CASE("entry resolution and argument checks")
{
    Program p = testsupport::lesson("increment");
    CHECK(run_entry(p, "nothing", {}).error->code == "E_ENTRY_NOT_FOUND");
    CHECK(run_entry(p, "increment", {}).error->code == "E_ARITY");
    CHECK(run_entry(p, "increment", {{"x", Value::number(1)}, {"y", Value::number(1)}}).error->code == "E_ARITY");
    CHECK(run_entry(p, "increment", {{"y", Value::number(1)}}).error->code == "E_ARITY");
}

TEST_CASE("lists are values: adding to one variable leaves a copy alone")
{
    Program p = single(reporter("f", {},
                                {declare({"a", "b"}), set("a", literal(int_list({1}))), set("b", var("a")),
                                 add_to(num(2), "a"), replace_item(num(1), "a", num(9)), report(var("b"))}));
    CHECK(run_entry(p, "f", {}).result == int_list({1}));
}

TEST_CASE("reports are deterministic")
{
    Program p = testsupport::lesson("bug_invariant_iteration");
    Bindings args{{"n", Value::number(3)}};
    CHECK(run_entry(p, "sumTo", args) == run_entry(p, "sumTo", args));
}
