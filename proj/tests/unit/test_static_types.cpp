#include <doctest.h>

#include <functional>

#include "blockverify/builders.hpp"
#include "blockverify/pipeline.hpp"
#include "blockverify/render.hpp"
#include "blockverify/static_types.hpp"
#include "support/paths.hpp"

using namespace blockverify;
using namespace blockverify::build;

namespace {

std::vector<Diagnostic> rejection(const Program& p)
{
    try {
        infer_types(p);
    } catch (const DiagnosticError& e) {
        CHECK(e.code() == "E_TYPECHECK");
        return e.diagnostics();
    }
    return {};
}

BlockDef command(std::string name, std::vector<Stmt> body)
{
    BlockDef b;
    b.name = std::move(name);
    b.body = std::move(body);
    return b;
}

Program with(std::vector<BlockDef> blocks, std::vector<Global> globals = {})
{
    Program p;
    p.blocks = std::move(blocks);
    p.globals = std::move(globals);
    assign_block_ids(p);
    return p;
}

} // namespace

TEST_CASE("parameter and result types are inferred from use")
{
    TypedProgram t = check_static(testsupport::lesson("sumList"));
    CHECK(t.type_of("sumList", "L") == StaticType::IntList);
    CHECK(t.results.at("sumList") == StaticType::Int);
    TypedProgram p = check_static(testsupport::lesson("predicates"));
    CHECK(p.results.at("isEven") == StaticType::Bool);
    CHECK(p.type_of("differ", "a") == StaticType::Bool);
    CHECK(p.type_of("hasZero", "L") == StaticType::IntList);
}

TEST_CASE("globals are visible from every scope")
{
    TypedProgram t = check_static(testsupport::lesson("counter"));
    CHECK(t.globals.at("count") == StaticType::Int);
    CHECK(t.type_of("main", "count") == StaticType::Int);
    CHECK(!t.type_of("main", "missing"));
}

TEST_CASE("every expression node gets a type")
{
    Program p = testsupport::lesson("maxOfList");
    TypedProgram t = check_static(p);
    std::size_t exprs = 0;
    std::function<void(const Expr&)> visit = [&](const Expr& e) {
        ++exprs;
        CHECK(t.expressions.contains(e.id));
        for_each_child(e, visit);
    };
    std::function<void(const std::vector<Stmt>&)> stmts = [&](const std::vector<Stmt>& ss) {
        for (const auto& s : ss)
            for_each_part(s, visit, stmts);
    };
    for (const auto& b : p.blocks) {
        for (const auto& e : b.pre)
            visit(e);
        for (const auto& e : b.post)
            visit(e);
        stmts(b.body);
    }
    CHECK(exprs > 20);
}

TEST_CASE("a variable holding two types names both blocks")
{
    auto ds = rejection(testsupport::lesson("dynamic_typing"));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "E_DYNAMIC_TYPING");
    CHECK(ds[0].phase == Phase::Typecheck);
    REQUIRE(ds[0].block_id);
    REQUIRE(ds[0].related.size() == 1);
    CHECK(*ds[0].block_id != ds[0].related[0]);
    std::string text = render_diagnostics_text(ds, nullptr);
    CHECK(text.find(*ds[0].block_id) != std::string::npos);
    CHECK(text.find(ds[0].related[0]) != std::string::npos);
}

TEST_CASE("each lesson outside the fragment is rejected with its own code")
{
    for (auto [name, code] : std::vector<std::pair<const char*, const char*>>{{"nested_list", "E_NESTED_LIST"},
                                                                            {"text_value", "E_TEXT_UNSUPPORTED"},
                                                                            {"fraction", "E_NONINT_LITERAL"},
                                                                            {"unused_input", "E_UNTYPEABLE"}}) {
        INFO(name);
        auto ds = rejection(testsupport::lesson(name));
        REQUIRE(ds.size() == 1);
        CHECK(ds[0].code == code);
    }
}

TEST_CASE("declared parameter types constrain inference")
{
    BlockDef f;
    f.name = "f";
    f.kind = BlockKind::Reporter;
    f.params = {{"x", DeclaredType::Bool}};
    f.body = {report(add(var("x"), num(1)))};
    auto ds = rejection(with({f}));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "E_DYNAMIC_TYPING");

    f.params = {{"x", DeclaredType::Text}};
    f.body = {report(num(1))};
    auto text = rejection(with({f}));
    REQUIRE(text.size() == 1);
    CHECK(text[0].code == "E_TEXT_UNSUPPORTED");

    f.params = {{"x", DeclaredType::Int}};
    CHECK(rejection(with({f})).empty());
}

TEST_CASE("all findings are collected, not just the first")
{
    BlockDef a;
    a.name = "a";
    a.kind = BlockKind::Reporter;
    a.body = {report(num(0.5))};
    BlockDef b;
    b.name = "b";
    b.kind = BlockKind::Reporter;
    b.body = {report(text("x"))};
    auto ds = rejection(with({a, b}));
    REQUIRE(ds.size() == 2);
    CHECK(ds[0].code == "E_NONINT_LITERAL");
    CHECK(ds[1].code == "E_TEXT_UNSUPPORTED");
}

TEST_CASE("division warns once per block")
{
    TypedProgram t = check_static(testsupport::lesson("average"));
    REQUIRE(t.warnings.size() == 1);
    CHECK(t.warnings[0].code == "W_DIV_SEMANTICS");
    CHECK(t.warnings[0].severity == Severity::Warning);
}

TEST_CASE("modifies: direct assignments and calls")
{
    TypedProgram t = check_static(testsupport::lesson("counter"));
    CHECK(t.modifies.at("increaseCounter") == std::set<std::string>{"count"});
    CHECK(t.modifies.at("main") == std::set<std::string>{"count"});
    CHECK(infer_types(testsupport::lesson("counter")).modifies.empty());
}

TEST_CASE("modifies: mutual recursion reaches the union")
{
    Program p = with({command("a", {set("g1", num(1)), if_else(boolean(false), {run("b")})}),
                      command("b", {set("g2", num(2)), if_else(boolean(false), {run("a")})}), command("c", {run("a")}),
                      command("d", {set("g3", num(0))})},
                     {{"g1", Value::number(0)}, {"g2", Value::number(0)}, {"g3", Value::number(0)}});
    TypedProgram t = check_static(p);
    std::set<std::string> both{"g1", "g2"};
    CHECK(t.modifies.at("a") == both);
    CHECK(t.modifies.at("b") == both);
    CHECK(t.modifies.at("c") == both);
    CHECK(t.modifies.at("d") == std::set<std::string>{"g3"});
}

TEST_CASE("modifies: list updates and locals")
{
    Program p = with({command("push", {declare({"tmp"}), set("tmp", num(0)), add_to(num(1), "data"),
                                       replace_item(num(1), "data", num(2))})},
                     {{"data", int_list({})}});
    TypedProgram t = check_static(p);
    CHECK(t.modifies.at("push") == std::set<std::string>{"data"});
}

TEST_CASE("modifies is idempotent")
{
    for (const char* name : {"counter", "zeroNegatives", "sumList", "bug_pre"}) {
        TypedProgram once = check_static(testsupport::lesson(name));
        TypedProgram twice = compute_modifies(once);
        CHECK(twice.modifies == once.modifies);
    }
}

TEST_CASE("the static pipeline lists warnings after a successful compile")
{
    StaticResult s = run_static(testsupport::lesson("average"));
    CHECK(s.ok());
    REQUIRE(s.diagnostics.size() == 1);
    CHECK(s.diagnostics[0].code == "W_DIV_SEMANTICS");
    StaticResult bad = run_static(testsupport::lesson("text_value"));
    CHECK(!bad.ok());
    CHECK(!bad.typed);
}
