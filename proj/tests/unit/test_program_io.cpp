#include <doctest.h>

#include <cmath>
#include <limits>

#include "blockverify/builders.hpp"
#include "blockverify/corpus.hpp"
#include "blockverify/program_io.hpp"
#include "support/paths.hpp"
#include "support/random_program.hpp"

using namespace blockverify;
using namespace blockverify::build;

namespace {

std::string schema_path(const std::string& doc)
{
    try {
        parse_program(doc);
    } catch (const DiagnosticError& e) {
        CHECK(e.code() == "E_SCHEMA");
        REQUIRE(e.diagnostics().size() == 1);
        CHECK(e.diagnostics()[0].phase == Phase::Parse);
        return e.diagnostics()[0].path.value_or("<none>");
    }
    FAIL("document was accepted");
    return {};
}

std::string with_body(const std::string& stmts)
{
    return R"({"formatVersion":1,"globals":[],"blocks":[{"name":"f","kind":"reporter","params":[{"name":"x"}],"pre":[],"post":[],"body":[)" +
           stmts + R"(]}],"entryScripts":[]})";
}

} // namespace

TEST_CASE("every lesson round-trips through the canonical form")
{
    Corpus corpus = load_corpus(testsupport::lessons_dir());
    for (const auto& l : corpus.lessons) {
        if (!l.load_codes.empty())
            continue;
        INFO(l.name);
        std::string text = testsupport::slurp(corpus.program_path(l));
        Program p = parse_program(text);
        CHECK(serialize_program(p) == text);
        CHECK(parse_program(serialize_program(p)) == p);
    }
}

TEST_CASE("random well-formed programs round-trip")
{
    testsupport::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        Program p = testsupport::random_program(rng);
        std::string text = serialize_program(p);
        Program back = parse_program(text);
        CHECK(back == p);
        CHECK(serialize_program(back) == text);
    }
}

TEST_CASE("parsing assigns the same ids as assign_block_ids")
{
    Program p = testsupport::lesson("sumList");
    Program q = p;
    for (auto& b : q.blocks)
        b.id.clear();
    assign_block_ids(q);
    CHECK(q == p);
    CHECK(p.blocks[0].id == "sumList#0");
}

TEST_CASE("schema errors carry a document path")
{
    CHECK(schema_path("{") == "/");
    CHECK(schema_path("[]") == "/");
    CHECK(schema_path(R"({"formatVersion":2,"globals":[],"blocks":[],"entryScripts":[]})") == "/formatVersion");
    CHECK(schema_path(R"({"formatVersion":1,"globals":[],"blocks":[]})") == "/");
    CHECK(schema_path(R"({"formatVersion":1,"globals":[],"blocks":[],"entryScripts":[],"extra":1})") == "/extra");
    CHECK(schema_path(with_body(R"({"kind":"dance"})")) == "/blocks/0/body/0/kind");
    CHECK(schema_path(with_body(R"({"kind":"report","value":{"kind":"arith","op":"pow","left":{"kind":"var","name":"x"},"right":{"kind":"var","name":"x"}}})")) ==
          "/blocks/0/body/0/value/op");
    CHECK(schema_path(with_body(R"({"kind":"report","value":{"kind":"logic","op":"not","operands":[]}})")) ==
          "/blocks/0/body/0/value/operands");
    CHECK(schema_path(with_body(R"({"kind":"report"})")) == "/blocks/0/body/0");
    CHECK(schema_path(with_body(R"({"kind":"set","var":"a b","value":{"kind":"literal","value":1}})")) ==
          "/blocks/0/body/0/var");
    CHECK(schema_path(with_body(R"({"kind":"report","value":{"kind":"literal","value":null}})")) ==
          "/blocks/0/body/0/value/value");
    CHECK(schema_path(with_body(R"({"kind":"report","value":{"kind":"quantifier","quantifier":"most","var":"i","domain":{"kind":"range","lo":{"kind":"literal","value":1},"hi":{"kind":"literal","value":2}},"body":{"kind":"literal","value":true}}})")) ==
          "/blocks/0/body/0/value/quantifier");
}

TEST_CASE("non-finite numbers cannot be serialized")
{
    Program p;
    BlockDef f;
    f.name = "f";
    f.kind = BlockKind::Reporter;
    f.body = {report(num(std::numeric_limits<double>::infinity()))};
    p.blocks.push_back(f);
    assign_block_ids(p);
    try {
        serialize_program(p);
        FAIL("serialized");
    } catch (const DiagnosticError& e) {
        CHECK(e.code() == "E_UNSERIALIZABLE");
    }
    p.blocks[0].body = {report(num(std::nan("")))};
    CHECK_THROWS_AS(serialize_program(p), DiagnosticError);
}

TEST_CASE("ill-formed documents raise E_WELLFORMED with every finding")
{
    try {
        testsupport::lesson("ill_formed");
        FAIL("loaded");
    } catch (const DiagnosticError& e) {
        CHECK(e.code() == "E_WELLFORMED");
        CHECK(e.diagnostics().size() == 13);
        for (const auto& d : e.diagnostics())
            CHECK(d.phase == Phase::Wellformed);
    }
}

TEST_CASE("missing files raise E_IO")
{
    try {
        load_program(testsupport::lessons_dir() / "no_such_file.blocks.json");
        FAIL("loaded");
    } catch (const DiagnosticError& e) {
        CHECK(e.code() == "E_IO");
    }
}

TEST_CASE("parameter types survive a round trip")
{
    Program p = parse_program(R"({"formatVersion":1,"globals":[],"blocks":[{"name":"f","kind":"command","params":[{"name":"a","type":"int"},{"name":"b","type":"intlist"},{"name":"c"}],"pre":[],"post":[],"body":[]}],"entryScripts":[]})");
    REQUIRE(p.blocks[0].params.size() == 3);
    CHECK(p.blocks[0].params[0].type == DeclaredType::Int);
    CHECK(p.blocks[0].params[1].type == DeclaredType::IntList);
    CHECK(!p.blocks[0].params[2].type);
    CHECK(parse_program(serialize_program(p)) == p);
}
