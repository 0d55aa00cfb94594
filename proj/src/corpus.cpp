#include "blockverify/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blockverify/pipeline.hpp"
#include "blockverify/program_io.hpp"

namespace blockverify {

namespace {

using nlohmann::json;

[[noreturn]] void manifest_error(const std::string& where, const std::string& message)
{
    Diagnostic d = make_error(Phase::Parse, "E_SCHEMA", "lessons.json: " + message);
    d.path = where;
    throw DiagnosticError("E_SCHEMA", {d});
}

Value to_value(const json& j, const std::string& where)
{
    if (j.is_boolean())
        return Value::boolean(j.get<bool>());
    if (j.is_number())
        return Value::number(j.get<double>());
    if (j.is_string())
        return Value::text(j.get<std::string>());
    if (j.is_array()) {
        Value::List items;
        for (std::size_t i = 0; i < j.size(); ++i)
            items.push_back(to_value(j[i], where + "/" + std::to_string(i)));
        return Value::list(std::move(items));
    }
    manifest_error(where, "expected a value");
}

Bindings to_bindings(const json& j, const std::string& where)
{
    if (!j.is_object())
        manifest_error(where, "expected an object");
    Bindings out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out.emplace_back(it.key(), to_value(it.value(), where + "/" + it.key()));
    return out;
}

std::string str(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j[key].is_string())
        manifest_error(where + "/" + key, "expected a string");
    return j[key].get<std::string>();
}

std::vector<std::string> strings(const json& j, const char* key, const std::string& where)
{
    std::vector<std::string> out;
    if (!j.contains(key))
        return out;
    if (!j[key].is_array())
        manifest_error(where + "/" + key, "expected an array");
    for (const auto& s : j[key]) {
        if (!s.is_string())
            manifest_error(where + "/" + key, "expected strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

RacExpectation rac_expectation(const json& j, const std::string& where)
{
    RacExpectation r;
    r.entry = str(j, "entry", where);
    if (j.contains("args"))
        r.args = to_bindings(j["args"], where + "/args");
    std::string status = str(j, "status", where);
    if (status == "passed")
        r.status = ExecutionReport::Status::Passed;
    else if (status == "violation")
        r.status = ExecutionReport::Status::Violation;
    else if (status == "error")
        r.status = ExecutionReport::Status::Error;
    else
        manifest_error(where + "/status", "unknown status '" + status + "'");
    if (j.contains("result"))
        r.result = to_value(j["result"], where + "/result");
    if (j.contains("globals"))
        r.globals = to_bindings(j["globals"], where + "/globals");
    if (j.contains("kind")) {
        r.kind = parse_violation_kind(str(j, "kind", where));
        if (!r.kind)
            manifest_error(where + "/kind", "unknown violation kind");
    }
    if (j.contains("blockId"))
        r.block_id = str(j, "blockId", where);
    if (j.contains("slot"))
        r.slot = j["slot"].get<int>();
    if (j.contains("iteration"))
        r.iteration = j["iteration"].get<std::int64_t>();
    if (j.contains("code"))
        r.code = str(j, "code", where);
    return r;
}

StaticExpectation static_expectation(const json& j, const std::string& where)
{
    StaticExpectation s;
    std::string verdict = str(j, "verdict", where);
    if (verdict == "verified")
        s.verdict = StaticExpectation::Verdict::Verified;
    else if (verdict == "errors")
        s.verdict = StaticExpectation::Verdict::Errors;
    else if (verdict == "rejected")
        s.verdict = StaticExpectation::Verdict::Rejected;
    else
        manifest_error(where + "/verdict", "unknown verdict '" + verdict + "'");
    s.codes = strings(j, "codes", where);
    if (j.contains("obligations")) {
        for (std::size_t i = 0; i < j["obligations"].size(); ++i) {
            const json& o = j["obligations"][i];
            std::string w = where + "/obligations/" + std::to_string(i);
            auto kind = parse_obligation_kind(str(o, "kind", w));
            if (!kind)
                manifest_error(w + "/kind", "unknown obligation kind");
            s.obligations.push_back({str(o, "blockId", w), *kind});
        }
    }
    return s;
}

std::string read_text(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw DiagnosticError("E_IO", {make_error(Phase::Parse, "E_IO", "cannot read " + p.string())});
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool same_value(const Value& a, const Value& b) { return a == b; }

void check_rac(const Program& program, const RacExpectation& x, LessonResult& r)
{
    ExecutionReport rep = run_entry(program, x.entry, x.args);
    std::string label = "run " + x.entry;
    for (const auto& [k, v] : x.args)
        label += " " + k + "=" + to_display(v);
    auto fail = [&](const std::string& what) {
        r.pass = false;
        r.failures.push_back(label + ": " + what);
    };
    if (rep.status != x.status) {
        std::string got(to_string(rep.status));
        if (rep.violation)
            got += " " + std::string(to_string(rep.violation->kind)) + " at " + rep.violation->block_id;
        if (rep.error)
            got += " " + rep.error->code + ": " + rep.error->message;
        fail("expected " + std::string(to_string(x.status)) + ", got " + got);
        return;
    }
    if (x.result && (!rep.result || !same_value(*rep.result, *x.result)))
        fail("expected result " + to_display(*x.result) + ", got " +
             (rep.result ? to_display(*rep.result) : std::string("nothing")));
    for (const auto& [name, value] : x.globals) {
        auto it = std::find_if(rep.globals.begin(), rep.globals.end(), [&](const auto& g) { return g.first == name; });
        if (it == rep.globals.end() || !same_value(it->second, value))
            fail("expected global " + name + " = " + to_display(value));
    }
    if (rep.violation) {
        const Violation& v = *rep.violation;
        if (x.kind && v.kind != *x.kind)
            fail("expected violation " + std::string(to_string(*x.kind)) + ", got " + std::string(to_string(v.kind)));
        if (x.block_id && v.block_id != *x.block_id)
            fail("expected violation at " + *x.block_id + ", got " + v.block_id);
        if (x.slot && v.slot_index != *x.slot)
            fail("expected slot " + std::to_string(*x.slot) + ", got " + std::to_string(v.slot_index));
        if (x.iteration && v.iteration != x.iteration)
            fail("expected iteration " + std::to_string(*x.iteration));
    }
    if (rep.error && x.code && rep.error->code != *x.code)
        fail("expected error " + *x.code + ", got " + rep.error->code);
    if (rep.error && x.block_id && rep.error->block_id != x.block_id)
        fail("expected error at " + *x.block_id);
}

std::set<std::string> codes_of(const std::vector<Diagnostic>& ds)
{
    std::set<std::string> out;
    for (const auto& d : ds)
        out.insert(d.code);
    return out;
}

void check_static(const Corpus& corpus, const Lesson& lesson, const Program& program, const CorpusOptions& options,
                  LessonResult& r)
{
    const StaticExpectation& x = *lesson.expected_static;
    auto fail = [&](const std::string& what) {
        r.pass = false;
        r.failures.push_back("static: " + what);
    };
    StaticResult s = run_static(program);
    std::set<std::string> codes = codes_of(s.diagnostics);
    for (const auto& c : x.codes)
        if (!codes.contains(c))
            fail("expected diagnostic " + c);
    if (x.verdict == StaticExpectation::Verdict::Rejected) {
        if (s.ok())
            fail("expected the static pipeline to reject the program");
        return;
    }
    if (!s.ok()) {
        std::string got;
        for (const auto& d : s.diagnostics)
            got += " " + d.code;
        fail("expected the program to compile, got" + got);
        return;
    }
    std::string map = source_map_to_json(*s.unit);
    if (options.update_goldens) {
        std::filesystem::create_directories(corpus.root / "expected");
        if (!write_file(corpus.golden_bpl(lesson), s.unit->text) || !write_file(corpus.golden_map(lesson), map))
            fail("cannot write golden files");
    } else {
        try {
            if (read_text(corpus.golden_bpl(lesson)) != s.unit->text)
                fail("compiled Boogie differs from " + corpus.golden_bpl(lesson).filename().string());
            if (read_text(corpus.golden_map(lesson)) != map)
                fail("source map differs from " + corpus.golden_map(lesson).filename().string());
        } catch (const DiagnosticError& e) {
            fail(e.diagnostics().front().message);
        }
    }
    if (!options.boogie)
        return;
    r.verified_live = true;
    StaticVerdict v =
        run_boogie(*s.unit, *options.boogie, options.work_dir / (lesson.name + ".bpl"), options.timeout);
    if (codes_of(v.diagnostics).contains("E_UNMAPPED_LOCATION"))
        fail("Boogie reported an error at an unmapped location");
    if (x.verdict == StaticExpectation::Verdict::Verified) {
        if (v.outcome != StaticVerdict::Outcome::Verified)
            fail("expected verified, got " + std::string(to_string(v.outcome)) + " with " +
                 std::to_string(v.errors) + " error(s)");
        return;
    }
    if (v.outcome != StaticVerdict::Outcome::Errors) {
        fail("expected verification errors, got " + std::string(to_string(v.outcome)));
        return;
    }
    for (const auto& o : x.obligations) {
        bool found = std::any_of(v.diagnostics.begin(), v.diagnostics.end(), [&](const Diagnostic& d) {
            return d.block_id == o.block_id && d.obligation == o.kind;
        });
        if (!found)
            fail("expected a " + std::string(to_string(o.kind)) + " error at " + o.block_id);
    }
}

} // namespace

std::string_view to_string(StaticExpectation::Verdict v)
{
    switch (v) {
    case StaticExpectation::Verdict::Verified: return "verified";
    case StaticExpectation::Verdict::Errors: return "errors";
    case StaticExpectation::Verdict::Rejected: return "rejected";
    }
    return "?";
}

Corpus load_corpus(const std::filesystem::path& root)
{
    json doc = json::parse(read_text(root / "lessons.json"), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("lessons") || !doc["lessons"].is_array())
        manifest_error("", "expected an object with a 'lessons' array");
    Corpus c;
    c.root = root;
    for (std::size_t i = 0; i < doc["lessons"].size(); ++i) {
        const json& j = doc["lessons"][i];
        std::string where = "/lessons/" + std::to_string(i);
        Lesson l;
        l.name = str(j, "name", where);
        l.file = str(j, "file", where);
        l.narrative = j.contains("narrative") ? str(j, "narrative", where) : "";
        l.load_codes = strings(j, "load", where);
        if (j.contains("rac"))
            for (std::size_t k = 0; k < j["rac"].size(); ++k)
                l.rac.push_back(rac_expectation(j["rac"][k], where + "/rac/" + std::to_string(k)));
        if (j.contains("static"))
            l.expected_static = static_expectation(j["static"], where + "/static");
        c.lessons.push_back(std::move(l));
    }
    return c;
}

std::vector<LessonResult> corpus_check(const Corpus& corpus, const CorpusOptions& options)
{
    std::vector<LessonResult> results;
    for (const auto& lesson : corpus.lessons) {
        LessonResult r;
        r.name = lesson.name;
        try {
            std::optional<Program> program;
            try {
                program = load_program(corpus.program_path(lesson));
            } catch (const DiagnosticError& e) {
                std::set<std::string> codes = codes_of(e.diagnostics());
                codes.insert(e.code());
                if (lesson.load_codes.empty()) {
                    r.pass = false;
                    r.failures.push_back("load failed: " + e.code() + ": " +
                                         (e.diagnostics().empty() ? "" : e.diagnostics().front().message));
                }
                for (const auto& c : lesson.load_codes)
                    if (!codes.contains(c)) {
                        r.pass = false;
                        r.failures.push_back("load: expected " + c);
                    }
            }
            if (program) {
                if (!lesson.load_codes.empty()) {
                    r.pass = false;
                    r.failures.push_back("load: expected the file to be rejected");
                }
                for (const auto& x : lesson.rac)
                    check_rac(*program, x, r);
                if (lesson.expected_static)
                    check_static(corpus, lesson, *program, options, r);
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.failures.push_back(std::string("unexpected exception: ") + e.what());
        }
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace blockverify
