// Acceptance criteria AC1..AC9. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "blockverify/boogie.hpp"
#include "blockverify/builders.hpp"
#include "blockverify/corpus.hpp"
#include "blockverify/pipeline.hpp"
#include "blockverify/program_io.hpp"
#include "support/paths.hpp"
#include "support/quantifier_oracle.hpp"
#include "support/random_program.hpp"

using namespace blockverify;
using namespace blockverify::build;
using testsupport::Rng;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s)
{
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << s << " s";
    return o.str();
}

Corpus corpus() { return load_corpus(testsupport::lessons_dir()); }

std::vector<std::pair<std::string, Program>> loadable_lessons()
{
    std::vector<std::pair<std::string, Program>> out;
    Corpus c = corpus();
    for (const auto& l : c.lessons) {
        try {
            out.emplace_back(l.name, load_program(c.program_path(l)));
        } catch (const DiagnosticError&) {
        }
    }
    return out;
}

// Entry points and the inputs each needs.
struct EntryPoint {
    std::string name;
    std::vector<std::pair<std::string, StaticType>> params;
    bool is_block = false;
};

std::vector<EntryPoint> entry_points(const TypedProgram& t)
{
    std::vector<EntryPoint> out;
    for (const auto& b : t.program.blocks) {
        EntryPoint e{b.name, {}, true};
        for (const auto& p : b.params)
            e.params.emplace_back(p.name, *t.type_of(b.name, p.name));
        out.push_back(std::move(e));
    }
    for (const auto& s : t.program.entry_scripts)
        out.push_back({s.name, {}, false});
    return out;
}

void random_inputs(Rng& rng, const TypedProgram& t, const EntryPoint& e, Bindings& args, RunOptions& options)
{
    args.clear();
    for (const auto& [name, type] : e.params)
        args.emplace_back(name, testsupport::random_typed_value(rng, type));
    options.global_overrides.clear();
    if (e.is_block)
        for (const auto& [name, type] : t.globals)
            options.global_overrides[name] = testsupport::random_typed_value(rng, type);
}

// AC1
Outcome contract_protocol()
{
    Program p = testsupport::lesson("increment");
    Rng rng(1);
    std::uniform_int_distribution<int> dist(-1'000'000, 1'000'000);
    std::vector<int> xs = {0, -1, 1'000'000, -1'000'000};
    while (xs.size() < 1000)
        xs.push_back(dist(rng));
    int mismatches = 0, negatives = 0;
    auto t0 = Clock::now();
    for (int x : xs) {
        ExecutionReport r = run_entry(p, "increment", {{"x", Value::number(x)}});
        bool ok;
        if (x >= 0) {
            ok = r.status == ExecutionReport::Status::Passed && r.result == Value::number(x + 1);
        } else {
            ++negatives;
            ok = r.status == ExecutionReport::Status::Violation && r.violation->kind == ViolationKind::Precondition &&
                 r.violation->slot_index == 1 && r.violation->block_id == "increment#0";
        }
        mismatches += !ok;
    }
    double s = seconds_since(t0);
    Outcome o;
    o.pass = mismatches == 0 && s < 1.0;
    o.detail = std::to_string(xs.size()) + " inputs (" + std::to_string(negatives) + " negative), " +
               std::to_string(mismatches) + " mismatches, " + fmt_seconds(s);
    return o;
}

// AC2
Outcome invariant_count()
{
    // The second invariant slot calls a predicate, so the call counter gives
    // a second, independent count of invariant evaluations.
    BlockDef yes;
    yes.name = "yes";
    yes.kind = BlockKind::Predicate;
    yes.body = {report(boolean(true))};
    auto looped = [&](bool until) {
        BlockDef f;
        f.name = "loop";
        f.kind = BlockKind::Reporter;
        f.params = {{"n", std::nullopt}};
        std::vector<Expr> inv = {le(var("i"), var("n")), call("yes")};
        Stmt loop = until ? repeat_until(eq(var("i"), var("n")), inv, {change("i", num(1))})
                          : repeat(var("n"), inv, {change("i", num(1))});
        f.body = {declare({"i"}), set("i", num(0)), loop, report(var("i"))};
        Program p;
        p.blocks = {f, yes};
        assign_block_ids(p);
        return p;
    };
    Outcome o;
    std::string counts;
    for (bool until : {false, true}) {
        Program p = looped(until);
        for (int n : {0, 1, 5, 100}) {
            ExecutionReport r = run_entry(p, "loop", {{"n", Value::number(n)}});
            auto want = static_cast<std::uint64_t>(n + 1);
            bool ok = r.status == ExecutionReport::Status::Passed && r.stats.invariant_checks == want &&
                      r.stats.calls - 1 == want;
            o.pass = o.pass && ok;
            counts += (counts.empty() ? "" : " ") + std::string(until ? "until:" : "repeat:") + std::to_string(n) + "->" +
                      std::to_string(r.stats.invariant_checks);
        }
    }
    o.detail = counts;
    return o;
}

// AC3
Outcome quantifier_oracle()
{
    Rng rng(3);
    testsupport::QuantifierGenerator gen(rng);
    Program empty;
    Interpreter in(empty);
    int mismatches = 0, held = 0;
    std::size_t largest = 0;
    auto t0 = Clock::now();
    for (int i = 0; i < 200; ++i) {
        testsupport::QNode f = gen.formula();
        largest = std::max(largest, testsupport::domain_size(f));
        bool want = testsupport::oracle_holds(f);
        Environment env;
        env.frames.push_back(Frame{});
        Value got = in.eval_expr(env, testsupport::to_expr(f));
        mismatches += got != Value::boolean(want);
        held += want;
    }
    double s = seconds_since(t0);
    Outcome o;
    o.pass = mismatches == 0 && largest <= 64 && s < 5.0;
    o.detail = "200 formulas (" + std::to_string(held) + " true), largest domain " + std::to_string(largest) + ", " +
               std::to_string(mismatches) + " mismatches, " + fmt_seconds(s);
    return o;
}

// AC4
Outcome old_snapshot()
{
    BlockDef bump;
    bump.name = "bump";
    bump.body = {set("g", add(var("g"), num(1)))};
    bump.post = {eq(var("g"), add(old("g"), num(1)))};
    Program p;
    p.globals = {{"g", Value::number(0)}};
    p.blocks = {bump};
    assign_block_ids(p);
    Rng rng(4);
    std::uniform_int_distribution<int> dist(-1'000'000, 1'000'000);
    int violations = 0, wrong = 0;
    for (int i = 0; i < 1000; ++i) {
        int g = dist(rng);
        RunOptions o;
        o.global_overrides["g"] = Value::number(g);
        ExecutionReport r = run_entry(p, "bump", {}, o);
        violations += r.status != ExecutionReport::Status::Passed;
        wrong += r.globals != Bindings{{"g", Value::number(g + 1.0)}};
    }
    return {violations == 0 && wrong == 0,
            "1000 initial values, " + std::to_string(violations) + " violations, " + std::to_string(wrong) +
                " wrong final values"};
}

// AC5
Outcome round_trip()
{
    int lessons = 0, randoms = 0, failures = 0;
    for (const auto& [name, p] : loadable_lessons()) {
        ++lessons;
        failures += parse_program(serialize_program(p)) != p;
    }
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Program p = testsupport::random_program(rng);
        ++randoms;
        try {
            failures += parse_program(serialize_program(p)) != p;
        } catch (const DiagnosticError& e) {
            ++failures;
            std::cerr << "AC5 random program " << i << ": " << e.code() << "\n";
        }
    }
    return {failures == 0, std::to_string(lessons) + " lessons + " + std::to_string(randoms) + " random programs, " +
                               std::to_string(failures) + " failures"};
}

// AC6
Outcome static_soundness()
{
    Rng rng(6);
    int programs = 0, runs = 0, type_errors = 0;
    std::string offenders;
    for (const auto& [name, p] : loadable_lessons()) {
        TypedProgram t;
        try {
            t = compute_modifies(infer_types(p));
        } catch (const DiagnosticError&) {
            continue;
        }
        ++programs;
        auto entries = entry_points(t);
        Bindings args;
        RunOptions options;
        for (int i = 0; i < 500; ++i) {
            const EntryPoint& e = entries[static_cast<std::size_t>(i) % entries.size()];
            random_inputs(rng, t, e, args, options);
            ExecutionReport r = run_entry(p, e.name, args, options);
            ++runs;
            if (r.error && r.error->code == "E_TYPE") {
                ++type_errors;
                offenders += " " + name + "/" + e.name;
            }
        }
    }
    return {type_errors == 0 && programs > 0,
            std::to_string(programs) + " typed programs, " + std::to_string(runs) + " runs, " +
                std::to_string(type_errors) + " E_TYPE" + offenders};
}

std::optional<std::string> find_boogie()
{
    if (const char* env = std::getenv("BLOCKVERIFY_BOOGIE"); env && *env)
        return std::string(env);
    if (const char* path = std::getenv("PATH")) {
        std::stringstream dirs(path);
        for (std::string d; std::getline(dirs, d, ':');) {
            fs::path candidate = fs::path(d) / "boogie";
            if (!d.empty() && ::access(candidate.c_str(), X_OK) == 0)
                return candidate.string();
        }
    }
    return std::nullopt;
}

// AC7
Outcome golden_output()
{
    auto t0 = Clock::now();
    Corpus c = corpus();
    int compared = 0, differ = 0;
    for (const auto& l : c.lessons) {
        if (!l.expected_static || l.expected_static->verdict == StaticExpectation::Verdict::Rejected)
            continue;
        StaticResult s = run_static(load_program(c.program_path(l)));
        ++compared;
        if (!s.ok() || testsupport::slurp(c.golden_bpl(l)) != s.unit->text ||
            testsupport::slurp(c.golden_map(l)) != source_map_to_json(*s.unit)) {
            ++differ;
            std::cerr << "AC7 golden mismatch: " << l.name << "\n";
        }
    }
    Outcome o;
    o.pass = differ == 0 && compared > 0;
    o.detail = std::to_string(compared) + " goldens, " + std::to_string(differ) + " differ";
    auto boogie = find_boogie();
    if (!boogie) {
        o.detail += "; live verification skipped (no Boogie executable)";
    } else {
        CorpusOptions options;
        options.boogie = *boogie;
        int live_fail = 0;
        for (const auto& r : corpus_check(c, options)) {
            if (!r.pass) {
                ++live_fail;
                for (const auto& f : r.failures)
                    std::cerr << "AC7 " << r.name << ": " << f << "\n";
            }
        }
        o.pass = o.pass && live_fail == 0;
        o.detail += "; live Boogie (" + *boogie + "): " + std::to_string(live_fail) + " lessons failed";
    }
    double s = seconds_since(t0);
    o.pass = o.pass && s < 60.0;
    o.detail += ", " + fmt_seconds(s);
    return o;
}

// AC8
Outcome verdict_fixtures()
{
    auto map_of = [](const std::string& lesson) { return compile(check_static(testsupport::lesson(lesson))).source_map; };
    auto fixture = [](const std::string& name) {
        return testsupport::slurp(testsupport::fixtures_dir() / "boogie" / (name + ".txt"));
    };
    auto diag = [](std::string code, BlockId id, ObligationKind kind, std::optional<int> slot, std::string message) {
        Diagnostic d = make_error(Phase::Static, std::move(code), std::move(message), std::move(id));
        d.obligation = kind;
        d.slot_index = slot;
        return d;
    };
    using O = StaticVerdict::Outcome;
    struct Case {
        std::string fixture, lesson;
        StaticVerdict want;
    };
    std::vector<Case> cases = {
        {"success", "increment", {O::Verified, 1, 0, {}}},
        {"single", "bug_post",
         {O::Errors, 0, 1,
          {diag("E_VERIFY_POST", "increment#0", ObligationKind::Post, 1,
                "the postcondition (slot 1) might not hold for some inputs")}}},
        {"multi", "maxOfList",
         {O::Errors, 0, 3,
          {diag("E_VERIFY_INVARIANT_MAINTAIN", "maxOfList#20", ObligationKind::InvariantMaintain, 3,
                "the loop invariant (slot 3) might not be kept by the loop body"),
           diag("E_VERIFY_INDEX_BOUNDS", "maxOfList#52", ObligationKind::IndexBounds, std::nullopt,
                "the list index might be out of range (it must be between 1 and the length of the list)"),
           diag("E_VERIFY_POST", "maxOfList#0", ObligationKind::Post, 2,
                "the postcondition (slot 2) might not hold for some inputs")}}},
        {"garbage", "increment",
         {O::ToolFailure, 0, 0,
          {make_error(Phase::Static, "E_BOOGIE_OUTPUT",
                      "Boogie output has no summary line; the verifier did not finish")}}},
    };
    int matched = 0;
    std::string failed;
    for (const auto& c : cases) {
        StaticVerdict got = parse_boogie_output(fixture(c.fixture), map_of(c.lesson));
        if (got == c.want)
            ++matched;
        else
            failed += " " + c.fixture;
    }
    return {matched == static_cast<int>(cases.size()),
            std::to_string(matched) + "/" + std::to_string(cases.size()) + " fixtures match" +
                (failed.empty() ? "" : "; mismatched:" + failed)};
}

// AC9
Outcome differential()
{
    Rng rng(9);
    Corpus c = corpus();
    int programs = 0, inputs = 0, violations = 0, errors = 0, resampled = 0, starved = 0;
    std::string offenders;
    for (const auto& l : c.lessons) {
        if (!l.expected_static || l.expected_static->verdict != StaticExpectation::Verdict::Verified)
            continue;
        Program p = load_program(c.program_path(l));
        TypedProgram t = check_static(p);
        auto entries = entry_points(t);
        ++programs;
        Bindings args;
        RunOptions options;
        for (int i = 0; i < 1000; ++i) {
            const EntryPoint& e = entries[static_cast<std::size_t>(i) % entries.size()];
            ExecutionReport r;
            bool sampled = false;
            for (int attempt = 0; attempt < 1000 && !sampled; ++attempt) {
                random_inputs(rng, t, e, args, options);
                r = run_entry(p, e.name, args, options);
                bool entry_pre = r.violation && r.violation->kind == ViolationKind::Precondition &&
                                 r.violation->call_chain.size() == 1;
                sampled = !entry_pre;
                resampled += entry_pre;
            }
            if (!sampled) {
                ++starved;
                continue;
            }
            ++inputs;
            if (r.violation) {
                ++violations;
                offenders += " " + l.name + "/" + e.name;
            } else if (r.error) {
                ++errors;
                offenders += " " + l.name + "/" + e.name + ":" + r.error->code;
            }
        }
    }
    return {violations == 0 && errors == 0 && starved == 0 && programs > 0,
            std::to_string(programs) + " verified programs, " + std::to_string(inputs) + " inputs (" +
                std::to_string(resampled) + " resampled), " + std::to_string(violations) + " violations, " +
                std::to_string(errors) + " runtime errors" + offenders};
}

} // namespace

int main()
{
    struct Criterion {
        const char* id;
        const char* title;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria = {
        {"AC1", "contract protocol on increment", contract_protocol},
        {"AC2", "invariant check count is N+1", invariant_count},
        {"AC3", "quantifiers match brute force", quantifier_oracle},
        {"AC4", "old snapshot on g := g+1", old_snapshot},
        {"AC5", "parse after serialize is identity", round_trip},
        {"AC6", "typed programs never raise E_TYPE", static_soundness},
        {"AC7", "golden Boogie output", golden_output},
        {"AC8", "verdict fixtures", verdict_fixtures},
        {"AC9", "verified programs never violate at run time", differential},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
