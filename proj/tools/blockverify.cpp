// blockverify: run, check, compile and verify block programs.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <unistd.h>

#include <CLI11.hpp>

#include "blockverify/args.hpp"
#include "blockverify/corpus.hpp"
#include "blockverify/interpreter.hpp"
#include "blockverify/pipeline.hpp"
#include "blockverify/program_io.hpp"
#include "blockverify/render.hpp"

namespace fs = std::filesystem;
using namespace blockverify;

namespace {

enum Exit { kOk = 0, kFindings = 1, kUsage = 2, kTool = 3 };

struct Config {
    std::string file;
    std::string entry;
    std::vector<std::string> args;
    std::string out;
    std::string boogie_path;
    bool skip_solver = false;
    std::string format = "text";
    std::size_t depth_limit = 10'000;
    int timeout_secs = 60;
    bool update = false;
};

bool json_mode(const Config& c) { return c.format == "json"; }

void print_diagnostics(const Config& c, const std::vector<Diagnostic>& ds, const Program* program)
{
    if (json_mode(c))
        std::cout << render_diagnostics_json(ds);
    else
        std::cout << render_diagnostics_text(ds, program);
    if (!ds.empty())
        std::cerr << "blockverify: " << summary_line(ds) << "\n";
}

bool has_errors(const std::vector<Diagnostic>& ds)
{
    for (const auto& d : ds)
        if (d.severity == Severity::Error)
            return true;
    return false;
}

std::optional<Program> load(const Config& c)
{
    try {
        return load_program(c.file);
    } catch (const DiagnosticError& e) {
        print_diagnostics(c, e.diagnostics(), nullptr);
        return std::nullopt;
    }
}

std::string default_entry(const Program& p)
{
    if (p.entry_scripts.size() == 1)
        return p.entry_scripts.front().name;
    if (p.entry_scripts.empty() && p.blocks.size() == 1)
        return p.blocks.front().name;
    return {};
}

int cmd_run(const Config& c)
{
    auto program = load(c);
    if (!program)
        return kUsage;
    std::string entry = c.entry.empty() ? default_entry(*program) : c.entry;
    if (entry.empty()) {
        std::cerr << "blockverify: --entry is required (the program has no single script or block to default to)\n";
        return kUsage;
    }
    Bindings args;
    try {
        args = bind_args(c.args, program->find_block(entry));
    } catch (const DiagnosticError& e) {
        print_diagnostics(c, e.diagnostics(), &*program);
        return kUsage;
    }
    RunOptions options;
    options.depth_limit = c.depth_limit;
    ExecutionReport report = run_entry(*program, entry, args, options);
    if (report.error && (report.error->code == "E_ENTRY_NOT_FOUND" || report.error->code == "E_ARITY" ||
                         report.error->code == "E_UNBOUND")) {
        print_diagnostics(c, to_diagnostics(report), &*program);
        return kUsage;
    }
    std::cout << (json_mode(c) ? render_report_json(report) : render_report_text(report, *program));
    if (report.status == ExecutionReport::Status::Passed)
        return kOk;
    std::cerr << "blockverify: " << to_string(report.status) << "\n";
    return kFindings;
}

int cmd_check(const Config& c)
{
    auto program = load(c);
    if (!program)
        return kUsage;
    std::vector<Diagnostic> ds;
    try {
        TypedProgram typed = check_static(*program);
        ds = typed.warnings;
    } catch (const DiagnosticError& e) {
        ds = e.diagnostics();
    }
    print_diagnostics(c, ds, &*program);
    if (has_errors(ds))
        return kFindings;
    if (!json_mode(c))
        std::cout << "ok: " << c.file << " is inside the statically checkable fragment\n";
    return kOk;
}

fs::path output_path(const Config& c)
{
    if (!c.out.empty())
        return c.out;
    std::string name = fs::path(c.file).filename().string();
    for (std::string_view ext : {".blocks.json", ".json"})
        if (name.size() > ext.size() && name.ends_with(ext)) {
            name.resize(name.size() - ext.size());
            break;
        }
    return fs::path(name + ".bpl");
}

fs::path map_path(const fs::path& bpl)
{
    fs::path p = bpl;
    return p.replace_extension(".srcmap.json");
}

/// Typechecks and compiles; writes the outputs. Returns an exit code, or
/// nullopt with `unit` filled on success.
std::optional<int> compile_to_files(const Config& c, const Program& program, BoogieUnit& unit, fs::path& bpl)
{
    StaticResult s = run_static(program);
    if (!s.diagnostics.empty())
        print_diagnostics(c, s.diagnostics, &program);
    if (!s.ok())
        return kFindings;
    unit = *s.unit;
    bpl = output_path(c);
    if (!write_file(bpl, unit.text) || !write_file(map_path(bpl), source_map_to_json(unit))) {
        std::cerr << "blockverify: cannot write " << bpl.string() << "\n";
        return kUsage;
    }
    return std::nullopt;
}

int cmd_compile(const Config& c)
{
    auto program = load(c);
    if (!program)
        return kUsage;
    BoogieUnit unit;
    fs::path bpl;
    if (auto code = compile_to_files(c, *program, unit, bpl))
        return *code;
    if (!json_mode(c))
        std::cout << "wrote " << bpl.string() << " and " << map_path(bpl).string() << "\n";
    return kOk;
}

std::string boogie_executable(const Config& c)
{
    if (!c.boogie_path.empty())
        return c.boogie_path;
    if (const char* env = std::getenv("BLOCKVERIFY_BOOGIE"); env && *env)
        return env;
    return "boogie";
}

int cmd_verify(const Config& c)
{
    auto program = load(c);
    if (!program)
        return kUsage;
    Config cc = c;
    if (cc.out.empty() && !c.skip_solver)
        cc.out = (fs::temp_directory_path() / ("blockverify-" + std::to_string(::getpid()) + ".bpl")).string();
    BoogieUnit unit;
    fs::path bpl;
    if (auto code = compile_to_files(cc, *program, unit, bpl))
        return *code;
    if (c.skip_solver) {
        if (!json_mode(c))
            std::cout << "compiled " << bpl.string() << " (solver skipped)\n";
        return kOk;
    }
    StaticVerdict v = run_boogie(unit, boogie_executable(c), bpl, std::chrono::seconds(c.timeout_secs));
    if (c.out.empty()) {
        std::error_code ec;
        fs::remove(bpl, ec);
        fs::remove(map_path(bpl), ec);
    }
    std::cout << (json_mode(c) ? render_verdict_json(v) : render_verdict_text(v, &*program));
    if (!v.diagnostics.empty())
        std::cerr << "blockverify: " << summary_line(v.diagnostics) << "\n";
    switch (v.outcome) {
    case StaticVerdict::Outcome::Verified: return kOk;
    case StaticVerdict::Outcome::Errors: return kFindings;
    case StaticVerdict::Outcome::ToolFailure: return kTool;
    }
    return kTool;
}

int cmd_corpus(const Config& c)
{
    Corpus corpus;
    try {
        corpus = load_corpus(c.file.empty() ? "lessons" : c.file);
    } catch (const DiagnosticError& e) {
        print_diagnostics(c, e.diagnostics(), nullptr);
        return kUsage;
    }
    CorpusOptions options;
    options.update_goldens = c.update;
    options.timeout = std::chrono::seconds(c.timeout_secs);
    if (!c.boogie_path.empty())
        options.boogie = c.boogie_path;
    else if (const char* env = std::getenv("BLOCKVERIFY_BOOGIE"); env && *env)
        options.boogie = env;
    bool all = true;
    for (const auto& r : corpus_check(corpus, options)) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "\n";
        for (const auto& f : r.failures)
            std::cout << "  " << f << "\n";
        all = all && r.pass;
    }
    return all ? kOk : kFindings;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Run, check, compile and verify block programs with contracts", "blockverify"};
    app.require_subcommand(1);
    Config c;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    };

    auto* run = app.add_subcommand("run", "Execute a script or block with runtime contract checking");
    run->add_option("file", c.file, "Program (.blocks.json)")->required();
    run->add_option("--entry", c.entry, "Script or block to run");
    run->add_option("--args", c.args, "Inputs: 3, true, [1,2], \"text\" or name=value")->allow_extra_args();
    run->add_option("--depth-limit", c.depth_limit, "Maximum call depth")->check(CLI::PositiveNumber);
    common(run);

    auto* check = app.add_subcommand("check", "Validate and typecheck for static verification");
    check->add_option("file", c.file, "Program (.blocks.json)")->required();
    common(check);

    auto* comp = app.add_subcommand("compile", "Write Boogie code (.bpl) and its source map");
    comp->add_option("file", c.file, "Program (.blocks.json)")->required();
    comp->add_option("--out", c.out, "Output .bpl path");
    common(comp);

    auto* ver = app.add_subcommand("verify", "Compile and run Boogie");
    ver->add_option("file", c.file, "Program (.blocks.json)")->required();
    ver->add_option("--out", c.out, "Keep the .bpl at this path");
    ver->add_option("--boogie-path", c.boogie_path, "Boogie executable (default: $BLOCKVERIFY_BOOGIE, then boogie)");
    ver->add_flag("--skip-solver", c.skip_solver, "Stop after compilation");
    ver->add_option("--timeout-secs", c.timeout_secs, "Boogie time limit")->check(CLI::PositiveNumber);
    common(ver);

    auto* corp = app.add_subcommand("corpus", "Check every lesson against its expectations");
    corp->add_option("dir", c.file, "Lesson directory (default: lessons)");
    corp->add_flag("--update", c.update, "Rewrite golden Boogie files");
    corp->add_option("--boogie-path", c.boogie_path, "Boogie executable for live checks");
    corp->add_option("--timeout-secs", c.timeout_secs, "Boogie time limit per lesson")->check(CLI::PositiveNumber);

    // CLI11 splits a bracketed token into several values; a trailing space
    // keeps a list literal such as [1,2] in one piece.
    std::vector<std::string> tokens;
    for (int i = argc - 1; i > 0; --i) {
        std::string t = argv[i];
        if (t.size() >= 2 && t.front() == '[' && t.back() == ']')
            t += ' ';
        tokens.push_back(std::move(t));
    }

    try {
        app.parse(tokens);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (run->parsed())
        return cmd_run(c);
    if (check->parsed())
        return cmd_check(c);
    if (comp->parsed())
        return cmd_compile(c);
    if (ver->parsed())
        return cmd_verify(c);
    return cmd_corpus(c);
}
