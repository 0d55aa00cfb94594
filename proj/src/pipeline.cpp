#include "blockverify/pipeline.hpp"

#include <fstream>

#include "blockverify/subprocess.hpp"

namespace blockverify {

StaticResult run_static(const Program& program)
{
    StaticResult r;
    try {
        r.typed = check_static(program);
    } catch (const DiagnosticError& e) {
        r.diagnostics = e.diagnostics();
        return r;
    }
    try {
        r.unit = compile(*r.typed);
    } catch (const DiagnosticError& e) {
        r.diagnostics = e.diagnostics();
    }
    for (const auto& w : r.typed->warnings)
        r.diagnostics.push_back(w);
    return r;
}

bool write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        return false;
    out << text;
    out.close();
    return static_cast<bool>(out);
}

StaticVerdict run_boogie(const BoogieUnit& unit, const std::string& boogie, const std::filesystem::path& bpl_path,
                         std::chrono::seconds timeout)
{
    auto failure = [](std::string code, std::string message) {
        StaticVerdict v;
        v.outcome = StaticVerdict::Outcome::ToolFailure;
        v.diagnostics.push_back(make_error(Phase::Static, std::move(code), std::move(message)));
        return v;
    };
    if (!write_file(bpl_path, unit.text))
        return failure("E_IO", "cannot write " + bpl_path.string());
    ProcessResult p = run_process({boogie, bpl_path.string()}, timeout);
    if (!p.started)
        return failure("E_BOOGIE_LAUNCH", "cannot run Boogie executable '" + boogie + "'");
    if (p.timed_out)
        return failure("E_BOOGIE_TIMEOUT",
                       "Boogie did not finish within " + std::to_string(timeout.count()) + " seconds");
    StaticVerdict v = parse_boogie_output(p.out, unit.source_map);
    // Boogie may exit nonzero when it reports errors; a crash or a nonzero
    // status with a clean verdict is a tool failure.
    bool expected_status = p.exit_code == 0 || (p.exit_code > 0 && v.outcome == StaticVerdict::Outcome::Errors);
    if (v.outcome != StaticVerdict::Outcome::ToolFailure && !expected_status)
        return failure("E_BOOGIE_OUTPUT", "Boogie exited with unexpected status " + std::to_string(p.exit_code));
    return v;
}

} // namespace blockverify
