#include "blockverify/render.hpp"

#include <sstream>

#include <json.hpp>

namespace blockverify {

namespace {

using nlohmann::ordered_json;

struct Found {
    std::string kind;
    bool found = false;
};

void search(const Expr& e, const BlockId& id, Found& f)
{
    if (f.found)
        return;
    if (e.id == id) {
        f = {std::string(node_kind_name(e)), true};
        return;
    }
    for_each_child(e, [&](const Expr& c) { search(c, id, f); });
}

void search(const std::vector<Stmt>& body, const BlockId& id, Found& f)
{
    for (const auto& s : body) {
        if (f.found)
            return;
        if (s.id == id) {
            f = {std::string(node_kind_name(s)), true};
            return;
        }
        for_each_part(s, [&](const Expr& e) { search(e, id, f); },
                      [&](const std::vector<Stmt>& nested) { search(nested, id, f); });
    }
}

std::string join(const std::vector<BlockId>& ids, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        out += (i ? std::string(sep) : "") + ids[i];
    return out;
}

std::string bindings_text(const Bindings& b)
{
    std::string out;
    for (std::size_t i = 0; i < b.size(); ++i)
        out += (i ? ", " : "") + b[i].first + " = " + to_display(b[i].second);
    return out;
}

ordered_json value_json(const Value& v)
{
    switch (v.kind()) {
    case Value::Kind::Number:
        if (v.is_integer())
            return static_cast<std::int64_t>(v.as_number());
        return v.as_number();
    case Value::Kind::Bool: return v.as_bool();
    case Value::Kind::Text: return v.as_text();
    case Value::Kind::List: {
        ordered_json a = ordered_json::array();
        for (const auto& e : v.as_list())
            a.push_back(value_json(e));
        return a;
    }
    }
    return nullptr;
}

ordered_json bindings_json(const Bindings& b)
{
    ordered_json o = ordered_json::object();
    for (const auto& [k, v] : b)
        o[k] = value_json(v);
    return o;
}

ordered_json diagnostic_json(const Diagnostic& d)
{
    ordered_json j;
    j["severity"] = std::string(to_string(d.severity));
    j["phase"] = std::string(to_string(d.phase));
    j["code"] = d.code;
    if (d.block_id)
        j["blockId"] = *d.block_id;
    if (d.slot_index)
        j["slotIndex"] = *d.slot_index;
    j["message"] = d.message;
    if (!d.call_chain.empty())
        j["callChain"] = d.call_chain;
    if (!d.related.empty())
        j["related"] = d.related;
    if (d.path)
        j["path"] = *d.path;
    if (d.obligation)
        j["obligation"] = std::string(to_string(*d.obligation));
    return j;
}

ordered_json diagnostics_json(const std::vector<Diagnostic>& ds)
{
    ordered_json a = ordered_json::array();
    for (const auto& d : ds)
        a.push_back(diagnostic_json(d));
    return a;
}

std::string violation_title(ViolationKind k)
{
    switch (k) {
    case ViolationKind::Precondition: return "Precondition violated";
    case ViolationKind::Postcondition: return "Postcondition violated";
    case ViolationKind::Assertion: return "Assertion failed";
    case ViolationKind::InvariantEntry: return "Loop invariant does not hold on entry";
    case ViolationKind::InvariantIteration: return "Loop invariant broken by an iteration";
    }
    return "Violation";
}

void frame(std::ostringstream& out, const std::string& title, const std::vector<std::pair<std::string, std::string>>& rows)
{
    std::string top = "+-- " + title + " ";
    const std::size_t width = 60;
    if (top.size() < width)
        top += std::string(width - top.size(), '-');
    out << top << "\n";
    for (const auto& [label, value] : rows) {
        std::string l = label + ":";
        l.resize(std::max<std::size_t>(l.size(), 12), ' ');
        out << "| " << l << value << "\n";
    }
    out << "+" << std::string(width - 1, '-') << "\n";
}

} // namespace

std::string describe_block(const Program* program, const BlockId& id)
{
    if (!program)
        return id;
    auto hash = id.rfind('#');
    if (hash == std::string::npos)
        return id;
    std::string owner = id.substr(0, hash);
    std::string where;
    Found f;
    if (const BlockDef* b = program->find_block(owner)) {
        where = std::string(to_string(b->kind)) + " '" + owner + "'";
        if (b->id == id)
            return "hat block of " + where;
        for (const auto& e : b->pre)
            search(e, id, f);
        for (const auto& e : b->post)
            search(e, id, f);
        search(b->body, id, f);
    } else if (const EntryScript* s = program->find_entry_script(owner)) {
        where = "script '" + owner + "'";
        if (s->id == id)
            return "start of " + where;
        search(s->body, id, f);
    }
    if (!f.found)
        return id;
    return "'" + f.kind + "' block in " + where;
}

std::string render_diagnostics_text(const std::vector<Diagnostic>& diagnostics, const Program* program)
{
    std::ostringstream out;
    for (const auto& d : diagnostics) {
        out << to_string(d.severity) << "[" << d.code << "] (" << to_string(d.phase) << ")";
        if (d.block_id) {
            out << " at " << *d.block_id;
            std::string desc = describe_block(program, *d.block_id);
            if (desc != *d.block_id)
                out << " (" << desc << ")";
        }
        if (d.slot_index)
            out << " slot " << *d.slot_index;
        if (d.path)
            out << " at " << *d.path;
        out << ": " << d.message << "\n";
        for (const auto& r : d.related) {
            out << "  related: " << r;
            std::string desc = describe_block(program, r);
            if (desc != r)
                out << " (" << desc << ")";
            out << "\n";
        }
        if (!d.call_chain.empty())
            out << "  call chain: " << join(d.call_chain, " > ") << "\n";
    }
    return out.str();
}

std::string render_diagnostics_json(const std::vector<Diagnostic>& diagnostics)
{
    return diagnostics_json(diagnostics).dump(2) + "\n";
}

std::string render_report_text(const ExecutionReport& report, const Program& program)
{
    std::ostringstream out;
    if (report.violation) {
        const Violation& v = *report.violation;
        std::vector<std::pair<std::string, std::string>> rows{
            {"block", v.block_id + " (" + describe_block(&program, v.block_id) + ")"},
            {"slot", std::to_string(v.slot_index)}};
        if (v.iteration)
            rows.emplace_back("iteration", std::to_string(*v.iteration));
        rows.emplace_back("call chain", join(v.call_chain, " > "));
        rows.emplace_back("values", report.frame_values.empty() ? "(none)" : bindings_text(report.frame_values));
        frame(out, violation_title(v.kind), rows);
    } else if (report.error) {
        const RuntimeFault& e = *report.error;
        std::vector<std::pair<std::string, std::string>> rows{{"code", e.code}, {"message", e.message}};
        if (e.block_id)
            rows.emplace_back("block", *e.block_id + " (" + describe_block(&program, *e.block_id) + ")");
        if (!e.call_chain.empty())
            rows.emplace_back("call chain", join(e.call_chain, " > "));
        if (!report.frame_values.empty())
            rows.emplace_back("values", bindings_text(report.frame_values));
        frame(out, "Runtime error", rows);
    } else {
        if (report.result)
            out << "result: " << to_display(*report.result) << "\n";
        for (const auto& [name, value] : report.globals)
            out << "global " << name << ": " << to_display(value) << "\n";
    }
    out << "status: " << to_string(report.status) << "\n";
    return out.str();
}

std::string render_report_json(const ExecutionReport& report)
{
    ordered_json j;
    j["entry"] = report.entry;
    j["status"] = std::string(to_string(report.status));
    if (report.result)
        j["result"] = value_json(*report.result);
    j["globals"] = bindings_json(report.globals);
    if (report.violation) {
        const Violation& v = *report.violation;
        ordered_json vj;
        vj["kind"] = std::string(to_string(v.kind));
        vj["blockId"] = v.block_id;
        vj["slotIndex"] = v.slot_index;
        vj["callChain"] = v.call_chain;
        if (v.iteration)
            vj["iteration"] = *v.iteration;
        j["violation"] = vj;
    }
    if (report.violation || report.error)
        j["frameValues"] = bindings_json(report.frame_values);
    j["diagnostics"] = diagnostics_json(to_diagnostics(report));
    ordered_json s;
    s["calls"] = report.stats.calls;
    s["invariantChecks"] = report.stats.invariant_checks;
    s["assertions"] = report.stats.assertions;
    j["stats"] = s;
    return j.dump(2) + "\n";
}

std::string render_verdict_text(const StaticVerdict& verdict, const Program* program)
{
    std::ostringstream out;
    out << render_diagnostics_text(verdict.diagnostics, program);
    switch (verdict.outcome) {
    case StaticVerdict::Outcome::Verified:
        out << "verified (" << verdict.verified << (verdict.verified == 1 ? " procedure)" : " procedures)") << "\n";
        break;
    case StaticVerdict::Outcome::Errors:
        out << verdict.verified << " verified, " << verdict.errors << (verdict.errors == 1 ? " error" : " errors")
            << "\n";
        break;
    case StaticVerdict::Outcome::ToolFailure: out << "verification did not complete\n"; break;
    }
    return out.str();
}

std::string render_verdict_json(const StaticVerdict& verdict)
{
    ordered_json j;
    j["outcome"] = std::string(to_string(verdict.outcome));
    j["verified"] = verdict.verified;
    j["errors"] = verdict.errors;
    j["diagnostics"] = diagnostics_json(verdict.diagnostics);
    return j.dump(2) + "\n";
}

std::string summary_line(const std::vector<Diagnostic>& diagnostics)
{
    std::size_t errors = 0;
    std::size_t warnings = 0;
    for (const auto& d : diagnostics)
        (d.severity == Severity::Error ? errors : warnings)++;
    auto plural = [](std::size_t n, const char* word) {
        return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
    };
    return plural(errors, "error") + ", " + plural(warnings, "warning");
}

} // namespace blockverify
