#include "blockverify/program_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "blockverify/validate.hpp"

namespace blockverify {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& message)
{
    Diagnostic d = make_error(Phase::Parse, "E_SCHEMA", message + " at " + (path.empty() ? "/" : path));
    d.path = path.empty() ? "/" : path;
    throw DiagnosticError("E_SCHEMA", {std::move(d)});
}

class Reader {
public:
    Program document(const json& j)
    {
        object(j, "", {"formatVersion", "globals", "blocks", "entryScripts"});
        const json& version = field(j, "", "formatVersion");
        if (!version.is_number_integer() || version.get<std::int64_t>() != kFormatVersion)
            schema_error("/formatVersion", "unsupported formatVersion (expected " + std::to_string(kFormatVersion) + ")");

        Program p;
        each(j, "", "globals", [&](const json& g, const std::string& path) {
            object(g, path, {"name", "value"});
            p.globals.push_back({identifier(g, path, "name"), value(field(g, path, "value"), path + "/value")});
        });
        each(j, "", "blocks", [&](const json& b, const std::string& path) { p.blocks.push_back(block(b, path)); });
        each(j, "", "entryScripts", [&](const json& s, const std::string& path) {
            object(s, path, {"name", "body"});
            EntryScript e;
            e.name = identifier(s, path, "name");
            e.body = stmts(s, path, "body", true);
            p.entry_scripts.push_back(std::move(e));
        });
        return p;
    }

private:
    void object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
    {
        if (!j.is_object())
            schema_error(path, "expected an object");
        for (const auto& [key, _] : j.items()) {
            bool known = false;
            for (auto a : allowed)
                known = known || key == a;
            if (!known)
                schema_error(path + "/" + key, "unknown field '" + key + "'");
        }
    }

    const json& field(const json& j, const std::string& path, const char* key)
    {
        auto it = j.find(key);
        if (it == j.end())
            schema_error(path, std::string("missing field '") + key + "'");
        return *it;
    }

    std::string string_field(const json& j, const std::string& path, const char* key)
    {
        const json& v = field(j, path, key);
        if (!v.is_string())
            schema_error(path + "/" + key, "expected a string");
        return v.get<std::string>();
    }

    std::string identifier(const json& j, const std::string& path, const char* key)
    {
        const json& v = field(j, path, key);
        if (!v.is_string() || !is_identifier(v.get<std::string>()))
            schema_error(path + "/" + key, "expected an identifier");
        return v.get<std::string>();
    }

    template <typename F>
    void each(const json& j, const std::string& path, const char* key, F&& f, bool optional = false)
    {
        auto it = j.find(key);
        if (it == j.end()) {
            if (optional)
                return;
            schema_error(path, std::string("missing field '") + key + "'");
        }
        if (!it->is_array())
            schema_error(path + "/" + key, "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            f((*it)[i], path + "/" + key + "/" + std::to_string(i));
    }

    Value value(const json& j, const std::string& path)
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
                items.push_back(value(j[i], path + "/" + std::to_string(i)));
            return Value::list(std::move(items));
        }
        schema_error(path, "expected a number, boolean, string or list");
    }

    BlockDef block(const json& j, const std::string& path)
    {
        object(j, path, {"name", "kind", "params", "pre", "post", "body"});
        BlockDef b;
        b.name = identifier(j, path, "name");
        auto kind = parse_block_kind(string_field(j, path, "kind"));
        if (!kind)
            schema_error(path + "/kind", "expected one of command, reporter, predicate");
        b.kind = *kind;
        each(j, path, "params", [&](const json& p, const std::string& ppath) {
            object(p, ppath, {"name", "type"});
            Param param{identifier(p, ppath, "name"), std::nullopt};
            if (p.contains("type")) {
                auto t = parse_declared_type(string_field(p, ppath, "type"));
                if (!t)
                    schema_error(ppath + "/type", "expected one of int, bool, intlist, text");
                param.type = *t;
            }
            b.params.push_back(std::move(param));
        }, true);
        b.pre = exprs(j, path, "pre", true);
        b.post = exprs(j, path, "post", true);
        b.body = stmts(j, path, "body", false);
        return b;
    }

    std::vector<Expr> exprs(const json& j, const std::string& path, const char* key, bool optional)
    {
        std::vector<Expr> out;
        each(j, path, key, [&](const json& e, const std::string& epath) { out.push_back(expr(e, epath)); }, optional);
        return out;
    }

    Expr sub(const json& j, const std::string& path, const char* key) { return expr(field(j, path, key), path + "/" + key); }

    std::string kind_of(const json& j, const std::string& path)
    {
        if (!j.is_object())
            schema_error(path, "expected a node object");
        return string_field(j, path, "kind");
    }

    Expr expr(const json& j, const std::string& path)
    {
        const std::string kind = kind_of(j, path);
        Expr e;
        if (kind == "literal") {
            object(j, path, {"kind", "value"});
            e.node = expr::Literal{value(field(j, path, "value"), path + "/value")};
        } else if (kind == "var") {
            object(j, path, {"kind", "name"});
            e.node = expr::VarRef{identifier(j, path, "name")};
        } else if (kind == "arith") {
            object(j, path, {"kind", "op", "left", "right"});
            auto op = parse_arith_op(string_field(j, path, "op"));
            if (!op)
                schema_error(path + "/op", "unknown arithmetic operator");
            e.node = expr::Arith{*op, sub(j, path, "left"), sub(j, path, "right")};
        } else if (kind == "compare") {
            object(j, path, {"kind", "op", "left", "right"});
            auto op = parse_compare_op(string_field(j, path, "op"));
            if (!op)
                schema_error(path + "/op", "unknown comparison operator");
            e.node = expr::Compare{*op, sub(j, path, "left"), sub(j, path, "right")};
        } else if (kind == "logic") {
            object(j, path, {"kind", "op", "operands"});
            auto op = parse_logic_op(string_field(j, path, "op"));
            if (!op)
                schema_error(path + "/op", "unknown boolean operator");
            auto operands = exprs(j, path, "operands", false);
            std::size_t n = operands.size();
            bool ok = *op == LogicOp::Not                                   ? n == 1
                      : (*op == LogicOp::And || *op == LogicOp::Or) ? n >= 1
                                                                            : n == 2;
            if (!ok)
                schema_error(path + "/operands", "arity mismatch for '" + std::string(to_string(*op)) + "'");
            e.node = expr::Logic{*op, std::move(operands)};
        } else if (kind == "old") {
            object(j, path, {"kind", "var"});
            e.node = expr::Old{identifier(j, path, "var")};
        } else if (kind == "result") {
            object(j, path, {"kind"});
            e.node = expr::Result{};
        } else if (kind == "quantifier") {
            object(j, path, {"kind", "quantifier", "var", "domain", "body"});
            auto q = parse_quant_kind(string_field(j, path, "quantifier"));
            if (!q)
                schema_error(path + "/quantifier", "expected forall or exists");
            e.node = expr::Quantifier{*q, identifier(j, path, "var"), domain(field(j, path, "domain"), path + "/domain"),
                                      sub(j, path, "body")};
        } else if (kind == "item") {
            object(j, path, {"kind", "index", "list"});
            e.node = expr::ItemOf{sub(j, path, "index"), sub(j, path, "list")};
        } else if (kind == "length") {
            object(j, path, {"kind", "list"});
            e.node = expr::LengthOf{sub(j, path, "list")};
        } else if (kind == "contains") {
            object(j, path, {"kind", "list", "element"});
            e.node = expr::Contains{sub(j, path, "list"), sub(j, path, "element")};
        } else if (kind == "call") {
            object(j, path, {"kind", "block", "args"});
            e.node = expr::Call{identifier(j, path, "block"), exprs(j, path, "args", false)};
        } else {
            schema_error(path + "/kind", "unknown expression kind '" + kind + "'");
        }
        return e;
    }

    expr::Domain domain(const json& j, const std::string& path)
    {
        const std::string kind = kind_of(j, path);
        if (kind == "range") {
            object(j, path, {"kind", "lo", "hi"});
            return expr::RangeDomain{sub(j, path, "lo"), sub(j, path, "hi")};
        }
        if (kind == "elements") {
            object(j, path, {"kind", "list"});
            return expr::ElementsDomain{sub(j, path, "list")};
        }
        schema_error(path + "/kind", "unknown domain kind '" + kind + "'");
    }

    std::vector<Stmt> stmts(const json& j, const std::string& path, const char* key, bool optional)
    {
        std::vector<Stmt> out;
        each(j, path, key, [&](const json& s, const std::string& spath) { out.push_back(stmt(s, spath)); }, optional);
        return out;
    }

    Stmt stmt(const json& j, const std::string& path)
    {
        const std::string kind = kind_of(j, path);
        Stmt s;
        if (kind == "declare") {
            object(j, path, {"kind", "names"});
            stmt::DeclareLocals d;
            each(j, path, "names", [&](const json& n, const std::string& npath) {
                if (!n.is_string() || !is_identifier(n.get<std::string>()))
                    schema_error(npath, "expected an identifier");
                d.names.push_back(n.get<std::string>());
            });
            s.node = std::move(d);
        } else if (kind == "set") {
            object(j, path, {"kind", "var", "value"});
            s.node = stmt::SetVar{identifier(j, path, "var"), sub(j, path, "value")};
        } else if (kind == "change") {
            object(j, path, {"kind", "var", "by"});
            s.node = stmt::ChangeVar{identifier(j, path, "var"), sub(j, path, "by")};
        } else if (kind == "if") {
            object(j, path, {"kind", "cond", "then", "else"});
            s.node = stmt::IfElse{sub(j, path, "cond"), stmts(j, path, "then", false), stmts(j, path, "else", true)};
        } else if (kind == "repeat") {
            object(j, path, {"kind", "count", "invariant", "body"});
            s.node = stmt::RepeatN{sub(j, path, "count"), exprs(j, path, "invariant", true), stmts(j, path, "body", false)};
        } else if (kind == "repeatUntil") {
            object(j, path, {"kind", "cond", "invariant", "body"});
            s.node = stmt::RepeatUntil{sub(j, path, "cond"), exprs(j, path, "invariant", true),
                                       stmts(j, path, "body", false)};
        } else if (kind == "assert") {
            object(j, path, {"kind", "cond"});
            s.node = stmt::Assert{sub(j, path, "cond")};
        } else if (kind == "report") {
            object(j, path, {"kind", "value"});
            s.node = stmt::Report{sub(j, path, "value")};
        } else if (kind == "run") {
            object(j, path, {"kind", "block", "args"});
            s.node = stmt::CallCommand{identifier(j, path, "block"), exprs(j, path, "args", false)};
        } else if (kind == "addToList") {
            object(j, path, {"kind", "element", "list"});
            s.node = stmt::AddToList{sub(j, path, "element"), identifier(j, path, "list")};
        } else if (kind == "replaceItem") {
            object(j, path, {"kind", "index", "list", "element"});
            s.node = stmt::ReplaceItem{sub(j, path, "index"), identifier(j, path, "list"), sub(j, path, "element")};
        } else {
            schema_error(path + "/kind", "unknown statement kind '" + kind + "'");
        }
        return s;
    }
};

class Writer {
public:
    ordered_json document(const Program& p)
    {
        ordered_json doc;
        doc["formatVersion"] = kFormatVersion;
        doc["globals"] = ordered_json::array();
        for (const auto& g : p.globals) {
            ordered_json o;
            o["name"] = g.name;
            o["value"] = value(g.initial);
            doc["globals"].push_back(std::move(o));
        }
        doc["blocks"] = ordered_json::array();
        for (const auto& b : p.blocks)
            doc["blocks"].push_back(block(b));
        doc["entryScripts"] = ordered_json::array();
        for (const auto& s : p.entry_scripts) {
            ordered_json o;
            o["name"] = s.name;
            o["body"] = stmts(s.body);
            doc["entryScripts"].push_back(std::move(o));
        }
        return doc;
    }

private:
    ordered_json value(const Value& v)
    {
        switch (v.kind()) {
        case Value::Kind::Number: {
            double d = v.as_number();
            if (!std::isfinite(d))
                throw DiagnosticError("E_UNSERIALIZABLE",
                                      {make_error(Phase::Parse, "E_UNSERIALIZABLE", "non-finite number literal")});
            if (v.is_integer() && std::fabs(d) < 9.007199254740992e15)
                return static_cast<std::int64_t>(d);
            return d;
        }
        case Value::Kind::Bool: return v.as_bool();
        case Value::Kind::Text: return v.as_text();
        case Value::Kind::List: {
            ordered_json arr = ordered_json::array();
            for (const auto& e : v.as_list())
                arr.push_back(value(e));
            return arr;
        }
        }
        return nullptr;
    }

    ordered_json block(const BlockDef& b)
    {
        ordered_json o;
        o["name"] = b.name;
        o["kind"] = to_string(b.kind);
        o["params"] = ordered_json::array();
        for (const auto& p : b.params) {
            ordered_json po;
            po["name"] = p.name;
            if (p.type)
                po["type"] = to_string(*p.type);
            o["params"].push_back(std::move(po));
        }
        o["pre"] = exprs(b.pre);
        o["post"] = exprs(b.post);
        o["body"] = stmts(b.body);
        return o;
    }

    ordered_json exprs(const std::vector<Expr>& es)
    {
        ordered_json arr = ordered_json::array();
        for (const auto& e : es)
            arr.push_back(expr(e));
        return arr;
    }

    ordered_json expr(const Expr& e)
    {
        ordered_json o;
        o["kind"] = node_kind_name(e);
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, expr::Literal>) {
                    o["value"] = value(n.value);
                } else if constexpr (std::is_same_v<T, expr::VarRef>) {
                    o["name"] = n.name;
                } else if constexpr (std::is_same_v<T, expr::Arith> || std::is_same_v<T, expr::Compare>) {
                    o["op"] = to_string(n.op);
                    o["left"] = expr(*n.lhs);
                    o["right"] = expr(*n.rhs);
                } else if constexpr (std::is_same_v<T, expr::Logic>) {
                    o["op"] = to_string(n.op);
                    o["operands"] = exprs(n.operands);
                } else if constexpr (std::is_same_v<T, expr::Old>) {
                    o["var"] = n.var;
                } else if constexpr (std::is_same_v<T, expr::Quantifier>) {
                    o["quantifier"] = to_string(n.kind);
                    o["var"] = n.var;
                    ordered_json d;
                    if (const auto* r = std::get_if<expr::RangeDomain>(&n.domain)) {
                        d["kind"] = "range";
                        d["lo"] = expr(*r->lo);
                        d["hi"] = expr(*r->hi);
                    } else {
                        d["kind"] = "elements";
                        d["list"] = expr(*std::get<expr::ElementsDomain>(n.domain).list);
                    }
                    o["domain"] = std::move(d);
                    o["body"] = expr(*n.body);
                } else if constexpr (std::is_same_v<T, expr::ItemOf>) {
                    o["index"] = expr(*n.index);
                    o["list"] = expr(*n.list);
                } else if constexpr (std::is_same_v<T, expr::LengthOf>) {
                    o["list"] = expr(*n.list);
                } else if constexpr (std::is_same_v<T, expr::Contains>) {
                    o["list"] = expr(*n.list);
                    o["element"] = expr(*n.element);
                } else if constexpr (std::is_same_v<T, expr::Call>) {
                    o["block"] = n.block;
                    o["args"] = exprs(n.args);
                }
            },
            e.node);
        return o;
    }

    ordered_json stmts(const std::vector<Stmt>& ss)
    {
        ordered_json arr = ordered_json::array();
        for (const auto& s : ss)
            arr.push_back(stmt(s));
        return arr;
    }

    ordered_json stmt(const Stmt& s)
    {
        ordered_json o;
        o["kind"] = node_kind_name(s);
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, stmt::DeclareLocals>) {
                    o["names"] = n.names;
                } else if constexpr (std::is_same_v<T, stmt::SetVar>) {
                    o["var"] = n.name;
                    o["value"] = expr(n.value);
                } else if constexpr (std::is_same_v<T, stmt::ChangeVar>) {
                    o["var"] = n.name;
                    o["by"] = expr(n.delta);
                } else if constexpr (std::is_same_v<T, stmt::IfElse>) {
                    o["cond"] = expr(n.cond);
                    o["then"] = stmts(n.then_branch);
                    o["else"] = stmts(n.else_branch);
                } else if constexpr (std::is_same_v<T, stmt::RepeatN>) {
                    o["count"] = expr(n.count);
                    o["invariant"] = exprs(n.invariant);
                    o["body"] = stmts(n.body);
                } else if constexpr (std::is_same_v<T, stmt::RepeatUntil>) {
                    o["cond"] = expr(n.cond);
                    o["invariant"] = exprs(n.invariant);
                    o["body"] = stmts(n.body);
                } else if constexpr (std::is_same_v<T, stmt::Assert>) {
                    o["cond"] = expr(n.cond);
                } else if constexpr (std::is_same_v<T, stmt::Report>) {
                    o["value"] = expr(n.value);
                } else if constexpr (std::is_same_v<T, stmt::CallCommand>) {
                    o["block"] = n.block;
                    o["args"] = exprs(n.args);
                } else if constexpr (std::is_same_v<T, stmt::AddToList>) {
                    o["element"] = expr(n.element);
                    o["list"] = n.list;
                } else if constexpr (std::is_same_v<T, stmt::ReplaceItem>) {
                    o["index"] = expr(n.index);
                    o["list"] = n.list;
                    o["element"] = expr(n.element);
                }
            },
            s.node);
        return o;
    }
};

} // namespace

Program parse_program(std::string_view text)
{
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        schema_error("", std::string("malformed JSON: ") + e.what());
    }
    Program p = Reader().document(j);
    assign_block_ids(p);
    auto problems = validate(p);
    if (!problems.empty())
        throw DiagnosticError("E_WELLFORMED", std::move(problems));
    return p;
}

std::string serialize_program(const Program& program) { return Writer().document(program).dump(2) + "\n"; }

Program load_program(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw DiagnosticError("E_IO", {make_error(Phase::Parse, "E_IO", "cannot read '" + file.string() + "'")});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_program(buf.str());
}

} // namespace blockverify
