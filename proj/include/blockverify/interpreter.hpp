#pragma once

// Runtime assertion checking interpreter.
//
// A call runs the contract protocol: bind parameters, snapshot the variables
// named under `old`, check the precondition slots, run the body, check the
// postcondition slots. Loops check their invariant slots on entry and after
// every iteration. Execution stops at the first violation.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blockverify/ast.hpp"
#include "blockverify/diagnostic.hpp"

namespace blockverify {

enum class ViolationKind { Precondition, Postcondition, Assertion, InvariantEntry, InvariantIteration };

std::string_view to_string(ViolationKind k);
std::optional<ViolationKind> parse_violation_kind(std::string_view s);

using Bindings = std::vector<std::pair<std::string, Value>>;

struct Violation {
    ViolationKind kind;
    BlockId block_id;
    /// 1-based index of the first failing conjunct.
    int slot_index = 1;
    std::vector<BlockId> call_chain;
    /// Invariant kinds only: 0 for the entry check, n after the n-th iteration.
    std::optional<std::int64_t> iteration;

    bool operator==(const Violation&) const = default;
};

/// A runtime error (E_TYPE, E_INDEX, ...) raised while executing.
struct RuntimeFault {
    std::string code;
    std::string message;
    std::optional<BlockId> block_id;
    std::vector<BlockId> call_chain;

    bool operator==(const RuntimeFault&) const = default;
};

class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(RuntimeFault fault, Bindings frame = {})
        : std::runtime_error(fault.code + ": " + fault.message), fault_(std::move(fault)), frame_(std::move(frame))
    {
    }
    const RuntimeFault& fault() const { return fault_; }
    const Bindings& frame_values() const { return frame_; }

private:
    RuntimeFault fault_;
    Bindings frame_;
};

class ViolationError : public std::runtime_error {
public:
    explicit ViolationError(Violation v, Bindings frame = {})
        : std::runtime_error(std::string(to_string(v.kind)) + " violated at " + v.block_id),
          violation_(std::move(v)),
          frame_(std::move(frame))
    {
    }
    const Violation& violation() const { return violation_; }
    const Bindings& frame_values() const { return frame_; }

private:
    Violation violation_;
    Bindings frame_;
};

struct Frame {
    std::string owner;   // block or script name
    BlockId owner_id;
    std::map<std::string, Value> params;
    std::map<std::string, Value> locals;
    std::map<std::string, Value> old_snapshot;
    bool has_snapshot = false;
    std::optional<Value> result;
    /// Quantifier-bound variables, innermost last.
    Bindings bound;
};

struct Environment {
    std::map<std::string, Value> globals;
    std::vector<Frame> frames;
};

struct InterpreterStats {
    std::uint64_t invariant_checks = 0; // evaluations of a loop's invariant conjunction
    std::uint64_t calls = 0;
    std::uint64_t assertions = 0;
    bool operator==(const InterpreterStats&) const = default;
};

struct RunOptions {
    std::size_t depth_limit = 10'000;
    /// Replaces the declared initial value of these globals.
    std::map<std::string, Value> global_overrides;
};

class Interpreter {
public:
    explicit Interpreter(const Program& program, std::size_t depth_limit = 10'000);

    Value eval_expr(Environment& env, const Expr& e);

    enum class Flow { Normal, Reported };
    Flow exec_stmts(Environment& env, std::span<const Stmt> stmts);

    /// Runs the full contract protocol for one call. Returns the reported
    /// value for reporters and predicates, nothing for commands.
    std::optional<Value> call_block(Environment& env, const BlockDef& block, std::vector<Value> args);

    /// Runs an entry script in a fresh frame.
    void run_script(Environment& env, const EntryScript& script);

    const InterpreterStats& stats() const { return stats_; }

private:
    Flow exec_stmt(Environment& env, const Stmt& s);
    void check_slots(Environment& env, std::span<const Expr> slots, ViolationKind kind, const BlockId& where,
                     std::optional<std::int64_t> iteration = std::nullopt);
    bool eval_bool(Environment& env, const Expr& e, std::string_view what);
    double eval_number(Environment& env, const Expr& e, std::string_view what);
    const Value::List& eval_list(Environment& env, const Expr& e, Value& holder);
    Value& lookup(Environment& env, const std::string& name, const BlockId& where);
    Value& assignable(Environment& env, const std::string& name, const BlockId& where);
    [[noreturn]] void fail(const Environment& env, std::string code, std::string message,
                           const BlockId& where) const;
    [[noreturn]] void violate(const Environment& env, ViolationKind kind, const BlockId& where, int slot,
                              std::optional<std::int64_t> iteration) const;

    const Program& program_;
    std::size_t depth_limit_;
    InterpreterStats stats_;
};

struct ExecutionReport {
    enum class Status { Passed, Violation, Error };

    std::string entry;
    Status status = Status::Passed;
    std::optional<Value> result;
    /// Final global values in declaration order.
    Bindings globals;
    std::optional<Violation> violation;
    std::optional<RuntimeFault> error;
    /// Parameters and locals of the innermost frame when execution stopped.
    Bindings frame_values;
    InterpreterStats stats;

    bool operator==(const ExecutionReport&) const = default;
};

std::string_view to_string(ExecutionReport::Status s);

/// Runs an entry script or a block by name under RAC. For blocks, `args`
/// binds parameters by name (each exactly once); entry scripts take none.
/// Runs on a private thread sized for `options.depth_limit` nested calls.
ExecutionReport run_entry(const Program& program, std::string_view entry, const Bindings& args,
                          const RunOptions& options = {});

/// Diagnostics (phase runtime) describing a failed report; empty if passed.
std::vector<Diagnostic> to_diagnostics(const ExecutionReport& report);

} // namespace blockverify
