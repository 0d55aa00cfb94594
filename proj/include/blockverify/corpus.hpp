#pragma once

// The lesson corpus: a manifest (`lessons.json`) of example programs with
// their expected runtime and static outcomes, plus golden compiler output
// under `expected/`.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "blockverify/interpreter.hpp"

namespace blockverify {

struct RacExpectation {
    std::string entry;
    /// Inputs by parameter name.
    Bindings args;
    ExecutionReport::Status status = ExecutionReport::Status::Passed;
    std::optional<Value> result;
    /// Subset of final globals that must match.
    Bindings globals;
    std::optional<ViolationKind> kind;
    std::optional<BlockId> block_id;
    std::optional<int> slot;
    std::optional<std::int64_t> iteration;
    /// Runtime error code, for status Error.
    std::optional<std::string> code;
};

struct ExpectedObligation {
    BlockId block_id;
    ObligationKind kind;
    bool operator==(const ExpectedObligation&) const = default;
};

struct StaticExpectation {
    enum class Verdict { Verified, Errors, Rejected };
    Verdict verdict = Verdict::Verified;
    /// Codes that must appear among the static diagnostics (rejections and warnings).
    std::vector<std::string> codes;
    /// For Errors: obligations Boogie must report.
    std::vector<ExpectedObligation> obligations;
};

struct Lesson {
    std::string name;
    std::filesystem::path file; // relative to the corpus root
    std::string narrative;
    /// Codes that loading the file must produce (top-level and nested).
    std::vector<std::string> load_codes;
    std::vector<RacExpectation> rac;
    std::optional<StaticExpectation> expected_static;
};

struct Corpus {
    std::filesystem::path root;
    std::vector<Lesson> lessons;

    std::filesystem::path program_path(const Lesson& l) const { return root / l.file; }
    std::filesystem::path golden_bpl(const Lesson& l) const { return root / "expected" / (l.name + ".bpl"); }
    std::filesystem::path golden_map(const Lesson& l) const { return root / "expected" / (l.name + ".srcmap.json"); }
};

/// Reads `root/lessons.json`. Throws DiagnosticError("E_SCHEMA") or ("E_IO").
Corpus load_corpus(const std::filesystem::path& root);

struct CorpusOptions {
    /// Boogie executable; live verification is skipped when absent.
    std::optional<std::string> boogie;
    /// Rewrite golden files instead of comparing against them.
    bool update_goldens = false;
    std::chrono::seconds timeout{60};
    std::filesystem::path work_dir = std::filesystem::temp_directory_path();
};

struct LessonResult {
    std::string name;
    bool pass = true;
    std::vector<std::string> failures;
    /// True if a live Boogie run was part of the check.
    bool verified_live = false;
};

/// Checks every lesson; mismatches become failures, never exceptions.
std::vector<LessonResult> corpus_check(const Corpus& corpus, const CorpusOptions& options = {});

std::string_view to_string(StaticExpectation::Verdict v);

} // namespace blockverify
