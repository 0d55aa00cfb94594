#pragma once

// Synchronous child-process execution with a wall-clock limit.

#include <chrono>
#include <string>
#include <vector>

namespace blockverify {

struct ProcessResult {
    bool started = false;   // false if the executable could not be launched
    bool timed_out = false;
    int exit_code = -1;     // -1 when killed by a signal or not started
    std::string out;
    std::string err;
};

/// Runs `argv[0]` (searched on PATH) with the given arguments, capturing both
/// output streams. The child is killed once `timeout` elapses.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

} // namespace blockverify
