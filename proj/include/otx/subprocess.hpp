#pragma once

#include <string>

namespace otx::proc {

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

// Runs `sh -c command`, capturing stdout/stderr. The process group is
// killed after timeout_s seconds.
CommandResult run_command(const std::string& command, double timeout_s);

}  // namespace otx::proc
