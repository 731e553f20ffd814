#pragma once

// Runs the command-line tool as a subprocess.

#include <array>
#include <chrono>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace cvxspace::testing {

struct ProcessResult {
    int exit_code = -1;
    /// stdout, and stderr too when requested.
    std::string output;
    double seconds = 0.0;
};

inline std::string cli_path() { return CVXSPACE_CLI; }

inline ProcessResult run_cli(const std::string& args, bool merge_stderr = false)
{
    const std::string cmd = "'" + cli_path() + "' " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    ProcessResult r;
    const auto t0 = std::chrono::steady_clock::now();
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        r.output.append(buf.data(), n);
    const int status = pclose(p);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace cvxspace::testing
