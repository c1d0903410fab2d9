#pragma once

#include "tilq_cli/config.hpp"

#include <iosfwd>

namespace tilq::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_error = 1,  ///< I/O or unexpected failure
    exit_validation = 2,
    exit_nonconvergence = 3,
    exit_verification = 4,
};

struct RunOptions {
    bool quiet = false;
};

/// Executes the configured mode and writes its artifacts to cfg.out_dir.
int run(const RunConfig& cfg, std::ostream& log, const RunOptions& opts = {});

/// Full command line: flag parsing, config loading, TILQ_THREADS, run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tilq::cli
