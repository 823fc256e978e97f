#pragma once

#include <iosfwd>

#include "vesselkit/config.hpp"

namespace vesselkit {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSpectraOverlap = 3;
inline constexpr int kExitSingularRegion = 4;

struct RunOptions {
    std::string config_path;
    std::string out_dir;  // overrides config output.dir when non-empty
    bool halving = false; // forces convergence reruns in verify
};

int cmd_classify(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// %.17g with lowercase nan; the fixed CSV float format.
std::string format_double(double v);

}  // namespace vesselkit
