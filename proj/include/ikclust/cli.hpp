#pragma once

#include <string>
#include <vector>

namespace ikclust {

// Entry point behind the ikclust binary: cluster, explain, refine, evaluate,
// benchmark, generate. args excludes the program name. Returns the process
// exit status (0 only when every requested output was written).
int run_cli(const std::vector<std::string>& args);

}  // namespace ikclust
