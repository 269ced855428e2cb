#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace causelog::cli {

/// Runs the command line given args (without the program name).
/// Exit codes: 0 success/true, 1 usage/parse/IO error, 2 tampered log,
/// 3 anomalies found under --fail-on-anomaly, 4 negative verdict.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causelog::cli
