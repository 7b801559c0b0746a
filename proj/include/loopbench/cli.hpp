// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace loopbench {

/// Entry point of the `loopbench` tool. Returns the process exit status:
/// 0 on success, 2 for usage/config errors, 1 for anything else. Errors are
/// reported as a single line: error kind=<kind> message="<text>".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loopbench
