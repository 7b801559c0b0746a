// SPDX-License-Identifier: Apache-2.0
#include "loopbench/error.hpp"

namespace loopbench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_instance: return "invalid_instance";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::degenerate_series: return "degenerate_series";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::sequencing: return "sequencing";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::transport: return "transport";
    case ErrorKind::auth: return "auth";
    case ErrorKind::script_gap: return "script_gap";
    case ErrorKind::format: return "format";
    case ErrorKind::config: return "config";
    case ErrorKind::usage: return "usage";
    case ErrorKind::aborted_run: return "aborted_run";
  }
  return "unknown";
}

}  // namespace loopbench
