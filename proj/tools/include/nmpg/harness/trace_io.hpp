#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nmpg/types.hpp"

namespace nmpg::harness {

inline constexpr const char* kTraceHeader = "k,psi,reference,gamma,backtracks,step_norm,residual,xi";

/// Shortest text that round-trips a double: printf("%.17g").
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

/// Inverse of write_trace_csv. Throws std::runtime_error on malformed input.
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace nmpg::harness
