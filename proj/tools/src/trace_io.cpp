#include "nmpg/harness/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace nmpg::harness {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_double(r.psi) << ',' << format_double(r.reference) << ','
        << format_double(r.gamma) << ',' << r.backtracks << ',' << format_double(r.step_norm)
        << ',' << format_double(r.residual) << ',' << format_double(r.xi) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(out, trace);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error("trace: missing or unexpected header");
  }
  Trace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected 8 fields");
    }
    try {
      IterationRecord r;
      r.k = std::stoull(cells[0]);
      r.psi = std::stod(cells[1]);
      r.reference = std::stod(cells[2]);
      r.gamma = std::stod(cells[3]);
      r.backtracks = std::stoull(cells[4]);
      r.step_norm = std::stod(cells[5]);
      r.residual = std::stod(cells[6]);
      r.xi = std::stod(cells[7]);
      trace.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": bad number");
    }
  }
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_trace_csv(in);
}

}  // namespace nmpg::harness
