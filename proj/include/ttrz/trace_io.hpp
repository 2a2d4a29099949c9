#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ttrz/nn.hpp"
#include "ttrz/rgd.hpp"

namespace ttrz {

/// One line of a trace file: ordered key=value pairs.
using TraceRecord = std::vector<std::pair<std::string, std::string>>;

/// Shortest-round-trip decimal rendering of a double (17 significant
/// digits); parsing it back reproduces the value exactly.
std::string format_double(double x);

void write_records(const std::string& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_records(const std::string& path);

std::vector<TraceRecord> records_from_trace(const ConvergenceTrace& trace);
ConvergenceTrace trace_from_records(const std::vector<TraceRecord>& records);

std::vector<TraceRecord> records_from_epochs(const std::vector<EpochStats>& epochs);
std::vector<EpochStats> epochs_from_records(const std::vector<TraceRecord>& records);

} // namespace ttrz
