#pragma once

// Per-round metrics as CSV. Column order:
//   round, loss, gap_to_fstar, uploads_attempted, uploads_received, outages,
//   participation_pct, bandwidth_used_hz, cumulative_uploads
// Reals are written as shortest round-trip decimals; gap_to_fstar is empty
// when no optimum is known.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cefl/engine.hpp"

namespace cefl {

inline constexpr std::string_view kCsvHeader =
    "round,loss,gap_to_fstar,uploads_attempted,uploads_received,outages,participation_pct,"
    "bandwidth_used_hz,cumulative_uploads";

struct CsvRow {
  std::size_t round = 0;
  double loss = 0.0;
  std::optional<double> gap;
  std::size_t uploads_attempted = 0;
  std::size_t uploads_received = 0;
  std::size_t outages = 0;
  double participation_pct = 0.0;
  double bandwidth_used_hz = 0.0;
  std::size_t cumulative_uploads = 0;

  bool operator==(const CsvRow&) const = default;
};

CsvRow to_row(const RoundTrace& trace);

void write_csv(std::span<const RoundTrace> traces, std::ostream& out);

/// Throws std::runtime_error naming the path when the file cannot be written.
void emit_csv(std::span<const RoundTrace> traces, const std::filesystem::path& path);

std::vector<CsvRow> parse_csv(std::string_view text);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

}  // namespace cefl
