#include "cefl/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cefl/error.hpp"

namespace cefl {
namespace {

template <typename T>
void put(std::string& line, T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

template <typename T>
T get(std::string_view field, std::size_t line_no) {
  T v{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw InvalidInput("csv line " + std::to_string(line_no) + ": bad field '" +
                       std::string(field) + "'");
  }
  return v;
}

}  // namespace

CsvRow to_row(const RoundTrace& t) {
  return {t.round,           t.loss,    t.gap,
          t.uploads_attempted, t.uploads_received, t.outages,
          t.participation_pct, t.bandwidth_used_hz, t.cumulative_uploads};
}

void write_csv(std::span<const RoundTrace> traces, std::ostream& out) {
  std::string buf(kCsvHeader);
  buf.push_back('\n');
  for (const auto& t : traces) {
    const CsvRow r = to_row(t);
    put(buf, r.round);
    buf.push_back(',');
    put(buf, r.loss);
    buf.push_back(',');
    if (r.gap) put(buf, *r.gap);
    buf.push_back(',');
    put(buf, r.uploads_attempted);
    buf.push_back(',');
    put(buf, r.uploads_received);
    buf.push_back(',');
    put(buf, r.outages);
    buf.push_back(',');
    put(buf, r.participation_pct);
    buf.push_back(',');
    put(buf, r.bandwidth_used_hz);
    buf.push_back(',');
    put(buf, r.cumulative_uploads);
    buf.push_back('\n');
  }
  out << buf;
}

void emit_csv(std::span<const RoundTrace> traces, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(traces, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kCsvHeader) throw InvalidInput("csv header does not match the expected columns");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> f;
    while (true) {
      const auto comma = line.find(',');
      f.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (f.size() != 9) {
      throw InvalidInput("csv line " + std::to_string(line_no) + ": expected 9 fields");
    }
    CsvRow r;
    r.round = get<std::size_t>(f[0], line_no);
    r.loss = get<double>(f[1], line_no);
    if (!f[2].empty()) r.gap = get<double>(f[2], line_no);
    r.uploads_attempted = get<std::size_t>(f[3], line_no);
    r.uploads_received = get<std::size_t>(f[4], line_no);
    r.outages = get<std::size_t>(f[5], line_no);
    r.participation_pct = get<double>(f[6], line_no);
    r.bandwidth_used_hz = get<double>(f[7], line_no);
    r.cumulative_uploads = get<std::size_t>(f[8], line_no);
    rows.push_back(r);
  }
  if (!header_seen) throw InvalidInput("csv is empty");
  return rows;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace cefl
