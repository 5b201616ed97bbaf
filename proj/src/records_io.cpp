#include "attnalloc/records_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "attnalloc/errors.hpp"

namespace attnalloc {

namespace {

std::array<long long, 3> parse_row(std::string_view line, const std::string& source, std::size_t line_no) {
  std::array<long long, 3> fields{};
  std::size_t field = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view token = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (field >= fields.size()) throw ParseError(source, line_no, "expected 3 fields");
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
      throw ParseError(source, line_no, "field " + std::to_string(field + 1) + " is not an integer: '" +
                                            std::string(token) + "'");
    fields[field++] = value;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (field != fields.size()) throw ParseError(source, line_no, "expected 3 fields");
  return fields;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_records_csv(std::ostream& out, const SparseAttentionRecords& records) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records.records()) out << r.user << ',' << r.object << ',' << r.level << '\n';
}

SparseAttentionRecords read_records_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw ParseError(source, line_no, "expected header '" + std::string(kRecordsHeader) + "'");

  SparseAttentionRecords records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = parse_row(line, source, line_no);
    if (f[0] < 0 || f[1] < 0) throw ParseError(source, line_no, "negative id");
    if (f[2] < kMinLevel || f[2] > kMaxLevel)
      throw ParseError(source, line_no, "level " + std::to_string(f[2]) + " outside 1..5");
    const AttentionRecord rec{static_cast<UserId>(f[0]), static_cast<ObjectId>(f[1]), static_cast<int>(f[2])};
    if (records.contains(rec.user, rec.object))
      throw ParseError(source, line_no, "duplicate pair (" + std::to_string(rec.user) + "," + std::to_string(rec.object) + ")");
    records.insert(rec);
  }
  return records;
}

void save_records(const SparseAttentionRecords& records, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_records_csv(out, records);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SparseAttentionRecords load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  return read_records_csv(in, path.string());
}

void save_ground_truth(const Matrix<int>& levels, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kRecordsHeader << '\n';
  for (int u = 0; u < levels.rows(); ++u)
    for (int o = 0; o < levels.cols(); ++o) out << u << ',' << o << ',' << levels(u, o) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Matrix<int> to_level_matrix(const SparseAttentionRecords& records, int num_users, int num_objects) {
  Matrix<int> levels(num_users, num_objects, 0);
  for (const auto& r : records.records()) {
    if (r.user >= num_users || r.object >= num_objects)
      throw ConfigError("record (" + std::to_string(r.user) + "," + std::to_string(r.object) + ") outside matrix");
    levels(r.user, r.object) = r.level;
  }
  for (int u = 0; u < num_users; ++u)
    for (int o = 0; o < num_objects; ++o)
      if (levels(u, o) == 0)
        throw ConfigError("ground truth is missing pair (" + std::to_string(u) + "," + std::to_string(o) + ")");
  return levels;
}

}  // namespace attnalloc
