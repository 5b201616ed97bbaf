#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "attnalloc/attention_data.hpp"

namespace attnalloc {

inline constexpr const char* kRecordsHeader = "user_id,object_id,level";

void write_records_csv(std::ostream& out, const SparseAttentionRecords& records);
/// Accepts sparse records or a dense ground-truth table (same header).
/// Throws ParseError naming the offending line.
SparseAttentionRecords read_records_csv(std::istream& in, const std::string& source = "<stream>");

void save_records(const SparseAttentionRecords& records, const std::filesystem::path& path);
SparseAttentionRecords load_records(const std::filesystem::path& path);

/// Dense table, one row per (user, object).
void save_ground_truth(const Matrix<int>& levels, const std::filesystem::path& path);
/// Converts a complete record set into a dense level matrix. Throws ConfigError if any pair is missing.
Matrix<int> to_level_matrix(const SparseAttentionRecords& records, int num_users, int num_objects);

}  // namespace attnalloc
