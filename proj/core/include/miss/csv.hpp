#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace miss {

enum class ColumnKind { kCategorical, kNumeric };

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;
  // Original cell text; nullopt marks a missing (empty) cell.
  std::vector<std::optional<std::string>> cells;
  // Parsed values, populated only for numeric columns.
  std::vector<std::optional<double>> numbers;

  bool IsMissing(std::size_t row) const { return !cells[row].has_value(); }
};

/// A typed, in-memory view of a CSV file: feature columns plus an optional
/// label column.
struct RawTable {
  std::vector<RawColumn> columns;
  std::string label_column;         // empty when the table carries no labels
  std::vector<std::string> labels;  // one per row when label_column is set

  std::size_t num_rows() const;
  bool has_labels() const { return !label_column.empty(); }
  const RawColumn* FindColumn(const std::string& name) const;

  /// Distinct label values in sorted order.
  std::vector<std::string> DistinctLabels() const;

  /// Rows `rows` (in the given order) of this table.
  RawTable Subset(std::span<const std::size_t> rows) const;
};

struct CsvOptions {
  // Column holding the class label. Empty means the file has no label column.
  std::string label_column;
  // Per-column kind overrides; other columns are inferred.
  std::map<std::string, ColumnKind> kinds;
  // Require at least one data row and two distinct labels.
  bool require_training_shape = true;
};

/// Splits RFC-4180 CSV text into records. Quoted fields may contain commas,
/// doubled quotes and newlines.
std::vector<std::vector<std::string>> ParseCsvRecords(std::istream& in);

RawTable ReadCsv(std::istream& in, const CsvOptions& options);
RawTable LoadCsv(const std::filesystem::path& path, const CsvOptions& options);

/// Reads only the header row of a CSV file.
std::vector<std::string> ReadCsvHeader(const std::filesystem::path& path);

/// Quotes a field when it contains a delimiter, quote or newline.
std::string CsvEscape(const std::string& field);

}  // namespace miss
