#include "miss/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "miss/common.hpp"

namespace miss {
namespace {

std::optional<double> ParseReal(const std::string& text) {
  // Leading/trailing blanks are tolerated; everything else must be consumed.
  auto begin = text.find_first_not_of(" \t");
  auto end = text.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return std::nullopt;
  const char* first = text.data() + begin;
  const char* last = text.data() + end + 1;
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

std::size_t RawTable::num_rows() const {
  if (!columns.empty()) return columns.front().cells.size();
  return labels.size();
}

const RawColumn* RawTable::FindColumn(const std::string& name) const {
  for (const auto& column : columns) {
    if (column.name == name) return &column;
  }
  return nullptr;
}

std::vector<std::string> RawTable::DistinctLabels() const {
  std::set<std::string> distinct(labels.begin(), labels.end());
  return {distinct.begin(), distinct.end()};
}

RawTable RawTable::Subset(std::span<const std::size_t> rows) const {
  RawTable out;
  out.label_column = label_column;
  out.columns.reserve(columns.size());
  for (const auto& column : columns) {
    RawColumn c{column.name, column.kind, {}, {}};
    c.cells.reserve(rows.size());
    for (std::size_t r : rows) c.cells.push_back(column.cells.at(r));
    if (column.kind == ColumnKind::kNumeric) {
      c.numbers.reserve(rows.size());
      for (std::size_t r : rows) c.numbers.push_back(column.numbers.at(r));
    }
    out.columns.push_back(std::move(c));
  }
  if (has_labels()) {
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(labels.at(r));
  }
  return out;
}

std::vector<std::vector<std::string>> ParseCsvRecords(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool any_char_in_record = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (any_char_in_record) {
      end_field();
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
    any_char_in_record = false;
  };

  char ch;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started) {
          in_quotes = true;
          field_started = true;
          any_char_in_record = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        any_char_in_record = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
        any_char_in_record = true;
    }
  }
  if (in_quotes) throw Error("csv: unterminated quoted field");
  end_record();
  return records;
}

RawTable ReadCsv(std::istream& in, const CsvOptions& options) {
  auto records = ParseCsvRecords(in);
  if (records.empty()) throw Error("csv: missing header row");
  const auto& header = records.front();
  const std::size_t width = header.size();

  std::optional<std::size_t> label_index;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) {
      throw Error("csv: unknown label column '" + options.label_column + "'");
    }
    label_index = static_cast<std::size_t>(it - header.begin());
  }
  for (const auto& [name, kind] : options.kinds) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw Error("csv: kind override for unknown column '" + name + "'");
    }
  }

  const std::size_t n = records.size() - 1;
  if (n == 0 && options.require_training_shape) throw Error("csv: zero data rows");
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      std::ostringstream msg;
      msg << "csv: ragged row " << r << " (" << records[r].size() << " fields, header has "
          << width << ")";
      throw Error(msg.str());
    }
  }

  RawTable table;
  for (std::size_t c = 0; c < width; ++c) {
    if (label_index && c == *label_index) continue;
    RawColumn column;
    column.name = header[c];
    column.cells.reserve(n);
    for (std::size_t r = 1; r <= n; ++r) {
      const std::string& cell = records[r][c];
      if (cell.empty()) {
        column.cells.emplace_back(std::nullopt);
      } else {
        column.cells.emplace_back(cell);
      }
    }

    auto override_it = options.kinds.find(column.name);
    std::vector<std::optional<double>> parsed;
    parsed.reserve(n);
    bool all_numeric = true;
    for (const auto& cell : column.cells) {
      if (!cell) {
        parsed.emplace_back(std::nullopt);
        continue;
      }
      auto value = ParseReal(*cell);
      if (!value) all_numeric = false;
      parsed.push_back(value);
    }
    if (override_it != options.kinds.end()) {
      column.kind = override_it->second;
      if (column.kind == ColumnKind::kNumeric && !all_numeric) {
        throw Error("csv: column '" + column.name + "' declared numeric but holds text");
      }
    } else {
      column.kind = all_numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical;
    }
    if (column.kind == ColumnKind::kNumeric) column.numbers = std::move(parsed);
    table.columns.push_back(std::move(column));
  }

  if (label_index) {
    table.label_column = options.label_column;
    table.labels.reserve(n);
    for (std::size_t r = 1; r <= n; ++r) {
      const std::string& cell = records[r][*label_index];
      if (cell.empty()) {
        throw Error("csv: missing label in data row " + std::to_string(r));
      }
      table.labels.push_back(cell);
    }
    if (options.require_training_shape && table.DistinctLabels().size() < 2) {
      throw Error("csv: label column needs at least 2 distinct values");
    }
  }
  return table;
}

RawTable LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("csv: cannot open '" + path.string() + "'");
  return ReadCsv(in, options);
}

std::vector<std::string> ReadCsvHeader(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("csv: cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::istringstream header_stream(line + "\n");
  auto records = ParseCsvRecords(header_stream);
  if (records.empty()) return {};
  return records.front();
}

std::string CsvEscape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace miss
