#include "dimpute/table.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace dimpute {

// RFC-4180 style reader: quoted fields may contain the delimiter, doubled
// quotes and line breaks; records end at LF or CRLF.
std::vector<std::vector<std::string>> read_csv_records(std::istream& in, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      ++line;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) {
    throw std::runtime_error("csv parse error at line " + std::to_string(line) +
                             ": unterminated quoted field");
  }
  if (!field.empty() || !record.empty()) end_record();
  return records;
}

namespace {

bool needs_quoting(const std::string& value, char delimiter) {
  return value.find_first_of("\"\r\n") != std::string::npos ||
         value.find(delimiter) != std::string::npos;
}

void write_field(std::ostream& out, const std::string& value, char delimiter) {
  if (!needs_quoting(value, delimiter)) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields,
                      char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    write_field(out, fields[i], delimiter);
  }
  out << '\n';
}

Table::Table(std::vector<std::string> columns, std::size_t id_column)
    : columns_(std::move(columns)), id_column_(id_column) {
  if (id_column_ >= columns_.size()) throw std::logic_error("id column out of range");
  rebuild_lookup();
}

void Table::rebuild_lookup() {
  column_lookup_.clear();
  for (std::size_t i = 0; i < columns_.size(); ++i) column_lookup_[columns_[i]] = i;
}

std::size_t Table::column_index(const std::string& name) const {
  auto it = column_lookup_.find(name);
  if (it == column_lookup_.end()) throw std::runtime_error("no such column: " + name);
  return it->second;
}

std::optional<std::size_t> Table::find_column(const std::string& name) const {
  auto it = column_lookup_.find(name);
  if (it == column_lookup_.end()) return std::nullopt;
  return it->second;
}

void Table::fill(std::size_t row, std::size_t col, std::string value) {
  Cell& cell = rows_[row][col];
  if (cell.has_value()) {
    throw std::logic_error("attempt to overwrite non-missing cell (" + std::to_string(row) +
                           ", " + columns_[col] + ")");
  }
  cell = std::move(value);
}

Cell Table::clear_cell(std::size_t row, std::size_t col) {
  Cell previous = std::move(rows_[row][col]);
  rows_[row][col].reset();
  return previous;
}

void Table::append_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) {
    throw std::runtime_error("row has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(columns_.size()));
  }
  if (!cells[id_column_].has_value()) {
    throw std::runtime_error("missing id cell in row " + std::to_string(rows_.size() + 1));
  }
  rows_.push_back(std::move(cells));
}

std::size_t Table::missing_count() const {
  std::size_t count = 0;
  for (const auto& row : rows_) {
    for (const auto& cell : row) {
      if (!cell.has_value()) ++count;
    }
  }
  return count;
}

std::optional<std::size_t> Table::row_by_id(const std::string& id) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r][id_column_] == id) return r;
  }
  return std::nullopt;
}

Table Table::load_csv(std::istream& in, const DimensionSchema& schema,
                      const CsvOptions& options) {
  auto records = read_csv_records(in, options.delimiter);
  if (records.empty()) throw std::runtime_error("csv error: missing header row");

  const auto& header = records.front();
  std::vector<std::size_t> source_col(schema.attributes.size());
  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const std::string& name = schema.attributes[a].name;
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::runtime_error("csv error: missing required column '" + name + "'");
    }
    source_col[a] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::string> columns;
  columns.reserve(schema.attributes.size());
  for (const auto& a : schema.attributes) columns.push_back(a.name);
  auto id_index = schema.attribute_index(schema.id_attribute);
  if (!id_index) throw std::runtime_error("schema has no id attribute");

  Table table(columns, *id_index);
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    std::vector<Cell> cells(columns.size());
    for (std::size_t a = 0; a < columns.size(); ++a) {
      if (source_col[a] >= record.size()) {
        throw std::runtime_error("csv error: row " + std::to_string(r + 1) + " has " +
                                 std::to_string(record.size()) + " fields, column '" +
                                 columns[a] + "' absent");
      }
      const std::string& raw = record[source_col[a]];
      if (raw != options.missing_token) cells[a] = raw;
    }
    if (!cells[*id_index].has_value()) {
      throw std::runtime_error("csv error: missing id cell in row " + std::to_string(r + 1));
    }
    if (!seen_ids.insert(*cells[*id_index]).second) {
      throw std::runtime_error("csv error: duplicate id '" + *cells[*id_index] + "' in row " +
                               std::to_string(r + 1));
    }
    table.rows_.push_back(std::move(cells));
  }
  return table;
}

Table Table::load_csv_file(const std::string& path, const DimensionSchema& schema,
                           const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  return load_csv(in, schema, options);
}

void Table::write_csv(std::ostream& out, const CsvOptions& options) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out << options.delimiter;
    write_field(out, columns_[c], options.delimiter);
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << options.delimiter;
      write_field(out, row[c].has_value() ? *row[c] : options.missing_token, options.delimiter);
    }
    out << '\n';
  }
}

void Table::write_csv_file(const std::string& path, const CsvOptions& options) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_csv(out, options);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void check_conformance(const DimensionSchema& schema, const Table& table) {
  if (table.column_count() != schema.attributes.size()) {
    throw std::runtime_error("table/schema mismatch: " + std::to_string(table.column_count()) +
                             " columns vs " + std::to_string(schema.attributes.size()) +
                             " attributes");
  }
  for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
    if (table.columns()[i] != schema.attributes[i].name) {
      throw std::runtime_error("table/schema mismatch at column " + std::to_string(i) + ": '" +
                               table.columns()[i] + "' vs '" + schema.attributes[i].name + "'");
    }
  }
}

}  // namespace dimpute
