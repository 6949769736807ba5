#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dimpute/schema.hpp"

namespace dimpute {

// A cell either holds a value or is missing.
using Cell = std::optional<std::string>;

struct CsvOptions {
  std::string missing_token;  // cells equal to this load as missing
  char delimiter = ',';
};

// Row-major instance matrix aligned to a schema: columns follow the schema's
// attribute order, the id column is complete and duplicate-free. Imputation
// only ever turns missing cells into values; fill() enforces that.
class Table {
 public:
  Table() = default;
  Table(std::vector<std::string> columns, std::size_t id_column);

  static Table load_csv(std::istream& in, const DimensionSchema& schema,
                        const CsvOptions& options = {});
  static Table load_csv_file(const std::string& path, const DimensionSchema& schema,
                             const CsvOptions& options = {});
  void write_csv(std::ostream& out, const CsvOptions& options = {}) const;
  void write_csv_file(const std::string& path, const CsvOptions& options = {}) const;

  // Independent deep copy; writes to either side are invisible to the other.
  Table snapshot() const { return *this; }

  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t id_column() const { return id_column_; }

  std::size_t column_index(const std::string& name) const;  // throws if absent
  std::optional<std::size_t> find_column(const std::string& name) const;

  const Cell& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  bool is_missing(std::size_t row, std::size_t col) const { return !rows_[row][col].has_value(); }
  const std::string& value(std::size_t row, std::size_t col) const { return *rows_[row][col]; }
  const std::vector<Cell>& row(std::size_t r) const { return rows_[r]; }

  // Fills a missing cell; throws std::logic_error if the cell already holds
  // a value (non-missing cells are never overwritten).
  void fill(std::size_t row, std::size_t col, std::string value);

  // Blanks a cell (missingness injection only; not part of imputation).
  Cell clear_cell(std::size_t row, std::size_t col);

  void append_row(std::vector<Cell> cells);  // enforces id presence/uniqueness

  std::size_t missing_count() const;
  std::optional<std::size_t> row_by_id(const std::string& id) const;

  bool operator==(const Table&) const = default;

 private:
  std::vector<std::string> columns_;
  std::size_t id_column_ = 0;
  std::vector<std::vector<Cell>> rows_;
  std::unordered_map<std::string, std::size_t> column_lookup_;

  void rebuild_lookup();
};

// Throws std::runtime_error when the table's columns do not match the
// schema's attributes (names and order).
void check_conformance(const DimensionSchema& schema, const Table& table);

// Low-level CSV record access (RFC-4180 style quoting).
std::vector<std::vector<std::string>> read_csv_records(std::istream& in, char delimiter);
void write_csv_record(std::ostream& out, const std::vector<std::string>& fields, char delimiter);

}  // namespace dimpute
