#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dimpute/distance.hpp"
#include "dimpute/schema.hpp"
#include "dimpute/table.hpp"

namespace testsupport {

using namespace dimpute;

inline std::string data_path(const std::string& name) {
  return std::string(DIMPUTE_DATA_DIR) + "/" + name;
}

inline DimensionSchema product_schema() {
  return parse_schema_file(data_path("product.schema.json"));
}

inline Table product_table(const DimensionSchema& schema) {
  return Table::load_csv_file(data_path("product.csv"), schema);
}

// Attribute distances pinned by the product fixture: Brand pair 0.71,
// Name pair 0.8, everything else either equal (0) or irrelevant.
inline TableDrivenProvider product_provider() {
  TableDrivenProvider provider(1.0);
  provider.set("Brand", "BrandA", "BrandB", 0.71);
  provider.set("Brand", "BrandA", "BrandC", 0.9);
  provider.set("Brand", "BrandB", "BrandC", 0.9);
  provider.set("Name", "Choco", "Cookie", 0.8);
  provider.set("Name", "Choco", "Water", 0.85);
  provider.set("Name", "Choco", "Soda", 0.85);
  return provider;
}

struct AttrSpec {
  std::string name;
  AttrKind kind = AttrKind::Text;
};

inline DimensionSchema make_schema(const std::string& id, const std::vector<AttrSpec>& attrs,
                                   std::vector<HierarchyDef> hierarchies) {
  DimensionSchema schema;
  schema.id_attribute = id;
  for (const auto& a : attrs) schema.attributes.push_back({a.name, a.kind});
  schema.hierarchies = std::move(hierarchies);
  return schema;
}

// Rows as optional strings; nullopt = missing.
inline Table make_table(const DimensionSchema& schema,
                        const std::vector<std::vector<Cell>>& rows) {
  std::vector<std::string> columns;
  for (const auto& a : schema.attributes) columns.push_back(a.name);
  Table table(columns, *schema.attribute_index(schema.id_attribute));
  for (const auto& r : rows) table.append_row(r);
  return table;
}

// Brute-force fixpoint of the functional-dependency fill: which missing cells
// have a witness, and the value the first witness carries. Written with plain
// row scans, independent of the library's pass/index structure.
inline std::map<std::pair<std::size_t, std::size_t>, std::string> fd_fill_oracle(
    Table table, const DimensionSchema& schema) {
  std::map<std::pair<std::size_t, std::size_t>, std::string> filled;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& h : schema.hierarchies) {
      for (std::size_t l = 3; l <= h.parameters.size(); ++l) {
        std::size_t target = table.column_index(h.parameters[l - 1]);
        for (std::size_t r = 0; r < table.row_count(); ++r) {
          if (!table.is_missing(r, target)) continue;
          bool done = false;
          for (std::size_t lw = 2; lw < l && !done; ++lw) {
            std::size_t witness = table.column_index(h.parameters[lw - 1]);
            if (table.is_missing(r, witness)) continue;
            for (std::size_t other = 0; other < table.row_count(); ++other) {
              if (other == r || table.is_missing(other, witness) ||
                  table.is_missing(other, target)) {
                continue;
              }
              if (table.value(other, witness) == table.value(r, witness)) {
                table.fill(r, target, table.value(other, target));
                filled[{r, target}] = table.value(other, target);
                changed = true;
                done = true;
                break;
              }
            }
          }
        }
      }
      for (const auto& parameter : h.parameters) {
        std::size_t param = table.column_index(parameter);
        for (const auto& w : h.weak_of(parameter)) {
          std::size_t weak = table.column_index(w);
          for (std::size_t r = 0; r < table.row_count(); ++r) {
            if (!table.is_missing(r, weak) || table.is_missing(r, param)) continue;
            for (std::size_t other = 0; other < table.row_count(); ++other) {
              if (other == r || table.is_missing(other, param) || table.is_missing(other, weak)) {
                continue;
              }
              if (table.value(other, param) == table.value(r, param)) {
                table.fill(r, weak, table.value(other, weak));
                filled[{r, weak}] = table.value(other, weak);
                changed = true;
                break;
              }
            }
          }
        }
      }
    }
  }
  return filled;
}

// Independent mutual information over explicit pairs.
inline double mi_oracle(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::map<std::string, double> px, py;
  std::map<std::pair<std::string, std::string>, double> pxy;
  for (const auto& p : pairs) {
    px[p.first] += 1.0;
    py[p.second] += 1.0;
    pxy[p] += 1.0;
  }
  double n = static_cast<double>(pairs.size());
  double mi = 0.0;
  for (const auto& [p, c] : pxy) {
    mi += (c / n) * std::log((c / n) / ((px[p.first] / n) * (py[p.second] / n)));
  }
  return mi;
}

// Brute-force check that a -> b is a function on rows where both are present.
inline bool is_function(const Table& table, std::size_t a, std::size_t b) {
  for (std::size_t r1 = 0; r1 < table.row_count(); ++r1) {
    if (table.is_missing(r1, a) || table.is_missing(r1, b)) continue;
    for (std::size_t r2 = r1 + 1; r2 < table.row_count(); ++r2) {
      if (table.is_missing(r2, a) || table.is_missing(r2, b)) continue;
      if (table.value(r1, a) == table.value(r2, a) &&
          table.value(r1, b) != table.value(r2, b)) {
        return false;
      }
    }
  }
  return true;
}

inline std::string to_csv(const Table& table, const CsvOptions& options = {}) {
  std::ostringstream out;
  table.write_csv(out, options);
  return out.str();
}

inline Table from_csv(const std::string& text, const DimensionSchema& schema,
                      const CsvOptions& options = {}) {
  std::istringstream in(text);
  return Table::load_csv(in, schema, options);
}

}  // namespace testsupport
