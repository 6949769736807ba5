#include "dimpute/hier_impute.hpp"

#include <unordered_map>

namespace dimpute {

namespace {

// value of the witness column -> value of the target column in the first row
// (table order) carrying both.
using WitnessMap = std::unordered_map<std::string, const std::string*>;

WitnessMap build_witness_map(const Table& table, std::size_t witness_col,
                             std::size_t target_col) {
  WitnessMap map;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (table.is_missing(r, witness_col) || table.is_missing(r, target_col)) continue;
    map.try_emplace(table.value(r, witness_col), &table.value(r, target_col));
  }
  return map;
}

}  // namespace

std::size_t hierarchical_imputation(Table& table, const DimensionSchema& schema) {
  check_conformance(schema, table);
  std::size_t total = 0;
  for (;;) {
    const Table snapshot = table.snapshot();
    std::size_t fills = 0;

    for (const auto& h : schema.hierarchies) {
      const std::size_t levels = h.parameters.size();

      // Missing parameters: copy from any row sharing a non-missing
      // lower-level parameter value (closest level first; the id is excluded
      // since it is unique).
      for (std::size_t l = 3; l <= levels; ++l) {
        std::size_t target_col = table.column_index(h.parameters[l - 1]);
        std::vector<std::optional<WitnessMap>> witness_by_level(l);  // index = level
        for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
          if (!snapshot.is_missing(r, target_col) || !table.is_missing(r, target_col)) continue;
          for (std::size_t lw = l - 1; lw >= 2; --lw) {
            std::size_t witness_col = table.column_index(h.parameters[lw - 1]);
            if (snapshot.is_missing(r, witness_col)) continue;
            auto& map = witness_by_level[lw];
            if (!map) map = build_witness_map(snapshot, witness_col, target_col);
            auto hit = map->find(snapshot.value(r, witness_col));
            if (hit != map->end()) {
              table.fill(r, target_col, *hit->second);
              ++fills;
              break;
            }
          }
        }
      }

      // Missing weak attributes: copy from any row sharing the parameter's
      // value.
      for (const auto& parameter : h.parameters) {
        for (const auto& w : h.weak_of(parameter)) {
          std::size_t weak_col = table.column_index(w);
          std::size_t param_col = table.column_index(parameter);
          std::optional<WitnessMap> map;
          for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
            if (!snapshot.is_missing(r, weak_col) || !table.is_missing(r, weak_col)) continue;
            if (snapshot.is_missing(r, param_col)) continue;
            if (!map) map = build_witness_map(snapshot, param_col, weak_col);
            auto hit = map->find(snapshot.value(r, param_col));
            if (hit != map->end()) {
              table.fill(r, weak_col, *hit->second);
              ++fills;
            }
          }
        }
      }
    }

    total += fills;
    if (fills == 0) break;
  }
  return total;
}

}  // namespace dimpute
