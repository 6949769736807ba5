#include "dimpute/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "dimpute/rng.hpp"

namespace dimpute {

namespace {

DimensionSchema make_schema(const SyntheticConfig& config) {
  DimensionSchema schema;
  schema.id_attribute = "Id";
  schema.attributes.push_back({"Id", AttrKind::Text});
  for (std::size_t i = 0; i < config.noise_attributes; ++i) {
    schema.attributes.push_back({"Note" + std::to_string(i + 1), AttrKind::Text});
  }
  schema.attributes.push_back({"Level2", AttrKind::Text});
  if (config.level_weaks) schema.attributes.push_back({"Level2Desc", AttrKind::Text});
  schema.attributes.push_back({"Level3", AttrKind::Text});
  if (config.level_weaks) schema.attributes.push_back({"Level3Desc", AttrKind::Text});

  HierarchyDef h;
  h.name = "H1";
  h.parameters = {"Id", "Level2", "Level3"};
  for (std::size_t i = 0; i < config.noise_attributes; ++i) {
    h.weak["Id"].push_back("Note" + std::to_string(i + 1));
  }
  if (config.level_weaks) {
    h.weak["Level2"].push_back("Level2Desc");
    h.weak["Level3"].push_back("Level3Desc");
  }
  schema.hierarchies.push_back(std::move(h));
  return schema;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  if (config.rows == 0 || config.group_count == 0 || config.children_per_group == 0) {
    throw std::invalid_argument("synthetic: rows, groups and children must be positive");
  }
  if (config.dominance < 0.0 || config.dominance > 1.0) {
    throw std::invalid_argument("synthetic: dominance outside [0, 1]");
  }

  DimensionSchema schema = make_schema(config);
  std::vector<std::string> columns;
  for (const auto& a : schema.attributes) columns.push_back(a.name);
  Table table(columns, 0);

  // Cumulative group weights (zipf over group index when skew > 0).
  std::vector<double> cumulative(config.group_count);
  double total = 0.0;
  for (std::size_t g = 0; g < config.group_count; ++g) {
    total += 1.0 / std::pow(static_cast<double>(g + 1), config.group_skew);
    cumulative[g] = total;
  }

  Rng rng(mix_seed(config.seed, 0xd1));
  for (std::size_t r = 0; r < config.rows; ++r) {
    double u = rng.next_unit() * total;
    std::size_t g = 0;
    while (g + 1 < config.group_count && u > cumulative[g]) ++g;

    std::size_t child = 0;
    if (config.children_per_group > 1 && rng.next_unit() >= config.dominance) {
      child = 1 + rng.next_below(config.children_per_group - 1);
    }

    std::string group = "G" + std::to_string(g);
    std::string level2 = group + "C" + std::to_string(child);

    std::vector<Cell> cells;
    cells.emplace_back("R" + std::to_string(r));
    for (std::size_t i = 0; i < config.noise_attributes; ++i) {
      cells.emplace_back("N" + std::to_string(i + 1) + "_" +
                         std::to_string(rng.next_below(config.noise_cardinality)));
    }
    cells.emplace_back(level2);
    if (config.level_weaks) cells.emplace_back("D2_" + level2);
    cells.emplace_back(group);
    if (config.level_weaks) cells.emplace_back("D3_" + group);
    table.append_row(std::move(cells));
  }
  return {std::move(schema), std::move(table)};
}

std::string synthetic_schema_json(const SyntheticConfig& config) {
  DimensionSchema schema = make_schema(config);
  nlohmann::ordered_json doc;
  doc["id"] = schema.id_attribute;
  for (const auto& a : schema.attributes) {
    doc["attributes"].push_back({{"name", a.name},
                                 {"kind", a.kind == AttrKind::Numeric ? "numeric" : "text"}});
  }
  for (const auto& h : schema.hierarchies) {
    nlohmann::ordered_json hj;
    hj["name"] = h.name;
    hj["parameters"] = h.parameters;
    if (!h.weak.empty()) {
      for (const auto& [param, weaks] : h.weak) hj["weak"][param] = weaks;
    }
    doc["hierarchies"].push_back(std::move(hj));
  }
  return doc.dump(2) + "\n";
}

}  // namespace dimpute
