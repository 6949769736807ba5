#pragma once

#include <cstdint>
#include <string>

#include "dimpute/schema.hpp"
#include "dimpute/table.hpp"

namespace dimpute {

// Generator for strict three-level benchmark dimensions. Level-2 values are
// partitioned among level-3 groups (so the hierarchy is strict by
// construction); within each group one child value occurs with frequency
// `dominance`. Optional weak attributes are functions of their parameter;
// noise attributes are random-token weak attributes of the id.
struct SyntheticConfig {
  std::size_t rows = 1000;
  std::size_t group_count = 5;         // distinct level-3 values
  std::size_t children_per_group = 4;  // distinct level-2 values per group
  double dominance = 0.9;              // within-group frequency of the top child
  double group_skew = 0.0;             // zipf exponent over group sizes (0 = uniform)
  std::size_t noise_attributes = 0;
  std::size_t noise_cardinality = 50;
  bool level_weaks = false;  // add one weak attribute on level 2 and level 3
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  DimensionSchema schema;
  Table table;
};

SyntheticDataset generate_synthetic(const SyntheticConfig& config);

// JSON schema document matching generate_synthetic's schema (for `gen`).
std::string synthetic_schema_json(const SyntheticConfig& config);

}  // namespace dimpute
