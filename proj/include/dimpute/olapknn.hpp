#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dimpute/distance.hpp"
#include "dimpute/schema.hpp"
#include "dimpute/table.hpp"

namespace dimpute {

// A continuous missing parameter group: a maximal run of adjacent parameters
// of one hierarchy, all missing in one row. Indices are positions in
// HierarchyDef::parameters; the span never includes the id (position 0).
// p_low/p_high are the immediate neighbors of the span when they exist.
struct CGDescriptor {
  std::string hierarchy;
  std::size_t span_begin = 1;
  std::size_t span_size = 1;
  std::optional<std::size_t> p_low;
  std::optional<std::size_t> p_high;

  std::size_t span_end() const { return span_begin + span_size; }  // exclusive
};

// Accumulated vote weight per candidate replacement tuple (one value per span
// parameter). std::map ordering makes the argmax tie-break lexicographic.
using ValueWeightMap = std::map<std::vector<std::string>, double>;

// Per p_low value, the accumulated winning tuples of every processed instance.
using LowMap = std::map<std::string, ValueWeightMap>;

// Rows whose span parameters are all missing while p_low and p_high (when
// present) are not.
std::vector<std::size_t> find_missing_instances(const Table& table,
                                                const HierarchyDef& hierarchy,
                                                const CGDescriptor& cg);

enum class CandidateMode { Parameter, Weak };

// Parameter mode: rows with every span parameter non-missing, restricted to
// rows sharing the missing row's p_high value when the group has one. Weak
// mode: rows where `weak_attr` is non-missing.
std::vector<std::size_t> get_candidate_list(const Table& table, const HierarchyDef& hierarchy,
                                            const CGDescriptor& cg, std::size_t missing_row,
                                            CandidateMode mode,
                                            const std::string& weak_attr = {});

// Distance-weighted vote: distances from the missing row to every candidate,
// k nearest kept (ties by row order), each weighted by
// (d_far - d) / (d_far - d_near), all 1 when d_far == d_near, summed per
// distinct tuple drawn from `value_cols`. Candidates without a computable
// distance are dropped; the map is empty when none remains.
ValueWeightMap get_value_weight_map(const DistanceEvaluator& eval, std::size_t missing_row,
                                    const std::vector<std::size_t>& candidates, int k,
                                    const std::vector<std::size_t>& value_cols,
                                    const std::string& target_attr);

// Argmax tuple of a non-empty map (ties: lexicographically smallest tuple).
const std::pair<const std::vector<std::string>, double>& top_entry(const ValueWeightMap& map);

// Without p_low: writes the winning tuple into the missing row's span and
// completes the span parameters' weak attributes from rows sharing the new
// values. With p_low: accumulates the winning tuple and its weight into
// lowMap under the row's p_low value and leaves the table untouched.
// Returns the number of cells filled.
std::size_t replace_no_plow(Table& table, const Table& snapshot, const DimensionSchema& schema,
                            const HierarchyDef& hierarchy, const CGDescriptor& cg,
                            LowMap& low_map, const ValueWeightMap& vote, std::size_t missing_row);

// For each p_low value, writes the accumulated winner into the span cells of
// every row sharing that value that is still missing on the whole span, then
// completes weak attributes. Keeps p_low -> span functional.
std::size_t replace_plow(Table& table, const DimensionSchema& schema,
                         const HierarchyDef& hierarchy, const CGDescriptor& cg,
                         const LowMap& low_map);

struct PassEvent {
  std::string hierarchy;
  std::size_t group_size = 0;
  std::size_t span_begin = 0;
  std::size_t instances = 0;
};

struct ImputeConfig {
  int k = 5;
  LevelWeightMode level_weight = LevelWeightMode::Incremental;
  HierWeightMode hierarchy_weight = HierWeightMode::Dependency;
  std::uint64_t seed = 0;
  SamplingConfig sampling;
  const EmbeddingStore* embeddings = nullptr;
};

struct EngineContext {
  Table& table;
  const DimensionSchema& schema;
  const DistanceModel& model;
  const AttributeDistanceProvider& provider;
  int k = 5;
  SamplingConfig sampling;
  std::vector<PassEvent>* trace = nullptr;
};

// KNN pass over every continuous missing group of the hierarchy, group sizes
// ascending, span positions ascending. Candidate lists and distances are
// evaluated against a snapshot taken at the start of each (size, span) pass;
// replacements with a p_low neighbor are batched per p_low value.
std::size_t impute_parameters(EngineContext& ctx, const HierarchyDef& hierarchy);

// Completes remaining missing weak attributes: direct copy when the parameter
// value is known and another row witnesses it, otherwise a distance-weighted
// vote over rows carrying the weak attribute (batched per parameter value
// when the parameter is known).
std::size_t impute_weak(EngineContext& ctx, const HierarchyDef& hierarchy);

struct PipelineReport {
  std::size_t rows = 0;
  std::size_t missing_before = 0;
  std::size_t missing_after = 0;
  std::size_t hierarchical_fills = 0;
  std::size_t parameter_fills = 0;
  std::size_t weak_fills = 0;
  double hierarchical_seconds = 0.0;
  double knn_seconds = 0.0;
  double total_seconds = 0.0;
};

// Full pipeline: functional-dependency imputation, then per hierarchy the
// parameter and weak KNN imputation. The distance model is built once, after
// the dependency stage. Passing a provider overrides the standard
// numeric/text provider (used by fixtures and tests).
PipelineReport h_olapknn(Table& table, const DimensionSchema& schema,
                         const ImputeConfig& config = {},
                         const AttributeDistanceProvider* provider = nullptr,
                         std::vector<PassEvent>* trace = nullptr,
                         std::ostream* warnings = nullptr);

}  // namespace dimpute
