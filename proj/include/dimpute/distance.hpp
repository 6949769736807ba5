#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dimpute/embeddings.hpp"
#include "dimpute/schema.hpp"
#include "dimpute/table.hpp"

namespace dimpute {

// Distance between two attribute values, in [0, 1], symmetric, zero on equal
// values. Implementations must be safe for concurrent calls.
class AttributeDistanceProvider {
 public:
  virtual ~AttributeDistanceProvider() = default;
  virtual double distance(const AttributeDef& attr, const std::string& v1,
                          const std::string& v2) const = 0;
};

struct AttrStats {
  double min = 0.0;
  double max = 0.0;
  bool valid = false;  // false when the column has no non-missing numeric cell
};

using AttrStatsMap = std::map<std::string, AttrStats>;

// Min/max per numeric attribute over non-missing cells. Throws on a
// non-numeric cell in a numeric column.
AttrStatsMap build_attr_stats(const Table& table, const DimensionSchema& schema);

// |v1 - v2| / (max - min); 0 when max == min. Throws on non-numeric input.
double numeric_distance(double v1, double v2, double min, double max);
double numeric_distance(const std::string& v1, const std::string& v2, const AttrStats& stats);

// Levenshtein distance divided by the longer length; 0 for two empty strings.
double normalized_edit_distance(const std::string& a, const std::string& b);

// Semantic distance (1 - cosine)/2 over mean token vectors when every token
// of both values is in the store; otherwise normalized edit distance.
double text_distance(const std::string& v1, const std::string& v2,
                     const EmbeddingStore* embeddings = nullptr);

// Numeric attributes use the normalized numeric distance (stats captured at
// model build time); text attributes use the semantic distance with syntactic
// fallback.
class StandardProvider : public AttributeDistanceProvider {
 public:
  StandardProvider(AttrStatsMap stats, const EmbeddingStore* embeddings = nullptr)
      : stats_(std::move(stats)), embeddings_(embeddings) {}

  double distance(const AttributeDef& attr, const std::string& v1,
                  const std::string& v2) const override;

 private:
  AttrStatsMap stats_;
  const EmbeddingStore* embeddings_;
};

// Test fixture: distances looked up from an explicit symmetric pair table.
// Equal values are 0; unlisted unequal pairs return `fallback`.
class TableDrivenProvider : public AttributeDistanceProvider {
 public:
  explicit TableDrivenProvider(double fallback = 1.0) : fallback_(fallback) {}

  void set(const std::string& attr, const std::string& v1, const std::string& v2,
           double distance);

  double distance(const AttributeDef& attr, const std::string& v1,
                  const std::string& v2) const override;

 private:
  double fallback_;
  std::map<std::string, double> pairs_;
};

// Missing-cell aware attribute distance. If the first cell is missing the
// attribute is skipped (nullopt). If only the second cell is missing, the
// result is the mean provider distance from the first value to every
// non-missing cell of the column, excluding `c1_row`'s own cell; nullopt when
// no other non-missing cell exists.
std::optional<double> attribute_distance(const AttributeDistanceProvider& provider,
                                         const AttributeDef& attr, const Cell& c1,
                                         const Cell& c2, std::span<const Cell> column,
                                         std::optional<std::size_t> c1_row = std::nullopt);

enum class LevelWeightMode { Cardinality, Incremental };
enum class HierWeightMode { Dependency, MutualInfo };

// Weights for levels 2..v of a hierarchy (index 0 = level 2); they sum to 1.
// Cardinality mode weighs by the number of distinct non-missing parameter
// values and throws when every level is empty; incremental mode is
// 2(v - l + 1) / (v^2 - v). The hierarchy must have at least two parameters.
std::vector<double> level_weights(const HierarchyDef& hierarchy, const Table& table,
                                  LevelWeightMode mode);

// Rough-set dependency degree of the target column on the source column:
// |positive region| / |rows|. A row is in the positive region when source and
// target are both non-missing and every row sharing its source value (with a
// non-missing target) carries the same target value. Identical columns have
// degree 1 by definition; an empty table yields 0.
double dependency_degree(const Table& table, std::size_t source_col, std::size_t target_col);

// Shannon mutual information (natural log) over the joint distribution of
// rows where both columns are non-missing.
double mutual_information_weight(const Table& table, std::size_t source_col,
                                 std::size_t target_col);

// Weights of every source hierarchy and id-weak attribute toward one target.
struct TargetWeights {
  std::map<std::string, double> hierarchy;  // hierarchy name -> weight
  std::map<std::string, double> id_weak;    // weak attribute name -> weight
};

// Eq-style normalization of dependency degrees (or mutual information) of all
// hierarchies and id-weak attributes toward `target_attr` (a second-level
// parameter or an id-weak attribute). Throws when every degree is zero; the
// caller is expected to fall back to uniform weights.
TargetWeights hierarchy_weights_toward(const Table& table, const DimensionSchema& schema,
                                       const std::string& target_attr, HierWeightMode mode);

// Convenience wrapper keyed by a target hierarchy (>= 2 parameters).
TargetWeights hierarchy_weights(const Table& table, const DimensionSchema& schema,
                                const HierarchyDef& target, HierWeightMode mode);

TargetWeights uniform_target_weights(const DimensionSchema& schema);

struct DistanceModel {
  LevelWeightMode level_mode = LevelWeightMode::Incremental;
  HierWeightMode hier_mode = HierWeightMode::Dependency;
  std::map<std::string, std::vector<double>> level_weights;   // hierarchy name -> levels 2..v
  std::map<std::string, TargetWeights> target_weights;        // target attr -> weights
  AttrStatsMap attr_stats;
};

// Precomputes level weights, hierarchy weights for every possible imputation
// target (each hierarchy's second-level parameter and each id-weak attribute)
// and numeric column stats. Zero-denominator hierarchy weights fall back to
// uniform, with a note to `warnings` when provided.
DistanceModel build_distance_model(const Table& table, const DimensionSchema& schema,
                                   LevelWeightMode level_mode, HierWeightMode hier_mode,
                                   std::ostream* warnings = nullptr);

struct SamplingConfig {
  std::size_t column_average_cap = 10000;  // exact mean up to this many cells
  std::size_t column_average_sample = 1000;
  std::uint64_t seed = 0;
};

// Evaluates instance distances against one fixed table state. Column values
// are interned to dense ids at construction; per-pair and per-column-average
// results are memoized. Deterministic, single-threaded use.
class DistanceEvaluator {
 public:
  DistanceEvaluator(const Table& table, const DimensionSchema& schema,
                    const DistanceModel& model, const AttributeDistanceProvider& provider,
                    const SamplingConfig& sampling = {});

  std::optional<double> attribute_distance(std::size_t r1, std::size_t r2,
                                           std::size_t col) const;
  std::optional<double> level_distance(std::size_t r1, std::size_t r2,
                                       const HierarchyDef& hierarchy, std::size_t level) const;
  std::optional<double> hierarchy_distance(std::size_t r1, std::size_t r2,
                                           const HierarchyDef& hierarchy) const;

  // Weighted sum over hierarchy distances and id-weak attribute distances,
  // renormalized over the non-skipped terms. `target_attr` selects the weight
  // map (the target hierarchy's second-level parameter, or the id-weak
  // attribute being completed). nullopt when no term is computable.
  std::optional<double> dimension_distance(std::size_t r1, std::size_t r2,
                                           const std::string& target_attr) const;

  // Distances from one probe row to many candidates, memoized over the
  // candidates' value signature (the columns the probe can compare on);
  // identical to calling dimension_distance per candidate.
  std::vector<std::optional<double>> dimension_distances(
      std::size_t probe, const std::vector<std::size_t>& candidates,
      const std::string& target_attr) const;

  // Byte string identifying the row's values on every distance-relevant
  // column; rows with equal signatures are interchangeable as probes.
  std::string row_signature(std::size_t row) const;

  const Table& table() const { return table_; }

 private:
  static constexpr std::uint32_t kMissingId = 0xffffffffu;

  struct LevelCols {
    std::size_t parameter;
    std::vector<std::size_t> weaks;
  };
  struct HierInfo {
    const HierarchyDef* def;
    std::vector<LevelCols> levels;  // levels 2..v
    const std::vector<double>* weights;
  };
  struct TargetVectors {
    std::vector<double> hierarchy;  // aligned with hiers_
    std::vector<double> id_weak;    // aligned with id_weak_cols_
  };
  struct ColumnFreq {
    std::vector<std::pair<std::uint32_t, std::size_t>> counts;  // by value id
    std::size_t total = 0;
  };

  const Table& table_;
  const DimensionSchema& schema_;
  const DistanceModel& model_;
  const AttributeDistanceProvider& provider_;
  SamplingConfig sampling_;
  std::vector<const AttributeDef*> column_attrs_;
  std::vector<HierInfo> hiers_;  // hierarchies with >= 2 parameters
  std::vector<std::size_t> id_weak_cols_;
  std::vector<std::string> id_weaks_;
  std::vector<std::vector<std::uint32_t>> cell_ids_;        // [col][row]
  std::vector<std::vector<const std::string*>> values_;     // [col][id]

  mutable std::vector<std::unordered_map<std::uint64_t, double>> pair_cache_;
  mutable std::vector<std::vector<double>> dense_cache_;  // small-cardinality columns
  mutable std::vector<std::unordered_map<std::uint32_t, std::optional<double>>> average_cache_;
  mutable std::vector<std::optional<ColumnFreq>> freq_cache_;
  mutable std::unordered_map<std::string, TargetVectors> target_cache_;

  const HierInfo* hier_info(const HierarchyDef& hierarchy) const;
  const TargetVectors& target_vectors(const std::string& target_attr) const;
  double pair_distance(std::size_t col, std::uint32_t id1, std::uint32_t id2) const;
  std::optional<double> average_to_column(std::size_t col, std::uint32_t id) const;
  std::optional<double> attribute_distance_ids(std::size_t r1, std::size_t r2,
                                               std::size_t col) const;
  std::optional<double> hierarchy_distance_info(std::size_t r1, std::size_t r2,
                                                const HierInfo& info) const;
};

}  // namespace dimpute
