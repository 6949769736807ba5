#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dimpute/distance.hpp"
#include "dimpute/olapknn.hpp"
#include "dimpute/schema.hpp"
#include "dimpute/table.hpp"

namespace dimpute {

struct MaskEntry {
  std::string row_id;
  std::string attribute;
  std::string original;
};

// Cells blanked by inject_missing together with their original values.
struct GroundTruthMask {
  std::vector<MaskEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }

  void write_csv(std::ostream& out) const;
  static GroundTruthMask read_csv(std::istream& in);
};

// Blanks, per attribute, the first ceil(rate * rows) non-missing cells of a
// seeded row permutation. Rates are per attribute; the id attribute is not
// allowed. Deterministic for a fixed seed.
GroundTruthMask inject_missing(Table& table, const DimensionSchema& schema,
                               const std::map<std::string, double>& rates,
                               std::uint64_t seed);

// Exact-match accuracy (surrounding whitespace trimmed); cells left missing
// count as incorrect. Throws on an empty mask.
double accuracy(const Table& after, const GroundTruthMask& mask);
std::map<std::string, double> per_attribute_accuracy(const Table& after,
                                                     const GroundTruthMask& mask);

// Fills every missing non-id cell with the most frequent non-missing value of
// its column (ties: lexicographically smallest); columns with no values are
// left untouched. Returns cells filled.
std::size_t mode_impute(Table& table, const DimensionSchema& schema);

// Flat KNN baseline: per missing cell, the distance to another row is the
// unweighted mean attribute distance over all other non-id attributes (usual
// missing-cell skip rules), and the value is a distance-weighted vote among
// the k nearest rows carrying that attribute. No hierarchy structure is used.
std::size_t basic_knn_impute(Table& table, const DimensionSchema& schema, int k,
                             const AttributeDistanceProvider* provider = nullptr,
                             const SamplingConfig& sampling = {});

extern const std::vector<std::string> kBenchMethods;  // h_olapknn, h_olapknn_mi, knn, mode

// Runs one named method in place and returns cells filled.
std::size_t run_method(const std::string& method, Table& table, const DimensionSchema& schema,
                       const ImputeConfig& config,
                       const AttributeDistanceProvider* provider = nullptr);

struct BenchConfig {
  std::vector<double> rates;  // fractions in [0, 1], applied to all non-id attributes
  std::vector<std::string> methods;
  int repeats = 20;
  std::uint64_t seed = 0;
  ImputeConfig impute;
  int threads = 0;  // 0 = hardware concurrency
};

struct BenchCell {
  std::string method;
  double rate = 0.0;
  int repeats = 0;
  double mean_accuracy = 0.0;
  double stdev_accuracy = 0.0;
  double mean_runtime_seconds = 0.0;
  bool skipped = false;
  std::string note;
};

// Benchmark grid: per (rate, repeat) one seeded injection shared by every
// method, each method run on its own copy. Cells are deterministic for a
// fixed seed; runtimes are informational only.
std::vector<BenchCell> run_benchmark(const Table& table, const DimensionSchema& schema,
                                     const BenchConfig& config,
                                     const AttributeDistanceProvider* provider = nullptr);

// Line-oriented report, one record per grid cell. Runtime fields are emitted
// only when `timings` is set so that equal-seed reports are byte-identical.
void write_bench_report(std::ostream& out, const std::vector<BenchCell>& cells,
                        const BenchConfig& config, bool timings);
void write_bench_csv(std::ostream& out, const std::vector<BenchCell>& cells, bool timings);

}  // namespace dimpute
