#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimpute/eval.hpp"
#include "dimpute/hier_impute.hpp"
#include "dimpute/olapknn.hpp"
#include "dimpute/schema.hpp"
#include "dimpute/synthetic.hpp"
#include "dimpute/table.hpp"

namespace {

using namespace dimpute;

const std::map<std::string, LevelWeightMode> kLevelWeightNames = {
    {"cardinality", LevelWeightMode::Cardinality},
    {"incremental", LevelWeightMode::Incremental},
};
const std::map<std::string, HierWeightMode> kHierWeightNames = {
    {"dependency", HierWeightMode::Dependency},
    {"mutual-info", HierWeightMode::MutualInfo},
};

struct IoOptions {
  std::string schema_path;
  std::string input_path;
  std::string missing_token;
  std::string delimiter = ",";

  CsvOptions csv() const {
    if (delimiter.size() != 1) {
      throw CLI::ValidationError("--delimiter", "must be a single character");
    }
    return CsvOptions{missing_token, delimiter[0]};
  }
};

void add_io_options(CLI::App* cmd, IoOptions& io, bool with_input) {
  cmd->add_option("--schema", io.schema_path, "schema file (JSON)")->required();
  if (with_input) {
    cmd->add_option("--input", io.input_path, "instance table (CSV)")->required();
  }
  cmd->add_option("--missing-token", io.missing_token,
                  "cell content that marks a missing value (default: empty)");
  cmd->add_option("--delimiter", io.delimiter, "CSV delimiter (default: comma)");
}

void add_impute_options(CLI::App* cmd, ImputeConfig& config, std::string& embeddings_path) {
  cmd->add_option("--k", config.k, "number of neighbors (default 5)")
      ->check(CLI::Range(1, 20));
  cmd->add_option("--level-weight", config.level_weight,
                  "level weight mode (default incremental)")
      ->transform(CLI::CheckedTransformer(kLevelWeightNames, CLI::ignore_case));
  cmd->add_option("--hierarchy-weight", config.hierarchy_weight,
                  "hierarchy weight mode (default dependency)")
      ->transform(CLI::CheckedTransformer(kHierWeightNames, CLI::ignore_case));
  cmd->add_option("--embeddings", embeddings_path, "word-vector file for text distances");
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::ostream& open_sink(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int run_validate(const IoOptions& io) {
  DimensionSchema schema = parse_schema_file(io.schema_path);
  auto violations = validate_schema(schema);
  for (const auto& v : violations) std::cout << "violation: " << v.message << "\n";
  bool ok = violations.empty();
  if (ok) std::cout << "schema OK: " << schema.attributes.size() << " attributes, "
                    << schema.hierarchies.size() << " hierarchies\n";

  if (!io.input_path.empty()) {
    if (!ok) return 1;  // strictness needs a structurally valid schema
    Table table = Table::load_csv_file(io.input_path, schema, io.csv());
    auto strictness = validate_strictness(schema, table);
    for (const auto& v : strictness) std::cout << "violation: " << v.message() << "\n";
    if (strictness.empty()) {
      std::cout << "instances OK: " << table.row_count() << " rows, "
                << table.missing_count() << " missing cells\n";
    } else {
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

int run_impute(const IoOptions& io, ImputeConfig config, const std::string& embeddings_path,
               const std::string& out_path, const std::string& report_path,
               const std::string& truth_path) {
  DimensionSchema schema = parse_schema_file(io.schema_path);
  auto violations = validate_schema(schema);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "violation: " << v.message << "\n";
    throw std::runtime_error("schema is invalid; aborting");
  }
  Table table = Table::load_csv_file(io.input_path, schema, io.csv());

  EmbeddingStore embeddings;
  if (!embeddings_path.empty()) {
    embeddings = EmbeddingStore::load_file(embeddings_path);
    config.embeddings = &embeddings;
  }

  PipelineReport report = h_olapknn(table, schema, config, nullptr, nullptr, &std::cerr);
  table.write_csv_file(out_path, io.csv());

  std::ofstream file;
  std::ostream& out = open_sink(file, report_path);
  out << "method=h_olapknn\n";
  out << "k=" << config.k << "\n";
  out << "level_weight="
      << (config.level_weight == LevelWeightMode::Incremental ? "incremental" : "cardinality")
      << "\n";
  out << "hierarchy_weight="
      << (config.hierarchy_weight == HierWeightMode::Dependency ? "dependency" : "mutual-info")
      << "\n";
  out << "seed=" << config.seed << "\n";
  out << "rows=" << report.rows << "\n";
  out << "missing_before=" << report.missing_before << "\n";
  out << "filled_hierarchical=" << report.hierarchical_fills << "\n";
  out << "filled_parameter=" << report.parameter_fills << "\n";
  out << "filled_weak=" << report.weak_fills << "\n";
  out << "missing_after=" << report.missing_after << "\n";
  out << "runtime_s=" << format_double(report.total_seconds) << "\n";

  if (!truth_path.empty()) {
    std::ifstream truth_in(truth_path, std::ios::binary);
    if (!truth_in) throw std::runtime_error("cannot open ground truth file: " + truth_path);
    GroundTruthMask mask = GroundTruthMask::read_csv(truth_in);
    out << "masked_cells=" << mask.size() << "\n";
    out << "accuracy_overall=" << format_double(accuracy(table, mask)) << "\n";
    for (const auto& [attr, acc] : per_attribute_accuracy(table, mask)) {
      out << "accuracy_attr[" << attr << "]=" << format_double(acc) << "\n";
    }
  }
  return 0;
}

int run_inject(const IoOptions& io, double rate, const std::vector<std::string>& attr_rates,
               std::uint64_t seed, const std::string& out_path, const std::string& truth_path) {
  DimensionSchema schema = parse_schema_file(io.schema_path);
  Table table = Table::load_csv_file(io.input_path, schema, io.csv());

  std::map<std::string, double> rates;
  if (rate > 0.0) {
    for (const auto& a : schema.attributes) {
      if (a.name != schema.id_attribute) rates[a.name] = rate;
    }
  }
  for (const auto& entry : attr_rates) {
    auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--attr-rate expects NAME=FRACTION, got '" + entry + "'");
    }
    rates[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
  }
  if (rates.empty()) {
    throw std::runtime_error("nothing to inject: pass --rate or --attr-rate");
  }

  GroundTruthMask mask = inject_missing(table, schema, rates, seed);
  table.write_csv_file(out_path, io.csv());
  std::ofstream truth(truth_path, std::ios::binary);
  if (!truth) throw std::runtime_error("cannot open output file: " + truth_path);
  mask.write_csv(truth);
  std::cout << "masked " << mask.size() << " cells across " << rates.size() << " attributes\n";
  return 0;
}

int run_bench(const IoOptions& io, ImputeConfig impute, const std::string& embeddings_path,
              const std::string& rates_text, const std::string& methods_text, int repeats,
              std::uint64_t seed, int threads, bool timings, const std::string& report_path,
              const std::string& csv_path) {
  DimensionSchema schema = parse_schema_file(io.schema_path);
  Table table = Table::load_csv_file(io.input_path, schema, io.csv());

  EmbeddingStore embeddings;
  if (!embeddings_path.empty()) {
    embeddings = EmbeddingStore::load_file(embeddings_path);
    impute.embeddings = &embeddings;
  }

  BenchConfig config;
  for (const auto& item : split_list(rates_text)) {
    config.rates.push_back(std::stod(item) / 100.0);  // rates are percentages
  }
  if (config.rates.empty()) throw std::runtime_error("--rates is empty");
  config.methods = split_list(methods_text);
  config.repeats = repeats;
  config.seed = seed;
  config.impute = impute;
  config.threads = threads;

  auto cells = run_benchmark(table, schema, config);

  std::ofstream file;
  std::ostream& out = open_sink(file, report_path);
  write_bench_report(out, cells, config, timings);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open output file: " + csv_path);
    write_bench_csv(csv, cells, timings);
  }
  return 0;
}

int run_gen(const SyntheticConfig& config, const std::string& prefix) {
  SyntheticDataset dataset = generate_synthetic(config);
  std::ofstream schema_out(prefix + ".schema.json", std::ios::binary);
  if (!schema_out) throw std::runtime_error("cannot open " + prefix + ".schema.json");
  schema_out << synthetic_schema_json(config);
  dataset.table.write_csv_file(prefix + ".csv");
  std::cout << "wrote " << prefix << ".schema.json and " << prefix << ".csv (" << config.rows
            << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimpute: qualitative imputation for dimension tables"};
  app.require_subcommand(1);

  // validate
  IoOptions validate_io;
  auto* validate = app.add_subcommand("validate", "check schema structure and hierarchy strictness");
  add_io_options(validate, validate_io, false);
  validate->add_option("--input", validate_io.input_path, "instance table (CSV, optional)");

  // impute
  IoOptions impute_io;
  ImputeConfig impute_config;
  std::string impute_embeddings, impute_out, impute_report, impute_truth;
  auto* impute = app.add_subcommand("impute", "complete missing values");
  add_io_options(impute, impute_io, true);
  add_impute_options(impute, impute_config, impute_embeddings);
  impute->add_option("--seed", impute_config.seed, "seed for all randomized steps (default 0)");
  impute->add_option("--out", impute_out, "completed table (CSV)")->required();
  impute->add_option("--report", impute_report, "report file (default: stdout)");
  impute->add_option("--truth", impute_truth, "ground truth file from `inject` for accuracy");

  // inject
  IoOptions inject_io;
  double inject_rate = 0.0;
  std::vector<std::string> inject_attr_rates;
  std::uint64_t inject_seed = 0;
  std::string inject_out, inject_truth;
  auto* inject = app.add_subcommand("inject", "blank a seeded share of cells, keeping ground truth");
  add_io_options(inject, inject_io, true);
  inject->add_option("--rate", inject_rate, "fraction in [0,1] for every non-id attribute")
      ->check(CLI::Range(0.0, 1.0));
  inject->add_option("--attr-rate", inject_attr_rates, "per-attribute override NAME=FRACTION");
  inject->add_option("--seed", inject_seed, "seed (default 0)");
  inject->add_option("--out", inject_out, "masked table (CSV)")->required();
  inject->add_option("--truth", inject_truth, "ground truth sink (CSV)")->required();

  // bench
  IoOptions bench_io;
  ImputeConfig bench_impute;
  std::string bench_embeddings;
  std::string bench_rates = "1,5,10,20,30,40";
  std::string bench_methods = "h_olapknn,h_olapknn_mi,knn,mode";
  int bench_repeats = 20;
  std::uint64_t bench_seed = 0;
  int bench_threads = 0;
  bool bench_timings = false;
  std::string bench_report, bench_csv;
  auto* bench = app.add_subcommand("bench", "missing-rate benchmark grid over several methods");
  add_io_options(bench, bench_io, true);
  add_impute_options(bench, bench_impute, bench_embeddings);
  bench->add_option("--rates", bench_rates, "missing rates in percent (default 1,5,10,20,30,40)");
  bench->add_option("--methods", bench_methods,
                    "comma list of h_olapknn,h_olapknn_mi,knn,mode (default: all)");
  bench->add_option("--repeats", bench_repeats, "seeded repetitions per cell (default 20)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "seed (default 0)");
  bench->add_option("--threads", bench_threads,
                    "worker cap for grid cells (default: machine parallelism)");
  bench->add_flag("--timings", bench_timings, "include mean runtimes in the report");
  bench->add_option("--report", bench_report, "report file (default: stdout)");
  bench->add_option("--csv", bench_csv, "also write the grid as CSV");

  // gen
  SyntheticConfig gen_config;
  std::string gen_prefix;
  auto* gen = app.add_subcommand("gen", "generate a strict synthetic benchmark dimension");
  gen->add_option("--out-prefix", gen_prefix, "output prefix for .schema.json and .csv")
      ->required();
  gen->add_option("--rows", gen_config.rows, "row count (default 1000)");
  gen->add_option("--groups", gen_config.group_count, "distinct top-level values (default 5)");
  gen->add_option("--children", gen_config.children_per_group,
                  "distinct mid-level values per group (default 4)");
  gen->add_option("--dominance", gen_config.dominance,
                  "within-group share of the top child (default 0.9)")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--group-skew", gen_config.group_skew, "zipf exponent over groups (default 0)");
  gen->add_option("--noise-attrs", gen_config.noise_attributes,
                  "random-token weak attributes of the id (default 0)");
  gen->add_option("--noise-card", gen_config.noise_cardinality,
                  "distinct noise tokens (default 50)");
  gen->add_flag("--level-weaks", gen_config.level_weaks,
                "add one weak attribute on each upper level");
  gen->add_option("--seed", gen_config.seed, "seed (default 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(validate_io);
    if (impute->parsed()) {
      return run_impute(impute_io, impute_config, impute_embeddings, impute_out, impute_report,
                        impute_truth);
    }
    if (inject->parsed()) {
      return run_inject(inject_io, inject_rate, inject_attr_rates, inject_seed, inject_out,
                        inject_truth);
    }
    if (bench->parsed()) {
      return run_bench(bench_io, bench_impute, bench_embeddings, bench_rates, bench_methods,
                       bench_repeats, bench_seed, bench_threads, bench_timings, bench_report,
                       bench_csv);
    }
    if (gen->parsed()) return run_gen(gen_config, gen_prefix);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
