#include "dimpute/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "dimpute/rng.hpp"

namespace dimpute {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::string format_rate_pct(double rate) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%g", rate * 100.0);
  return buffer;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::unordered_map<std::string, std::size_t> id_lookup(const Table& table) {
  std::unordered_map<std::string, std::size_t> rows;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    rows[table.value(r, table.id_column())] = r;
  }
  return rows;
}

}  // namespace

void GroundTruthMask::write_csv(std::ostream& out) const {
  write_csv_record(out, {"id", "attribute", "value"}, ',');
  for (const auto& e : entries) {
    write_csv_record(out, {e.row_id, e.attribute, e.original}, ',');
  }
}

GroundTruthMask GroundTruthMask::read_csv(std::istream& in) {
  auto records = read_csv_records(in, ',');
  if (records.empty() || records.front() != std::vector<std::string>{"id", "attribute", "value"}) {
    throw std::runtime_error("ground truth file: bad header");
  }
  GroundTruthMask mask;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != 3) {
      throw std::runtime_error("ground truth file: row " + std::to_string(r + 1) +
                               " has " + std::to_string(records[r].size()) + " fields");
    }
    mask.entries.push_back({records[r][0], records[r][1], records[r][2]});
  }
  return mask;
}

GroundTruthMask inject_missing(Table& table, const DimensionSchema& schema,
                               const std::map<std::string, double>& rates, std::uint64_t seed) {
  check_conformance(schema, table);
  for (const auto& [attr, rate] : rates) {
    if (!schema.find_attribute(attr)) {
      throw std::invalid_argument("inject: unknown attribute '" + attr + "'");
    }
    if (attr == schema.id_attribute) {
      throw std::invalid_argument("inject: the id attribute cannot be blanked");
    }
    if (rate < 0.0 || rate > 1.0) {
      throw std::invalid_argument("inject: rate for '" + attr + "' outside [0, 1]");
    }
  }

  GroundTruthMask mask;
  const std::size_t n = table.row_count();
  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const std::string& attr = schema.attributes[a].name;
    auto it = rates.find(attr);
    if (it == rates.end()) continue;
    std::size_t take = static_cast<std::size_t>(
        std::ceil(it->second * static_cast<double>(n) - 1e-9));
    if (take == 0) continue;

    std::vector<std::size_t> order(n);
    for (std::size_t r = 0; r < n; ++r) order[r] = r;
    Rng rng(mix_seed(seed, a));
    shuffle(order, rng);

    std::size_t col = table.column_index(attr);
    std::size_t blanked = 0;
    for (std::size_t r : order) {
      if (blanked == take) break;
      if (table.is_missing(r, col)) continue;
      Cell original = table.clear_cell(r, col);
      mask.entries.push_back({table.value(r, table.id_column()), attr, *original});
      ++blanked;
    }
  }
  return mask;
}

double accuracy(const Table& after, const GroundTruthMask& mask) {
  if (mask.empty()) throw std::invalid_argument("accuracy: empty ground truth mask");
  auto rows = id_lookup(after);
  std::size_t correct = 0;
  for (const auto& e : mask.entries) {
    auto row = rows.find(e.row_id);
    if (row == rows.end()) continue;
    const Cell& cell = after.cell(row->second, after.column_index(e.attribute));
    if (cell.has_value() && trimmed(*cell) == trimmed(e.original)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

std::map<std::string, double> per_attribute_accuracy(const Table& after,
                                                     const GroundTruthMask& mask) {
  auto rows = id_lookup(after);
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // attr -> (correct, total)
  for (const auto& e : mask.entries) {
    auto& [correct, total] = counts[e.attribute];
    ++total;
    auto row = rows.find(e.row_id);
    if (row == rows.end()) continue;
    const Cell& cell = after.cell(row->second, after.column_index(e.attribute));
    if (cell.has_value() && trimmed(*cell) == trimmed(e.original)) ++correct;
  }
  std::map<std::string, double> result;
  for (const auto& [attr, c] : counts) {
    result[attr] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return result;
}

std::size_t mode_impute(Table& table, const DimensionSchema& schema) {
  check_conformance(schema, table);
  std::size_t fills = 0;
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    if (c == table.id_column()) continue;
    std::map<std::string, std::size_t> counts;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (!table.is_missing(r, c)) ++counts[table.value(r, c)];
    }
    if (counts.empty()) continue;
    const std::string* modal = nullptr;
    std::size_t best = 0;
    for (const auto& [value, count] : counts) {  // ascending keys: ties pick the smallest
      if (count > best) {
        best = count;
        modal = &value;
      }
    }
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (table.is_missing(r, c)) {
        table.fill(r, c, *modal);
        ++fills;
      }
    }
  }
  return fills;
}

std::size_t basic_knn_impute(Table& table, const DimensionSchema& schema, int k,
                             const AttributeDistanceProvider* provider,
                             const SamplingConfig& sampling) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  check_conformance(schema, table);

  std::optional<StandardProvider> standard;
  if (provider == nullptr) {
    standard.emplace(build_attr_stats(table, schema));
    provider = &*standard;
  }

  const Table snapshot = table.snapshot();
  static const DistanceModel kNoModel;  // attribute distances only
  DistanceEvaluator eval(snapshot, schema, kNoModel, *provider, sampling);

  std::size_t fills = 0;
  for (std::size_t c = 0; c < snapshot.column_count(); ++c) {
    if (c == snapshot.id_column()) continue;
    std::vector<std::size_t> feature_cols;
    for (std::size_t f = 0; f < snapshot.column_count(); ++f) {
      if (f != c && f != snapshot.id_column()) feature_cols.push_back(f);
    }
    for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
      if (!snapshot.is_missing(r, c)) continue;
      std::vector<std::pair<double, std::size_t>> scored;
      for (std::size_t other = 0; other < snapshot.row_count(); ++other) {
        if (other == r || snapshot.is_missing(other, c)) continue;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t f : feature_cols) {
          auto d = eval.attribute_distance(r, other, f);
          if (d) {
            sum += *d;
            ++count;
          }
        }
        if (count == 0) continue;
        scored.emplace_back(sum / static_cast<double>(count), other);
      }
      if (scored.empty()) continue;
      std::sort(scored.begin(), scored.end());
      std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
      double nearest = scored.front().first;
      double farthest = scored[kept - 1].first;
      std::map<std::string, double> votes;
      for (std::size_t i = 0; i < kept; ++i) {
        double weight = farthest == nearest
                            ? 1.0
                            : (farthest - scored[i].first) / (farthest - nearest);
        votes[snapshot.value(scored[i].second, c)] += weight;
      }
      const std::string* winner = nullptr;
      double best = -1.0;
      for (const auto& [value, weight] : votes) {
        if (weight > best) {
          best = weight;
          winner = &value;
        }
      }
      table.fill(r, c, *winner);
      ++fills;
    }
  }
  return fills;
}

const std::vector<std::string> kBenchMethods = {"h_olapknn", "h_olapknn_mi", "knn", "mode"};

std::size_t run_method(const std::string& method, Table& table, const DimensionSchema& schema,
                       const ImputeConfig& config, const AttributeDistanceProvider* provider) {
  if (method == "h_olapknn") {
    auto report = h_olapknn(table, schema, config, provider);
    return report.hierarchical_fills + report.parameter_fills + report.weak_fills;
  }
  if (method == "h_olapknn_mi") {
    ImputeConfig mi = config;
    mi.hierarchy_weight = HierWeightMode::MutualInfo;
    auto report = h_olapknn(table, schema, mi, provider);
    return report.hierarchical_fills + report.parameter_fills + report.weak_fills;
  }
  if (method == "knn") {
    SamplingConfig sampling = config.sampling;
    sampling.seed = config.seed;
    return basic_knn_impute(table, schema, config.k, provider, sampling);
  }
  if (method == "mode") {
    return mode_impute(table, schema);
  }
  throw std::invalid_argument("unknown method '" + method + "'");
}

std::vector<BenchCell> run_benchmark(const Table& table, const DimensionSchema& schema,
                                     const BenchConfig& config,
                                     const AttributeDistanceProvider* provider) {
  if (config.repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
  if (config.methods.empty()) throw std::invalid_argument("bench: no methods selected");
  for (const auto& m : config.methods) {
    if (std::find(kBenchMethods.begin(), kBenchMethods.end(), m) == kBenchMethods.end()) {
      throw std::invalid_argument("bench: unknown method '" + m + "'");
    }
  }
  for (double rate : config.rates) {
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("bench: rate outside [0, 1]");
  }

  std::map<std::string, double> rate_template;
  for (const auto& a : schema.attributes) {
    if (a.name != schema.id_attribute) rate_template[a.name] = 0.0;
  }

  struct Sample {
    bool skipped = false;
    std::vector<double> accuracy;  // per method
    std::vector<double> runtime;
  };
  const std::size_t n_rates = config.rates.size();
  const std::size_t repeats = static_cast<std::size_t>(config.repeats);
  std::vector<Sample> samples(n_rates * repeats);

  parallel_for(n_rates * repeats, config.threads, [&](std::size_t index) {
    const std::size_t rate_i = index / repeats;
    Sample& sample = samples[index];

    std::map<std::string, double> rates = rate_template;
    for (auto& [attr, r] : rates) r = config.rates[rate_i];

    Table injected = table.snapshot();
    GroundTruthMask mask = inject_missing(injected, schema, rates,
                                          mix_seed(config.seed, index));
    if (mask.empty()) {
      sample.skipped = true;
      return;
    }
    for (const auto& method : config.methods) {
      Table working = injected.snapshot();
      ImputeConfig impute = config.impute;
      impute.seed = mix_seed(config.seed, index * 2654435761ull + 1);
      auto start = std::chrono::steady_clock::now();
      run_method(method, working, schema, impute, provider);
      auto stop = std::chrono::steady_clock::now();
      sample.accuracy.push_back(accuracy(working, mask));
      sample.runtime.push_back(std::chrono::duration<double>(stop - start).count());
    }
  });

  std::vector<BenchCell> cells;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (std::size_t rate_i = 0; rate_i < n_rates; ++rate_i) {
      BenchCell cell;
      cell.method = config.methods[m];
      cell.rate = config.rates[rate_i];
      std::vector<double> accs, times;
      bool skipped = false;
      for (std::size_t repeat = 0; repeat < repeats; ++repeat) {
        const Sample& s = samples[rate_i * repeats + repeat];
        if (s.skipped) {
          skipped = true;
          break;
        }
        accs.push_back(s.accuracy[m]);
        times.push_back(s.runtime[m]);
      }
      if (skipped) {
        cell.skipped = true;
        cell.note = "empty_mask";
      } else {
        cell.repeats = static_cast<int>(accs.size());
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= static_cast<double>(accs.size());
        double var = 0.0;
        for (double a : accs) var += (a - mean) * (a - mean);
        cell.mean_accuracy = mean;
        cell.stdev_accuracy = accs.size() > 1
                                  ? std::sqrt(var / static_cast<double>(accs.size() - 1))
                                  : 0.0;
        double mean_time = 0.0;
        for (double t : times) mean_time += t;
        cell.mean_runtime_seconds = mean_time / static_cast<double>(times.size());
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_bench_report(std::ostream& out, const std::vector<BenchCell>& cells,
                        const BenchConfig& config, bool timings) {
  out << "# dimpute benchmark report\n";
  out << "config seed=" << config.seed << " repeats=" << config.repeats
      << " k=" << config.impute.k << " level_weight="
      << (config.impute.level_weight == LevelWeightMode::Incremental ? "incremental"
                                                                     : "cardinality")
      << " hierarchy_weight="
      << (config.impute.hierarchy_weight == HierWeightMode::Dependency ? "dependency"
                                                                       : "mutual-info")
      << "\n";
  for (const auto& cell : cells) {
    out << "cell method=" << cell.method << " rate_pct=" << format_rate_pct(cell.rate);
    if (cell.skipped) {
      out << " skipped=1 note=" << cell.note << "\n";
      continue;
    }
    out << " repeats=" << cell.repeats << " mean_accuracy=" << format_double(cell.mean_accuracy)
        << " stdev_accuracy=" << format_double(cell.stdev_accuracy);
    if (timings) out << " mean_runtime_s=" << format_double(cell.mean_runtime_seconds);
    out << "\n";
  }
}

void write_bench_csv(std::ostream& out, const std::vector<BenchCell>& cells, bool timings) {
  out << "method,rate_pct,repeats,mean_accuracy,stdev_accuracy";
  if (timings) out << ",mean_runtime_s";
  out << "\n";
  for (const auto& cell : cells) {
    if (cell.skipped) continue;
    out << cell.method << ',' << format_rate_pct(cell.rate) << ',' << cell.repeats << ','
        << format_double(cell.mean_accuracy) << ',' << format_double(cell.stdev_accuracy);
    if (timings) out << ',' << format_double(cell.mean_runtime_seconds);
    out << "\n";
  }
}

}  // namespace dimpute
