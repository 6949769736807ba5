#include "dimpute/distance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dimpute/rng.hpp"

namespace dimpute {

namespace {

double parse_number(const std::string& text) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw std::runtime_error("not a numeric value: '" + text + "'");
  }
  return value;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 2.0;  // sentinel: undefined
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string pair_key(std::size_t col, const std::string& v1, const std::string& v2) {
  const std::string& lo = v1 <= v2 ? v1 : v2;
  const std::string& hi = v1 <= v2 ? v2 : v1;
  std::string key = std::to_string(col);
  key += '\x1f';
  key += lo;
  key += '\x1f';
  key += hi;
  return key;
}

}  // namespace

AttrStatsMap build_attr_stats(const Table& table, const DimensionSchema& schema) {
  AttrStatsMap stats;
  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const AttributeDef& attr = schema.attributes[a];
    if (attr.kind != AttrKind::Numeric) continue;
    AttrStats s;
    std::size_t col = table.column_index(attr.name);
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (table.is_missing(r, col)) continue;
      double v = parse_number(table.value(r, col));
      if (!s.valid) {
        s.min = s.max = v;
        s.valid = true;
      } else {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
      }
    }
    stats[attr.name] = s;
  }
  return stats;
}

double numeric_distance(double v1, double v2, double min, double max) {
  if (max <= min) return 0.0;
  return std::clamp(std::abs(v1 - v2) / (max - min), 0.0, 1.0);
}

double numeric_distance(const std::string& v1, const std::string& v2, const AttrStats& stats) {
  if (!stats.valid) return 0.0;
  return numeric_distance(parse_number(v1), parse_number(v2), stats.min, stats.max);
}

double normalized_edit_distance(const std::string& a, const std::string& b) {
  if (a == b) return 0.0;
  const std::size_t m = a.size(), n = b.size();
  std::size_t longest = std::max(m, n);
  if (longest == 0) return 0.0;
  std::vector<std::size_t> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[n]) / static_cast<double>(longest);
}

double text_distance(const std::string& v1, const std::string& v2,
                     const EmbeddingStore* embeddings) {
  if (v1 == v2) return 0.0;
  if (embeddings != nullptr && embeddings->dimension() > 0) {
    std::vector<float> m1, m2;
    if (embeddings->mean_vector(v1, m1) && embeddings->mean_vector(v2, m2)) {
      double cos = cosine(m1, m2);
      if (cos <= 1.0) return std::clamp((1.0 - cos) / 2.0, 0.0, 1.0);
    }
  }
  return normalized_edit_distance(v1, v2);
}

double StandardProvider::distance(const AttributeDef& attr, const std::string& v1,
                                  const std::string& v2) const {
  if (attr.kind == AttrKind::Numeric) {
    auto it = stats_.find(attr.name);
    if (it == stats_.end()) {
      throw std::logic_error("no numeric stats for attribute '" + attr.name + "'");
    }
    return numeric_distance(v1, v2, it->second);
  }
  return text_distance(v1, v2, embeddings_);
}

void TableDrivenProvider::set(const std::string& attr, const std::string& v1,
                              const std::string& v2, double distance) {
  pairs_[pair_key(0, v1, v2) + '\x1f' + attr] = distance;
}

double TableDrivenProvider::distance(const AttributeDef& attr, const std::string& v1,
                                     const std::string& v2) const {
  if (v1 == v2) return 0.0;
  auto it = pairs_.find(pair_key(0, v1, v2) + '\x1f' + attr.name);
  return it == pairs_.end() ? fallback_ : it->second;
}

std::optional<double> attribute_distance(const AttributeDistanceProvider& provider,
                                         const AttributeDef& attr, const Cell& c1,
                                         const Cell& c2, std::span<const Cell> column,
                                         std::optional<std::size_t> c1_row) {
  if (!c1.has_value()) return std::nullopt;
  if (c2.has_value()) {
    if (*c1 == *c2) return 0.0;
    return provider.distance(attr, *c1, *c2);
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (c1_row && *c1_row == i) continue;
    if (!column[i].has_value()) continue;
    sum += (*column[i] == *c1) ? 0.0 : provider.distance(attr, *c1, *column[i]);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::vector<double> level_weights(const HierarchyDef& hierarchy, const Table& table,
                                  LevelWeightMode mode) {
  const std::size_t v = hierarchy.parameters.size();
  if (v < 2) throw std::logic_error("level weights need a hierarchy with >= 2 parameters");
  std::vector<double> weights(v - 1, 0.0);
  if (mode == LevelWeightMode::Incremental) {
    double denom = static_cast<double>(v) * v - v;
    for (std::size_t l = 2; l <= v; ++l) {
      weights[l - 2] = 2.0 * static_cast<double>(v - l + 1) / denom;
    }
    return weights;
  }
  std::size_t total = 0;
  for (std::size_t l = 2; l <= v; ++l) {
    std::size_t col = table.column_index(hierarchy.parameters[l - 1]);
    std::set<std::string> distinct;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (!table.is_missing(r, col)) distinct.insert(table.value(r, col));
    }
    weights[l - 2] = static_cast<double>(distinct.size());
    total += distinct.size();
  }
  if (total == 0) {
    throw std::runtime_error("cardinality level weights: every level of hierarchy '" +
                             hierarchy.name + "' is empty");
  }
  for (auto& w : weights) w /= static_cast<double>(total);
  return weights;
}

double dependency_degree(const Table& table, std::size_t source_col, std::size_t target_col) {
  if (source_col == target_col) return 1.0;
  const std::size_t rows = table.row_count();
  if (rows == 0) return 0.0;
  // Source-value classes over rows with both cells present; a class lands in
  // the positive region when all its target values agree.
  std::map<std::string, std::vector<const std::string*>> groups;
  for (std::size_t r = 0; r < rows; ++r) {
    if (table.is_missing(r, source_col) || table.is_missing(r, target_col)) continue;
    groups[table.value(r, source_col)].push_back(&table.value(r, target_col));
  }
  std::size_t positive = 0;
  for (const auto& [value, targets] : groups) {
    bool pure = true;
    for (const auto* t : targets) {
      if (*t != *targets.front()) {
        pure = false;
        break;
      }
    }
    if (pure) positive += targets.size();
  }
  return static_cast<double>(positive) / static_cast<double>(rows);
}

double mutual_information_weight(const Table& table, std::size_t source_col,
                                 std::size_t target_col) {
  std::map<std::pair<std::string, std::string>, std::size_t> joint;
  std::map<std::string, std::size_t> left, right;
  std::size_t n = 0;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (table.is_missing(r, source_col) || table.is_missing(r, target_col)) continue;
    const std::string& x = table.value(r, source_col);
    const std::string& y = table.value(r, target_col);
    ++joint[{x, y}];
    ++left[x];
    ++right[y];
    ++n;
  }
  if (n == 0) return 0.0;
  double mi = 0.0;
  const double dn = static_cast<double>(n);
  for (const auto& [xy, count] : joint) {
    double pxy = count / dn;
    double px = left[xy.first] / dn;
    double py = right[xy.second] / dn;
    mi += pxy * std::log(pxy / (px * py));
  }
  return std::max(mi, 0.0);
}

namespace {

double source_degree(const Table& table, std::size_t source_col, std::size_t target_col,
                     HierWeightMode mode) {
  if (mode == HierWeightMode::Dependency) {
    return dependency_degree(table, source_col, target_col);
  }
  return mutual_information_weight(table, source_col, target_col);
}

}  // namespace

TargetWeights hierarchy_weights_toward(const Table& table, const DimensionSchema& schema,
                                       const std::string& target_attr, HierWeightMode mode) {
  std::size_t target_col = table.column_index(target_attr);
  TargetWeights weights;
  double total = 0.0;
  for (const auto& h : schema.hierarchies) {
    if (h.parameters.size() < 2) continue;
    double degree =
        source_degree(table, table.column_index(h.parameters[1]), target_col, mode);
    weights.hierarchy[h.name] = degree;
    total += degree;
  }
  for (const auto& w : schema.id_weak_attributes()) {
    double degree = source_degree(table, table.column_index(w), target_col, mode);
    weights.id_weak[w] = degree;
    total += degree;
  }
  if (total <= 0.0) {
    throw std::runtime_error("hierarchy weights toward '" + target_attr +
                             "': every dependency degree is zero; fall back to uniform weights");
  }
  for (auto& [name, value] : weights.hierarchy) value /= total;
  for (auto& [name, value] : weights.id_weak) value /= total;
  return weights;
}

TargetWeights hierarchy_weights(const Table& table, const DimensionSchema& schema,
                                const HierarchyDef& target, HierWeightMode mode) {
  if (target.parameters.size() < 2) {
    throw std::logic_error("hierarchy weights need a target hierarchy with >= 2 parameters");
  }
  return hierarchy_weights_toward(table, schema, target.parameters[1], mode);
}

TargetWeights uniform_target_weights(const DimensionSchema& schema) {
  TargetWeights weights;
  std::size_t sources = 0;
  for (const auto& h : schema.hierarchies) {
    if (h.parameters.size() >= 2) ++sources;
  }
  auto id_weaks = schema.id_weak_attributes();
  sources += id_weaks.size();
  if (sources == 0) return weights;
  double share = 1.0 / static_cast<double>(sources);
  for (const auto& h : schema.hierarchies) {
    if (h.parameters.size() >= 2) weights.hierarchy[h.name] = share;
  }
  for (const auto& w : id_weaks) weights.id_weak[w] = share;
  return weights;
}

DistanceModel build_distance_model(const Table& table, const DimensionSchema& schema,
                                   LevelWeightMode level_mode, HierWeightMode hier_mode,
                                   std::ostream* warnings) {
  check_conformance(schema, table);
  DistanceModel model;
  model.level_mode = level_mode;
  model.hier_mode = hier_mode;
  model.attr_stats = build_attr_stats(table, schema);

  std::set<std::string> targets;
  for (const auto& h : schema.hierarchies) {
    if (h.parameters.size() < 2) continue;
    model.level_weights[h.name] = level_weights(h, table, level_mode);
    targets.insert(h.parameters[1]);
  }
  for (const auto& w : schema.id_weak_attributes()) targets.insert(w);

  for (const auto& target : targets) {
    try {
      model.target_weights[target] = hierarchy_weights_toward(table, schema, target, hier_mode);
    } catch (const std::runtime_error& e) {
      if (warnings) *warnings << "warning: " << e.what() << "\n";
      model.target_weights[target] = uniform_target_weights(schema);
    }
  }
  return model;
}

DistanceEvaluator::DistanceEvaluator(const Table& table, const DimensionSchema& schema,
                                     const DistanceModel& model,
                                     const AttributeDistanceProvider& provider,
                                     const SamplingConfig& sampling)
    : table_(table), schema_(schema), model_(model), provider_(provider), sampling_(sampling) {
  check_conformance(schema, table);
  const std::size_t cols = table.column_count();
  const std::size_t rows = table.row_count();
  column_attrs_.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) column_attrs_[c] = &schema.attributes[c];

  cell_ids_.assign(cols, {});
  values_.assign(cols, {});
  pair_cache_.resize(cols);
  dense_cache_.resize(cols);
  average_cache_.resize(cols);
  freq_cache_.assign(cols, std::nullopt);
  for (std::size_t c = 0; c < cols; ++c) {
    std::unordered_map<std::string, std::uint32_t> intern;
    auto& ids = cell_ids_[c];
    ids.resize(rows, kMissingId);
    for (std::size_t r = 0; r < rows; ++r) {
      const Cell& cell = table.cell(r, c);
      if (!cell.has_value()) continue;
      auto [it, inserted] = intern.emplace(*cell, static_cast<std::uint32_t>(values_[c].size()));
      if (inserted) values_[c].push_back(&*cell);
      ids[r] = it->second;
    }
  }

  for (const auto& h : schema.hierarchies) {
    if (h.parameters.size() < 2) continue;
    HierInfo info;
    info.def = &h;
    auto weights_it = model.level_weights.find(h.name);
    info.weights = weights_it == model.level_weights.end() ? nullptr : &weights_it->second;
    for (std::size_t level = 2; level <= h.parameters.size(); ++level) {
      LevelCols lc;
      lc.parameter = table.column_index(h.parameters[level - 1]);
      for (const auto& w : h.weak_of(h.parameters[level - 1])) {
        lc.weaks.push_back(table.column_index(w));
      }
      info.levels.push_back(std::move(lc));
    }
    hiers_.push_back(std::move(info));
  }
  id_weaks_ = schema.id_weak_attributes();
  for (const auto& w : id_weaks_) id_weak_cols_.push_back(table.column_index(w));
}

const DistanceEvaluator::HierInfo* DistanceEvaluator::hier_info(
    const HierarchyDef& hierarchy) const {
  for (const auto& info : hiers_) {
    if (info.def == &hierarchy || info.def->name == hierarchy.name) return &info;
  }
  return nullptr;
}

const DistanceEvaluator::TargetVectors& DistanceEvaluator::target_vectors(
    const std::string& target_attr) const {
  auto cached = target_cache_.find(target_attr);
  if (cached != target_cache_.end()) return cached->second;
  auto tw = model_.target_weights.find(target_attr);
  if (tw == model_.target_weights.end()) {
    throw std::logic_error("no hierarchy weights for target '" + target_attr + "'");
  }
  TargetVectors vectors;
  for (const auto& info : hiers_) vectors.hierarchy.push_back(tw->second.hierarchy.at(info.def->name));
  for (const auto& w : id_weaks_) vectors.id_weak.push_back(tw->second.id_weak.at(w));
  return target_cache_.emplace(target_attr, std::move(vectors)).first->second;
}

double DistanceEvaluator::pair_distance(std::size_t col, std::uint32_t id1,
                                        std::uint32_t id2) const {
  if (id1 == id2) return 0.0;
  std::uint32_t lo = std::min(id1, id2), hi = std::max(id1, id2);
  const std::size_t distinct = values_[col].size();
  if (distinct <= 1024) {  // dense matrix, allocated on first use
    auto& dense = dense_cache_[col];
    if (dense.empty()) dense.assign(distinct * distinct, -1.0);
    double& slot = dense[lo * distinct + hi];
    if (slot < 0.0) {
      slot = provider_.distance(*column_attrs_[col], *values_[col][lo], *values_[col][hi]);
    }
    return slot;
  }
  std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
  auto& cache = pair_cache_[col];
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  double d = provider_.distance(*column_attrs_[col], *values_[col][lo], *values_[col][hi]);
  cache.emplace(key, d);
  return d;
}

std::optional<double> DistanceEvaluator::average_to_column(std::size_t col,
                                                           std::uint32_t id) const {
  auto& cache = average_cache_[col];
  auto cached = cache.find(id);
  if (cached != cache.end()) return cached->second;

  if (!freq_cache_[col]) {
    ColumnFreq freq;
    std::vector<std::size_t> counts(values_[col].size(), 0);
    for (std::uint32_t cell : cell_ids_[col]) {
      if (cell != kMissingId) {
        ++counts[cell];
        ++freq.total;
      }
    }
    for (std::uint32_t v = 0; v < counts.size(); ++v) {
      if (counts[v] > 0) freq.counts.emplace_back(v, counts[v]);
    }
    freq_cache_[col] = std::move(freq);
  }
  const ColumnFreq& freq = *freq_cache_[col];

  // The probe row's own cell is excluded; it contributes distance zero, so
  // only the denominator changes.
  std::optional<double> result;
  if (freq.total > 1) {
    double sum = 0.0;
    if (freq.total <= sampling_.column_average_cap) {
      for (const auto& [v, count] : freq.counts) {
        if (v == id) continue;
        sum += static_cast<double>(count) * pair_distance(col, id, v);
      }
      result = sum / static_cast<double>(freq.total - 1);
    } else {
      std::vector<std::uint32_t> pool;
      pool.reserve(freq.total);
      for (const auto& [v, count] : freq.counts) {
        for (std::size_t i = 0; i < count; ++i) pool.push_back(v);
      }
      Rng rng(mix_seed(sampling_.seed, col));
      std::size_t draws = std::min(sampling_.column_average_sample, pool.size());
      for (std::size_t i = 0; i < draws; ++i) {
        sum += pair_distance(col, id, pool[rng.next_below(pool.size())]);
      }
      result = sum / static_cast<double>(draws);
    }
  }
  cache.emplace(id, result);
  return result;
}

std::optional<double> DistanceEvaluator::attribute_distance_ids(std::size_t r1, std::size_t r2,
                                                                std::size_t col) const {
  std::uint32_t id1 = cell_ids_[col][r1];
  if (id1 == kMissingId) return std::nullopt;
  std::uint32_t id2 = cell_ids_[col][r2];
  if (id2 != kMissingId) return pair_distance(col, id1, id2);
  return average_to_column(col, id1);
}

std::optional<double> DistanceEvaluator::attribute_distance(std::size_t r1, std::size_t r2,
                                                            std::size_t col) const {
  return attribute_distance_ids(r1, r2, col);
}

std::optional<double> DistanceEvaluator::level_distance(std::size_t r1, std::size_t r2,
                                                        const HierarchyDef& hierarchy,
                                                        std::size_t level) const {
  const HierInfo* info = hier_info(hierarchy);
  if (!info || level < 2 || level > hierarchy.parameters.size()) {
    throw std::logic_error("level distance: bad hierarchy or level");
  }
  const LevelCols& lc = info->levels[level - 2];
  double sum = 0.0;
  std::size_t count = 0;
  if (auto d = attribute_distance_ids(r1, r2, lc.parameter)) {
    sum += *d;
    ++count;
  }
  for (std::size_t w : lc.weaks) {
    if (auto d = attribute_distance_ids(r1, r2, w)) {
      sum += *d;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::optional<double> DistanceEvaluator::hierarchy_distance_info(std::size_t r1, std::size_t r2,
                                                                 const HierInfo& info) const {
  if (!info.weights) {
    throw std::logic_error("no level weights for hierarchy '" + info.def->name + "'");
  }
  const auto& weights = *info.weights;
  double num = 0.0, den = 0.0;
  bool any = false;
  for (std::size_t l = 0; l < info.levels.size(); ++l) {
    const LevelCols& lc = info.levels[l];
    double sum = 0.0;
    std::size_t count = 0;
    if (auto d = attribute_distance_ids(r1, r2, lc.parameter)) {
      sum += *d;
      ++count;
    }
    for (std::size_t w : lc.weaks) {
      if (auto d = attribute_distance_ids(r1, r2, w)) {
        sum += *d;
        ++count;
      }
    }
    if (count == 0) continue;
    any = true;
    num += weights[l] * (sum / static_cast<double>(count));
    den += weights[l];
  }
  if (!any) return std::nullopt;
  return den > 0.0 ? num / den : 0.0;
}

std::optional<double> DistanceEvaluator::hierarchy_distance(std::size_t r1, std::size_t r2,
                                                            const HierarchyDef& hierarchy) const {
  const HierInfo* info = hier_info(hierarchy);
  if (!info) throw std::logic_error("no level weights for hierarchy '" + hierarchy.name + "'");
  return hierarchy_distance_info(r1, r2, *info);
}

std::optional<double> DistanceEvaluator::dimension_distance(std::size_t r1, std::size_t r2,
                                                            const std::string& target_attr) const {
  const TargetVectors& weights = target_vectors(target_attr);
  double num = 0.0, den = 0.0;
  bool any = false;
  for (std::size_t h = 0; h < hiers_.size(); ++h) {
    auto d = hierarchy_distance_info(r1, r2, hiers_[h]);
    if (!d) continue;
    any = true;
    num += weights.hierarchy[h] * *d;
    den += weights.hierarchy[h];
  }
  for (std::size_t i = 0; i < id_weak_cols_.size(); ++i) {
    auto d = attribute_distance_ids(r1, r2, id_weak_cols_[i]);
    if (!d) continue;
    any = true;
    num += weights.id_weak[i] * *d;
    den += weights.id_weak[i];
  }
  if (!any) return std::nullopt;
  return den > 0.0 ? num / den : 0.0;
}

namespace {

struct SignatureHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

std::vector<std::optional<double>> DistanceEvaluator::dimension_distances(
    std::size_t probe, const std::vector<std::size_t>& candidates,
    const std::string& target_attr) const {
  std::vector<std::optional<double>> out(candidates.size());

  // Columns whose candidate value can affect the result; columns where the
  // probe is missing are skipped regardless of the candidate.
  std::vector<std::size_t> sig_cols;
  for (const auto& info : hiers_) {
    for (const auto& lc : info.levels) {
      if (cell_ids_[lc.parameter][probe] != kMissingId) sig_cols.push_back(lc.parameter);
      for (std::size_t w : lc.weaks) {
        if (cell_ids_[w][probe] != kMissingId) sig_cols.push_back(w);
      }
    }
  }
  for (std::size_t w : id_weak_cols_) {
    if (cell_ids_[w][probe] != kMissingId) sig_cols.push_back(w);
  }

  if (sig_cols.size() <= 2) {  // signature fits one packed key
    const std::uint32_t* col0 = sig_cols.size() > 0 ? cell_ids_[sig_cols[0]].data() : nullptr;
    const std::uint32_t* col1 = sig_cols.size() > 1 ? cell_ids_[sig_cols[1]].data() : nullptr;
    std::unordered_map<std::uint64_t, std::optional<double>> memo;
    memo.reserve(256);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::size_t cand = candidates[i];
      std::uint64_t key = col0 ? col0[cand] : 0;
      if (col1) key = (key << 32) | col1[cand];
      auto hit = memo.find(key);
      if (hit != memo.end()) {
        out[i] = hit->second;
        continue;
      }
      out[i] = dimension_distance(probe, cand, target_attr);
      memo.emplace(key, out[i]);
    }
    return out;
  }

  std::unordered_map<std::vector<std::uint32_t>, std::optional<double>, SignatureHash> memo;
  memo.reserve(256);
  std::vector<std::uint32_t> sig(sig_cols.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::size_t cand = candidates[i];
    for (std::size_t s = 0; s < sig_cols.size(); ++s) sig[s] = cell_ids_[sig_cols[s]][cand];
    auto hit = memo.find(sig);
    if (hit != memo.end()) {
      out[i] = hit->second;
      continue;
    }
    out[i] = dimension_distance(probe, cand, target_attr);
    memo.emplace(sig, out[i]);
  }
  return out;
}

std::string DistanceEvaluator::row_signature(std::size_t row) const {
  std::string sig;
  auto append = [&](std::size_t col) {
    std::uint32_t id = cell_ids_[col][row];
    sig.append(reinterpret_cast<const char*>(&id), sizeof(id));
  };
  for (const auto& info : hiers_) {
    for (const auto& lc : info.levels) {
      append(lc.parameter);
      for (std::size_t w : lc.weaks) append(w);
    }
  }
  for (std::size_t w : id_weak_cols_) append(w);
  return sig;
}

}  // namespace dimpute
