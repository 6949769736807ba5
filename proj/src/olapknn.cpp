#include "dimpute/olapknn.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "dimpute/hier_impute.hpp"

namespace dimpute {

namespace {

std::vector<std::size_t> span_columns(const Table& table, const HierarchyDef& hierarchy,
                                      const CGDescriptor& cg) {
  std::vector<std::size_t> cols;
  cols.reserve(cg.span_size);
  for (std::size_t i = cg.span_begin; i < cg.span_end(); ++i) {
    cols.push_back(table.column_index(hierarchy.parameters[i]));
  }
  return cols;
}

bool all_missing(const Table& table, std::size_t row, const std::vector<std::size_t>& cols) {
  for (std::size_t c : cols) {
    if (!table.is_missing(row, c)) return false;
  }
  return true;
}

bool none_missing(const Table& table, std::size_t row, const std::vector<std::size_t>& cols) {
  for (std::size_t c : cols) {
    if (table.is_missing(row, c)) return false;
  }
  return true;
}

// value of the parameter -> weak value of the first row carrying both.
using WeakWitnessMap = std::unordered_map<std::string, std::string>;

// Witness maps for every (span parameter, weak attribute) pair, keyed by the
// weak column. Built once per replacement commit; a weak cell filled during
// the commit only ever replicates an existing witness, so the pre-commit maps
// are equivalent to rescanning.
struct SpanWeakWitnesses {
  std::vector<std::tuple<std::size_t, std::size_t, WeakWitnessMap>> entries;  // param, weak, map

  SpanWeakWitnesses(const Table& table, const HierarchyDef& hierarchy, const CGDescriptor& cg) {
    for (std::size_t i = cg.span_begin; i < cg.span_end(); ++i) {
      const std::string& parameter = hierarchy.parameters[i];
      std::size_t param_col = table.column_index(parameter);
      for (const auto& w : hierarchy.weak_of(parameter)) {
        std::size_t weak_col = table.column_index(w);
        WeakWitnessMap map;
        for (std::size_t r = 0; r < table.row_count(); ++r) {
          if (table.is_missing(r, param_col) || table.is_missing(r, weak_col)) continue;
          map.try_emplace(table.value(r, param_col), table.value(r, weak_col));
        }
        entries.emplace_back(param_col, weak_col, std::move(map));
      }
    }
  }

  std::size_t complete(Table& table, std::size_t row) const {
    std::size_t fills = 0;
    for (const auto& [param_col, weak_col, map] : entries) {
      if (table.is_missing(row, param_col) || !table.is_missing(row, weak_col)) continue;
      auto hit = map.find(table.value(row, param_col));
      if (hit != map.end()) {
        table.fill(row, weak_col, hit->second);
        ++fills;
      }
    }
    return fills;
  }
};

}  // namespace

std::vector<std::size_t> find_missing_instances(const Table& table,
                                                const HierarchyDef& hierarchy,
                                                const CGDescriptor& cg) {
  auto span = span_columns(table, hierarchy, cg);
  std::optional<std::size_t> low_col, high_col;
  if (cg.p_low) low_col = table.column_index(hierarchy.parameters[*cg.p_low]);
  if (cg.p_high) high_col = table.column_index(hierarchy.parameters[*cg.p_high]);

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (!all_missing(table, r, span)) continue;
    if (low_col && table.is_missing(r, *low_col)) continue;
    if (high_col && table.is_missing(r, *high_col)) continue;
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> get_candidate_list(const Table& table, const HierarchyDef& hierarchy,
                                            const CGDescriptor& cg, std::size_t missing_row,
                                            CandidateMode mode, const std::string& weak_attr) {
  std::vector<std::size_t> rows;
  if (mode == CandidateMode::Weak) {
    std::size_t weak_col = table.column_index(weak_attr);
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (!table.is_missing(r, weak_col)) rows.push_back(r);
    }
    return rows;
  }
  auto span = span_columns(table, hierarchy, cg);
  if (cg.p_high) {
    std::size_t high_col = table.column_index(hierarchy.parameters[*cg.p_high]);
    const std::string& anchor = table.value(missing_row, high_col);
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (table.is_missing(r, high_col) || table.value(r, high_col) != anchor) continue;
      if (none_missing(table, r, span)) rows.push_back(r);
    }
  } else {
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (none_missing(table, r, span)) rows.push_back(r);
    }
  }
  return rows;
}

ValueWeightMap get_value_weight_map(const DistanceEvaluator& eval, std::size_t missing_row,
                                    const std::vector<std::size_t>& candidates, int k,
                                    const std::vector<std::size_t>& value_cols,
                                    const std::string& target_attr) {
  auto distances = eval.dimension_distances(missing_row, candidates, target_attr);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (distances[i]) scored.emplace_back(*distances[i], candidates[i]);
  }
  ValueWeightMap votes;
  if (scored.empty()) return votes;

  std::size_t kept = std::min<std::size_t>(k > 0 ? static_cast<std::size_t>(k) : 1,
                                           scored.size());
  if (kept < scored.size()) {
    std::nth_element(scored.begin(), scored.begin() + kept - 1, scored.end());
    scored.resize(kept);
  }
  std::sort(scored.begin(), scored.end());
  double nearest = scored.front().first;
  double farthest = scored[kept - 1].first;
  for (std::size_t i = 0; i < kept; ++i) {
    double weight = farthest == nearest
                        ? 1.0
                        : (farthest - scored[i].first) / (farthest - nearest);
    std::vector<std::string> tuple;
    tuple.reserve(value_cols.size());
    for (std::size_t col : value_cols) tuple.push_back(eval.table().value(scored[i].second, col));
    votes[std::move(tuple)] += weight;
  }
  return votes;
}

const std::pair<const std::vector<std::string>, double>& top_entry(const ValueWeightMap& map) {
  if (map.empty()) throw std::logic_error("top_entry on empty value weight map");
  auto best = map.begin();
  for (auto it = std::next(map.begin()); it != map.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return *best;
}

std::size_t replace_no_plow(Table& table, const Table& snapshot, const DimensionSchema& schema,
                            const HierarchyDef& hierarchy, const CGDescriptor& cg,
                            LowMap& low_map, const ValueWeightMap& vote,
                            std::size_t missing_row) {
  (void)schema;
  const auto& [tuple, weight] = top_entry(vote);
  if (cg.p_low) {
    std::size_t low_col = snapshot.column_index(hierarchy.parameters[*cg.p_low]);
    low_map[snapshot.value(missing_row, low_col)][tuple] += weight;
    return 0;
  }
  std::size_t fills = 0;
  auto span = span_columns(table, hierarchy, cg);
  SpanWeakWitnesses witnesses(table, hierarchy, cg);
  for (std::size_t i = 0; i < span.size(); ++i) {
    if (table.is_missing(missing_row, span[i])) {
      table.fill(missing_row, span[i], tuple[i]);
      ++fills;
    }
  }
  fills += witnesses.complete(table, missing_row);
  return fills;
}

std::size_t replace_plow(Table& table, const DimensionSchema& schema,
                         const HierarchyDef& hierarchy, const CGDescriptor& cg,
                         const LowMap& low_map) {
  (void)schema;
  if (!cg.p_low) throw std::logic_error("replace_plow on a group without p_low");
  if (low_map.empty()) return 0;
  std::size_t low_col = table.column_index(hierarchy.parameters[*cg.p_low]);
  auto span = span_columns(table, hierarchy, cg);
  SpanWeakWitnesses witnesses(table, hierarchy, cg);

  std::unordered_map<std::string, std::vector<std::size_t>> rows_by_low;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (!table.is_missing(r, low_col)) rows_by_low[table.value(r, low_col)].push_back(r);
  }

  std::size_t fills = 0;
  for (const auto& [low_value, votes] : low_map) {
    if (votes.empty()) continue;
    const auto& tuple = top_entry(votes).first;
    auto rows = rows_by_low.find(low_value);
    if (rows == rows_by_low.end()) continue;
    for (std::size_t r : rows->second) {
      if (!all_missing(table, r, span)) continue;
      for (std::size_t i = 0; i < span.size(); ++i) {
        table.fill(r, span[i], tuple[i]);
        ++fills;
      }
      fills += witnesses.complete(table, r);
    }
  }
  return fills;
}

std::size_t impute_parameters(EngineContext& ctx, const HierarchyDef& hierarchy) {
  const std::size_t levels = hierarchy.parameters.size();
  if (levels < 2) return 0;
  const std::string& target_attr = hierarchy.parameters[1];
  std::size_t fills = 0;

  for (std::size_t group_size = 1; group_size < levels; ++group_size) {
    for (std::size_t start = 1; start + group_size <= levels; ++start) {
      CGDescriptor cg;
      cg.hierarchy = hierarchy.name;
      cg.span_begin = start;
      cg.span_size = group_size;
      cg.p_low = start - 1;
      if (start + group_size < levels) cg.p_high = start + group_size;

      auto missing = find_missing_instances(ctx.table, hierarchy, cg);
      if (ctx.trace) {
        ctx.trace->push_back({hierarchy.name, group_size, start, missing.size()});
      }
      if (missing.empty()) continue;

      const Table snapshot = ctx.table.snapshot();
      DistanceEvaluator eval(snapshot, ctx.schema, ctx.model, ctx.provider, ctx.sampling);
      auto span = span_columns(snapshot, hierarchy, cg);

      // Candidate lists depend only on the p_high value (or on nothing at
      // all), so they are grouped once per pass.
      std::vector<std::size_t> shared_candidates;
      std::unordered_map<std::string, std::vector<std::size_t>> anchored_candidates;
      if (cg.p_high) {
        std::size_t high_col = snapshot.column_index(hierarchy.parameters[*cg.p_high]);
        for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
          if (snapshot.is_missing(r, high_col) || !none_missing(snapshot, r, span)) continue;
          anchored_candidates[snapshot.value(r, high_col)].push_back(r);
        }
      } else {
        for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
          if (none_missing(snapshot, r, span)) shared_candidates.push_back(r);
        }
      }
      std::size_t high_col =
          cg.p_high ? snapshot.column_index(hierarchy.parameters[*cg.p_high]) : 0;
      const std::vector<std::size_t> kNoCandidates;

      LowMap low_map;
      // Probes with equal anchors and value signatures get identical votes.
      std::unordered_map<std::string, ValueWeightMap> vote_cache;
      for (std::size_t im : missing) {
        const std::vector<std::size_t>* candidates = &shared_candidates;
        std::string cache_key;
        if (cg.p_high) {
          const std::string& anchor = snapshot.value(im, high_col);
          auto hit = anchored_candidates.find(anchor);
          candidates = hit == anchored_candidates.end() ? &kNoCandidates : &hit->second;
          cache_key = anchor;
        }
        if (candidates->empty()) continue;
        cache_key += '\x1f';
        cache_key += eval.row_signature(im);
        auto cached = vote_cache.find(cache_key);
        if (cached == vote_cache.end()) {
          cached = vote_cache
                       .emplace(std::move(cache_key),
                                get_value_weight_map(eval, im, *candidates, ctx.k, span,
                                                     target_attr))
                       .first;
        }
        const ValueWeightMap& votes = cached->second;
        if (votes.empty()) continue;
        fills += replace_no_plow(ctx.table, snapshot, ctx.schema, hierarchy, cg, low_map,
                                 votes, im);
      }
      fills += replace_plow(ctx.table, ctx.schema, hierarchy, cg, low_map);
    }
  }
  return fills;
}

std::size_t impute_weak(EngineContext& ctx, const HierarchyDef& hierarchy) {
  std::size_t fills = 0;
  for (std::size_t pi = 0; pi < hierarchy.parameters.size(); ++pi) {
    const std::string& parameter = hierarchy.parameters[pi];
    for (const auto& weak : hierarchy.weak_of(parameter)) {
      std::size_t weak_col = ctx.table.column_index(weak);
      std::size_t param_col = ctx.table.column_index(parameter);

      bool any_missing = false;
      for (std::size_t r = 0; r < ctx.table.row_count() && !any_missing; ++r) {
        any_missing = ctx.table.is_missing(r, weak_col);
      }
      if (!any_missing) continue;

      const Table snapshot = ctx.table.snapshot();
      DistanceEvaluator eval(snapshot, ctx.schema, ctx.model, ctx.provider, ctx.sampling);
      // The weak acts as the topmost parameter of its hierarchy slice; a weak
      // of the id is its own one-parameter target.
      const std::string& target_attr =
          (pi == 0 || hierarchy.parameters.size() < 2) ? weak : hierarchy.parameters[1];

      CGDescriptor cg;  // only used to tag candidate-list calls
      cg.hierarchy = hierarchy.name;
      auto candidates =
          get_candidate_list(snapshot, hierarchy, cg, 0, CandidateMode::Weak, weak);
      std::vector<std::size_t> value_cols{weak_col};

      // value of parameter -> weak value of the first row carrying both
      std::unordered_map<std::string, const std::string*> witness;
      for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
        if (snapshot.is_missing(r, param_col) || snapshot.is_missing(r, weak_col)) continue;
        witness.try_emplace(snapshot.value(r, param_col), &snapshot.value(r, weak_col));
      }

      LowMap low_map;
      for (std::size_t r = 0; r < snapshot.row_count(); ++r) {
        if (!snapshot.is_missing(r, weak_col) || !ctx.table.is_missing(r, weak_col)) continue;
        if (!snapshot.is_missing(r, param_col)) {
          auto hit = witness.find(snapshot.value(r, param_col));
          if (hit != witness.end()) {
            ctx.table.fill(r, weak_col, *hit->second);
            ++fills;
            continue;
          }
          if (candidates.empty()) continue;
          auto votes = get_value_weight_map(eval, r, candidates, ctx.k, value_cols, target_attr);
          if (votes.empty()) continue;
          const auto& [tuple, weight] = top_entry(votes);
          low_map[snapshot.value(r, param_col)][tuple] += weight;
        } else {
          if (candidates.empty()) continue;
          auto votes = get_value_weight_map(eval, r, candidates, ctx.k, value_cols, target_attr);
          if (votes.empty()) continue;
          if (ctx.table.is_missing(r, weak_col)) {
            ctx.table.fill(r, weak_col, top_entry(votes).first.front());
            ++fills;
          }
        }
      }

      // Rows sharing a parameter value receive one common winner.
      if (!low_map.empty()) {
        std::unordered_map<std::string, std::vector<std::size_t>> rows_by_param;
        for (std::size_t r = 0; r < ctx.table.row_count(); ++r) {
          if (!ctx.table.is_missing(r, param_col)) {
            rows_by_param[ctx.table.value(r, param_col)].push_back(r);
          }
        }
        for (const auto& [param_value, votes] : low_map) {
          if (votes.empty()) continue;
          const std::string& winner = top_entry(votes).first.front();
          auto rows = rows_by_param.find(param_value);
          if (rows == rows_by_param.end()) continue;
          for (std::size_t r : rows->second) {
            if (ctx.table.is_missing(r, weak_col)) {
              ctx.table.fill(r, weak_col, winner);
              ++fills;
            }
          }
        }
      }
    }
  }
  return fills;
}

PipelineReport h_olapknn(Table& table, const DimensionSchema& schema,
                         const ImputeConfig& config, const AttributeDistanceProvider* provider,
                         std::vector<PassEvent>* trace, std::ostream* warnings) {
  if (config.k < 1) throw std::invalid_argument("k must be >= 1");
  auto violations = validate_schema(schema);
  if (!violations.empty()) {
    throw std::runtime_error("invalid schema: " + violations.front().message);
  }
  check_conformance(schema, table);

  using Clock = std::chrono::steady_clock;
  PipelineReport report;
  report.rows = table.row_count();
  report.missing_before = table.missing_count();

  auto t0 = Clock::now();
  report.hierarchical_fills = hierarchical_imputation(table, schema);
  auto t1 = Clock::now();

  DistanceModel model = build_distance_model(table, schema, config.level_weight,
                                             config.hierarchy_weight, warnings);
  std::optional<StandardProvider> standard;
  if (provider == nullptr) {
    standard.emplace(model.attr_stats, config.embeddings);
    provider = &*standard;
  }

  SamplingConfig sampling = config.sampling;
  sampling.seed = config.seed;
  EngineContext ctx{table, schema, model, *provider, config.k, sampling, trace};
  for (const auto& h : schema.hierarchies) {
    report.parameter_fills += impute_parameters(ctx, h);
    report.weak_fills += impute_weak(ctx, h);
  }
  auto t2 = Clock::now();

  report.missing_after = table.missing_count();
  report.hierarchical_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.knn_seconds = std::chrono::duration<double>(t2 - t1).count();
  report.total_seconds = std::chrono::duration<double>(t2 - t0).count();
  return report;
}

}  // namespace dimpute
