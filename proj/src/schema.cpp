#include "dimpute/schema.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dimpute/table.hpp"

namespace dimpute {

namespace {

const std::vector<std::string> kNoWeaks;

[[noreturn]] void schema_error(const std::string& what) {
  throw std::runtime_error("schema error: " + what);
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

AttrKind parse_kind(const std::string& kind) {
  if (kind == "numeric") return AttrKind::Numeric;
  if (kind == "text") return AttrKind::Text;
  schema_error("unknown attribute kind '" + kind + "' (expected numeric or text)");
}

}  // namespace

const std::vector<std::string>& HierarchyDef::weak_of(const std::string& parameter) const {
  auto it = weak.find(parameter);
  return it == weak.end() ? kNoWeaks : it->second;
}

const AttributeDef* DimensionSchema::find_attribute(const std::string& name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::optional<std::size_t> DimensionSchema::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> DimensionSchema::id_weak_attributes() const {
  std::vector<std::string> result;
  std::unordered_set<std::string> seen;
  for (const auto& h : hierarchies) {
    if (h.parameters.empty()) continue;
    for (const auto& w : h.weak_of(h.parameters.front())) {
      if (seen.insert(w).second) result.push_back(w);
    }
  }
  return result;
}

DimensionSchema parse_schema(const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_column(source, e.byte > 0 ? e.byte - 1 : 0);
    throw std::runtime_error("schema parse error at line " + std::to_string(line) +
                             ", column " + std::to_string(col) + ": " + e.what());
  }

  DimensionSchema schema;
  try {
    if (!doc.is_object()) schema_error("top-level document must be an object");
    schema.id_attribute = doc.at("id").get<std::string>();
    for (const auto& attr : doc.at("attributes")) {
      AttributeDef def;
      def.name = attr.at("name").get<std::string>();
      def.kind = attr.contains("kind") ? parse_kind(attr.at("kind").get<std::string>())
                                       : AttrKind::Text;
      schema.attributes.push_back(std::move(def));
    }
    if (doc.contains("hierarchies")) {
      for (const auto& h : doc.at("hierarchies")) {
        HierarchyDef def;
        def.name = h.at("name").get<std::string>();
        for (const auto& p : h.at("parameters")) {
          def.parameters.push_back(p.get<std::string>());
        }
        if (h.contains("weak")) {
          for (const auto& [param, weaks] : h.at("weak").items()) {
            for (const auto& w : weaks) {
              def.weak[param].push_back(w.get<std::string>());
            }
          }
        }
        schema.hierarchies.push_back(std::move(def));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    schema_error(std::string("malformed schema document: ") + e.what());
  }

  // Name resolution and duplicate hierarchy names are hard errors; the
  // structural invariants are validate_schema's job.
  std::unordered_set<std::string> attr_names;
  for (const auto& a : schema.attributes) attr_names.insert(a.name);
  if (!attr_names.count(schema.id_attribute)) {
    schema_error("unresolved attribute reference '" + schema.id_attribute + "' (id)");
  }
  std::unordered_set<std::string> hier_names;
  for (const auto& h : schema.hierarchies) {
    if (!hier_names.insert(h.name).second) {
      schema_error("duplicate hierarchy name '" + h.name + "'");
    }
    for (const auto& p : h.parameters) {
      if (!attr_names.count(p)) {
        schema_error("unresolved attribute reference '" + p + "' in hierarchy '" + h.name + "'");
      }
    }
    for (const auto& [param, weaks] : h.weak) {
      if (!attr_names.count(param)) {
        schema_error("unresolved attribute reference '" + param + "' in hierarchy '" +
                     h.name + "'");
      }
      for (const auto& w : weaks) {
        if (!attr_names.count(w)) {
          schema_error("unresolved attribute reference '" + w + "' in hierarchy '" +
                       h.name + "'");
        }
      }
    }
  }
  return schema;
}

DimensionSchema parse_schema_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open schema file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_schema(buffer.str());
}

std::vector<SchemaViolation> validate_schema(const DimensionSchema& schema) {
  std::vector<SchemaViolation> report;
  auto add = [&](std::string message) { report.push_back({std::move(message)}); };

  std::unordered_map<std::string, int> attr_count;
  for (const auto& a : schema.attributes) ++attr_count[a.name];
  for (const auto& [name, count] : attr_count) {
    if (count > 1) add("attribute '" + name + "' declared " + std::to_string(count) + " times");
  }
  if (!schema.find_attribute(schema.id_attribute)) {
    add("id attribute '" + schema.id_attribute + "' is not declared");
  }

  std::unordered_map<std::string, int> hier_count;
  for (const auto& h : schema.hierarchies) ++hier_count[h.name];
  for (const auto& [name, count] : hier_count) {
    if (count > 1) add("hierarchy '" + name + "' declared " + std::to_string(count) + " times");
  }

  for (const auto& h : schema.hierarchies) {
    if (h.parameters.empty()) {
      add("hierarchy '" + h.name + "': empty parameter list");
      continue;
    }
    if (h.parameters.front() != schema.id_attribute) {
      add("hierarchy '" + h.name + "': id must be first parameter");
    }
    std::unordered_set<std::string> params;
    for (const auto& p : h.parameters) {
      if (!params.insert(p).second) {
        add("hierarchy '" + h.name + "': parameter '" + p + "' repeated");
      }
      if (!schema.find_attribute(p)) {
        add("hierarchy '" + h.name + "': unknown attribute '" + p + "'");
      }
    }
    std::unordered_map<std::string, std::vector<std::string>> weak_parents;
    for (const auto& [param, weaks] : h.weak) {
      if (!params.count(param)) {
        add("hierarchy '" + h.name + "': weak attributes attached to non-parameter '" +
            param + "'");
      }
      for (const auto& w : weaks) {
        if (!schema.find_attribute(w)) {
          add("hierarchy '" + h.name + "': unknown attribute '" + w + "'");
        }
        if (params.count(w)) {
          add("hierarchy '" + h.name + "': weak attribute '" + w + "' is also a parameter");
        }
        weak_parents[w].push_back(param);
      }
    }
    for (const auto& [w, parents] : weak_parents) {
      // One violation per attachment beyond the first.
      for (std::size_t i = 1; i < parents.size(); ++i) {
        add("hierarchy '" + h.name + "': weak attribute '" + w +
            "' attached to more than one parameter ('" + parents[i] + "')");
      }
    }
  }
  return report;
}

std::string StrictnessViolation::message() const {
  std::string out = "hierarchy '" + hierarchy + "': " + lower_attribute + " value '" +
                    lower_value + "' maps to " + std::to_string(higher_values.size()) +
                    " distinct " + higher_attribute + " values:";
  for (const auto& v : higher_values) out += " '" + v + "'";
  return out;
}

std::vector<StrictnessViolation> validate_strictness(const DimensionSchema& schema,
                                                     const Table& table) {
  check_conformance(schema, table);
  std::vector<StrictnessViolation> violations;
  for (const auto& h : schema.hierarchies) {
    for (std::size_t l = 0; l + 1 < h.parameters.size(); ++l) {
      std::size_t low = table.column_index(h.parameters[l]);
      std::size_t high = table.column_index(h.parameters[l + 1]);
      std::map<std::string, std::set<std::string>> images;
      std::vector<std::string> order;
      for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (table.is_missing(r, low) || table.is_missing(r, high)) continue;
        auto [it, inserted] = images.try_emplace(table.value(r, low));
        if (inserted) order.push_back(table.value(r, low));
        it->second.insert(table.value(r, high));
      }
      for (const auto& value : order) {
        const auto& targets = images[value];
        if (targets.size() >= 2) {
          violations.push_back({h.name, h.parameters[l], value, h.parameters[l + 1],
                                {targets.begin(), targets.end()}});
        }
      }
    }
  }
  return violations;
}

}  // namespace dimpute
