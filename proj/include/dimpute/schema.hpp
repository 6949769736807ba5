#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dimpute {

class Table;

enum class AttrKind { Numeric, Text };

struct AttributeDef {
  std::string name;
  AttrKind kind = AttrKind::Text;
};

// An analysis hierarchy: an ordered list of parameters from the dimension id
// (level 1) up to the coarsest granularity, each parameter optionally carrying
// weak (descriptive) attributes.
struct HierarchyDef {
  std::string name;
  std::vector<std::string> parameters;
  std::map<std::string, std::vector<std::string>> weak;  // parameter -> weaks

  const std::vector<std::string>& weak_of(const std::string& parameter) const;
  std::size_t level_count() const { return parameters.size(); }
};

struct DimensionSchema {
  std::string id_attribute;
  std::vector<AttributeDef> attributes;
  std::vector<HierarchyDef> hierarchies;

  const AttributeDef* find_attribute(const std::string& name) const;
  std::optional<std::size_t> attribute_index(const std::string& name) const;

  // Weak attributes attached to the id parameter, in declaration order,
  // deduplicated across hierarchies. These act as one-parameter hierarchies
  // in the distance model.
  std::vector<std::string> id_weak_attributes() const;
};

// Parses the JSON schema document (see README for the grammar). Throws
// std::runtime_error on malformed input, unresolved attribute references and
// duplicate hierarchy names; the message carries line/column where available.
DimensionSchema parse_schema(const std::string& source);
DimensionSchema parse_schema_file(const std::string& path);

struct SchemaViolation {
  std::string message;
};

// Structural validation. Violations are data, not errors: an empty report
// means the schema satisfies every invariant.
std::vector<SchemaViolation> validate_schema(const DimensionSchema& schema);

struct StrictnessViolation {
  std::string hierarchy;
  std::string lower_attribute;
  std::string lower_value;
  std::string higher_attribute;
  std::vector<std::string> higher_values;  // >= 2 distinct values, sorted

  std::string message() const;
};

// Checks that every adjacent parameter pair of every hierarchy is a function
// on the non-missing cells: one violation per lower value mapped to two or
// more distinct higher values. Missing cells never create violations.
// Throws if the table columns do not match the schema.
std::vector<StrictnessViolation> validate_strictness(const DimensionSchema& schema,
                                                     const Table& table);

}  // namespace dimpute
