#pragma once

#include "dimpute/schema.hpp"
#include "dimpute/table.hpp"

namespace dimpute {

// Exact imputation from intra-hierarchy functional dependencies: a missing
// parameter value at level l is copied from any other row that shares a
// non-missing lower-level parameter value (levels 2..l-1; the id is excluded
// as a witness since it is unique), and a missing weak attribute is copied
// from any row sharing its parameter's value. Passes repeat until fixpoint;
// witness search prefers the closest lower level, then the first row in table
// order. Returns the number of cells filled.
std::size_t hierarchical_imputation(Table& table, const DimensionSchema& schema);

}  // namespace dimpute
