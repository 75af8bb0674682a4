#pragma once
// Structured-text records for families, generator descriptions and Gram matrices.

#include <json.hpp>

#include "nhlab/exponents.hpp"
#include "nhlab/gram.hpp"

namespace nhlab {

using json = nlohmann::ordered_json;

json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const json& j);

/// {label, first_index, exponents: [...]} plus the generator when known.
json family_to_json(const ExponentFamily& family);
ExponentFamily family_from_json(const json& j);

/// Complex entries as [re, im] pairs, row-major.
json gram_to_json(const GramMatrix& G);
GramMatrix gram_from_json(const json& j);

}  // namespace nhlab
