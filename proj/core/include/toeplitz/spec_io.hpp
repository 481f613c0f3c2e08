#pragma once

// Construction specs: JSON documents naming a Toeplitz system.
//
//   {"kind": "pq",       "word": "a?b?c", "depth": 8}
//   {"kind": "perlevel", "words": ["a?b", "a?bbb"], "depth": 6}
//   {"kind": "blocks",   "k1": 4, "d0": 2, "scale": [...], "levels": 3, "mode": "toy"}
//   {"kind": "product",  "components": [<spec>, ...]}
//   {"kind": "product",  "d": 2, "a": 6, "entropy": "zero", "depth": 6}

#include "toeplitz/holewords.hpp"

#include <nlohmann/json_fwd.hpp>

#include <memory>
#include <string>

namespace toeplitz {

// Throws std::invalid_argument naming the offending field.
std::shared_ptr<const ToeplitzSystem> system_from_json(const nlohmann::json& spec);

// Human-readable schema summary for usage errors.
std::string spec_schema_help();

}  // namespace toeplitz
