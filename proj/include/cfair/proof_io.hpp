#pragma once

#include <string>
#include <string_view>

#include "cfair/error.hpp"
#include "cfair/kernel.hpp"

namespace cfair {

class ProofFormatError : public Error {
 public:
  using Error::Error;
};

/// JSON document
///   {"assumptions": ["<judgment>", ...],
///    "steps": [{"rule": "i_cut", "item": "<item>", "premise": [1], "conclusion": "<judgment>"}, ...]}
/// with every judgment and item in DSL syntax.
std::string write_proof(const Proof& proof);

/// Throws ProofFormatError. Parses only; call check_proof to validate.
Proof read_proof(std::string_view text);

}  // namespace cfair
