#pragma once

#include <cstdint>
#include <string>

#include "staffrec/evaluation.hpp"
#include "staffrec/tracker.hpp"

namespace staffrec {

/// Every tunable of the pipeline and the evaluator, with the standard
/// defaults. File values override defaults, command line flags override
/// both; the merged result is validated before anything runs.
struct Config {
  PipelineParams pipeline;
  EvalParams eval;
  int jobs = 1;
  std::uint64_t seed = 0;
};

/// Throws format_error naming the offending field when a merged config
/// violates a parameter invariant.
void validate_config(const Config& config);

/// Reads a flat JSON object of parameter overrides ("stripes", "ma_length",
/// ...). Unknown keys are rejected.
Config load_config_file(const std::string& path, const Config& base);

}  // namespace staffrec
