#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "io.hpp"
#include "model.hpp"

namespace itsforge {

struct PhaseTiming {
  std::string phase;
  double seconds = 0;
};

struct GenerationReport {
  std::vector<PhaseTiming> phases;
  double total_seconds = 0;
  std::int64_t peak_bytes = 0;  // peak allocation growth while generating
};

struct GenerationResult {
  ItsModel model;
  GenerationReport report;
};

// Runs all six phases and verifies the result before returning it. The same
// catalog and parameters always produce the same model.
GenerationResult generate(const TemplateCatalog& catalog, const InputParameters& params);

}  // namespace itsforge
