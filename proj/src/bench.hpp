#pragma once

#include <ostream>
#include <string>

namespace itsforge {

// Sweeps the bundled organization fixtures over employee-count multipliers
// and writes one CSV row per run: both employee configurations, both rule
// configurations, multipliers 1..max_multiplier, `repeats` runs each. A run
// that fails produces a FAILED row instead of aborting the sweep. Returns the
// number of data rows written.
int run_bench(const std::string& fixtures_dir, std::ostream& out, int max_multiplier = 15,
              int repeats = 3);

}  // namespace itsforge
