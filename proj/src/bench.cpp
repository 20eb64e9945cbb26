#include "bench.hpp"

#include <exception>
#include <iomanip>

#include "errors.hpp"
#include "io.hpp"
#include "pipeline.hpp"

namespace itsforge {

int run_bench(const std::string& fixtures_dir, std::ostream& out, int max_multiplier,
              int repeats) {
  const auto catalog = load_catalog(fixtures_dir + "/catalog");
  out << "employee_config,rule_config,multiplier,repeat,duration_s,peak_bytes,segments,"
         "computers\n";
  int rows = 0;
  for (const char* employees : {"ers5", "ers7"})
    for (const char* rules : {"rules3", "rules5"}) {
      const auto base = load_params(fixtures_dir + "/params_" + std::string(employees) + "_" +
                                    rules + ".json");
      for (int multiplier = 1; multiplier <= max_multiplier; ++multiplier)
        for (int repeat = 1; repeat <= repeats; ++repeat) {
          InputParameters params = base;
          for (auto& [subgroup, count] : params.erss) count *= multiplier;
          out << employees << ',' << rules << ',' << multiplier << ',' << repeat << ',';
          try {
            auto result = generate(catalog, params);
            auto stats = model_statistics(result.model);
            out << std::fixed << std::setprecision(6) << result.report.total_seconds
                << std::defaultfloat << ',' << result.report.peak_bytes << ','
                << stats.segments << ',' << stats.computers << '\n';
          } catch (const std::exception&) {
            out << "FAILED,0,0,0\n";
          }
          ++rows;
        }
    }
  return rows;
}

}  // namespace itsforge
