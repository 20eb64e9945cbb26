#include "pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "alloc_tracker.hpp"
#include "chooser.hpp"
#include "datasets.hpp"
#include "errors.hpp"
#include "realizer.hpp"
#include "segmenter.hpp"
#include "verifier.hpp"

namespace itsforge {

GenerationResult generate(const TemplateCatalog& catalog, const InputParameters& params) {
  alloc_tracker::Scope scope;
  GenerationResult result;
  ItsModel& m = result.model;
  m.templates = catalog.software;
  m.collections = params.data_collections;

  auto timed = [&](const char* phase, auto&& step) {
    auto start = std::chrono::steady_clock::now();
    step();
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.report.phases.push_back({phase, elapsed.count()});
    result.report.total_seconds += elapsed.count();
    if (getenv("ITSFORGE_DEBUG_MEM"))
      fprintf(stderr, "[mem] after %-22s live=%lld peak=%lld\n", phase,
              (long long)alloc_tracker::live_bytes(), (long long)scope.peak_bytes());
  };
  timed("choose_software", [&] { choose_software(m, catalog, params); });
  timed("instantiate_datasets", [&] { instantiate_datasets(m); });
  timed("segment_network", [&] { segment_network(m, params); });
  timed("install_computers", [&] { install_computers(m, params); });
  timed("init_authentication", [&] { init_authentication(m); });
  timed("init_firewall", [&] { init_firewall(m, params); });

  auto violations = verify(m, params);
  if (!violations.empty())
    throw InternalError("generated model fails verification: " + violations[0].code + ": " +
                        violations[0].message);
  result.report.peak_bytes = scope.peak_bytes();
  return result;
}

}  // namespace itsforge
