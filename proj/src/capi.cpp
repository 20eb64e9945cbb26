#include "itsforge.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "bench.hpp"
#include "dot_export.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"
#include "verifier.hpp"

struct itsforge_model {
  itsforge::ItsModel model;
};

struct itsforge_report {
  itsforge::GenerationReport report;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_error(char** out_error, const std::string& message) {
  if (out_error) *out_error = dup_string(message);
}

int code_of(const std::exception& e) {
  if (dynamic_cast<const itsforge::InfeasibleError*>(&e)) return ITSFORGE_ERR_INFEASIBLE;
  if (dynamic_cast<const itsforge::InputError*>(&e)) return ITSFORGE_ERR_INPUT;
  return ITSFORGE_ERR_INTERNAL;
}

template <typename Fn>
int guarded(char** out_error, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    set_error(out_error, e.what());
    return code_of(e);
  }
}

}  // namespace

extern "C" {

int itsforge_generate(const char* templates_dir, const char* params_path,
                      const char* seed_override, itsforge_model** out_model,
                      itsforge_report** out_report, char** out_error) {
  if (!templates_dir || !params_path || !out_model) {
    set_error(out_error, "missing argument");
    return ITSFORGE_ERR_INPUT;
  }
  return guarded(out_error, [&] {
    auto catalog = itsforge::load_catalog(templates_dir);
    auto params = itsforge::load_params(params_path);
    if (seed_override) {
      try {
        params.seed = std::stoull(seed_override);
      } catch (const std::exception&) {
        throw itsforge::InputError(std::string("invalid seed '") + seed_override + "'");
      }
    }
    auto result = itsforge::generate(catalog, params);
    *out_model = new itsforge_model{std::move(result.model)};
    if (out_report) *out_report = new itsforge_report{std::move(result.report)};
    return ITSFORGE_OK;
  });
}

int itsforge_model_read(const char* path, itsforge_model** out_model, char** out_error) {
  if (!path || !out_model) {
    set_error(out_error, "missing argument");
    return ITSFORGE_ERR_INPUT;
  }
  return guarded(out_error, [&] {
    *out_model = new itsforge_model{itsforge::read_model(path)};
    return ITSFORGE_OK;
  });
}

int itsforge_model_write(const itsforge_model* model, const char* path, char** out_error) {
  if (!model || !path) {
    set_error(out_error, "missing argument");
    return ITSFORGE_ERR_INPUT;
  }
  return guarded(out_error, [&] {
    itsforge::write_model(model->model, path);
    return ITSFORGE_OK;
  });
}

int itsforge_model_export_dot(const itsforge_model* model, const char* dir, char** out_error) {
  if (!model || !dir) {
    set_error(out_error, "missing argument");
    return ITSFORGE_ERR_INPUT;
  }
  return guarded(out_error, [&] {
    itsforge::export_dot(model->model, dir);
    return ITSFORGE_OK;
  });
}

int itsforge_verify(const itsforge_model* model, const char* params_path, int* out_violations,
                    char** out_report_text, char** out_error) {
  if (!model || !params_path) {
    set_error(out_error, "missing argument");
    return ITSFORGE_ERR_INPUT;
  }
  return guarded(out_error, [&] {
    auto params = itsforge::load_params(params_path);
    auto violations = itsforge::verify(model->model, params);
    if (out_violations) *out_violations = static_cast<int>(violations.size());
    if (out_report_text) *out_report_text = dup_string(itsforge::violations_text(violations));
    return violations.empty() ? ITSFORGE_OK : ITSFORGE_ERR_VIOLATIONS;
  });
}

int itsforge_model_stats(const itsforge_model* model, itsforge_stats* out) {
  if (!model || !out) return ITSFORGE_ERR_INPUT;
  auto s = itsforge::model_statistics(model->model);
  *out = {s.employees,  s.installations, s.instances, s.segments, s.internet_facing_segments,
          s.computers,  s.workstations,  s.servers,   s.credentials, s.firewall_rules};
  return ITSFORGE_OK;
}

double itsforge_report_total_seconds(const itsforge_report* report) {
  return report ? report->report.total_seconds : 0.0;
}

int64_t itsforge_report_peak_bytes(const itsforge_report* report) {
  return report ? report->report.peak_bytes : 0;
}

int itsforge_report_phase_count(const itsforge_report* report) {
  return report ? static_cast<int>(report->report.phases.size()) : 0;
}

const char* itsforge_report_phase_name(const itsforge_report* report, int index) {
  if (!report || index < 0 || index >= static_cast<int>(report->report.phases.size()))
    return nullptr;
  return report->report.phases[index].phase.c_str();
}

double itsforge_report_phase_seconds(const itsforge_report* report, int index) {
  if (!report || index < 0 || index >= static_cast<int>(report->report.phases.size())) return 0.0;
  return report->report.phases[index].seconds;
}

int itsforge_bench(const char* fixtures_dir, const char* out_csv_path, int max_multiplier,
                   int repeats, int* out_rows, char** out_error) {
  if (!fixtures_dir || !out_csv_path || max_multiplier < 1 || repeats < 1) {
    set_error(out_error, "missing or invalid argument");
    return ITSFORGE_ERR_INPUT;
  }
  return guarded(out_error, [&] {
    std::ofstream out(out_csv_path, std::ios::binary);
    if (!out) throw itsforge::InputError(std::string("cannot write ") + out_csv_path);
    int rows = itsforge::run_bench(fixtures_dir, out, max_multiplier, repeats);
    if (!out) throw itsforge::InputError(std::string("failed writing ") + out_csv_path);
    if (out_rows) *out_rows = rows;
    return ITSFORGE_OK;
  });
}

void itsforge_model_free(itsforge_model* model) { delete model; }

void itsforge_report_free(itsforge_report* report) { delete report; }

void itsforge_string_free(char* s) { std::free(s); }

const char* itsforge_version(void) { return "1.0.0"; }

}  // extern "C"
