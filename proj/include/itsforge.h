#ifndef ITSFORGE_H
#define ITSFORGE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque handles. Free with the matching *_free function. */
typedef struct itsforge_model itsforge_model;
typedef struct itsforge_report itsforge_report;

/* Return codes. Functions that take out_error set it to a heap-allocated
 * message on failure; release it with itsforge_string_free. */
enum {
  ITSFORGE_OK = 0,
  ITSFORGE_ERR_INPUT = 1,      /* unreadable files or invalid schemas */
  ITSFORGE_ERR_INFEASIBLE = 2, /* parameters admit no consistent system */
  ITSFORGE_ERR_INTERNAL = 3,
  ITSFORGE_ERR_VIOLATIONS = 4, /* verification found violations */
};

/* Generates a model from a template directory (software.csv, roles.csv,
 * services.csv) and a parameter file. seed_override, when non-NULL, replaces
 * the seed from the parameter file. out_report may be NULL. */
int itsforge_generate(const char* templates_dir, const char* params_path,
                      const char* seed_override, itsforge_model** out_model,
                      itsforge_report** out_report, char** out_error);

int itsforge_model_read(const char* path, itsforge_model** out_model, char** out_error);
int itsforge_model_write(const itsforge_model* model, const char* path, char** out_error);

/* Writes landscape.dot, datasets.dot, credentials.dot, firewall.dot. */
int itsforge_model_export_dot(const itsforge_model* model, const char* dir, char** out_error);

/* Re-checks a model against its parameters. Returns ITSFORGE_OK with
 * *out_violations == 0 when consistent, ITSFORGE_ERR_VIOLATIONS otherwise;
 * out_report_text (optional) receives one line per violation. */
int itsforge_verify(const itsforge_model* model, const char* params_path, int* out_violations,
                    char** out_report_text, char** out_error);

typedef struct {
  int64_t employees;
  int64_t installations;
  int64_t instances;
  int64_t segments;
  int64_t internet_facing_segments;
  int64_t computers;
  int64_t workstations;
  int64_t servers;
  int64_t credentials;
  int64_t firewall_rules;
} itsforge_stats;

int itsforge_model_stats(const itsforge_model* model, itsforge_stats* out);

double itsforge_report_total_seconds(const itsforge_report* report);
int64_t itsforge_report_peak_bytes(const itsforge_report* report);
int itsforge_report_phase_count(const itsforge_report* report);
const char* itsforge_report_phase_name(const itsforge_report* report, int index);
double itsforge_report_phase_seconds(const itsforge_report* report, int index);

/* Runs the scaling benchmark over the bundled fixtures and writes the CSV to
 * out_csv_path. out_rows (optional) receives the number of data rows. */
int itsforge_bench(const char* fixtures_dir, const char* out_csv_path, int max_multiplier,
                   int repeats, int* out_rows, char** out_error);

void itsforge_model_free(itsforge_model* model);
void itsforge_report_free(itsforge_report* report);
void itsforge_string_free(char* s);

const char* itsforge_version(void);

#ifdef __cplusplus
}
#endif

#endif /* ITSFORGE_H */
