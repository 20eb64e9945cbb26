#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "itsforge.h"

namespace {

void print_error(const char* what, char* message) {
  std::fprintf(stderr, "%s: %s\n", what, message ? message : "unknown error");
  itsforge_string_free(message);
}

int run_generate(const std::string& templates_dir, const std::string& params_path,
                 const std::string& out_path, const std::string& dot_dir,
                 const std::string& seed) {
  const char* seed_override = nullptr;
  std::string env_seed;
  if (!seed.empty()) {
    seed_override = seed.c_str();
  } else if (const char* env = std::getenv("ITSFORGE_SEED")) {
    env_seed = env;
    seed_override = env_seed.c_str();
  }

  itsforge_model* model = nullptr;
  itsforge_report* report = nullptr;
  char* error = nullptr;
  int rc = itsforge_generate(templates_dir.c_str(), params_path.c_str(), seed_override, &model,
                             &report, &error);
  if (rc != ITSFORGE_OK) {
    print_error("generate", error);
    return rc == ITSFORGE_ERR_INFEASIBLE ? 2 : rc == ITSFORGE_ERR_INPUT ? 1 : 3;
  }

  rc = itsforge_model_write(model, out_path.c_str(), &error);
  if (rc == ITSFORGE_OK && !dot_dir.empty())
    rc = itsforge_model_export_dot(model, dot_dir.c_str(), &error);
  if (rc != ITSFORGE_OK) {
    print_error("write", error);
    itsforge_model_free(model);
    itsforge_report_free(report);
    return 1;
  }

  itsforge_stats stats{};
  itsforge_model_stats(model, &stats);
  std::printf("employees            %lld\n", static_cast<long long>(stats.employees));
  std::printf("installations        %lld\n", static_cast<long long>(stats.installations));
  std::printf("dataset instances    %lld\n", static_cast<long long>(stats.instances));
  std::printf("segments             %lld (%lld internet facing)\n",
              static_cast<long long>(stats.segments),
              static_cast<long long>(stats.internet_facing_segments));
  std::printf("computers            %lld (%lld workstations, %lld servers)\n",
              static_cast<long long>(stats.computers),
              static_cast<long long>(stats.workstations),
              static_cast<long long>(stats.servers));
  std::printf("credentials          %lld\n", static_cast<long long>(stats.credentials));
  std::printf("firewall rules       %lld\n", static_cast<long long>(stats.firewall_rules));
  for (int i = 0; i < itsforge_report_phase_count(report); ++i)
    std::printf("%-20s %.3fs\n", itsforge_report_phase_name(report, i),
                itsforge_report_phase_seconds(report, i));
  std::printf("total                %.3fs, peak %lld bytes\n",
              itsforge_report_total_seconds(report),
              static_cast<long long>(itsforge_report_peak_bytes(report)));

  itsforge_model_free(model);
  itsforge_report_free(report);
  return 0;
}

int run_verify(const std::string& model_path, const std::string& params_path) {
  itsforge_model* model = nullptr;
  char* error = nullptr;
  int rc = itsforge_model_read(model_path.c_str(), &model, &error);
  if (rc != ITSFORGE_OK) {
    print_error("verify", error);
    return 1;
  }
  int violations = 0;
  char* text = nullptr;
  rc = itsforge_verify(model, params_path.c_str(), &violations, &text, &error);
  itsforge_model_free(model);
  if (rc == ITSFORGE_OK) {
    std::printf("model is consistent\n");
    itsforge_string_free(text);
    return 0;
  }
  if (rc == ITSFORGE_ERR_VIOLATIONS) {
    std::printf("%s", text ? text : "");
    std::printf("%d violation(s)\n", violations);
    itsforge_string_free(text);
    return 3;
  }
  itsforge_string_free(text);
  print_error("verify", error);
  return 1;
}

int run_bench(const std::string& fixtures_dir, const std::string& out_path, int max_multiplier,
              int repeats) {
  char* error = nullptr;
  int rows = 0;
  int rc = itsforge_bench(fixtures_dir.c_str(), out_path.c_str(), max_multiplier, repeats, &rows,
                          &error);
  if (rc != ITSFORGE_OK) {
    print_error("bench", error);
    return 1;
  }
  std::printf("wrote %d rows to %s\n", rows, out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("itsforge ") + itsforge_version() +
               " - organizational IT system generator"};
  app.require_subcommand(1);

  std::string templates_dir, params_path, out_path, dot_dir, seed, model_path, fixtures_dir;
  int max_multiplier = 15, repeats = 3;

  auto* generate = app.add_subcommand("generate", "generate a model from templates");
  generate->add_option("--templates", templates_dir, "template directory")->required();
  generate->add_option("--params", params_path, "parameter file")->required();
  generate->add_option("--out", out_path, "output model file")->required();
  generate->add_option("--dot", dot_dir, "directory for graphviz views");
  generate->add_option("--seed", seed, "seed override (also ITSFORGE_SEED)");

  auto* verify = app.add_subcommand("verify", "check a model for consistency");
  verify->add_option("--model", model_path, "model file")->required();
  verify->add_option("--params", params_path, "parameter file")->required();

  auto* bench = app.add_subcommand("bench", "run the scaling benchmark");
  bench->add_option("--fixtures", fixtures_dir, "fixtures directory")->required();
  bench->add_option("--out", out_path, "output CSV file")->required();
  bench->add_option("--max-multiplier", max_multiplier, "largest employee multiplier");
  bench->add_option("--repeats", repeats, "runs per configuration");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed())
    return run_generate(templates_dir, params_path, out_path, dot_dir, seed);
  if (verify->parsed()) return run_verify(model_path, params_path);
  return run_bench(fixtures_dir, out_path, max_multiplier, repeats);
}
