// varint command-line front end. Exit codes: 0 success, 1 numerical failure,
// 2 configuration error.

#include "varint/varint.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

int exit_code(varint_status s) {
  if (s == VARINT_OK) return kExitOk;
  return s == VARINT_ERR_CONFIG || s == VARINT_ERR_INVALID_ARGUMENT || s == VARINT_ERR_IO ? kExitConfig
                                                                                          : kExitNumerical;
}

int report(varint_status s) {
  std::fprintf(stderr, "varint: %s error: %s\n", varint_status_string(s), varint_last_error());
  return exit_code(s);
}

// Loads the config file (if any) and applies the overrides in order.
varint_status build_config(const std::string& path, const std::vector<std::string>& overrides,
                           const std::string& output, varint_config** out) {
  varint_status s = path.empty() ? varint_config_create(out) : varint_config_load_file(path.c_str(), out);
  if (s != VARINT_OK) return s;
  for (const auto& kv : overrides) {
    s = varint_config_assign(*out, kv.c_str());
    if (s != VARINT_OK) return s;
  }
  if (!output.empty()) s = varint_config_set(*out, "output", output.c_str());
  return s;
}

struct ConfigGuard {
  varint_config* cfg = nullptr;
  ~ConfigGuard() { varint_config_destroy(cfg); }
};

int cmd_run(const std::string& path, const std::vector<std::string>& overrides, const std::string& output) {
  ConfigGuard g;
  varint_status s = build_config(path, overrides, output, &g.cfg);
  if (s != VARINT_OK) return report(s);
  varint_result* r = nullptr;
  s = varint_run(g.cfg, &r);
  if (s != VARINT_OK) return report(s);
  for (size_t i = 0; i < varint_result_summary_count(r); ++i)
    std::printf("%s=%s\n", varint_result_summary_key(r, i), varint_result_summary_value(r, i));
  int code = kExitOk;
  if (varint_result_error(r) != VARINT_OK) {
    std::fprintf(stderr, "varint: run failed (%s): %s\n", varint_status_string(varint_result_error(r)),
                 varint_result_diagnosis(r));
    code = kExitNumerical;
  } else if (!varint_result_met_tolerance(r)) {
    std::fprintf(stderr, "varint: run finished but some steps missed the solver tolerance\n");
    code = kExitNumerical;
  }
  varint_result_destroy(r);
  return code;
}

int cmd_suite(const std::string& name, const std::string& output, int workers,
              const std::vector<std::string>& overrides) {
  std::vector<const char*> ov;
  for (const auto& s : overrides) ov.push_back(s.c_str());
  varint_suite_result* r = nullptr;
  const std::string root = output.empty() ? "varint_out/" + name : output;
  const varint_status s = varint_suite_run(name.c_str(), root.c_str(), workers, ov.data(), ov.size(), &r);
  if (s != VARINT_OK) return report(s);
  for (size_t i = 0; i < varint_suite_count(r); ++i) {
    const bool ok = varint_suite_member_ok(r, i) != 0;
    const char* why = varint_suite_member_failure(r, i);
    std::printf("%-20s %s%s%s\n", varint_suite_member_name(r, i), ok ? "ok" : "FAILED", ok || !*why ? "" : ": ",
                ok ? "" : why);
  }
  std::printf("results in %s (comparison.csv)\n", root.c_str());
  const int failed = varint_suite_failed(r);
  varint_suite_destroy(r);
  return failed == 0 ? kExitOk : kExitNumerical;
}

int cmd_bea(const std::string& path, const std::vector<std::string>& overrides, const std::string& output) {
  ConfigGuard g;
  varint_status s = build_config(path, overrides, output, &g.cfg);
  if (s != VARINT_OK) return report(s);
  varint_bea_result* r = nullptr;
  s = varint_bea_run(g.cfg, &r);
  if (s != VARINT_OK) return report(s);
  std::printf("delta_a,residual_inf_norm,flag\n");
  for (int flag = 0; flag < 2; ++flag) {
    for (size_t i = 0; i < varint_bea_count(r); ++i) {
      double da = 0, off = 0, on = 0;
      varint_bea_point(r, i, &da, &off, &on);
      std::printf("%.17e,%.17e,%s\n", da, flag ? on : off, flag ? "on" : "off");
    }
  }
  double so = 0, sn = 0, seo = 0, sen = 0, ratio = 0;
  varint_bea_slopes(r, &so, &sn, &seo, &sen, &ratio);
  std::printf("# slope_off=%.6f slope_on=%.6f improvement=%.6f slope_E_off=%.6f slope_E_on=%.6f psi_ratio_off=%.6f\n",
              so, sn, sn - so, seo, sen, ratio);
  varint_bea_destroy(r);
  return kExitOk;
}

int cmd_list() {
  auto print = [](const char* title, size_t n, const char* (*name)(size_t)) {
    std::printf("%s:", title);
    for (size_t i = 0; i < n; ++i) std::printf(" %s", name(i));
    std::printf("\n");
  };
  print("problems", varint_problem_count(), varint_problem_name);
  print("integrators", varint_integrator_count(), varint_integrator_name);
  print("suites", varint_suite_name_count(), varint_suite_name);
  print("config keys", varint_config_key_count(), varint_config_key_name);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive variational integrators: experiments, suites and order studies"};
  app.require_subcommand(1);

  std::string config_path, output, suite_name;
  std::vector<std::string> overrides;
  int workers = 1;

  CLI::App* run = app.add_subcommand("run", "Run one configured experiment");
  run->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  run->add_option("--output", output, "output directory (overrides the output key)");
  run->add_option("overrides", overrides, "key=value settings applied after the config file");

  CLI::App* suite = app.add_subcommand("suite", "Run a registered suite");
  suite->add_option("name", suite_name, "suite name")->required();
  suite->add_option("--output", output, "output root (default varint_out/<name>)");
  suite->add_option("--workers", workers, "concurrent member runs")->check(CLI::PositiveNumber);
  suite->add_option("overrides", overrides, "key=value settings applied to every member");

  CLI::App* bea = app.add_subcommand("bea", "Residual order study for a 1-DOF problem");
  bea->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  bea->add_option("--output", output, "directory for bea.csv");
  bea->add_option("overrides", overrides, "key=value settings");

  app.add_subcommand("list", "List problems, integrators, suites and config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return cmd_run(config_path, overrides, output);
  if (*suite) return cmd_suite(suite_name, output, workers, overrides);
  if (*bea) return cmd_bea(config_path, overrides, output);
  return cmd_list();
}
