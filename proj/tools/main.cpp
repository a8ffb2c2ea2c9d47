#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "rtplan/rtplan.h"

namespace {

using ConfigPtr = std::unique_ptr<rtplan_config, decltype(&rtplan_config_free)>;
using ResultPtr = std::unique_ptr<rtplan_result, decltype(&rtplan_result_free)>;

int exit_code_for(rtplan_status status) {
  switch (status) {
    case RTPLAN_OK:
      return 0;
    case RTPLAN_ERROR_RUNTIME:
    case RTPLAN_ERROR_IO:
      return 3;
    default:
      return 2;
  }
}

int report_failure(rtplan_status status) {
  std::fprintf(stderr, "error: %s\n", rtplan_last_error());
  return exit_code_for(status);
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "./out";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "planner configuration file")
      ->required();
  cmd->add_option("--seed", args->seed, "override the configured RNG seed");
  cmd->add_option("--out", args->out_dir, "output directory")
      ->capture_default_str();
}

// Returns 0 and fills `out` on success, else an exit code after printing
// the diagnostic.
int load_config(const CommonArgs& args, const std::string& algorithm,
                ConfigPtr& out) {
  rtplan_config* raw = nullptr;
  rtplan_status status = rtplan_config_from_file(args.config_path.c_str(), &raw);
  if (status != RTPLAN_OK) return report_failure(status);
  out = ConfigPtr(raw, &rtplan_config_free);
  if (args.seed_set) {
    status = rtplan_config_set_seed(out.get(), args.seed);
    if (status != RTPLAN_OK) return report_failure(status);
  }
  if (!algorithm.empty()) {
    status = rtplan_config_set_algorithm(out.get(), algorithm.c_str());
    if (status != RTPLAN_OK) return report_failure(status);
  }
  return 0;
}

int run_phantom_cmd(const CommonArgs& args) {
  ConfigPtr config(nullptr, &rtplan_config_free);
  if (int code = load_config(args, "", config); code != 0) return code;
  rtplan_status status = rtplan_run_phantom(config.get(), args.out_dir.c_str());
  if (status != RTPLAN_OK) return report_failure(status);
  std::printf("phantom labels written to %s/phantom.csv\n",
              args.out_dir.c_str());
  return 0;
}

int run_optimize_cmd(const CommonArgs& args, const std::string& algorithm) {
  ConfigPtr config(nullptr, &rtplan_config_free);
  if (int code = load_config(args, algorithm, config); code != 0) return code;
  rtplan_result* raw = nullptr;
  rtplan_status status =
      rtplan_run_optimize(config.get(), args.out_dir.c_str(), &raw);
  if (status != RTPLAN_OK) return report_failure(status);
  ResultPtr result(raw, &rtplan_result_free);

  const char* name = nullptr;
  std::uint64_t seed = 0;
  std::uint64_t evaluations = 0;
  double best = 0.0;
  double wall = 0.0;
  rtplan_result_algorithm(result.get(), &name);
  rtplan_result_seed(result.get(), &seed);
  rtplan_result_evaluations(result.get(), &evaluations);
  rtplan_result_best_fitness(result.get(), &best);
  rtplan_result_wall_seconds(result.get(), &wall);
  std::printf("algorithm %s, seed %llu: best fitness %.6g after %llu "
              "evaluations (%.2f s)\n",
              name, static_cast<unsigned long long>(seed), best,
              static_cast<unsigned long long>(evaluations), wall);
  std::printf("outputs written to %s\n", args.out_dir.c_str());
  return 0;
}

int run_compare_cmd(const CommonArgs& args) {
  ConfigPtr config(nullptr, &rtplan_config_free);
  if (int code = load_config(args, "", config); code != 0) return code;
  rtplan_status status = rtplan_run_compare(config.get(), args.out_dir.c_str());
  if (status != RTPLAN_OK) return report_failure(status);
  std::printf("comparison table written to %s/comparison.csv\n",
              args.out_dir.c_str());
  return 0;
}

int run_dvh_cmd(const CommonArgs& args, const std::string& weights_path) {
  ConfigPtr config(nullptr, &rtplan_config_free);
  if (int code = load_config(args, "", config); code != 0) return code;
  rtplan_status status = rtplan_run_dvh(config.get(), weights_path.c_str(),
                                        args.out_dir.c_str());
  if (status != RTPLAN_OK) return report_failure(status);
  std::printf("DVH written to %s/dvh_nominal.csv\n", args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust fluence-map planner for respiratory motion"};
  app.set_version_flag("--version", rtplan_version());
  app.require_subcommand(1);

  CommonArgs phantom_args;
  CLI::App* phantom = app.add_subcommand("phantom", "emit the phantom label CSV");
  add_common_flags(phantom, &phantom_args);

  CommonArgs optimize_args;
  std::string algorithm;
  CLI::App* optimize =
      app.add_subcommand("optimize", "run one optimizer on the robust objective");
  add_common_flags(optimize, &optimize_args);
  optimize->add_option("--algorithm", algorithm, "override the configured algorithm")
      ->check(CLI::IsMember({"cso", "fpa", "bso"}));

  CommonArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare", "run all three optimizers and tabulate doses");
  add_common_flags(compare, &compare_args);

  CommonArgs dvh_args;
  std::string weights_path;
  CLI::App* dvh =
      app.add_subcommand("dvh", "evaluate a saved plan's DVH under the nominal PDF");
  add_common_flags(dvh, &dvh_args);
  dvh->add_option("weights", weights_path, "plan weights CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  phantom_args.seed_set = phantom->count("--seed") > 0;
  optimize_args.seed_set = optimize->count("--seed") > 0;
  compare_args.seed_set = compare->count("--seed") > 0;
  dvh_args.seed_set = dvh->count("--seed") > 0;

  if (phantom->parsed()) return run_phantom_cmd(phantom_args);
  if (optimize->parsed()) return run_optimize_cmd(optimize_args, algorithm);
  if (compare->parsed()) return run_compare_cmd(compare_args);
  if (dvh->parsed()) return run_dvh_cmd(dvh_args, weights_path);
  return 2;
}
