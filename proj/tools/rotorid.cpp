#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "rotorid/error.hpp"
#include "rotorid/io.hpp"
#include "rotorid/kernels/dtft.hpp"
#include "rotorid/pipeline.hpp"

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotorcraft hover system identification: flight-test simulation, frequency responses, model fitting"};
  std::string config_path, out_dir, stage_arg = "pipeline";
  std::uint64_t seed = 0;
  bool print_config = false;
  app.add_option("--config", config_path, "Config file (section.key = value); defaults apply when omitted");
  app.add_option("--out", out_dir, "Output directory (overrides run.out_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides run.seed)");
  app.add_option("--stage", stage_arg,
                 "simulate | sweep | frespid | misosa | composite | derivid | verify | pipeline")
      ->capture_default_str();
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto stage = rotorid::parse_stage(stage_arg);
    if (!stage) rotorid::fail(rotorid::ErrorKind::Config, "unknown stage '" + stage_arg + "'");
    rotorid::PipelineConfig cfg = config_path.empty() ? rotorid::parse_config("") : rotorid::load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (print_config) {
      std::cout << rotorid::serialize_config(cfg);
      return 0;
    }
    const auto t0 = std::chrono::steady_clock::now();
    rotorid::run_stage(*stage, cfg, cfg.out_dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rotorid::write_text_atomic(
        (std::filesystem::path(cfg.out_dir) / "manifest.txt").string(),
        "stage " + stage_arg + "\nfinished " + utc_now() + "\nelapsed_s " + std::to_string(secs) + "\nseed " +
            std::to_string(cfg.seed) + "\nconfig " + (config_path.empty() ? "(defaults)" : config_path) +
            "\nkernel " + std::string(rotorid::kernels::backend_name(rotorid::kernels::active_backend())) + "\n");
    if (*stage == rotorid::Stage::Pipeline)
      std::cout << rotorid::read_text((std::filesystem::path(cfg.out_dir) / "summary.txt").string());
    return 0;
  } catch (const rotorid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(rotorid::ErrorKind::Data);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
