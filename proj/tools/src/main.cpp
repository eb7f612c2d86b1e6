#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"contlab: continuity-ladder runs, self-verification, and run reports"};
  app.require_subcommand(1);

  std::string config_path;
  std::string sweep_dir;
  CLI::App* run = app.add_subcommand("run", "integrate a ladder described by a config file");
  CLI::Option* pos = run->add_option("config", config_path, "INI config file");
  CLI::Option* sweep =
      run->add_option("--sweep", sweep_dir, "directory of .ini configs, one isolated run each");
  pos->excludes(sweep);
  sweep->excludes(pos);

  std::string fault;
  CLI::App* verify = app.add_subcommand("verify", "run the built-in operator cross-checks");
  verify->add_option("--inject-fault", fault)->group("");  // test hook, hidden from help

  std::string report_dir;
  bool heat = false;
  CLI::App* report = app.add_subcommand("report", "summarize a finished run directory");
  report->add_option("dir", report_dir, "run output directory")->required();
  report->add_flag("--heatmaps", heat, "write PGM heatmaps of the final fields");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (!sweep_dir.empty()) return contlab::cli::cmd_sweep(sweep_dir);
    if (config_path.empty()) {
      std::fprintf(stderr, "error: run needs a config file or --sweep <dir>\n");
      return 1;
    }
    return contlab::cli::cmd_run(config_path);
  }
  if (verify->parsed()) return contlab::cli::cmd_verify(fault);
  if (report->parsed()) return contlab::cli::cmd_report(report_dir, heat);
  return 1;
}
