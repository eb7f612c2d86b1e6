#pragma once

#include <string>

namespace contlab::cli {

int cmd_run(const std::string& config_path);
int cmd_sweep(const std::string& config_dir);
int cmd_verify(const std::string& inject_fault);
int cmd_report(const std::string& run_dir, bool heatmaps);

}  // namespace contlab::cli
