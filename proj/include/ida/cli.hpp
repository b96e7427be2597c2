// Command implementations behind the ida_sim binary: run, sweep, validate,
// describe. Exit codes: 0 success, 1 config error, 2 runtime or invariant
// violation.
#pragma once

#include <string>
#include <vector>

namespace ida::cli {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides);

// grid_specs: "dotted.key=v1,v2,...", one Cartesian axis per entry, first
// axis outermost. Each grid point runs in its own subdirectory; a summary
// CSV collects terminal coverage, total converted fraction, and mean
// capital efficiency.
int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& grid_specs,
              const std::vector<std::string>& overrides, int jobs);

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides);

int cmd_describe(const std::string& config_path, const std::vector<std::string>& overrides);

} // namespace ida::cli
