#pragma once
#include <ostream>
#include <string>
#include <vector>

#include "rgl/config.hpp"

namespace rgl {

const std::vector<std::string>& subcommands();

// Runs one subcommand (or "all") into out_dir/<subcommand>/. Returns 0 on success,
// 1 when a verification fails, 2 on a configuration error.
int run(const std::string& subcommand, const Config& cfg, const std::string& out_dir, int workers,
        std::ostream& log);

}  // namespace rgl
