// Command line driver.  Subcommands:
//
//   mesh-check   --mesh <source>                 validate + regularity report
//   equilibrium  --config <file> [overrides]     thermal equilibrium fields
//   transient    --config <file> [overrides]     time series + snapshots
//   decay-scan   --config <file> --b <list>      decay rate per magnetic b
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O
// error.
#pragma once

#include <string>
#include <vector>

namespace hfvdd {

// args are the argv entries after the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace hfvdd
