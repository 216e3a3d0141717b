#pragma once

#include "mrl/config.hpp"

namespace mrl {

// Subcommand entry points. Each validates its keys (unknown keys rejected),
// does the work, writes files under out.dir, and returns 0. Configuration
// problems throw ConfigError; failed mathematical invariants throw
// InvariantError.
int cmd_gen_data(const Config& cfg);
int cmd_run(const Config& cfg);
int cmd_theory(const Config& cfg);
int cmd_ingest_idx(const Config& cfg);
int cmd_eval(const Config& cfg);

// Full CLI: mrl <subcommand> [--config FILE] [--key value | --key=value]...
// Exit codes: 0 success, 2 configuration error, 3 invariant violation.
int dispatch(int argc, char** argv);

}  // namespace mrl
