#pragma once

#include "biharm/config.hpp"

namespace biharm::cli {

// Exit codes: 0 all checks pass, 1 a numerical check failed, 2 usage or
// configuration error.
int cmd_verify(const config::RunConfig& cfg);
int cmd_spectrum(const config::RunConfig& cfg);
int cmd_evolve(const config::RunConfig& cfg);
int cmd_constants(const config::RunConfig& cfg);
int cmd_form_check(const config::RunConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace biharm::cli
