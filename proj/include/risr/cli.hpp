#pragma once

namespace risr {

// Entry point of the command-line tool. Returns 0 on success, 1 on domain
// errors (bad scenarios, numerical failures), 2 on usage errors.
int run_cli(int argc, char** argv);

}  // namespace risr
