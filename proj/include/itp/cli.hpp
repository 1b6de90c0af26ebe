#pragma once

// Experiment driver: reads a sectioned run config (plus a few override
// flags), dispatches the subcommand, writes deterministic CSV/JSON
// artifacts under the output directory, and maps failures to the exit-code
// contract: 0 all checks pass, 1 invariant violation, 2 invalid input.

namespace itp::cli {

int run(int argc, const char* const* argv);

}  // namespace itp::cli
