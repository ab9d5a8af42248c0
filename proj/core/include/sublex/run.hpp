#pragma once

namespace sublex {

/// The whole command-line program: parses argv, dispatches the subcommand,
/// writes the report and returns the process exit code.
///
///   0  run completed and every verdict passed
///   1  invalid configuration or invocation
///   2  the run completed but a verdict failed
///   3  numerical failure (quadrature, grid resolution, overflow)
int run_cli(int argc, char** argv);

}  // namespace sublex
