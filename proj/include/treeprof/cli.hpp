#pragma once

namespace treeprof {

/// Exit codes: 0 success, 1 validation or input error, 2 numeric divergence
/// under --strict. Usage errors exit nonzero with a message on stderr.
int cli_main(int argc, char** argv);

}  // namespace treeprof
