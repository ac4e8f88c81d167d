#pragma once

namespace emberline {

/// Entry point for the `emberline` executable. Returns 0 on success, 2 for
/// bad flags (after printing usage) and 1 for runtime errors.
int cli_main(int argc, char** argv);

}  // namespace emberline
