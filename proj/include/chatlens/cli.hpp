#pragma once

namespace chatlens::cli {

/// Entry point of the `chatlens` tool. Returns the process exit code:
/// 0 on success, 1 for usage errors, 2 for data errors.
int run(int argc, char** argv);

}  // namespace chatlens::cli
