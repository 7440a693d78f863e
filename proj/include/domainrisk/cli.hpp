#pragma once

namespace drisk {

// Full command-line surface. Returns the process exit status:
// 0 success, 1 data error (diagnostic on stderr), 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace drisk
