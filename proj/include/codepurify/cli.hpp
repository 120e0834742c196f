#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace codepurify {

/// Entry point behind the `codepurify` executable. `args` excludes the
/// program name. Returns the process exit status: 0 iff every requested
/// artifact was written.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace codepurify
