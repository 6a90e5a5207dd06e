#pragma once

#include <iosfwd>

namespace dpspin {

/// Entry point of the dpspin tool. Returns 0 on success, 1 on validation or
/// computation failure, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpspin
