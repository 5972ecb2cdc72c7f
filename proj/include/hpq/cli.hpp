#pragma once

namespace hpq::cli {

// Exit codes: 0 success, 1 precondition/input violation, 2 pipeline failure.
int run(int argc, const char* const* argv);

}  // namespace hpq::cli
