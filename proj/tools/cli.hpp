#pragma once

namespace bolab {

// Exit codes: 0 when every enabled check passes, 1 when one fails or the
// computation aborts, 2 on usage or config errors.
int run_cli(int argc, char** argv);

}  // namespace bolab
