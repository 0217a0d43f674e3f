#pragma once

namespace groundpose {

/// Execution policy of the data-parallel kernels. `Serial` is the reference
/// path; `Parallel` distributes independent work items over OpenMP threads and
/// must produce bitwise-identical output.
enum class Exec { Serial, Parallel };

}  // namespace groundpose
