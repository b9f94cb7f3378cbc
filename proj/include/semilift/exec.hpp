#pragma once

namespace semilift {

// Selects between the serial reference path and the OpenMP path for the
// data-parallel kernels. Both paths must produce identical results; the
// test suite asserts this and the bench target compares their timing.
enum class ExecPolicy { Serial, Parallel };

inline ExecPolicy default_policy() {
#ifdef _OPENMP
    return ExecPolicy::Parallel;
#else
    return ExecPolicy::Serial;
#endif
}

} // namespace semilift
