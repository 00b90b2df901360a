#pragma once

#include <string>

namespace saber {

// Serial is the reference implementation used to validate the OpenMP path;
// both produce bit-identical results: each work item writes only its own
// slot and reductions happen afterwards in index order.
enum class ExecMode : int { Serial = 0, OpenMP = 1 };

const char* exec_mode_name(ExecMode m);
ExecMode exec_mode_from_jobs(int jobs);

void set_omp_threads(int jobs);

template <typename Fn>
void parallel_for(int n, ExecMode mode, Fn&& fn) {
    if (mode == ExecMode::OpenMP) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) fn(i);
    } else {
        for (int i = 0; i < n; ++i) fn(i);
    }
}

}  // namespace saber
