#include "saber/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace saber {

const char* exec_mode_name(ExecMode m) { return m == ExecMode::Serial ? "serial" : "openmp"; }

ExecMode exec_mode_from_jobs(int jobs) { return jobs > 1 ? ExecMode::OpenMP : ExecMode::Serial; }

void set_omp_threads(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

}  // namespace saber
