// FFTW's planner is not reentrant; every plan create/destroy goes through this lock.
#pragma once

#include <mutex>

namespace kgl {
namespace detail {
    std::mutex& fftw_planner_mutex();
}
}
