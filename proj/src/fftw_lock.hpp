#pragma once

#include <mutex>

namespace nlfkpp::detail {

// FFTW's planner is not thread-safe; every plan creation and destruction in
// the library takes this lock. Executing existing plans does not.
std::mutex& fftw_planner_mutex();

}  // namespace nlfkpp::detail
