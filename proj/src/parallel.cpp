#include "servotrack/parallel.hpp"

namespace servotrack {

unsigned effective_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace servotrack
