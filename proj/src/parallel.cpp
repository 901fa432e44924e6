#include "mvpress/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mvpress {

std::size_t default_threads() {
    const char* env = std::getenv("MVPRESS_THREADS");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    try {
        const long v = std::stol(env);
        return v >= 1 ? static_cast<std::size_t>(v) : 1;
    } catch (...) {
        return 1;
    }
}

} // namespace mvpress
