#include "mdmkit/rng.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace mdmkit {

int worker_count() {
    if (const char* env = std::getenv("MDMKIT_WORKERS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace mdmkit
