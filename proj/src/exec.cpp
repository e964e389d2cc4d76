#include "ricci_lab/exec.hpp"

#include <cstdlib>
#include <string>

namespace ricci_lab {

int thread_cap() {
    const char* env = std::getenv("RICCI_LAB_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    try {
        const int n = std::stoi(env);
        return n > 0 ? n : 0;
    } catch (...) {
        return 0;
    }
}

} // namespace ricci_lab
