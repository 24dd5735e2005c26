#include "xvine/parallel.hpp"

#include <cstdlib>
#include <string>

namespace xvine {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("XVINE_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace xvine
