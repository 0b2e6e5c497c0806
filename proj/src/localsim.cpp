#include "hypermatch/localsim.hpp"

#include <cmath>

namespace hypermatch {

int log_star(double x) {
    int k = 0;
    while (x > 1.0) {
        x = std::log2(x);
        ++k;
    }
    return k;
}

}  // namespace hypermatch
