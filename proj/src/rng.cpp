#include "cvsim/rng.hpp"

#include <cmath>

namespace cvsim {

std::size_t Rng::uniform_index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

double Rng::standard_normal() {
    for (;;) {
        const double u = 2.0 * uniform01() - 1.0;
        const double v = 2.0 * uniform01() - 1.0;
        const double s = u * u + v * v;
        if (s >= 1.0 || s == 0.0) continue;
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double Rng::exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

}  // namespace cvsim
