#include "l1tree/common.hpp"

#include <cmath>
#include <cstdio>

namespace l1tree {

double Rng::normal() {
    // Box-Muller, polar-free form; u1 in (0,1] to avoid log(0).
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_percent(double fraction) {
    double pct = std::round(fraction * 10000.0) / 100.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", pct);
    return std::string(buf);
}

std::uint64_t hash_indices(const std::vector<int>& indices) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (int idx : indices) {
        std::uint32_t v = static_cast<std::uint32_t>(idx);
        h = fnv1a(&v, sizeof(v), h);
    }
    return h;
}

}  // namespace l1tree
