#include "memlag/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace memlag {

std::string format_real(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string format_real17(double x) {
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

} // namespace memlag
