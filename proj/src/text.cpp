#include "isa/text.hpp"

#include <cmath>

#include <fmt/format.h>

namespace isa {

std::string format_fixed(double value) {
    std::string out = fmt::format("{:.6f}", value);
    if (out == "-0.000000") {
        out.erase(0, 1);
    }
    return out;
}

std::string format_fixed(const std::optional<double>& value) {
    return value ? format_fixed(*value) : std::string{};
}

std::string format_general(double value) {
    return fmt::format("{}", value);
}

}  // namespace isa
