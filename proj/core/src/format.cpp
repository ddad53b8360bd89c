#include "ttf/format.hpp"

#include <array>
#include <charconv>

namespace ttf {

std::string format_double(double x)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string format_double(const std::optional<double>& x)
{
    return x ? format_double(*x) : std::string();
}

} // namespace ttf
