#include "spinmarket/text.hpp"

#include "spinmarket/errors.hpp"

#include <charconv>

namespace spinmarket {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what)
{
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw io_error(std::string(what) + ": cannot parse '" + std::string(text) + "' as a number");
    }
    return v;
}

long long parse_int(std::string_view text, std::string_view what)
{
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw io_error(std::string(what) + ": cannot parse '" + std::string(text) + "' as an integer");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace spinmarket
