#include "carets/common.hpp"

#include <cstdio>
#include <cstdlib>

namespace carets {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw DataError(context + ": cannot parse number '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw DataError(context + ": cannot parse integer '" + s + "'");
    return v;
}

}  // namespace carets
