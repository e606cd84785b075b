#include "credal/io.hpp"

#include <charconv>
#include <fstream>

namespace credal {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string read_cpu_model() {
    std::ifstream f("/proc/cpuinfo");
    std::string line, vendor, family, model;
    auto value_of = [](const std::string& l) -> std::string {
        const auto colon = l.find(':');
        if (colon == std::string::npos) return {};
        const auto first = l.find_first_not_of(" \t", colon + 1);
        return first == std::string::npos ? std::string() : l.substr(first);
    };
    while (std::getline(f, line)) {
        if (line.rfind("model name", 0) == 0) return value_of(line);
        if (vendor.empty() && line.rfind("vendor_id", 0) == 0) vendor = value_of(line);
        if (family.empty() && line.rfind("cpu family", 0) == 0) family = value_of(line);
        if (model.empty() && line.rfind("model", 0) == 0) model = value_of(line);
    }
    if (!vendor.empty()) {
        std::string out = vendor;
        if (!family.empty()) out += " family " + family;
        if (!model.empty()) out += " model " + model;
        return out;
    }
    return "unknown";
}

std::string compiler_description() {
#if defined(__clang__)
    return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    return std::string("gcc ") + __VERSION__;
#else
    return "unknown";
#endif
}

std::string build_type_description() {
#ifdef NDEBUG
    return "release";
#else
    return "debug";
#endif
}

}  // namespace credal
