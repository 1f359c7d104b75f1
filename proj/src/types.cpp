#include "claimsbench/types.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace claimsbench {

const char* to_string(Region r) {
    return r == Region::SanFrancisco ? "SanFrancisco" : "Phoenix";
}

const char* to_string(Coverage c) {
    return c == Coverage::BodilyInjury ? "BodilyInjury" : "PropertyDamage";
}

const char* to_string(Source s) {
    return s == Source::Fleet ? "Fleet" : "HumanBaseline";
}

const char* to_string(DrivingMode m) {
    switch (m) {
        case DrivingMode::Manual: return "Manual";
        case DrivingMode::TO: return "TO";
        case DrivingMode::RO: return "RO";
    }
    return "?";
}

const char* to_string(Category c) {
    switch (c) {
        case Category::Manual: return "Manual";
        case Category::TO: return "TO";
        case Category::RO: return "RO";
        case Category::TOplusRO: return "TOplusRO";
    }
    return "?";
}

std::optional<Region> region_from_string(std::string_view s) {
    if (s == "SanFrancisco") return Region::SanFrancisco;
    if (s == "Phoenix") return Region::Phoenix;
    return std::nullopt;
}

std::optional<Coverage> coverage_from_string(std::string_view s) {
    if (s == "BodilyInjury") return Coverage::BodilyInjury;
    if (s == "PropertyDamage") return Coverage::PropertyDamage;
    return std::nullopt;
}

std::optional<Source> source_from_string(std::string_view s) {
    if (s == "Fleet") return Source::Fleet;
    if (s == "HumanBaseline") return Source::HumanBaseline;
    return std::nullopt;
}

std::optional<DrivingMode> mode_from_string(std::string_view s) {
    if (s == "Manual") return DrivingMode::Manual;
    if (s == "TO") return DrivingMode::TO;
    if (s == "RO") return DrivingMode::RO;
    return std::nullopt;
}

std::optional<Category> category_from_string(std::string_view s) {
    if (s == "TOplusRO") return Category::TOplusRO;
    if (auto m = mode_from_string(s)) {
        switch (*m) {
            case DrivingMode::Manual: return Category::Manual;
            case DrivingMode::TO: return Category::TO;
            case DrivingMode::RO: return Category::RO;
        }
    }
    return std::nullopt;
}

bool category_contains(Category category, DrivingMode mode) {
    switch (category) {
        case Category::Manual: return mode == DrivingMode::Manual;
        case Category::TO: return mode == DrivingMode::TO;
        case Category::RO: return mode == DrivingMode::RO;
        case Category::TOplusRO: return mode == DrivingMode::TO || mode == DrivingMode::RO;
    }
    return false;
}

namespace {

bool parse_int_field(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> Date::parse(std::string_view iso) {
    // YYYY-MM-DD, fixed width
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    Date d;
    if (!parse_int_field(iso.substr(0, 4), d.year) || !parse_int_field(iso.substr(5, 2), d.month) ||
        !parse_int_field(iso.substr(8, 2), d.day)) {
        return std::nullopt;
    }
    if (!d.ok()) return std::nullopt;
    return d;
}

bool Date::ok() const {
    if (year < 1900 || year > 2200) return false;
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    return ymd.ok();
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

bool is_valid_zip(std::string_view zip) {
    if (zip.size() != 5) return false;
    for (char c : zip) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

}  // namespace claimsbench
