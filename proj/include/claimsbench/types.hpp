#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace claimsbench {

enum class Region { SanFrancisco, Phoenix };
enum class Coverage { BodilyInjury, PropertyDamage };
enum class Source { Fleet, HumanBaseline };
enum class DrivingMode { Manual, TO, RO };

// Fleet mileage categories. TOplusRO is a derived aggregation of the TO and
// RO datasets; it never appears on a stored record.
enum class Category { Manual, TO, RO, TOplusRO };

inline constexpr std::array<Region, 2> kAllRegions{Region::SanFrancisco, Region::Phoenix};
inline constexpr std::array<Coverage, 2> kAllCoverages{Coverage::BodilyInjury,
                                                       Coverage::PropertyDamage};
inline constexpr std::array<DrivingMode, 3> kAllModes{DrivingMode::Manual, DrivingMode::TO,
                                                      DrivingMode::RO};
inline constexpr std::array<Category, 4> kAllCategories{Category::Manual, Category::TO,
                                                        Category::RO, Category::TOplusRO};

const char* to_string(Region r);
const char* to_string(Coverage c);
const char* to_string(Source s);
const char* to_string(DrivingMode m);
const char* to_string(Category c);

std::optional<Region> region_from_string(std::string_view s);
std::optional<Coverage> coverage_from_string(std::string_view s);
std::optional<Source> source_from_string(std::string_view s);
std::optional<DrivingMode> mode_from_string(std::string_view s);
std::optional<Category> category_from_string(std::string_view s);

// Returns true when the category contains the mode (TOplusRO spans TO and RO).
bool category_contains(Category category, DrivingMode mode);

// Calendar date. Default comparison on (year, month, day) is chronological.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    // Strict "YYYY-MM-DD"; returns nullopt on format or calendar violations.
    static std::optional<Date> parse(std::string_view iso);
    bool ok() const;
    std::string to_string() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

struct DateWindow {
    Date first;
    Date last;
    bool contains(const Date& d) const { return first <= d && d <= last; }
};

bool is_valid_zip(std::string_view zip);

}  // namespace claimsbench
