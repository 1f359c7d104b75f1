#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "claimsbench/csv.hpp"
#include "claimsbench/types.hpp"

namespace claimsbench::vmt {

enum class RegionScope { State, UrbanizedArea };

const char* to_string(RegionScope s);
std::optional<RegionScope> scope_from_string(std::string_view s);

// Maps a state or urbanized-area name onto the study region it calibrates.
std::optional<Region> region_from_vmt_name(std::string_view name);

// One row of the public aggregate-mileage table. State rows carry a
// registered-vehicle denominator; urbanized-area rows carry population and
// vehicles per capita. month is empty for annual totals.
struct VmtInputRow {
    RegionScope scope = RegionScope::State;
    Region region = Region::SanFrancisco;
    std::string region_name;  // as written in the input
    int year = 0;
    std::optional<int> month;
    double total_vmt_miles = 0.0;
    std::optional<double> registered_vehicles;
    std::optional<double> population;
    std::optional<double> vehicles_per_capita;
};

enum class Selection { ConservativeAuto, ForceState, ForceUrban };

const char* to_string(Selection s);
std::optional<Selection> selection_from_string(std::string_view s);

struct VmtEstimate {
    Region region = Region::SanFrancisco;
    int year = 0;
    double miles_per_vehicle_state = 0.0;
    double miles_per_vehicle_urban = 0.0;

    double selected(Selection selection) const;
};

double vmt_per_vehicle_state(double total_vmt_miles, double registered_vehicles);
double vmt_per_vehicle_urban(double total_vmt_miles, double population,
                             double vehicles_per_capita);

// The estimate yielding the lower baseline frequency, i.e. the larger
// miles-per-vehicle value.
double select_conservative(double state_estimate, double urban_estimate);

// Per-region, per-year estimates assembled from input rows. Monthly state
// rows must cover all 12 months of a year; annual and monthly rows for the
// same region-year must not be mixed; every region-year needs both scopes.
class VmtTable {
public:
    static VmtTable build(std::span<const VmtInputRow> rows);

    // Throws MissingVmtYear when the pair is absent.
    const VmtEstimate& at(Region region, int year) const;
    const VmtEstimate* find(Region region, int year) const;

    const std::vector<VmtEstimate>& estimates() const { return estimates_; }

private:
    std::vector<VmtEstimate> estimates_;  // sorted by (region, year)
};

std::string serialize_vmt_estimates(std::span<const VmtEstimate> estimates, Selection selection);

}  // namespace claimsbench::vmt
