#include "claimsbench/vmt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "claimsbench/errors.hpp"

namespace claimsbench::vmt {

const char* to_string(RegionScope s) {
    return s == RegionScope::State ? "State" : "UrbanizedArea";
}

std::optional<RegionScope> scope_from_string(std::string_view s) {
    if (s == "State") return RegionScope::State;
    if (s == "UrbanizedArea") return RegionScope::UrbanizedArea;
    return std::nullopt;
}

std::optional<Region> region_from_vmt_name(std::string_view name) {
    if (name == "SanFrancisco" || name == "San Francisco" || name == "California" || name == "CA") {
        return Region::SanFrancisco;
    }
    if (name == "Phoenix" || name == "Arizona" || name == "AZ") {
        return Region::Phoenix;
    }
    return std::nullopt;
}

const char* to_string(Selection s) {
    switch (s) {
        case Selection::ConservativeAuto: return "auto";
        case Selection::ForceState: return "state";
        case Selection::ForceUrban: return "urban";
    }
    return "?";
}

std::optional<Selection> selection_from_string(std::string_view s) {
    if (s == "auto") return Selection::ConservativeAuto;
    if (s == "state") return Selection::ForceState;
    if (s == "urban") return Selection::ForceUrban;
    return std::nullopt;
}

double VmtEstimate::selected(Selection selection) const {
    switch (selection) {
        case Selection::ForceState: return miles_per_vehicle_state;
        case Selection::ForceUrban: return miles_per_vehicle_urban;
        case Selection::ConservativeAuto:
            return select_conservative(miles_per_vehicle_state, miles_per_vehicle_urban);
    }
    return miles_per_vehicle_state;
}

double vmt_per_vehicle_state(double total_vmt_miles, double registered_vehicles) {
    if (!(registered_vehicles > 0.0)) {
        fail(ErrorKind::DivisionByZero, "registered vehicle count must be positive");
    }
    if (!(total_vmt_miles > 0.0)) {
        fail(ErrorKind::InvariantViolation, "total VMT must be positive");
    }
    return total_vmt_miles / registered_vehicles;
}

double vmt_per_vehicle_urban(double total_vmt_miles, double population,
                             double vehicles_per_capita) {
    if (!(population > 0.0) || !(vehicles_per_capita > 0.0)) {
        fail(ErrorKind::DivisionByZero, "population and vehicles per capita must be positive");
    }
    if (!(total_vmt_miles > 0.0)) {
        fail(ErrorKind::InvariantViolation, "total VMT must be positive");
    }
    return total_vmt_miles / (population * vehicles_per_capita);
}

double select_conservative(double state_estimate, double urban_estimate) {
    // Baseline frequency = claims / (policy_years * VMT_pv) decreases in
    // VMT_pv, so the larger estimate is the conservative one.
    return std::max(state_estimate, urban_estimate);
}

namespace {

struct CellKey {
    Region region;
    int year;
    RegionScope scope;
    auto operator<=>(const CellKey&) const = default;
};

std::string cell_name(Region region, int year) {
    return std::string(to_string(region)) + "/" + std::to_string(year);
}

}  // namespace

VmtTable VmtTable::build(std::span<const VmtInputRow> rows) {
    std::map<CellKey, std::vector<const VmtInputRow*>> cells;
    for (const auto& row : rows) {
        cells[{row.region, row.year, row.scope}].push_back(&row);
    }

    std::map<std::pair<Region, int>, VmtEstimate> by_region_year;
    for (const auto& [key, cell_rows] : cells) {
        const std::string name = cell_name(key.region, key.year);
        bool has_annual = false;
        bool has_monthly = false;
        for (const auto* row : cell_rows) {
            (row->month.has_value() ? has_monthly : has_annual) = true;
        }
        if (has_annual && has_monthly) {
            fail(ErrorKind::InvariantViolation,
                 "vmt inputs mix annual and monthly rows for " + name);
        }

        double estimate = 0.0;
        if (key.scope == RegionScope::State) {
            if (has_monthly) {
                std::set<int> months;
                double total = 0.0;
                double vehicles = 0.0;
                for (const auto* row : cell_rows) {
                    if (!months.insert(*row->month).second) {
                        fail(ErrorKind::InvariantViolation,
                             "duplicate month " + std::to_string(*row->month) + " for " + name);
                    }
                    total += row->total_vmt_miles;
                    if (vehicles == 0.0) {
                        vehicles = *row->registered_vehicles;
                    } else if (std::fabs(vehicles - *row->registered_vehicles) > 1e-6 * vehicles) {
                        fail(ErrorKind::InvariantViolation,
                             "registered vehicle counts disagree across months for " + name);
                    }
                }
                if (months.size() != 12) {
                    fail(ErrorKind::MissingVmtYear,
                         "state VMT for " + name + " covers " + std::to_string(months.size()) +
                             " months, need all 12");
                }
                estimate = vmt_per_vehicle_state(total, vehicles);
            } else {
                if (cell_rows.size() != 1) {
                    fail(ErrorKind::InvariantViolation, "duplicate annual state row for " + name);
                }
                estimate = vmt_per_vehicle_state(cell_rows[0]->total_vmt_miles,
                                                 *cell_rows[0]->registered_vehicles);
            }
        } else {
            if (has_monthly) {
                fail(ErrorKind::InvariantViolation,
                     "urbanized-area VMT rows must be annual (" + name + ")");
            }
            if (cell_rows.size() != 1) {
                fail(ErrorKind::InvariantViolation, "duplicate urbanized-area row for " + name);
            }
            estimate = vmt_per_vehicle_urban(cell_rows[0]->total_vmt_miles,
                                             *cell_rows[0]->population,
                                             *cell_rows[0]->vehicles_per_capita);
        }

        auto& est = by_region_year[{key.region, key.year}];
        est.region = key.region;
        est.year = key.year;
        if (key.scope == RegionScope::State) {
            est.miles_per_vehicle_state = estimate;
        } else {
            est.miles_per_vehicle_urban = estimate;
        }
    }

    VmtTable table;
    for (const auto& [key, est] : by_region_year) {
        if (est.miles_per_vehicle_state == 0.0 || est.miles_per_vehicle_urban == 0.0) {
            const char* missing = est.miles_per_vehicle_state == 0.0 ? "state" : "urbanized-area";
            fail(ErrorKind::MissingVmtYear, "no " + std::string(missing) + " VMT rows for " +
                                                cell_name(key.first, key.second));
        }
        table.estimates_.push_back(est);
    }
    return table;
}

const VmtEstimate* VmtTable::find(Region region, int year) const {
    for (const auto& est : estimates_) {
        if (est.region == region && est.year == year) return &est;
    }
    return nullptr;
}

const VmtEstimate& VmtTable::at(Region region, int year) const {
    if (const auto* est = find(region, year)) return *est;
    fail(ErrorKind::MissingVmtYear,
         "no VMT estimate for " + cell_name(region, year) + "; refusing to interpolate");
}

std::string serialize_vmt_estimates(std::span<const VmtEstimate> estimates, Selection selection) {
    std::string out =
        "region,year,miles_per_vehicle_state,miles_per_vehicle_urban,selection,selected\n";
    for (const auto& est : estimates) {
        std::vector<std::string> fields{
            to_string(est.region),
            std::to_string(est.year),
            csv::format_double(est.miles_per_vehicle_state),
            csv::format_double(est.miles_per_vehicle_urban),
            to_string(selection),
            csv::format_double(est.selected(selection)),
        };
        csv::append_line(out, fields);
    }
    return out;
}

}  // namespace claimsbench::vmt
