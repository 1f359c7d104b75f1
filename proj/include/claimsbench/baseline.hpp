#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "claimsbench/ingestion.hpp"
#include "claimsbench/stats.hpp"
#include "claimsbench/types.hpp"
#include "claimsbench/vmt.hpp"

namespace claimsbench::baseline {

// Human-driver claim frequency for one region and coverage, with the
// mile-denominated exposure it was computed over.
struct RegionFrequency {
    Region region = Region::SanFrancisco;
    Coverage coverage = Coverage::BodilyInjury;
    long long claim_count = 0;
    double exposure_mmi = 0.0;
    double frequency_cpmm = 0.0;
};

// Fraction of a fleet mileage category driven in each region. Weights are
// non-negative and sum to 1.
struct MileageMix {
    Category category = Category::Manual;
    std::map<Region, double> weights;
};

struct BaselineResult {
    Category category = Category::Manual;
    Coverage coverage = Coverage::BodilyInjury;
    stats::RateEstimate estimate;  // method NormalApprox
    MileageMix mix;
    std::vector<RegionFrequency> per_region;  // ordered as kAllRegions
};

// policy_years insured vehicles, each driving vmt_selected miles a year.
double exposure_miles(double policy_years, double vmt_selected);

// Counts countable human-baseline claims for (region, coverage) and divides
// by the summed mile exposure, year by year: sum over coverage years of
// policy_years(year) * selected VMT(region, year) / 1e6. The claims span
// must already be zip-filtered.
RegionFrequency region_frequency(std::span<const ingestion::ClaimRecord> claims,
                                 std::span<const ingestion::ExposureRecord> exposure,
                                 const vmt::VmtTable& table, vmt::Selection selection,
                                 Region region, Coverage coverage);

// Region weights from the category's miles; TOplusRO recomputes weights from
// the combined TO + RO miles. Throws ZeroMileage when the category has none.
MileageMix mileage_mix(std::span<const ingestion::MileageRecord> mileage, Category category);

// Baseline point = sum of w_r * f_r; interval is a normal approximation with
// the mixture standard error. Every positive-weight region must appear in
// per_region.
BaselineResult mix_baseline(std::span<const RegionFrequency> per_region, const MileageMix& mix,
                            Coverage coverage, double confidence);

// All 4 categories x 2 coverages. Human claims are zip-filtered before
// counting.
std::vector<BaselineResult> build_baselines(const ingestion::Dataset& dataset,
                                            const vmt::VmtTable& table, vmt::Selection selection,
                                            double confidence);

std::string serialize_baselines(std::span<const BaselineResult> results);

}  // namespace claimsbench::baseline
