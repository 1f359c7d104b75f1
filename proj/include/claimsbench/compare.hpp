#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "claimsbench/baseline.hpp"
#include "claimsbench/ingestion.hpp"
#include "claimsbench/stats.hpp"
#include "claimsbench/types.hpp"

namespace claimsbench::compare {

// One category x coverage cell of the headline table. no_data marks a cell
// whose mileage category has no miles on a partial dataset; its fleet,
// reduction and verdict fields are then meaningless, and the baseline is
// absent too when the same missing miles left the category without a mix.
struct ComparisonResult {
    Category category = Category::Manual;
    Coverage coverage = Coverage::BodilyInjury;
    bool no_data = false;
    stats::RateEstimate fleet;                 // method PoissonExact
    std::optional<stats::RateEstimate> baseline;  // method NormalApprox
    double reduction_percent = 0.0;  // unrounded
    long long reduction_percent_display = 0;
    stats::Verdict verdict = stats::Verdict::NotSignificant;
};

// Counts countable fleet claims whose effective mode falls in the category
// (TOplusRO aggregates TO and RO) over the category's miles, with a Poisson
// exact interval. Throws ZeroMileage when the category has no miles.
stats::RateEstimate fleet_cell(std::span<const ingestion::ClaimRecord> claims,
                               std::span<const ingestion::MileageRecord> mileage,
                               Category category, Coverage coverage, double confidence);

// Pairs a fleet estimate with its baseline: percent reduction from the
// unrounded rates, verdict from strict interval disjointness.
ComparisonResult compare_cell(Category category, Coverage coverage,
                              const stats::RateEstimate& fleet,
                              const stats::RateEstimate& baseline);

// All 4 categories x 2 coverages against the matching baselines. In strict
// mode an empty mileage category aborts the matrix naming the cell; otherwise
// the cell is reported as no-data.
std::vector<ComparisonResult> full_matrix(const ingestion::Dataset& dataset,
                                          std::span<const baseline::BaselineResult> baselines,
                                          double confidence, bool strict);

std::string serialize_comparisons(std::span<const ComparisonResult> results);

// Text table in the style of the headline figure, one row per cell with an
// S / NS significance marker.
std::string render_comparison_table(std::span<const ComparisonResult> results);

}  // namespace claimsbench::compare
