#include "claimsbench/compare.hpp"

#include <algorithm>

namespace claimsbench::compare {

stats::RateEstimate fleet_cell(std::span<const ingestion::ClaimRecord> claims,
                               std::span<const ingestion::MileageRecord> mileage,
                               Category category, Coverage coverage, double confidence) {
    double miles = 0.0;
    for (const auto& record : mileage) {
        if (category_contains(category, record.mode)) miles += record.miles;
    }
    if (miles <= 0.0) {
        fail(ErrorKind::ZeroMileage,
             std::string("category ") + to_string(category) + " has no miles");
    }

    long long count = 0;
    for (const auto& claim : claims) {
        if (claim.source != Source::Fleet) continue;
        if (claim.coverage != coverage || !claim.countable()) continue;
        if (!category_contains(category, claim.effective_mode())) continue;
        ++count;
    }
    return stats::poisson_exact_rate_ci(count, miles / 1e6, confidence);
}

ComparisonResult compare_cell(Category category, Coverage coverage,
                              const stats::RateEstimate& fleet,
                              const stats::RateEstimate& baseline) {
    ComparisonResult cell;
    cell.category = category;
    cell.coverage = coverage;
    cell.fleet = fleet;
    cell.baseline = baseline;
    cell.reduction_percent = stats::percent_reduction(fleet.rate_cpmm, baseline.rate_cpmm);
    cell.reduction_percent_display = stats::round_half_up_int(cell.reduction_percent);
    cell.verdict = stats::significance(fleet, baseline);
    return cell;
}

std::vector<ComparisonResult> full_matrix(const ingestion::Dataset& dataset,
                                          std::span<const baseline::BaselineResult> baselines,
                                          double confidence, bool strict) {
    std::vector<ComparisonResult> cells;
    for (Category category : kAllCategories) {
        for (Coverage coverage : kAllCoverages) {
            auto base = std::find_if(baselines.begin(), baselines.end(),
                                     [&](const baseline::BaselineResult& b) {
                                         return b.category == category && b.coverage == coverage;
                                     });
            const std::string cell_name =
                std::string(to_string(category)) + "/" + to_string(coverage);
            try {
                auto fleet = fleet_cell(dataset.claims, dataset.mileage, category, coverage,
                                        confidence);
                if (base == baselines.end()) {
                    fail(ErrorKind::MissingRegion, "no baseline");
                }
                cells.push_back(compare_cell(category, coverage, fleet, base->estimate));
            } catch (const Error& e) {
                if (!strict && e.kind() == ErrorKind::ZeroMileage) {
                    ComparisonResult cell;
                    cell.category = category;
                    cell.coverage = coverage;
                    cell.no_data = true;
                    if (base != baselines.end()) cell.baseline = base->estimate;
                    cells.push_back(cell);
                } else {
                    fail(e.kind(), "cell " + cell_name + ": " + e.what());
                }
            }
        }
    }
    return cells;
}

std::string serialize_comparisons(std::span<const ComparisonResult> results) {
    std::string out =
        "category,coverage,fleet_k,fleet_mmi,fleet_rate,fleet_ci_low,fleet_ci_high,"
        "baseline_rate,baseline_ci_low,baseline_ci_high,reduction_pct_unrounded,"
        "reduction_pct_display,verdict\n";
    for (const auto& cell : results) {
        std::vector<std::string> fields{to_string(cell.category), to_string(cell.coverage)};
        if (cell.no_data) {
            fields.insert(fields.end(), {"", "", "", "", ""});
        } else {
            fields.push_back(std::to_string(*cell.fleet.claim_count));
            fields.push_back(csv::format_double(*cell.fleet.exposure_mmi));
            fields.push_back(csv::format_double(cell.fleet.rate_cpmm));
            fields.push_back(csv::format_double(cell.fleet.ci_low_cpmm));
            fields.push_back(csv::format_double(cell.fleet.ci_high_cpmm));
        }
        if (cell.baseline) {
            fields.push_back(csv::format_double(cell.baseline->rate_cpmm));
            fields.push_back(csv::format_double(cell.baseline->ci_low_cpmm));
            fields.push_back(csv::format_double(cell.baseline->ci_high_cpmm));
        } else {
            fields.insert(fields.end(), {"", "", ""});
        }
        if (cell.no_data) {
            fields.insert(fields.end(), {"", "", "no_data"});
        } else {
            fields.push_back(csv::format_double(cell.reduction_percent));
            fields.push_back(std::to_string(cell.reduction_percent_display));
            fields.push_back(cell.verdict == stats::Verdict::Significant ? "S" : "NS");
        }
        csv::append_line(out, fields);
    }
    return out;
}

namespace {

std::string display_rate(double value) {
    return csv::format_fixed(stats::round_half_up(value, 2), 2);
}

std::string pad(std::string text, size_t width) {
    if (text.size() < width) text.append(width - text.size(), ' ');
    return text;
}

}  // namespace

std::string render_comparison_table(std::span<const ComparisonResult> results) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"category", "coverage", "fleet cpmm [CI]", "baseline cpmm [CI]", "reduction",
                    "verdict"});
    for (const auto& cell : results) {
        std::vector<std::string> row{to_string(cell.category), to_string(cell.coverage)};
        if (cell.no_data) {
            row.push_back("no data");
        } else {
            row.push_back(display_rate(cell.fleet.rate_cpmm) + " [" +
                          display_rate(cell.fleet.ci_low_cpmm) + ", " +
                          display_rate(cell.fleet.ci_high_cpmm) + "]");
        }
        if (cell.baseline) {
            row.push_back(display_rate(cell.baseline->rate_cpmm) + " [" +
                          display_rate(cell.baseline->ci_low_cpmm) + ", " +
                          display_rate(cell.baseline->ci_high_cpmm) + "]");
        } else {
            row.push_back("no data");
        }
        if (cell.no_data) {
            row.insert(row.end(), {"", ""});
        } else {
            row.push_back(std::to_string(cell.reduction_percent_display) + "%");
            row.push_back(cell.verdict == stats::Verdict::Significant ? "S" : "NS");
        }
        rows.push_back(std::move(row));
    }

    std::vector<size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            out += i + 1 < row.size() ? pad(row[i], widths[i] + 2) : row[i];
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    }
    return out;
}

}  // namespace claimsbench::compare
