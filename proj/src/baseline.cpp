#include "claimsbench/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace claimsbench::baseline {

double exposure_miles(double policy_years, double vmt_selected) {
    if (vmt_selected <= 0.0) {
        fail(ErrorKind::InvariantViolation, "VMT per vehicle must be positive");
    }
    if (policy_years < 0.0) {
        fail(ErrorKind::InvariantViolation, "policy_years must be non-negative");
    }
    return policy_years * vmt_selected;
}

RegionFrequency region_frequency(std::span<const ingestion::ClaimRecord> claims,
                                 std::span<const ingestion::ExposureRecord> exposure,
                                 const vmt::VmtTable& table, vmt::Selection selection,
                                 Region region, Coverage coverage) {
    RegionFrequency out;
    out.region = region;
    out.coverage = coverage;

    for (const auto& claim : claims) {
        if (claim.source != Source::HumanBaseline) continue;
        if (claim.region != region || claim.coverage != coverage) continue;
        if (!claim.countable()) continue;
        ++out.claim_count;
    }

    double miles = 0.0;
    bool any_exposure = false;
    for (const auto& record : exposure) {
        if (record.region != region) continue;
        any_exposure = true;
        const auto& estimate = table.at(region, record.coverage_year);
        miles += exposure_miles(record.policy_years, estimate.selected(selection));
    }
    if (!any_exposure) {
        fail(ErrorKind::ZeroExposure,
             std::string("no exposure records for region ") + to_string(region));
    }
    out.exposure_mmi = miles / 1e6;
    if (out.exposure_mmi <= 0.0) {
        fail(ErrorKind::ZeroExposure,
             std::string("exposure for region ") + to_string(region) + " sums to zero miles");
    }
    out.frequency_cpmm = static_cast<double>(out.claim_count) / out.exposure_mmi;
    return out;
}

MileageMix mileage_mix(std::span<const ingestion::MileageRecord> mileage, Category category) {
    MileageMix mix;
    mix.category = category;

    std::map<Region, double> miles;
    double total = 0.0;
    for (const auto& record : mileage) {
        if (!category_contains(category, record.mode)) continue;
        miles[record.region] += record.miles;
        total += record.miles;
    }
    if (total <= 0.0) {
        fail(ErrorKind::ZeroMileage,
             std::string("category ") + to_string(category) + " has no miles");
    }
    for (const auto& [region, m] : miles) {
        if (m > 0.0) mix.weights[region] = m / total;
    }
    return mix;
}

BaselineResult mix_baseline(std::span<const RegionFrequency> per_region, const MileageMix& mix,
                            Coverage coverage, double confidence) {
    BaselineResult result;
    result.category = mix.category;
    result.coverage = coverage;
    result.mix = mix;

    std::vector<double> weights;
    std::vector<double> rates;
    std::vector<double> exposures;
    double point = 0.0;
    for (const auto& [region, weight] : mix.weights) {
        auto it = std::find_if(per_region.begin(), per_region.end(), [&](const RegionFrequency& f) {
            return f.region == region && f.coverage == coverage;
        });
        if (it == per_region.end()) {
            fail(ErrorKind::MissingRegion,
                 std::string("no regional frequency for ") + to_string(region) + " " +
                     to_string(coverage));
        }
        weights.push_back(weight);
        rates.push_back(it->frequency_cpmm);
        exposures.push_back(it->exposure_mmi);
        point += weight * it->frequency_cpmm;
        result.per_region.push_back(*it);
    }

    const double se = stats::mixture_standard_error(weights, rates, exposures);
    result.estimate = stats::normal_rate_ci(point, se, confidence);
    return result;
}

std::vector<BaselineResult> build_baselines(const ingestion::Dataset& dataset,
                                            const vmt::VmtTable& table, vmt::Selection selection,
                                            double confidence) {
    const auto filtered = ingestion::filter_claims_by_zip(dataset.claims, dataset.zips);

    std::vector<BaselineResult> results;
    for (Category category : kAllCategories) {
        MileageMix mix;
        try {
            mix = mileage_mix(dataset.mileage, category);
        } catch (const Error& e) {
            // A category without miles has no mix to weight a baseline with;
            // the category is simply absent from the output.
            if (e.kind() == ErrorKind::ZeroMileage) continue;
            throw;
        }
        for (Coverage coverage : kAllCoverages) {
            std::vector<RegionFrequency> per_region;
            for (const auto& [region, weight] : mix.weights) {
                per_region.push_back(region_frequency(filtered, dataset.exposure, table, selection,
                                                      region, coverage));
            }
            results.push_back(mix_baseline(per_region, mix, coverage, confidence));
        }
    }
    return results;
}

std::string serialize_baselines(std::span<const BaselineResult> results) {
    std::string out =
        "category,coverage,rate_cpmm,ci_low,ci_high,claim_count_total,exposure_mmi_total";
    for (Region region : kAllRegions) {
        const std::string suffix = std::string("_") + to_string(region);
        out += ",weight" + suffix;
        out += ",frequency_cpmm" + suffix;
        out += ",claim_count" + suffix;
        out += ",exposure_mmi" + suffix;
    }
    out += '\n';

    for (const auto& r : results) {
        long long claims_total = 0;
        double exposure_total = 0.0;
        for (const auto& f : r.per_region) {
            claims_total += f.claim_count;
            exposure_total += f.exposure_mmi;
        }
        std::vector<std::string> fields{
            to_string(r.category),
            to_string(r.coverage),
            csv::format_double(r.estimate.rate_cpmm),
            csv::format_double(r.estimate.ci_low_cpmm),
            csv::format_double(r.estimate.ci_high_cpmm),
            std::to_string(claims_total),
            csv::format_double(exposure_total),
        };
        for (Region region : kAllRegions) {
            auto weight = r.mix.weights.find(region);
            auto freq = std::find_if(r.per_region.begin(), r.per_region.end(),
                                     [&](const RegionFrequency& f) { return f.region == region; });
            if (weight == r.mix.weights.end() || freq == r.per_region.end()) {
                fields.insert(fields.end(), {"0", "", "", ""});
            } else {
                fields.push_back(csv::format_double(weight->second));
                fields.push_back(csv::format_double(freq->frequency_cpmm));
                fields.push_back(std::to_string(freq->claim_count));
                fields.push_back(csv::format_double(freq->exposure_mmi));
            }
        }
        csv::append_line(out, fields);
    }
    return out;
}

}  // namespace claimsbench::baseline
