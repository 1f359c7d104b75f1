#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "claimsbench/baseline.hpp"
#include "claimsbench/errors.hpp"
#include "claimsbench/ingestion.hpp"

using namespace claimsbench;

namespace {

const std::filesystem::path kFixtures = FIXTURES_DIR;

ingestion::ClaimRecord human_claim(Region region, Coverage coverage, int n,
                                   bool countable = true) {
    ingestion::ClaimRecord claim;
    claim.claim_id = "H-" + std::to_string(n);
    claim.coverage = coverage;
    claim.occurrence_date = {2018, 6, 15};
    claim.zip_code = region == Region::SanFrancisco ? "94103" : "85003";
    claim.region = region;
    claim.source = Source::HumanBaseline;
    claim.liability_payment_expected = countable;
    return claim;
}

vmt::VmtTable table_with(double sf_vmt_2018, double sf_vmt_2019) {
    std::vector<vmt::VmtInputRow> rows;
    for (auto [year, vmt] : {std::pair{2018, sf_vmt_2018}, std::pair{2019, sf_vmt_2019}}) {
        vmt::VmtInputRow state;
        state.scope = vmt::RegionScope::State;
        state.region = Region::SanFrancisco;
        state.region_name = "California";
        state.year = year;
        state.total_vmt_miles = vmt * 1e6;
        state.registered_vehicles = 1e6;
        rows.push_back(state);

        vmt::VmtInputRow urban;
        urban.scope = vmt::RegionScope::UrbanizedArea;
        urban.region = Region::SanFrancisco;
        urban.region_name = "San Francisco";
        urban.year = year;
        urban.total_vmt_miles = vmt * 5e5;
        urban.population = 8e5;
        urban.vehicles_per_capita = 0.625;
        rows.push_back(urban);
    }
    return vmt::VmtTable::build(rows);
}

const baseline::BaselineResult& find_result(const std::vector<baseline::BaselineResult>& results,
                                            Category category, Coverage coverage) {
    for (const auto& r : results) {
        if (r.category == category && r.coverage == coverage) return r;
    }
    FAIL("missing result cell");
    return results.front();
}

}  // namespace

TEST_CASE("exposure miles multiply policy-years by per-vehicle VMT") {
    CHECK(baseline::exposure_miles(5000.0, 12000.0) == 6e7);
    CHECK(baseline::exposure_miles(0.0, 12000.0) == 0.0);
    CHECK_THROWS_AS(baseline::exposure_miles(5000.0, 0.0), Error);
    CHECK_THROWS_AS(baseline::exposure_miles(-1.0, 12000.0), Error);
}

TEST_CASE("region frequency divides countable claims by mile exposure") {
    std::vector<ingestion::ClaimRecord> claims;
    for (int i = 0; i < 250; ++i) {
        claims.push_back(human_claim(Region::SanFrancisco, Coverage::BodilyInjury, i));
    }
    // ignored: other coverage, other region, fleet source, not countable
    claims.push_back(human_claim(Region::SanFrancisco, Coverage::PropertyDamage, 900));
    claims.push_back(human_claim(Region::Phoenix, Coverage::BodilyInjury, 901));
    claims.push_back(human_claim(Region::SanFrancisco, Coverage::BodilyInjury, 902, false));
    auto fleet = human_claim(Region::SanFrancisco, Coverage::BodilyInjury, 903);
    fleet.source = Source::Fleet;
    fleet.mode = DrivingMode::Manual;
    claims.push_back(fleet);

    const std::vector<ingestion::ExposureRecord> exposure{
        {Region::SanFrancisco, "94103", 2018, 5000.0},
        {Region::SanFrancisco, "94103", 2019, 6500.0},
    };
    const auto freq =
        baseline::region_frequency(claims, exposure, table_with(12000.0, 12000.0),
                                   vmt::Selection::ForceState, Region::SanFrancisco,
                                   Coverage::BodilyInjury);
    CHECK(freq.claim_count == 250);
    CHECK(freq.exposure_mmi == doctest::Approx(138.0).epsilon(1e-12));
    CHECK(freq.frequency_cpmm == doctest::Approx(1.8115942028985508).epsilon(1e-12));
}

TEST_CASE("region frequency applies each coverage year's own VMT") {
    std::vector<ingestion::ClaimRecord> claims;
    for (int i = 0; i < 10; ++i) {
        claims.push_back(human_claim(Region::SanFrancisco, Coverage::BodilyInjury, i));
    }
    const std::vector<ingestion::ExposureRecord> exposure{
        {Region::SanFrancisco, "94103", 2018, 4000.0},
        {Region::SanFrancisco, "94103", 2019, 6000.0},
    };
    // 4000 * 12000 + 6000 * 14000 = 132 Mmi; a pooled-VMT shortcut would give
    // 10000 * 13000 = 130 Mmi.
    const auto freq =
        baseline::region_frequency(claims, exposure, table_with(12000.0, 14000.0),
                                   vmt::Selection::ForceState, Region::SanFrancisco,
                                   Coverage::BodilyInjury);
    CHECK(freq.exposure_mmi == doctest::Approx(132.0).epsilon(1e-12));
    CHECK(freq.frequency_cpmm == doctest::Approx(10.0 / 132.0).epsilon(1e-12));
}

TEST_CASE("region frequency refuses empty or zero exposure") {
    const std::vector<ingestion::ClaimRecord> claims;
    const auto table = table_with(12000.0, 12000.0);

    try {
        baseline::region_frequency(claims, {}, table, vmt::Selection::ForceState,
                                   Region::SanFrancisco, Coverage::BodilyInjury);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroExposure);
    }

    const std::vector<ingestion::ExposureRecord> zero{
        {Region::SanFrancisco, "94103", 2018, 0.0}};
    try {
        baseline::region_frequency(claims, zero, table, vmt::Selection::ForceState,
                                   Region::SanFrancisco, Coverage::BodilyInjury);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroExposure);
    }
}

TEST_CASE("mileage mix weights are mile fractions that sum to one") {
    const std::vector<ingestion::MileageRecord> mileage{
        {Region::SanFrancisco, DrivingMode::Manual, 4000000.0},
        {Region::Phoenix, DrivingMode::Manual, 10436298.0},
        {Region::SanFrancisco, DrivingMode::TO, 16700000.0},
        {Region::Phoenix, DrivingMode::TO, 18528320.0},
        {Region::SanFrancisco, DrivingMode::RO, 2030000.0},
        {Region::Phoenix, DrivingMode::RO, 1838506.0},
    };

    const auto manual = baseline::mileage_mix(mileage, Category::Manual);
    CHECK(manual.weights.at(Region::SanFrancisco) ==
          doctest::Approx(0.27707934541112966).epsilon(1e-12));
    const auto to = baseline::mileage_mix(mileage, Category::TO);
    CHECK(to.weights.at(Region::SanFrancisco) ==
          doctest::Approx(0.4740504230687129).epsilon(1e-12));
    const auto ro = baseline::mileage_mix(mileage, Category::RO);
    CHECK(ro.weights.at(Region::SanFrancisco) ==
          doctest::Approx(0.5247503816718909).epsilon(1e-12));

    // the aggregate reweights from combined miles, not from averaged weights
    const auto combined = baseline::mileage_mix(mileage, Category::TOplusRO);
    CHECK(combined.weights.at(Region::SanFrancisco) ==
          doctest::Approx(0.47906702196234546).epsilon(1e-12));
    CHECK(combined.weights.at(Region::SanFrancisco) ==
          doctest::Approx(18730000.0 / 39096826.0).epsilon(1e-12));

    for (const auto& mix : {manual, to, ro, combined}) {
        double sum = 0.0;
        for (const auto& [region, w] : mix.weights) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mileage mix drops zero-mile regions and rejects empty categories") {
    const std::vector<ingestion::MileageRecord> sf_only{
        {Region::SanFrancisco, DrivingMode::Manual, 1000000.0},
        {Region::Phoenix, DrivingMode::Manual, 0.0},
    };
    const auto mix = baseline::mileage_mix(sf_only, Category::Manual);
    CHECK(mix.weights.size() == 1);
    CHECK(mix.weights.at(Region::SanFrancisco) == 1.0);

    try {
        baseline::mileage_mix(sf_only, Category::RO);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroMileage);
    }
}

TEST_CASE("mixing a single region is the identity") {
    const std::vector<baseline::RegionFrequency> per_region{
        {Region::SanFrancisco, Coverage::PropertyDamage, 504, 360.0, 1.4}};
    baseline::MileageMix mix;
    mix.category = Category::RO;
    mix.weights[Region::SanFrancisco] = 1.0;

    const auto result =
        baseline::mix_baseline(per_region, mix, Coverage::PropertyDamage, 0.95);
    CHECK(result.estimate.rate_cpmm == doctest::Approx(1.4).epsilon(1e-12));
    const double se = std::sqrt(1.4 / 360.0);
    CHECK(result.estimate.ci_high_cpmm - result.estimate.ci_low_cpmm ==
          doctest::Approx(2.0 * 1.959963984540054 * se).epsilon(1e-9));
    CHECK(result.estimate.method == stats::CiMethod::NormalApprox);
    CHECK(result.estimate.confidence == 0.95);
}

TEST_CASE("mixed point estimate is the weighted average, inside the convex hull") {
    const std::vector<baseline::RegionFrequency> per_region{
        {Region::SanFrancisco, Coverage::BodilyInjury, 468, 360.0, 1.3},
        {Region::Phoenix, Coverage::BodilyInjury, 324, 360.0, 0.9},
    };
    baseline::MileageMix mix;
    mix.category = Category::Manual;
    mix.weights[Region::SanFrancisco] = 0.25;
    mix.weights[Region::Phoenix] = 0.75;

    const auto result = baseline::mix_baseline(per_region, mix, Coverage::BodilyInjury, 0.95);
    CHECK(result.estimate.rate_cpmm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.estimate.rate_cpmm >= 0.9);
    CHECK(result.estimate.rate_cpmm <= 1.3);
    REQUIRE(result.per_region.size() == 2);
}

TEST_CASE("mixing requires a frequency for every weighted region") {
    const std::vector<baseline::RegionFrequency> sf_only{
        {Region::SanFrancisco, Coverage::BodilyInjury, 468, 360.0, 1.3}};
    baseline::MileageMix mix;
    mix.category = Category::Manual;
    mix.weights[Region::SanFrancisco] = 0.6;
    mix.weights[Region::Phoenix] = 0.4;
    try {
        baseline::mix_baseline(sf_only, mix, Coverage::BodilyInjury, 0.95);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingRegion);
    }
}

TEST_CASE("interval width shrinks exactly as one over root exposure") {
    auto width_at = [](double exposure_scale) {
        const std::vector<baseline::RegionFrequency> per_region{
            {Region::SanFrancisco, Coverage::BodilyInjury, 468, 360.0 * exposure_scale, 1.3},
            {Region::Phoenix, Coverage::BodilyInjury, 324, 360.0 * exposure_scale, 0.9},
        };
        baseline::MileageMix mix;
        mix.category = Category::Manual;
        mix.weights[Region::SanFrancisco] = 0.3;
        mix.weights[Region::Phoenix] = 0.7;
        const auto result =
            baseline::mix_baseline(per_region, mix, Coverage::BodilyInjury, 0.95);
        return result.estimate.ci_high_cpmm - result.estimate.ci_low_cpmm;
    };
    CHECK(width_at(2.0) == doctest::Approx(width_at(1.0) / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(width_at(4.0) == doctest::Approx(width_at(1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("reference fixture baselines land on the published two-decimal values") {
    const auto ds = ingestion::load_dataset(kFixtures / "replication");
    const auto table = vmt::VmtTable::build(ds.vmt_inputs);
    const auto results =
        baseline::build_baselines(ds, table, vmt::Selection::ConservativeAuto, 0.95);
    REQUIRE(results.size() == 8);

    const auto& manual_bi = find_result(results, Category::Manual, Coverage::BodilyInjury);
    CHECK(manual_bi.estimate.rate_cpmm == doctest::Approx(1.0108317381644518).epsilon(1e-12));
    CHECK(stats::round_half_up(manual_bi.estimate.rate_cpmm, 2) == 1.01);

    const auto& to_bi = find_result(results, Category::TO, Coverage::BodilyInjury);
    CHECK(to_bi.estimate.rate_cpmm == doctest::Approx(1.0896201692274852).epsilon(1e-12));
    CHECK(stats::round_half_up(to_bi.estimate.rate_cpmm, 2) == 1.09);

    const auto& ro_bi = find_result(results, Category::RO, Coverage::BodilyInjury);
    CHECK(ro_bi.estimate.rate_cpmm == doctest::Approx(1.1099001526687564).epsilon(1e-12));
    CHECK(stats::round_half_up(ro_bi.estimate.rate_cpmm, 2) == 1.11);

    const auto& combined_bi = find_result(results, Category::TOplusRO, Coverage::BodilyInjury);
    CHECK(combined_bi.estimate.rate_cpmm == doctest::Approx(1.0916268087849383).epsilon(1e-12));
    CHECK(stats::round_half_up(combined_bi.estimate.rate_cpmm, 2) == 1.09);

    // zip filtering is in effect: the out-of-set claims never reach the counts
    REQUIRE(manual_bi.per_region.size() == 2);
    CHECK(manual_bi.per_region[0].region == Region::SanFrancisco);
    CHECK(manual_bi.per_region[0].claim_count == 468);
    CHECK(manual_bi.per_region[0].exposure_mmi == doctest::Approx(360.0).epsilon(1e-12));
    CHECK(manual_bi.per_region[1].claim_count == 324);

    const auto& manual_pd = find_result(results, Category::Manual, Coverage::PropertyDamage);
    CHECK(manual_pd.per_region[0].claim_count == 1044);
    CHECK(manual_pd.per_region[1].claim_count == 1260);
    CHECK(stats::round_half_up(manual_pd.estimate.rate_cpmm, 2) == 3.33);
}

TEST_CASE("forcing the urban estimate raises every baseline on the reference fixture") {
    const auto ds = ingestion::load_dataset(kFixtures / "replication");
    const auto table = vmt::VmtTable::build(ds.vmt_inputs);
    const auto by_auto =
        baseline::build_baselines(ds, table, vmt::Selection::ConservativeAuto, 0.95);
    const auto by_urban =
        baseline::build_baselines(ds, table, vmt::Selection::ForceUrban, 0.95);
    REQUIRE(by_auto.size() == by_urban.size());
    for (size_t i = 0; i < by_auto.size(); ++i) {
        CHECK(by_urban[i].estimate.rate_cpmm > by_auto[i].estimate.rate_cpmm);
        // urban VMT is 10000 vs the 12000 state figure: rates scale by 1.2
        CHECK(by_urban[i].estimate.rate_cpmm ==
              doctest::Approx(by_auto[i].estimate.rate_cpmm * 1.2).epsilon(1e-12));
    }
}

TEST_CASE("baseline serialization carries totals and the per-region breakdown") {
    const auto ds = ingestion::load_dataset(kFixtures / "replication");
    const auto table = vmt::VmtTable::build(ds.vmt_inputs);
    const auto results =
        baseline::build_baselines(ds, table, vmt::Selection::ConservativeAuto, 0.95);
    const auto text = baseline::serialize_baselines(results);

    const auto parsed = csv::parse(text, "baseline.csv");
    CHECK(parsed.header ==
          std::vector<std::string>{
              "category", "coverage", "rate_cpmm", "ci_low", "ci_high", "claim_count_total",
              "exposure_mmi_total", "weight_SanFrancisco", "frequency_cpmm_SanFrancisco",
              "claim_count_SanFrancisco", "exposure_mmi_SanFrancisco", "weight_Phoenix",
              "frequency_cpmm_Phoenix", "claim_count_Phoenix", "exposure_mmi_Phoenix"});
    REQUIRE(parsed.rows.size() == 8);
    CHECK(parsed.rows[0][0] == "Manual");
    CHECK(parsed.rows[0][1] == "BodilyInjury");
    CHECK(parsed.rows[0][5] == "792");
    CHECK(parsed.rows[1][5] == "2304");

    // a single-region mix leaves the other region's columns empty
    std::vector<baseline::RegionFrequency> sf_only{
        {Region::SanFrancisco, Coverage::BodilyInjury, 10, 100.0, 0.1}};
    baseline::MileageMix mix;
    mix.category = Category::RO;
    mix.weights[Region::SanFrancisco] = 1.0;
    const auto single = baseline::mix_baseline(sf_only, mix, Coverage::BodilyInjury, 0.95);
    const auto single_text = baseline::serialize_baselines(std::vector{single});
    const auto single_parsed = csv::parse(single_text, "baseline.csv");
    CHECK(single_parsed.rows[0][11] == "0");
    CHECK(single_parsed.rows[0][12] == "");
    CHECK(single_parsed.rows[0][13] == "");
    CHECK(single_parsed.rows[0][14] == "");
}
