#include "claimsbench/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "claimsbench/stats.hpp"

namespace claimsbench::sim {

std::uint64_t derive_subseed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 mixer(master ^ (0xD1B54A32D192ED03ull * (index + 1)));
    return mixer.next();
}

namespace {

long long poisson_inversion(SplitMix64& rng, double lambda) {
    const double u = rng.next_unit();
    double term = std::exp(-lambda);
    double cumulative = term;
    long long k = 0;
    const long long cap =
        static_cast<long long>(lambda + 10.0 * std::sqrt(lambda) + 100.0);
    while (u > cumulative && k < cap) {
        ++k;
        term *= lambda / static_cast<double>(k);
        cumulative += term;
    }
    return k;
}

}  // namespace

long long poisson_draw(SplitMix64& rng, double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        fail(ErrorKind::InvariantViolation, "Poisson mean must be finite and non-negative");
    }
    if (lambda == 0.0) return 0;
    const long long chunks = static_cast<long long>(std::ceil(lambda / 500.0));
    const double chunk_mean = lambda / static_cast<double>(chunks);
    long long total = 0;
    for (long long i = 0; i < chunks; ++i) total += poisson_inversion(rng, chunk_mean);
    return total;
}

double RegionSpec::exposure_mmi() const {
    const int years = ingestion::kLastCoverageYear - ingestion::kFirstCoverageYear + 1;
    return policy_years_per_year * vmt_per_vehicle * years / 1e6;
}

double ModeSpec::total_miles() const {
    double total = 0.0;
    for (const auto& [region, m] : miles) total += m;
    return total;
}

namespace {

constexpr double kDefaultVmt = 12000.0;

[[noreturn]] void bad_config(const std::string& origin, const std::string& message) {
    fail(ErrorKind::BadConfig, origin + ": " + message);
}

void check_keys(const nlohmann::json& object, std::initializer_list<const char*> allowed,
                const std::string& origin, const std::string& where) {
    for (const auto& [key, _] : object.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            bad_config(origin, "unknown key '" + key + "' in " + where);
        }
    }
}

double positive_number(const nlohmann::json& value, const std::string& origin,
                       const std::string& where) {
    if (!value.is_number()) bad_config(origin, where + " must be a number");
    const double v = value.get<double>();
    if (!std::isfinite(v) || v <= 0.0) bad_config(origin, where + " must be positive");
    return v;
}

std::map<Coverage, double> parse_rates(const nlohmann::json& value, const std::string& origin,
                                       const std::string& where) {
    if (!value.is_object()) bad_config(origin, where + " must map coverage to cpmm");
    std::map<Coverage, double> rates;
    for (const auto& [key, rate] : value.items()) {
        auto coverage = coverage_from_string(key);
        if (!coverage) bad_config(origin, where + ": unknown coverage '" + key + "'");
        if (!rate.is_number()) bad_config(origin, where + "." + key + " must be a number");
        const double v = rate.get<double>();
        if (!std::isfinite(v) || v < 0.0) {
            bad_config(origin, where + "." + key + " must be non-negative");
        }
        rates[*coverage] = v;
    }
    for (Coverage coverage : kAllCoverages) {
        if (!rates.count(coverage)) {
            bad_config(origin,
                       where + " missing coverage " + std::string(to_string(coverage)));
        }
    }
    return rates;
}

}  // namespace

SimConfig parse_sim_config(const std::string& json_text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        bad_config(origin, e.what());
    }
    if (!doc.is_object()) bad_config(origin, "top level must be an object");
    check_keys(doc, {"seed", "trials", "regions", "fleet"}, origin, "config");

    SimConfig config;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned()) {
            bad_config(origin, "seed must be an integer");
        }
        config.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("trials")) {
        if (!doc["trials"].is_number_integer() && !doc["trials"].is_number_unsigned()) {
            bad_config(origin, "trials must be an integer");
        }
        config.trials = doc["trials"].get<long long>();
    }
    if (config.trials < 1) bad_config(origin, "trials must be positive");

    if (!doc.contains("regions") || !doc["regions"].is_array() || doc["regions"].empty()) {
        bad_config(origin, "regions must be a non-empty array");
    }
    for (const auto& entry : doc["regions"]) {
        if (!entry.is_object()) bad_config(origin, "region entries must be objects");
        check_keys(entry,
                   {"name", "zip_codes", "true_rate_cpmm", "policy_years_per_year",
                    "vmt_per_vehicle", "exposure_mmi"},
                   origin, "region");
        RegionSpec spec;
        auto region = entry.contains("name") && entry["name"].is_string()
                          ? region_from_string(entry["name"].get<std::string>())
                          : std::nullopt;
        if (!region) bad_config(origin, "region name must be SanFrancisco or Phoenix");
        spec.region = *region;
        if (std::any_of(config.regions.begin(), config.regions.end(),
                        [&](const RegionSpec& r) { return r.region == spec.region; })) {
            bad_config(origin, std::string("duplicate region ") + to_string(spec.region));
        }

        if (!entry.contains("zip_codes") || !entry["zip_codes"].is_array() ||
            entry["zip_codes"].empty()) {
            bad_config(origin, "zip_codes must be a non-empty array");
        }
        for (const auto& zip : entry["zip_codes"]) {
            if (!zip.is_string() || !is_valid_zip(zip.get<std::string>())) {
                bad_config(origin, "zip_codes entries must be 5-digit strings");
            }
            spec.zip_codes.push_back(zip.get<std::string>());
        }

        if (!entry.contains("true_rate_cpmm")) bad_config(origin, "region needs true_rate_cpmm");
        spec.true_rate_cpmm = parse_rates(entry["true_rate_cpmm"], origin, "region rates");

        const bool has_exposure = entry.contains("exposure_mmi");
        const bool has_py = entry.contains("policy_years_per_year");
        const bool has_vmt = entry.contains("vmt_per_vehicle");
        if (has_exposure == (has_py || has_vmt)) {
            bad_config(origin,
                       "give either exposure_mmi or policy_years_per_year + vmt_per_vehicle");
        }
        if (has_exposure) {
            const double exposure = positive_number(entry["exposure_mmi"], origin, "exposure_mmi");
            const int years = ingestion::kLastCoverageYear - ingestion::kFirstCoverageYear + 1;
            spec.vmt_per_vehicle = kDefaultVmt;
            spec.policy_years_per_year = exposure * 1e6 / (kDefaultVmt * years);
        } else {
            if (!has_py || !has_vmt) {
                bad_config(origin, "policy_years_per_year and vmt_per_vehicle go together");
            }
            spec.policy_years_per_year =
                positive_number(entry["policy_years_per_year"], origin, "policy_years_per_year");
            spec.vmt_per_vehicle =
                positive_number(entry["vmt_per_vehicle"], origin, "vmt_per_vehicle");
        }
        config.regions.push_back(std::move(spec));
    }

    if (!doc.contains("fleet") || !doc["fleet"].is_array() || doc["fleet"].empty()) {
        bad_config(origin, "fleet must be a non-empty array of mode entries");
    }
    for (const auto& entry : doc["fleet"]) {
        if (!entry.is_object()) bad_config(origin, "fleet entries must be objects");
        check_keys(entry, {"mode", "miles", "true_rate_cpmm"}, origin, "fleet entry");
        ModeSpec spec;
        auto mode = entry.contains("mode") && entry["mode"].is_string()
                        ? mode_from_string(entry["mode"].get<std::string>())
                        : std::nullopt;
        if (!mode) bad_config(origin, "fleet mode must be Manual, TO or RO");
        spec.mode = *mode;
        if (std::any_of(config.fleet.begin(), config.fleet.end(),
                        [&](const ModeSpec& m) { return m.mode == spec.mode; })) {
            bad_config(origin, std::string("duplicate fleet mode ") + to_string(spec.mode));
        }

        if (!entry.contains("miles") || !entry["miles"].is_object() || entry["miles"].empty()) {
            bad_config(origin, "fleet entry needs a miles object keyed by region");
        }
        for (const auto& [key, miles] : entry["miles"].items()) {
            auto region = region_from_string(key);
            if (!region) bad_config(origin, "miles: unknown region '" + key + "'");
            const double m = positive_number(miles, origin, "miles." + key);
            const bool known = std::any_of(config.regions.begin(), config.regions.end(),
                                           [&](const RegionSpec& r) { return r.region == *region; });
            if (!known) {
                bad_config(origin, "fleet miles reference region '" + key +
                                       "' absent from regions (zip codes unknown)");
            }
            spec.miles[*region] = m;
        }

        if (!entry.contains("true_rate_cpmm")) {
            bad_config(origin, "fleet entry needs true_rate_cpmm");
        }
        spec.true_rate_cpmm = parse_rates(entry["true_rate_cpmm"], origin, "fleet rates");
        config.fleet.push_back(std::move(spec));
    }
    return config;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    return parse_sim_config(csv::read_text_file(path), path.filename().string());
}

namespace {

using std::chrono::days;
using std::chrono::sys_days;

sys_days to_sys_days(const Date& date) {
    return sys_days(std::chrono::year{date.year} / std::chrono::month{
                        static_cast<unsigned>(date.month)} /
                    std::chrono::day{static_cast<unsigned>(date.day)});
}

Date date_at(const DateWindow& window, long long offset) {
    const std::chrono::year_month_day ymd{to_sys_days(window.first) + days{offset}};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

long long window_length_days(const DateWindow& window) {
    return (to_sys_days(window.last) - to_sys_days(window.first)).count() + 1;
}

long long uniform_index(SplitMix64& rng, long long n) {
    const auto idx = static_cast<long long>(rng.next_unit() * static_cast<double>(n));
    return std::min(idx, n - 1);
}

}  // namespace

ingestion::Dataset simulate_claims(const SimConfig& config) {
    ingestion::Dataset ds;

    for (const auto& spec : config.regions) {
        ingestion::ZipCodeSet set;
        set.region = spec.region;
        set.zip_codes.insert(spec.zip_codes.begin(), spec.zip_codes.end());
        ds.zips.push_back(std::move(set));

        for (int year = ingestion::kFirstCoverageYear; year <= ingestion::kLastCoverageYear;
             ++year) {
            ds.exposure.push_back(
                {spec.region, spec.zip_codes.front(), year, spec.policy_years_per_year});

            const char* state = spec.region == Region::SanFrancisco ? "California" : "Arizona";
            const char* urban = spec.region == Region::SanFrancisco ? "San Francisco" : "Phoenix";
            vmt::VmtInputRow state_row;
            state_row.scope = vmt::RegionScope::State;
            state_row.region = spec.region;
            state_row.region_name = state;
            state_row.year = year;
            state_row.total_vmt_miles = spec.vmt_per_vehicle * 1e6;
            state_row.registered_vehicles = 1e6;
            ds.vmt_inputs.push_back(state_row);

            vmt::VmtInputRow urban_row;
            urban_row.scope = vmt::RegionScope::UrbanizedArea;
            urban_row.region = spec.region;
            urban_row.region_name = urban;
            urban_row.year = year;
            urban_row.total_vmt_miles = spec.vmt_per_vehicle * 5e5;
            urban_row.population = 8e5;
            urban_row.vehicles_per_capita = 0.625;
            ds.vmt_inputs.push_back(urban_row);
        }
    }

    // Stream indices are a fixed function of the cell so one cell's draw count
    // never shifts another cell's stream.
    std::uint64_t stream = 0;
    const long long human_days = window_length_days(ingestion::kHumanWindow);
    for (const auto& spec : config.regions) {
        for (Coverage coverage : kAllCoverages) {
            SplitMix64 rng(derive_subseed(config.seed, stream++));
            const double lambda = spec.true_rate_cpmm.at(coverage) * spec.exposure_mmi();
            const long long count = poisson_draw(rng, lambda);
            for (long long i = 0; i < count; ++i) {
                ingestion::ClaimRecord claim;
                claim.claim_id = std::string("H-") + to_string(spec.region) + "-" +
                                 to_string(coverage) + "-" + std::to_string(i + 1);
                claim.coverage = coverage;
                claim.region = spec.region;
                claim.source = Source::HumanBaseline;
                claim.zip_code = spec.zip_codes[static_cast<size_t>(
                    uniform_index(rng, static_cast<long long>(spec.zip_codes.size())))];
                claim.occurrence_date =
                    date_at(ingestion::kHumanWindow, uniform_index(rng, human_days));
                claim.liability_payment_expected = true;
                ds.claims.push_back(std::move(claim));
            }
        }
    }

    stream = 1000;
    const long long fleet_days = window_length_days(ingestion::kFleetWindow);
    for (const auto& spec : config.fleet) {
        for (const auto& [region, miles] : spec.miles) {
            ds.mileage.push_back({region, spec.mode, miles});
        }
        const double total = spec.total_miles();
        for (Coverage coverage : kAllCoverages) {
            SplitMix64 rng(derive_subseed(config.seed, stream++));
            const double lambda = spec.true_rate_cpmm.at(coverage) * total / 1e6;
            const long long count = poisson_draw(rng, lambda);
            for (long long i = 0; i < count; ++i) {
                ingestion::ClaimRecord claim;
                claim.claim_id = std::string("F-") + to_string(spec.mode) + "-" +
                                 to_string(coverage) + "-" + std::to_string(i + 1);
                claim.coverage = coverage;
                claim.source = Source::Fleet;
                claim.mode = spec.mode;
                claim.liability_payment_expected = true;

                double pick = rng.next_unit() * total;
                Region region = spec.miles.begin()->first;
                for (const auto& [r, m] : spec.miles) {
                    region = r;
                    if (pick < m) break;
                    pick -= m;
                }
                claim.region = region;
                const auto& zips =
                    std::find_if(config.regions.begin(), config.regions.end(),
                                 [&](const RegionSpec& r) { return r.region == region; })
                        ->zip_codes;
                claim.zip_code = zips[static_cast<size_t>(
                    uniform_index(rng, static_cast<long long>(zips.size())))];
                claim.occurrence_date =
                    date_at(ingestion::kFleetWindow, uniform_index(rng, fleet_days));
                ds.claims.push_back(std::move(claim));
            }
        }
    }
    return ds;
}

namespace {

void check_experiment_args(double rate, double exposure, long long trials, double confidence) {
    if (!std::isfinite(rate) || rate < 0.0) {
        fail(ErrorKind::InvariantViolation, "true rate must be finite and non-negative");
    }
    if (!std::isfinite(exposure) || exposure <= 0.0) {
        fail(ErrorKind::InvariantViolation, "exposure must be positive");
    }
    if (trials < 1) fail(ErrorKind::InvariantViolation, "trials must be positive");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        fail(ErrorKind::InvariantViolation, "confidence must lie in (0, 1)");
    }
}

bool interval_covers(double rate, double exposure, double confidence, long long k) {
    const auto ci = stats::poisson_exact_rate_ci(k, exposure, confidence);
    return ci.ci_low_cpmm <= rate && rate <= ci.ci_high_cpmm;
}

// Largest count poisson_draw can return for this mean, given the per-chunk
// iteration cap.
long long draw_ceiling(double lambda) {
    if (lambda == 0.0) return 0;
    const long long chunks = static_cast<long long>(std::ceil(lambda / 500.0));
    const double chunk_mean = lambda / static_cast<double>(chunks);
    const auto per_chunk =
        static_cast<long long>(chunk_mean + 10.0 * std::sqrt(chunk_mean) + 100.0);
    return chunks * per_chunk;
}

CoverageResult run_coverage(double rate, double exposure, long long trials, double confidence,
                            std::uint64_t seed, bool parallel) {
    check_experiment_args(rate, exposure, trials, confidence);
    const double lambda = rate * exposure;

    // The interval for a count depends only on the count; precomputing the
    // verdict per count keeps the trial loop cheap.
    std::vector<char> covered_by_count(static_cast<size_t>(draw_ceiling(lambda)) + 1);
    for (size_t k = 0; k < covered_by_count.size(); ++k) {
        covered_by_count[k] =
            interval_covers(rate, exposure, confidence, static_cast<long long>(k)) ? 1 : 0;
    }

    long long covered = 0;
    if (parallel) {
#if defined(_OPENMP)
#pragma omp parallel for reduction(+ : covered) schedule(static)
#endif
        for (long long t = 0; t < trials; ++t) {
            SplitMix64 rng(derive_subseed(seed, static_cast<std::uint64_t>(t)));
            covered += covered_by_count[static_cast<size_t>(poisson_draw(rng, lambda))];
        }
    } else {
        for (long long t = 0; t < trials; ++t) {
            SplitMix64 rng(derive_subseed(seed, static_cast<std::uint64_t>(t)));
            covered += covered_by_count[static_cast<size_t>(poisson_draw(rng, lambda))];
        }
    }
    return {trials, covered};
}

}  // namespace

CoverageResult coverage_experiment(double true_rate_cpmm, double exposure_mmi, long long trials,
                                   double confidence, std::uint64_t seed) {
    return run_coverage(true_rate_cpmm, exposure_mmi, trials, confidence, seed, true);
}

CoverageResult coverage_experiment_serial(double true_rate_cpmm, double exposure_mmi,
                                          long long trials, double confidence,
                                          std::uint64_t seed) {
    return run_coverage(true_rate_cpmm, exposure_mmi, trials, confidence, seed, false);
}

double exact_coverage(double true_rate_cpmm, double exposure_mmi, double confidence) {
    check_experiment_args(true_rate_cpmm, exposure_mmi, 1, confidence);
    const double lambda = true_rate_cpmm * exposure_mmi;
    if (lambda == 0.0) {
        return interval_covers(true_rate_cpmm, exposure_mmi, confidence, 0) ? 1.0 : 0.0;
    }

    auto pmf = [&](long long k) {
        return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                        std::lgamma(static_cast<double>(k) + 1.0));
    };
    const auto center = static_cast<long long>(lambda);
    double covered = 0.0;
    for (long long k = center; k >= 0; --k) {
        const double p = pmf(k);
        if (p < 1e-18) break;
        if (interval_covers(true_rate_cpmm, exposure_mmi, confidence, k)) covered += p;
    }
    for (long long k = center + 1;; ++k) {
        const double p = pmf(k);
        if (p < 1e-18) break;
        if (interval_covers(true_rate_cpmm, exposure_mmi, confidence, k)) covered += p;
    }
    return covered;
}

}  // namespace claimsbench::sim
