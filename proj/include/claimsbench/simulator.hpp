#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "claimsbench/ingestion.hpp"
#include "claimsbench/types.hpp"

namespace claimsbench::sim {

// SplitMix64: tiny, well-mixed 64-bit generator. One instance per trial keeps
// parallel and serial execution byte-identical.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Stable per-stream seed; streams indexed independently of execution order.
std::uint64_t derive_subseed(std::uint64_t master, std::uint64_t index);

// Poisson sample by CDF inversion. Large means are drawn as a sum of chunks
// with mean <= 500 so the running term never underflows.
long long poisson_draw(SplitMix64& rng, double lambda);

// Synthetic ground truth for one baseline region. Exposure may be given as
// policy-years per coverage year plus a per-vehicle VMT, or as total million
// miles (converted using the default 12,000 mi/vehicle/year).
struct RegionSpec {
    Region region = Region::SanFrancisco;
    std::vector<std::string> zip_codes;
    std::map<Coverage, double> true_rate_cpmm;
    double policy_years_per_year = 0.0;
    double vmt_per_vehicle = 0.0;

    double exposure_mmi() const;
};

struct ModeSpec {
    DrivingMode mode = DrivingMode::Manual;
    std::map<Region, double> miles;
    std::map<Coverage, double> true_rate_cpmm;

    double total_miles() const;
};

struct SimConfig {
    std::uint64_t seed = 1;
    long long trials = 10000;
    std::vector<RegionSpec> regions;
    std::vector<ModeSpec> fleet;
};

SimConfig parse_sim_config(const std::string& json_text, const std::string& origin);
SimConfig load_sim_config(const std::filesystem::path& path);

// Draws claim counts Poisson(true_rate x exposure) per cell and materializes
// a full five-table dataset that parses cleanly through ingestion. The VMT
// inputs are built so state and urbanized-area estimates agree, making the
// recovered exposure independent of the selection policy.
ingestion::Dataset simulate_claims(const SimConfig& config);

struct CoverageResult {
    long long trials = 0;
    long long covered = 0;

    double fraction() const { return trials > 0 ? static_cast<double>(covered) / trials : 0.0; }
};

// Fraction of seeded trials whose exact interval for a Poisson(rate x
// exposure) count contains the true rate. The parallel kernel and the serial
// reference return identical counts for identical arguments.
CoverageResult coverage_experiment(double true_rate_cpmm, double exposure_mmi, long long trials,
                                   double confidence, std::uint64_t seed);
CoverageResult coverage_experiment_serial(double true_rate_cpmm, double exposure_mmi,
                                          long long trials, double confidence,
                                          std::uint64_t seed);

// Analytic counterpart: sums Poisson probabilities of the covered counts.
double exact_coverage(double true_rate_cpmm, double exposure_mmi, double confidence);

}  // namespace claimsbench::sim
