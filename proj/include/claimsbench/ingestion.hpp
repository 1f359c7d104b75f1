#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "claimsbench/csv.hpp"
#include "claimsbench/errors.hpp"
#include "claimsbench/types.hpp"
#include "claimsbench/vmt.hpp"

namespace claimsbench::ingestion {

// Study windows for claim occurrence dates.
inline constexpr DateWindow kHumanWindow{{2016, 1, 1}, {2021, 12, 31}};
inline constexpr DateWindow kFleetWindow{{2018, 1, 1}, {2023, 8, 1}};

inline constexpr int kFirstCoverageYear = 2016;
inline constexpr int kLastCoverageYear = 2021;

// One third-party liability claim. Fleet records carry a driving mode; the
// optional mode_override encodes the curator judgment that reassigns a claim
// to a different mode (e.g. a takeover collision counted under TO).
struct ClaimRecord {
    std::string claim_id;
    Coverage coverage = Coverage::BodilyInjury;
    Date occurrence_date;
    std::string zip_code;
    Region region = Region::SanFrancisco;
    Source source = Source::Fleet;
    bool liability_payment_expected = true;
    std::optional<DrivingMode> mode;
    std::optional<DrivingMode> mode_override;

    // Only meaningful for fleet records; the override wins when present.
    DrivingMode effective_mode() const { return mode_override ? *mode_override : *mode; }

    // Claims without an expected liability payment are ingested but excluded
    // from every frequency computation.
    bool countable() const { return liability_payment_expected; }
};

// Earned car-years for the human baseline.
struct ExposureRecord {
    Region region = Region::SanFrancisco;
    std::string zip_code;
    int coverage_year = 0;
    double policy_years = 0.0;
};

struct MileageRecord {
    Region region = Region::SanFrancisco;
    DrivingMode mode = DrivingMode::Manual;
    double miles = 0.0;
};

struct ZipCodeSet {
    Region region = Region::SanFrancisco;
    std::set<std::string, std::less<>> zip_codes;

    bool contains(std::string_view zip) const { return zip_codes.count(zip) > 0; }
};

// ADS engagement history around an impact; interval endpoints and the impact
// time share one clock, in seconds.
struct EngagementTrace {
    std::vector<std::pair<double, double>> intervals;  // closed [start, end]
    bool human_in_driver_seat = true;
    double impact_time = 0.0;
};

// TO when a human supervised and the ADS was engaged at any instant of the
// closed window [impact - 5 s, impact]; RO when nobody was in the driver
// seat; Manual otherwise. Throws InvalidTrace on unsorted or overlapping
// intervals.
DrivingMode classify_mode(const EngagementTrace& trace);

// A row-level violation collected by validation.
struct RowIssue {
    std::string file;
    size_t row = 0;  // 1-based data row
    std::string field;
    std::string message;
};

// When a sink is supplied, bad rows are recorded and skipped instead of
// aborting the parse.
class IssueSink {
public:
    void add(RowIssue issue) { issues_.push_back(std::move(issue)); }
    const std::vector<RowIssue>& issues() const { return issues_; }
    bool empty() const { return issues_.empty(); }

private:
    std::vector<RowIssue> issues_;
};

std::vector<ClaimRecord> parse_claims(const csv::Table& table, IssueSink* sink = nullptr);
std::vector<ExposureRecord> parse_exposure(const csv::Table& table, IssueSink* sink = nullptr);
std::vector<MileageRecord> parse_mileage(const csv::Table& table, IssueSink* sink = nullptr);
std::vector<ZipCodeSet> parse_zips(const csv::Table& table, IssueSink* sink = nullptr);
std::vector<vmt::VmtInputRow> parse_vmt_inputs(const csv::Table& table, IssueSink* sink = nullptr);

// Reads NAME.csv or, failing that, NAME.json (an array of objects with the
// same field names) and returns the rows as a table.
csv::Table read_table(const std::filesystem::path& inputs_dir, const std::string& name);

struct Dataset {
    std::vector<ClaimRecord> claims;
    std::vector<ExposureRecord> exposure;
    std::vector<MileageRecord> mileage;
    std::vector<ZipCodeSet> zips;
    std::vector<vmt::VmtInputRow> vmt_inputs;

    const ZipCodeSet* zips_for(Region region) const;
};

inline constexpr const char* kTableNames[5] = {"claims", "exposure", "mileage", "zips",
                                               "vmt_inputs"};

Dataset load_dataset(const std::filesystem::path& inputs_dir);

// Keeps exactly the claims whose zip code belongs to their region's set;
// order is preserved and a missing set means nothing passes.
std::vector<ClaimRecord> filter_claims_by_zip(std::span<const ClaimRecord> claims,
                                              std::span<const ZipCodeSet> zips);

// Canonical serialization; parsing then re-serializing is a fixed point.
std::string serialize_claims(std::span<const ClaimRecord> claims);
std::string serialize_exposure(std::span<const ExposureRecord> exposure);
std::string serialize_mileage(std::span<const MileageRecord> mileage);
std::string serialize_zips(std::span<const ZipCodeSet> zips);
std::string serialize_vmt_inputs(std::span<const vmt::VmtInputRow> rows);

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace claimsbench::ingestion
