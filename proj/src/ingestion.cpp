#include "claimsbench/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include <json.hpp>

namespace claimsbench::ingestion {

namespace {

// Raised inside a row parser; converted to an issue or a hard error.
struct FieldError {
    std::string field;
    std::string message;
};

[[noreturn]] void bad_field(const std::string& field, const std::string& message) {
    throw FieldError{field, message};
}

class Row {
public:
    Row(const csv::Table& table, size_t index) : table_(table), index_(index) {}

    const std::string& get(const std::string& name) const {
        for (size_t i = 0; i < table_.header.size(); ++i) {
            if (table_.header[i] == name) return table_.rows[index_][i];
        }
        bad_field(name, "column missing");
    }

    bool has_column(const std::string& name) const {
        return std::find(table_.header.begin(), table_.header.end(), name) != table_.header.end();
    }

private:
    const csv::Table& table_;
    size_t index_;
};

double parse_nonneg_real(const std::string& field, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        bad_field(field, "not a finite number: '" + value + "'");
    }
    if (out < 0.0) bad_field(field, "must be non-negative");
    return out;
}

int parse_int(const std::string& field, const std::string& value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        bad_field(field, "not an integer: '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& field, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    bad_field(field, "expected true or false, got '" + value + "'");
}

template <typename T>
T parse_enum(const std::string& field, const std::string& value,
             std::optional<T> (*from_string)(std::string_view)) {
    if (auto parsed = from_string(value)) return *parsed;
    bad_field(field, "unknown value '" + value + "'");
}

std::string valid_zip(const std::string& field, const std::string& value) {
    if (!is_valid_zip(value)) bad_field(field, "must be exactly 5 ASCII digits, got '" + value + "'");
    return value;
}

void check_header(const csv::Table& table, std::span<const std::string> required,
                  std::span<const std::string> optional = {}) {
    size_t pos = 0;
    for (const auto& name : required) {
        if (pos >= table.header.size() || table.header[pos] != name) {
            fail(ErrorKind::SchemaMismatch,
                 table.origin + ": header column " + std::to_string(pos + 1) + " should be '" +
                     name + "'");
        }
        ++pos;
    }
    for (const auto& name : optional) {
        if (pos < table.header.size() && table.header[pos] == name) ++pos;
    }
    if (pos != table.header.size()) {
        fail(ErrorKind::SchemaMismatch,
             table.origin + ": unexpected header column '" + table.header[pos] + "'");
    }
}

// Runs `parse` over every data row, routing FieldError to the sink (skip the
// row) or converting it to a MalformedRow error.
template <typename Record, typename ParseRow>
std::vector<Record> parse_rows(const csv::Table& table, IssueSink* sink, ParseRow&& parse) {
    std::vector<Record> records;
    records.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        try {
            records.push_back(parse(Row(table, i), records));
        } catch (const FieldError& e) {
            if (sink) {
                sink->add({table.origin, i + 1, e.field, e.message});
            } else {
                fail(ErrorKind::MalformedRow, table.origin + ": row " + std::to_string(i + 1) +
                                                  ", field " + e.field + ": " + e.message);
            }
        }
    }
    return records;
}

}  // namespace

DrivingMode classify_mode(const EngagementTrace& trace) {
    double previous_end = -std::numeric_limits<double>::infinity();
    for (const auto& [start, end] : trace.intervals) {
        if (end < start) {
            fail(ErrorKind::InvalidTrace, "engagement interval ends before it starts");
        }
        if (start <= previous_end) {
            fail(ErrorKind::InvalidTrace, "engagement intervals overlap or are unsorted");
        }
        previous_end = end;
    }

    if (!trace.human_in_driver_seat) return DrivingMode::RO;

    const double window_start = trace.impact_time - 5.0;
    for (const auto& [start, end] : trace.intervals) {
        if (start <= trace.impact_time && end >= window_start) return DrivingMode::TO;
    }
    return DrivingMode::Manual;
}

std::vector<ClaimRecord> parse_claims(const csv::Table& table, IssueSink* sink) {
    const std::vector<std::string> required{"claim_id", "coverage",
                                            "occurrence_date", "zip_code",
                                            "region",   "source",
                                            "liability_payment_expected", "mode"};
    const std::vector<std::string> optional{"mode_override"};
    check_header(table, required, optional);

    return parse_rows<ClaimRecord>(table, sink, [&](const Row& row, const auto&) {
        ClaimRecord rec;
        rec.claim_id = row.get("claim_id");
        if (rec.claim_id.empty()) bad_field("claim_id", "must not be empty");
        rec.coverage = parse_enum("coverage", row.get("coverage"), coverage_from_string);
        rec.region = parse_enum("region", row.get("region"), region_from_string);
        rec.source = parse_enum("source", row.get("source"), source_from_string);
        rec.zip_code = valid_zip("zip_code", row.get("zip_code"));
        rec.liability_payment_expected =
            parse_bool("liability_payment_expected", row.get("liability_payment_expected"));

        const auto& date_text = row.get("occurrence_date");
        auto date = Date::parse(date_text);
        if (!date) bad_field("occurrence_date", "not a valid ISO-8601 date: '" + date_text + "'");
        rec.occurrence_date = *date;
        const DateWindow& window = rec.source == Source::Fleet ? kFleetWindow : kHumanWindow;
        if (!window.contains(rec.occurrence_date)) {
            bad_field("occurrence_date", date_text + " outside the " +
                                             std::string(to_string(rec.source)) + " study window " +
                                             window.first.to_string() + ".." +
                                             window.last.to_string());
        }

        const auto& mode_text = row.get("mode");
        if (rec.source == Source::Fleet) {
            if (mode_text.empty()) bad_field("mode", "fleet claims must carry a driving mode");
            rec.mode = parse_enum("mode", mode_text, mode_from_string);
        } else if (!mode_text.empty()) {
            bad_field("mode", "human baseline claims must leave the mode blank");
        }

        if (row.has_column("mode_override")) {
            const auto& override_text = row.get("mode_override");
            if (!override_text.empty()) {
                if (rec.source != Source::Fleet) {
                    bad_field("mode_override", "only fleet claims can carry an override");
                }
                rec.mode_override = parse_enum("mode_override", override_text, mode_from_string);
            }
        }
        return rec;
    });
}

std::vector<ExposureRecord> parse_exposure(const csv::Table& table, IssueSink* sink) {
    const std::vector<std::string> required{"region", "zip_code", "coverage_year", "policy_years"};
    check_header(table, required);

    return parse_rows<ExposureRecord>(table, sink, [&](const Row& row, const auto& seen) {
        ExposureRecord rec;
        rec.region = parse_enum("region", row.get("region"), region_from_string);
        rec.zip_code = valid_zip("zip_code", row.get("zip_code"));
        rec.coverage_year = parse_int("coverage_year", row.get("coverage_year"));
        if (rec.coverage_year < kFirstCoverageYear || rec.coverage_year > kLastCoverageYear) {
            bad_field("coverage_year", "year " + std::to_string(rec.coverage_year) +
                                           " outside baseline range [2016, 2021]");
        }
        rec.policy_years = parse_nonneg_real("policy_years", row.get("policy_years"));
        for (const auto& other : seen) {
            if (other.region == rec.region && other.zip_code == rec.zip_code &&
                other.coverage_year == rec.coverage_year) {
                bad_field("zip_code", "duplicate exposure row for this region/zip/year");
            }
        }
        return rec;
    });
}

std::vector<MileageRecord> parse_mileage(const csv::Table& table, IssueSink* sink) {
    const std::vector<std::string> required{"region", "mode", "miles"};
    check_header(table, required);

    return parse_rows<MileageRecord>(table, sink, [&](const Row& row, const auto& seen) {
        MileageRecord rec;
        rec.region = parse_enum("region", row.get("region"), region_from_string);
        rec.mode = parse_enum("mode", row.get("mode"), mode_from_string);
        rec.miles = parse_nonneg_real("miles", row.get("miles"));
        for (const auto& other : seen) {
            if (other.region == rec.region && other.mode == rec.mode) {
                bad_field("mode", "duplicate mileage row for this region/mode");
            }
        }
        return rec;
    });
}

std::vector<ZipCodeSet> parse_zips(const csv::Table& table, IssueSink* sink) {
    const std::vector<std::string> required{"region", "zip_code"};
    check_header(table, required);

    struct ZipRow {
        Region region;
        std::string zip;
    };
    auto rows = parse_rows<ZipRow>(table, sink, [&](const Row& row, const auto& seen) {
        ZipRow rec{parse_enum("region", row.get("region"), region_from_string),
                   valid_zip("zip_code", row.get("zip_code"))};
        for (const auto& other : seen) {
            if (other.region == rec.region && other.zip == rec.zip) {
                bad_field("zip_code", "duplicate zip code for this region");
            }
        }
        return rec;
    });

    std::vector<ZipCodeSet> sets;
    for (const auto& row : rows) {
        auto it = std::find_if(sets.begin(), sets.end(),
                               [&](const ZipCodeSet& s) { return s.region == row.region; });
        if (it == sets.end()) {
            sets.push_back({row.region, {}});
            it = sets.end() - 1;
        }
        it->zip_codes.insert(row.zip);
    }
    return sets;
}

std::vector<vmt::VmtInputRow> parse_vmt_inputs(const csv::Table& table, IssueSink* sink) {
    const std::vector<std::string> required{"region_scope", "region_name",
                                            "year",         "month",
                                            "total_vmt_miles", "registered_vehicles",
                                            "population",   "vehicles_per_capita"};
    check_header(table, required);

    return parse_rows<vmt::VmtInputRow>(table, sink, [&](const Row& row, const auto&) {
        vmt::VmtInputRow rec;
        rec.scope = parse_enum("region_scope", row.get("region_scope"), vmt::scope_from_string);
        rec.region_name = row.get("region_name");
        auto region = vmt::region_from_vmt_name(rec.region_name);
        if (!region) {
            bad_field("region_name",
                      "'" + rec.region_name + "' does not map to a study region");
        }
        rec.region = *region;
        rec.year = parse_int("year", row.get("year"));

        const auto& month_text = row.get("month");
        if (!month_text.empty()) {
            int month = parse_int("month", month_text);
            if (month < 1 || month > 12) bad_field("month", "month must be 1..12");
            rec.month = month;
        }

        rec.total_vmt_miles = parse_nonneg_real("total_vmt_miles", row.get("total_vmt_miles"));
        if (rec.total_vmt_miles == 0.0) bad_field("total_vmt_miles", "must be positive");

        auto optional_positive = [&](const char* field) -> std::optional<double> {
            const auto& text = row.get(field);
            if (text.empty()) return std::nullopt;
            double v = parse_nonneg_real(field, text);
            if (v == 0.0) bad_field(field, "must be positive when present");
            return v;
        };
        rec.registered_vehicles = optional_positive("registered_vehicles");
        rec.population = optional_positive("population");
        rec.vehicles_per_capita = optional_positive("vehicles_per_capita");

        if (rec.scope == vmt::RegionScope::State) {
            if (!rec.registered_vehicles) {
                bad_field("registered_vehicles", "required for State rows");
            }
            if (rec.population || rec.vehicles_per_capita) {
                bad_field("population", "State rows must not carry urbanized-area fields");
            }
        } else {
            if (!rec.population || !rec.vehicles_per_capita) {
                bad_field("population", "UrbanizedArea rows need population and vehicles_per_capita");
            }
            if (rec.registered_vehicles) {
                bad_field("registered_vehicles", "UrbanizedArea rows must not carry state fields");
            }
            if (rec.month) bad_field("month", "UrbanizedArea rows are annual");
        }
        return rec;
    });
}

namespace {

std::string json_value_to_string(const nlohmann::json& value, const std::string& field) {
    if (value.is_null()) return "";
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
    if (value.is_number_float()) return csv::format_double(value.get<double>());
    fail(ErrorKind::SchemaMismatch, "unsupported JSON value for field '" + field + "'");
}

csv::Table table_from_json(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(csv::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::SchemaMismatch, path.filename().string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        fail(ErrorKind::SchemaMismatch,
             path.filename().string() + ": expected an array of row objects");
    }
    if (doc.empty()) fail(ErrorKind::EmptyFile, path.filename().string() + ": no rows");

    csv::Table table;
    table.origin = path.filename().string();
    for (const auto& [key, _] : doc.front().items()) table.header.push_back(key);
    std::sort(table.header.begin(), table.header.end());
    for (const auto& row : doc) {
        if (!row.is_object()) {
            fail(ErrorKind::SchemaMismatch, table.origin + ": rows must be objects");
        }
        std::vector<std::string> fields;
        for (const auto& name : table.header) {
            if (!row.contains(name)) {
                fail(ErrorKind::SchemaMismatch, table.origin + ": row missing field '" + name + "'");
            }
            fields.push_back(json_value_to_string(row.at(name), name));
        }
        if (row.size() != table.header.size()) {
            fail(ErrorKind::SchemaMismatch, table.origin + ": rows carry inconsistent field sets");
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

// JSON tables carry the same field names but no column order; rebuild the
// canonical order expected by the header check.
void reorder_columns(csv::Table& table, std::span<const std::string> order) {
    std::vector<size_t> index;
    for (const auto& name : order) {
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) continue;
        index.push_back(static_cast<size_t>(it - table.header.begin()));
    }
    if (index.size() != table.header.size()) return;  // extra columns: leave for check_header
    std::vector<std::string> header;
    for (size_t i : index) header.push_back(table.header[i]);
    table.header = std::move(header);
    for (auto& row : table.rows) {
        std::vector<std::string> fields;
        for (size_t i : index) fields.push_back(std::move(row[i]));
        row = std::move(fields);
    }
}

const std::map<std::string, std::vector<std::string>> kCanonicalColumns{
    {"claims",
     {"claim_id", "coverage", "occurrence_date", "zip_code", "region", "source",
      "liability_payment_expected", "mode", "mode_override"}},
    {"exposure", {"region", "zip_code", "coverage_year", "policy_years"}},
    {"mileage", {"region", "mode", "miles"}},
    {"zips", {"region", "zip_code"}},
    {"vmt_inputs",
     {"region_scope", "region_name", "year", "month", "total_vmt_miles", "registered_vehicles",
      "population", "vehicles_per_capita"}},
};

}  // namespace

csv::Table read_table(const std::filesystem::path& inputs_dir, const std::string& name) {
    const auto csv_path = inputs_dir / (name + ".csv");
    const auto json_path = inputs_dir / (name + ".json");
    csv::Table table;
    if (std::filesystem::exists(csv_path)) {
        table = csv::read_file(csv_path);
    } else if (std::filesystem::exists(json_path)) {
        table = table_from_json(json_path);
    } else {
        fail(ErrorKind::FileUnreadable,
             "no " + name + ".csv or " + name + ".json under " + inputs_dir.string());
    }
    reorder_columns(table, kCanonicalColumns.at(name));
    return table;
}

const ZipCodeSet* Dataset::zips_for(Region region) const {
    for (const auto& set : zips) {
        if (set.region == region) return &set;
    }
    return nullptr;
}

Dataset load_dataset(const std::filesystem::path& inputs_dir) {
    Dataset ds;
    ds.claims = parse_claims(read_table(inputs_dir, "claims"));
    ds.exposure = parse_exposure(read_table(inputs_dir, "exposure"));
    ds.mileage = parse_mileage(read_table(inputs_dir, "mileage"));
    ds.zips = parse_zips(read_table(inputs_dir, "zips"));
    ds.vmt_inputs = parse_vmt_inputs(read_table(inputs_dir, "vmt_inputs"));
    return ds;
}

std::vector<ClaimRecord> filter_claims_by_zip(std::span<const ClaimRecord> claims,
                                              std::span<const ZipCodeSet> zips) {
    std::vector<ClaimRecord> kept;
    for (const auto& claim : claims) {
        for (const auto& set : zips) {
            if (set.region == claim.region && set.contains(claim.zip_code)) {
                kept.push_back(claim);
                break;
            }
        }
    }
    return kept;
}

std::string serialize_claims(std::span<const ClaimRecord> claims) {
    std::string out =
        "claim_id,coverage,occurrence_date,zip_code,region,source,"
        "liability_payment_expected,mode,mode_override\n";
    for (const auto& c : claims) {
        std::vector<std::string> fields{
            c.claim_id,
            to_string(c.coverage),
            c.occurrence_date.to_string(),
            c.zip_code,
            to_string(c.region),
            to_string(c.source),
            c.liability_payment_expected ? "true" : "false",
            c.mode ? to_string(*c.mode) : "",
            c.mode_override ? to_string(*c.mode_override) : "",
        };
        csv::append_line(out, fields);
    }
    return out;
}

std::string serialize_exposure(std::span<const ExposureRecord> exposure) {
    std::string out = "region,zip_code,coverage_year,policy_years\n";
    for (const auto& e : exposure) {
        std::vector<std::string> fields{
            to_string(e.region),
            e.zip_code,
            std::to_string(e.coverage_year),
            csv::format_double(e.policy_years),
        };
        csv::append_line(out, fields);
    }
    return out;
}

std::string serialize_mileage(std::span<const MileageRecord> mileage) {
    std::string out = "region,mode,miles\n";
    for (const auto& m : mileage) {
        std::vector<std::string> fields{
            to_string(m.region),
            to_string(m.mode),
            csv::format_double(m.miles),
        };
        csv::append_line(out, fields);
    }
    return out;
}

std::string serialize_zips(std::span<const ZipCodeSet> zips) {
    std::string out = "region,zip_code\n";
    for (const auto& set : zips) {
        for (const auto& zip : set.zip_codes) {
            std::vector<std::string> fields{to_string(set.region), zip};
            csv::append_line(out, fields);
        }
    }
    return out;
}

std::string serialize_vmt_inputs(std::span<const vmt::VmtInputRow> rows) {
    std::string out =
        "region_scope,region_name,year,month,total_vmt_miles,registered_vehicles,"
        "population,vehicles_per_capita\n";
    for (const auto& r : rows) {
        std::vector<std::string> fields{
            to_string(r.scope),
            r.region_name,
            std::to_string(r.year),
            r.month ? std::to_string(*r.month) : "",
            csv::format_double(r.total_vmt_miles),
            r.registered_vehicles ? csv::format_double(*r.registered_vehicles) : "",
            r.population ? csv::format_double(*r.population) : "",
            r.vehicles_per_capita ? csv::format_double(*r.vehicles_per_capita) : "",
        };
        csv::append_line(out, fields);
    }
    return out;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    csv::write_text_file(dir / "claims.csv", serialize_claims(dataset.claims));
    csv::write_text_file(dir / "exposure.csv", serialize_exposure(dataset.exposure));
    csv::write_text_file(dir / "mileage.csv", serialize_mileage(dataset.mileage));
    csv::write_text_file(dir / "zips.csv", serialize_zips(dataset.zips));
    csv::write_text_file(dir / "vmt_inputs.csv", serialize_vmt_inputs(dataset.vmt_inputs));
}

}  // namespace claimsbench::ingestion
