#include "claimsbench/pipeline.hpp"

#include <cstdlib>
#include <map>

#include <json.hpp>

#include "claimsbench/baseline.hpp"
#include "claimsbench/compare.hpp"
#include "claimsbench/csv.hpp"
#include "claimsbench/ingestion.hpp"
#include "claimsbench/simulator.hpp"
#include "claimsbench/stats.hpp"

namespace claimsbench::pipeline {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out = "fnv1a:";
    for (int shift = 60; shift >= 0; shift -= 4) out += digits[(hash >> shift) & 0xF];
    return out;
}

namespace {

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(csv::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::BadConfig, path.string() + ": " + e.what());
    }
    if (!doc.is_object()) fail(ErrorKind::BadConfig, path.string() + ": expected an object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "inputs" && value.is_string()) {
            config.inputs_dir = value.get<std::string>();
        } else if (key == "out" && value.is_string()) {
            config.out_dir = value.get<std::string>();
        } else if (key == "confidence" && value.is_number()) {
            config.confidence = value.get<double>();
        } else if (key == "vmt_selection" && value.is_string()) {
            auto selection = vmt::selection_from_string(value.get<std::string>());
            if (!selection) {
                fail(ErrorKind::BadConfig,
                     path.string() + ": vmt_selection must be auto, state or urban");
            }
            config.vmt_selection = *selection;
        } else if (key == "strict" && value.is_boolean()) {
            config.strict = value.get<bool>();
        } else if (key == "seed" && (value.is_number_integer() || value.is_number_unsigned())) {
            config.seed = value.get<std::uint64_t>();
        } else if (key == "simconfig" && value.is_string()) {
            config.simconfig = std::filesystem::path(value.get<std::string>());
        } else {
            fail(ErrorKind::BadConfig,
                 path.string() + ": unknown or mistyped key '" + key + "'");
        }
    }
}

}  // namespace

RunConfig resolve_config(const ConfigOverrides& overrides) {
    RunConfig config;
    if (const char* env = std::getenv("CLAIMSBENCH_CONFIG"); env && *env) {
        apply_config_file(config, env);
    }
    if (overrides.inputs) config.inputs_dir = *overrides.inputs;
    if (overrides.out) config.out_dir = *overrides.out;
    if (overrides.confidence) config.confidence = *overrides.confidence;
    if (overrides.vmt_selection) {
        auto selection = vmt::selection_from_string(*overrides.vmt_selection);
        if (!selection) {
            fail(ErrorKind::BadConfig, "--vmt-selection must be auto, state or urban");
        }
        config.vmt_selection = *selection;
    }
    if (overrides.strict) config.strict = *overrides.strict;
    if (overrides.seed) config.seed = *overrides.seed;

    if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
        fail(ErrorKind::BadConfig, "confidence must lie strictly between 0 and 1");
    }
    return config;
}

namespace {

std::filesystem::path input_path(const RunConfig& config, const std::string& name) {
    const auto csv_path = config.inputs_dir / (name + ".csv");
    if (std::filesystem::exists(csv_path)) return csv_path;
    return config.inputs_dir / (name + ".json");
}

void write_output(const RunConfig& config, const std::string& name,
                  const std::string& contents) {
    std::filesystem::create_directories(config.out_dir);
    csv::write_text_file(config.out_dir / name, contents);
}

std::string config_digest(const RunConfig& config) {
    std::string canonical = "confidence=" + csv::format_double(config.confidence) +
                            ";vmt_selection=" + to_string(config.vmt_selection) +
                            ";strict=" + (config.strict ? "1" : "0");
    return fnv1a_hex(canonical);
}

nlohmann::ordered_json rate_json(const stats::RateEstimate& estimate) {
    nlohmann::ordered_json j;
    j["rate_cpmm"] = estimate.rate_cpmm;
    j["ci_low_cpmm"] = estimate.ci_low_cpmm;
    j["ci_high_cpmm"] = estimate.ci_high_cpmm;
    j["confidence"] = estimate.confidence;
    j["method"] = to_string(estimate.method);
    if (estimate.claim_count) j["claim_count"] = *estimate.claim_count;
    if (estimate.exposure_mmi) j["exposure_mmi"] = *estimate.exposure_mmi;
    return j;
}

nlohmann::ordered_json build_report(const RunConfig& config, const vmt::VmtTable& table,
                                    std::span<const baseline::BaselineResult> baselines,
                                    std::span<const compare::ComparisonResult> comparisons) {
    nlohmann::ordered_json report;
    report["tool"] = std::string(kToolName) + " " + kToolVersion;
    report["confidence"] = config.confidence;
    report["vmt_selection"] = to_string(config.vmt_selection);
    report["strict"] = config.strict;

    nlohmann::ordered_json provenance;
    for (const char* name : ingestion::kTableNames) {
        const auto path = input_path(config, name);
        provenance[path.filename().string()] = fnv1a_hex(csv::read_text_file(path));
    }
    provenance["config"] = config_digest(config);
    report["provenance"] = std::move(provenance);

    nlohmann::ordered_json vmt_rows = nlohmann::ordered_json::array();
    for (const auto& estimate : table.estimates()) {
        nlohmann::ordered_json row;
        row["region"] = to_string(estimate.region);
        row["year"] = estimate.year;
        row["miles_per_vehicle_state"] = estimate.miles_per_vehicle_state;
        row["miles_per_vehicle_urban"] = estimate.miles_per_vehicle_urban;
        row["selected"] = estimate.selected(config.vmt_selection);
        vmt_rows.push_back(std::move(row));
    }
    report["vmt"] = std::move(vmt_rows);

    nlohmann::ordered_json baseline_rows = nlohmann::ordered_json::array();
    for (const auto& result : baselines) {
        nlohmann::ordered_json row;
        row["category"] = to_string(result.category);
        row["coverage"] = to_string(result.coverage);
        row["estimate"] = rate_json(result.estimate);
        nlohmann::ordered_json regions = nlohmann::ordered_json::array();
        for (const auto& frequency : result.per_region) {
            nlohmann::ordered_json region;
            region["region"] = to_string(frequency.region);
            region["weight"] = result.mix.weights.at(frequency.region);
            region["claim_count"] = frequency.claim_count;
            region["exposure_mmi"] = frequency.exposure_mmi;
            region["frequency_cpmm"] = frequency.frequency_cpmm;
            regions.push_back(std::move(region));
        }
        row["regions"] = std::move(regions);
        baseline_rows.push_back(std::move(row));
    }
    report["baselines"] = std::move(baseline_rows);

    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& cell : comparisons) {
        nlohmann::ordered_json row;
        row["category"] = to_string(cell.category);
        row["coverage"] = to_string(cell.coverage);
        if (cell.no_data) {
            row["no_data"] = true;
        } else {
            row["fleet_k"] = *cell.fleet.claim_count;
            row["fleet_mmi"] = *cell.fleet.exposure_mmi;
            row["fleet_rate"] = cell.fleet.rate_cpmm;
            row["fleet_ci_low"] = cell.fleet.ci_low_cpmm;
            row["fleet_ci_high"] = cell.fleet.ci_high_cpmm;
        }
        if (cell.baseline) {
            row["baseline_rate"] = cell.baseline->rate_cpmm;
            row["baseline_ci_low"] = cell.baseline->ci_low_cpmm;
            row["baseline_ci_high"] = cell.baseline->ci_high_cpmm;
        }
        if (!cell.no_data) {
            row["reduction_pct_unrounded"] = cell.reduction_percent;
            row["reduction_pct_display"] = cell.reduction_percent_display;
            row["verdict"] =
                cell.verdict == stats::Verdict::Significant ? "Significant" : "NotSignificant";
        }
        cells.push_back(std::move(row));
    }
    report["comparisons"] = std::move(cells);
    return report;
}

struct PipelineState {
    ingestion::Dataset dataset;
    vmt::VmtTable table;
    std::vector<baseline::BaselineResult> baselines;
    std::vector<compare::ComparisonResult> comparisons;
};

PipelineState run_pipeline(const RunConfig& config) {
    PipelineState state;
    state.dataset = ingestion::load_dataset(config.inputs_dir);
    state.table = vmt::VmtTable::build(state.dataset.vmt_inputs);
    state.baselines = baseline::build_baselines(state.dataset, state.table, config.vmt_selection,
                                                config.confidence);
    state.comparisons = compare::full_matrix(state.dataset, state.baselines, config.confidence,
                                             config.strict);
    return state;
}

}  // namespace

ExitCode run_validate(const RunConfig& config, std::ostream& out) {
    ingestion::IssueSink sink;
    ingestion::Dataset ds;

    for (const char* name : ingestion::kTableNames) {
        const auto table = ingestion::read_table(config.inputs_dir, name);
        const size_t total = table.rows.size();
        const size_t before = sink.issues().size();
        size_t kept = 0;
        if (name == std::string("claims")) {
            ds.claims = ingestion::parse_claims(table, &sink);
            kept = ds.claims.size();
        } else if (name == std::string("exposure")) {
            ds.exposure = ingestion::parse_exposure(table, &sink);
            kept = ds.exposure.size();
        } else if (name == std::string("mileage")) {
            ds.mileage = ingestion::parse_mileage(table, &sink);
            kept = ds.mileage.size();
        } else if (name == std::string("zips")) {
            ds.zips = ingestion::parse_zips(table, &sink);
            kept = 0;
            for (const auto& set : ds.zips) kept += set.zip_codes.size();
        } else {
            ds.vmt_inputs = ingestion::parse_vmt_inputs(table, &sink);
            kept = ds.vmt_inputs.size();
        }
        const size_t rejected = sink.issues().size() - before;
        out << table.origin << ": " << total << " rows, " << kept << " accepted, " << rejected
            << " rejected\n";
    }

    // Cross-table check: every exposure year must have a VMT estimate.
    try {
        const auto table = vmt::VmtTable::build(ds.vmt_inputs);
        for (const auto& record : ds.exposure) {
            if (!table.find(record.region, record.coverage_year)) {
                sink.add({"exposure.csv", 0, "coverage_year",
                          std::string("no VMT estimate for region ") + to_string(record.region) +
                              " year " + std::to_string(record.coverage_year)});
            }
        }
    } catch (const Error& e) {
        sink.add({"vmt_inputs.csv", 0, "year", e.what()});
    }

    std::map<std::string, double> policy_years_by_region;
    for (const auto& record : ds.exposure) {
        policy_years_by_region[to_string(record.region)] += record.policy_years;
    }
    for (const auto& [region, total] : policy_years_by_region) {
        out << "exposure " << region << ": " << csv::format_double(total) << " policy-years\n";
    }
    std::map<std::string, double> miles_by_mode;
    for (const auto& record : ds.mileage) {
        miles_by_mode[to_string(record.mode)] += record.miles;
    }
    for (const auto& [mode, total] : miles_by_mode) {
        out << "mileage " << mode << ": " << csv::format_double(total) << " miles\n";
    }
    long long countable = 0;
    long long excluded = 0;
    for (const auto& claim : ds.claims) {
        (claim.countable() ? countable : excluded) += 1;
    }
    out << "claims: " << countable << " countable, " << excluded
        << " excluded (no liability payment expected)\n";

    if (sink.empty()) {
        out << "validation: ok\n";
        return ExitCode::Ok;
    }
    for (const auto& issue : sink.issues()) {
        out << issue.file << ": ";
        if (issue.row > 0) out << "row " << issue.row << ", ";
        out << "field " << issue.field << ": " << issue.message << "\n";
    }
    out << "validation: " << sink.issues().size() << " issue(s)\n";
    return ExitCode::Invariant;
}

ExitCode run_vmt(const RunConfig& config, std::ostream& out) {
    const auto rows = ingestion::parse_vmt_inputs(ingestion::read_table(config.inputs_dir, "vmt_inputs"));
    const auto table = vmt::VmtTable::build(rows);
    const auto serialized = vmt::serialize_vmt_estimates(table.estimates(), config.vmt_selection);
    write_output(config, "vmt.csv", serialized);
    out << serialized;
    return ExitCode::Ok;
}

ExitCode run_baseline(const RunConfig& config, std::ostream& out) {
    auto dataset = ingestion::load_dataset(config.inputs_dir);
    const auto table = vmt::VmtTable::build(dataset.vmt_inputs);
    const auto baselines =
        baseline::build_baselines(dataset, table, config.vmt_selection, config.confidence);
    const auto serialized = baseline::serialize_baselines(baselines);
    write_output(config, "baseline.csv", serialized);
    out << serialized;
    return ExitCode::Ok;
}

ExitCode run_compare(const RunConfig& config, std::ostream& out) {
    const auto state = run_pipeline(config);
    write_output(config, "comparison.csv", compare::serialize_comparisons(state.comparisons));
    const auto report = build_report(config, state.table, state.baselines, state.comparisons);
    write_output(config, "report.json", report.dump(2) + "\n");
    out << compare::render_comparison_table(state.comparisons);
    return ExitCode::Ok;
}

ExitCode run_report(const RunConfig& config, std::ostream& out) {
    const auto state = run_pipeline(config);
    write_output(config, "vmt.csv",
                 vmt::serialize_vmt_estimates(state.table.estimates(), config.vmt_selection));
    write_output(config, "baseline.csv", baseline::serialize_baselines(state.baselines));
    write_output(config, "comparison.csv", compare::serialize_comparisons(state.comparisons));
    const auto report = build_report(config, state.table, state.baselines, state.comparisons);
    write_output(config, "report.json", report.dump(2) + "\n");
    out << compare::render_comparison_table(state.comparisons);
    return ExitCode::Ok;
}

ExitCode run_simulate(const RunConfig& config, std::ostream& out) {
    const auto path =
        config.simconfig ? *config.simconfig : config.inputs_dir / "simconfig.json";
    auto sim_config = sim::load_sim_config(path);
    if (config.seed) sim_config.seed = *config.seed;

    const auto dataset = sim::simulate_claims(sim_config);
    ingestion::write_dataset(dataset, config.out_dir);

    std::string coverage =
        "kind,name,coverage,true_rate_cpmm,exposure_mmi,trials,covered,fraction\n";
    std::uint64_t experiment = 0;
    auto add_row = [&](const char* kind, const std::string& name, Coverage cov, double rate,
                       double exposure) {
        const auto result =
            sim::coverage_experiment(rate, exposure, sim_config.trials, config.confidence,
                                     sim::derive_subseed(sim_config.seed, 5000 + experiment++));
        std::vector<std::string> fields{kind,
                                        name,
                                        to_string(cov),
                                        csv::format_double(rate),
                                        csv::format_double(exposure),
                                        std::to_string(result.trials),
                                        std::to_string(result.covered),
                                        csv::format_double(result.fraction())};
        csv::append_line(coverage, fields);
    };
    for (const auto& spec : sim_config.regions) {
        for (Coverage cov : kAllCoverages) {
            add_row("human", to_string(spec.region), cov, spec.true_rate_cpmm.at(cov),
                    spec.exposure_mmi());
        }
    }
    for (const auto& spec : sim_config.fleet) {
        for (Coverage cov : kAllCoverages) {
            add_row("fleet", to_string(spec.mode), cov, spec.true_rate_cpmm.at(cov),
                    spec.total_miles() / 1e6);
        }
    }
    write_output(config, "coverage.csv", coverage);
    out << coverage;
    return ExitCode::Ok;
}

}  // namespace claimsbench::pipeline
