#pragma once

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccds/analytics.hpp"
#include "ccds/closeout.hpp"
#include "ccds/errors.hpp"
#include "ccds/io.hpp"

namespace ccds::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kInvariant = 3 };

enum class OutputFormat { Csv, Structured };

struct McSettings {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    double horizon = 10.0;
    double dt = 0.25;
    unsigned threads = 1;

    friend bool operator==(const McSettings&, const McSettings&) = default;
};

/// Market and credit parameters for the Monte Carlo commands. Illustrative
/// defaults only; nothing here is calibrated.
struct ModelSettings {
    double hazard_rate = 0.02;
    double lgd = 0.6;
    double discount_rate = 0.01;
    Money initial_mtm;         // minor units
    double volatility = 30e6;  // major units per sqrt(year)
    double drift = 0.0;        // major units per year

    friend bool operator==(const ModelSettings&, const ModelSettings&) = default;
};

struct RunConfig {
    std::optional<StructureKind> structure;  // nullopt: all three
    std::vector<std::filesystem::path> scenarios;
    McSettings mc;
    ModelSettings model;
    std::size_t sweep_n = 10000;
    std::uint64_t sweep_seed = 7;
    SweepBounds sweep;
    std::filesystem::path output = "out";
    OutputFormat format = OutputFormat::Csv;
    std::string currency = "EUR";

    std::vector<StructureKind> structures() const {
        if (structure) return {*structure};
        return {all_structures.begin(), all_structures.end()};
    }
};

inline std::optional<StructureKind> parse_structure_option(const std::string& s) {
    if (s == "all") return std::nullopt;
    return structure_from_string(s);
}

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "structured") return OutputFormat::Structured;
    throw ValidationError("format", "expected 'csv' or 'structured'");
}

/// A run-config document has at least one of these top-level keys; any other
/// document passed as --config is read as a single scenario file.
inline bool is_run_config(const Json& j) {
    for (const char* k : {"structure", "scenario", "scenarios", "mc", "model", "sweep", "output", "format"}) {
        if (j.contains(k)) return true;
    }
    return false;
}

inline RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    detail::reject_unknown_keys(
        j, {"structure", "scenario", "scenarios", "mc", "model", "sweep", "output", "format", "currency"}, "config");
    RunConfig cfg;
    cfg.structure = parse_structure_option(detail::string_field(j, "structure", "all"));
    const auto resolve_path = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    if (j.contains("scenario")) cfg.scenarios.push_back(resolve_path(detail::string_field(j, "scenario", "")));
    if (j.contains("scenarios")) {
        if (!j.at("scenarios").is_array()) throw ValidationError("scenarios", "expected an array of paths");
        for (const auto& s : j.at("scenarios")) {
            if (!s.is_string()) throw ValidationError("scenarios", "expected an array of paths");
            cfg.scenarios.push_back(resolve_path(s.get<std::string>()));
        }
    }
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        detail::reject_unknown_keys(m, {"n_paths", "seed", "horizon", "dt", "threads"}, "mc");
        cfg.mc.n_paths = detail::unsigned_field(m, "n_paths", cfg.mc.n_paths);
        cfg.mc.seed = detail::unsigned_field(m, "seed", cfg.mc.seed);
        cfg.mc.horizon = detail::number_field(m, "horizon", cfg.mc.horizon);
        cfg.mc.dt = detail::number_field(m, "dt", cfg.mc.dt);
        cfg.mc.threads = static_cast<unsigned>(detail::unsigned_field(m, "threads", cfg.mc.threads));
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        detail::reject_unknown_keys(m, {"hazard_rate", "lgd", "discount_rate", "initial_mtm", "volatility", "drift"},
                                    "model");
        cfg.model.hazard_rate = detail::number_field(m, "hazard_rate", cfg.model.hazard_rate);
        cfg.model.lgd = detail::number_field(m, "lgd", cfg.model.lgd);
        cfg.model.discount_rate = detail::number_field(m, "discount_rate", cfg.model.discount_rate);
        if (m.contains("initial_mtm")) cfg.model.initial_mtm = Money::from_minor(detail::integer_field(m, "initial_mtm"));
        cfg.model.volatility = detail::number_field(m, "volatility", cfg.model.volatility);
        cfg.model.drift = detail::number_field(m, "drift", cfg.model.drift);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::reject_unknown_keys(s,
                                    {"n", "seed", "mtm_min", "mtm_max", "lgd_min", "lgd_max", "tau_min", "tau_max",
                                     "rate_min", "rate_max", "zero_mtm_fraction"},
                                    "sweep");
        cfg.sweep_n = detail::unsigned_field(s, "n", cfg.sweep_n);
        cfg.sweep_seed = detail::unsigned_field(s, "seed", cfg.sweep_seed);
        auto& b = cfg.sweep;
        b.mtm_min = detail::number_field(s, "mtm_min", b.mtm_min);
        b.mtm_max = detail::number_field(s, "mtm_max", b.mtm_max);
        b.lgd_min = detail::number_field(s, "lgd_min", b.lgd_min);
        b.lgd_max = detail::number_field(s, "lgd_max", b.lgd_max);
        b.tau_min = detail::number_field(s, "tau_min", b.tau_min);
        b.tau_max = detail::number_field(s, "tau_max", b.tau_max);
        b.rate_min = detail::number_field(s, "rate_min", b.rate_min);
        b.rate_max = detail::number_field(s, "rate_max", b.rate_max);
        b.zero_mtm_fraction = detail::number_field(s, "zero_mtm_fraction", b.zero_mtm_fraction);
    }
    if (j.contains("output")) cfg.output = resolve_path(detail::string_field(j, "output", "out"));
    cfg.format = parse_format(detail::string_field(j, "format", "csv"));
    cfg.currency = detail::string_field(j, "currency", cfg.currency);
    return cfg;
}

/// Loads --config: either a run config or a bare scenario document.
inline RunConfig load_run_config(const std::filesystem::path& path) {
    const Json j = detail::parse_json(detail::read_text_file(path), path.string());
    if (!j.is_object()) throw ValidationError("config", "expected a JSON object");
    if (!is_run_config(j)) {
        RunConfig cfg;
        cfg.scenarios.push_back(path);
        return cfg;
    }
    return run_config_from_json(j, path.parent_path());
}

inline void validate_mc(const RunConfig& cfg) {
    if (cfg.mc.n_paths < 1) throw ValidationError("n_paths", "must be >= 1");
    if (cfg.mc.threads < 1) throw ValidationError("threads", "must be >= 1");
    DefaultModel{cfg.model.hazard_rate, cfg.model.lgd}.validate();
    if (!(cfg.model.volatility >= 0.0)) throw ValidationError("volatility", "must be >= 0");
}

namespace detail {

inline std::vector<ScenarioDocument> load_all(const RunConfig& cfg) {
    if (cfg.scenarios.empty()) throw ValidationError("scenario", "no scenario file given");
    std::vector<ScenarioDocument> docs;
    for (const auto& p : cfg.scenarios) docs.push_back(load_scenario(p));
    return docs;
}

inline std::string money_text(Money m) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << m.major();
    return out.str();
}

inline void print_rows(const std::vector<ComparisonRow>& rows, std::ostream& out) {
    out << std::setw(8) << "scenario" << ' ' << std::setw(11) << std::left << "structure" << std::right
        << std::setw(16) << "loss_O" << std::setw(10) << "loss_V" << std::setw(13) << "liquidity_O" << std::setw(13)
        << "liquidity_V" << std::setw(12) << "estate_net" << '\n';
    for (const auto& r : rows) {
        out << std::setw(8) << r.scenario_index << ' ' << std::setw(11) << std::left << to_string(r.structure)
            << std::right << std::setw(16) << money_text(r.loss_o) << std::setw(10) << money_text(r.loss_v)
            << std::setw(13) << money_text(r.liquidity_o) << std::setw(13) << money_text(r.liquidity_v)
            << std::setw(12) << money_text(r.estate_net) << '\n';
    }
}

/// Maps the library's exceptions onto the exit-code contract.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kValidation;
    } catch (const StructureError& e) {
        err << "structure error: " << e.what() << '\n';
        return kValidation;
    }
}

}  // namespace detail

/// Resolves each scenario under the selected structures and writes the
/// close-out reports plus a comparison table to `cfg.output`.
inline int cmd_resolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto docs = detail::load_all(cfg);
        const bool many = docs.size() > 1;
        std::vector<ComparisonRow> rows;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            for (auto kind : cfg.structures()) {
                const auto report = resolve(docs[i].scenario, make_structure(kind, docs[i].deal()));
                const std::string stem =
                    std::string(to_string(kind)) + (many ? "_" + std::to_string(i) : std::string());
                if (cfg.format == OutputFormat::Structured) {
                    ccds::detail::write_text_file(cfg.output / ("report_" + stem + ".json"),
                                                  report_to_json(report, docs[i].currency).dump(2) + "\n");
                } else {
                    ccds::detail::write_text_file(cfg.output / ("flows_" + stem + ".csv"), flows_csv(report));
                    ccds::detail::write_text_file(cfg.output / ("parties_" + stem + ".csv"), parties_csv(report));
                }
                rows.push_back({i, kind, report.outcome(PartyId::Originator).realized_loss,
                                report.outcome(PartyId::Spv).realized_loss,
                                report.outcome(PartyId::Originator).liquidity_delta,
                                report.outcome(PartyId::Spv).liquidity_delta, report.estate_net});
            }
        }
        ccds::detail::write_text_file(cfg.output / "comparison.csv", comparison_csv(rows));
        detail::print_rows(rows, out);
        return static_cast<int>(kOk);
    });
}

/// Comparison table only, over all three structures.
inline int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto docs = detail::load_all(cfg);
        std::vector<ComparisonRow> rows;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            for (auto row : compare_structures({docs[i].scenario}, docs[i].deal())) {
                row.scenario_index = i;
                rows.push_back(row);
            }
        }
        ccds::detail::write_text_file(cfg.output / "comparison.csv", comparison_csv(rows));
        detail::print_rows(rows, out);
        return static_cast<int>(kOk);
    });
}

/// Runs the close-out invariant suite over randomised scenarios. On failure the
/// shrunk counterexample is written as a scenario file that `resolve` accepts.
inline int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err, const ResolverSet& resolvers = {}) {
    return detail::guarded(err, [&] {
        if (cfg.sweep_n < 1) throw ValidationError("n", "sweep size must be >= 1");
        const auto cases = random_cases(cfg.sweep_n, cfg.sweep_seed, cfg.sweep);
        const auto result = run_invariant_suite(cases, resolvers);
        Json summary;
        summary["n"] = cfg.sweep_n;
        summary["seed"] = cfg.sweep_seed;
        for (const auto& name : invariant_names()) {
            const auto& c = result.counts.at(name);
            out << (c.failed == 0 ? "PASS " : "FAIL ") << name << ": " << c.passed << " passed, " << c.failed
                << " failed\n";
            summary["invariants"][name] = {{"passed", c.passed}, {"failed", c.failed}};
        }
        summary["passed"] = result.passed();
        ccds::detail::write_text_file(cfg.output / "check_summary.json", summary.dump(2) + "\n");
        if (result.passed()) return static_cast<int>(kOk);

        const SweepCase minimal = shrink_failure(cases[*result.first_failure], resolvers);
        ScenarioDocument doc;
        doc.currency = cfg.currency;
        doc.scenario = minimal.scenario;
        doc.model = {0.0, minimal.lgd};
        const auto path = cfg.output / "counterexample.json";
        save_scenario(path, doc);
        err << "invariant violated; minimal failing scenario written to " << path.string() << '\n';
        for (const auto& name : violated_invariants(minimal, resolvers)) err << "  violated: " << name << '\n';
        return static_cast<int>(kInvariant);
    });
}

/// Monte Carlo CVA per structure plus exposure profiles. Output bytes depend
/// only on the config and seed, never on `mc.threads`.
inline int cmd_cva(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        validate_mc(cfg);
        PathConfig pc;
        pc.initial_mtm = cfg.model.initial_mtm.major();
        pc.volatility = cfg.model.volatility;
        pc.drift = cfg.model.drift;
        pc.grid = TimeGrid::uniform(cfg.mc.horizon, cfg.mc.dt);
        pc.n_paths = cfg.mc.n_paths;
        pc.seed = cfg.mc.seed;
        pc.threads = cfg.mc.threads;
        const auto paths = simulate_mtm_paths(pc);
        const DefaultModel model{cfg.model.hazard_rate, cfg.model.lgd};

        std::vector<CvaResult> results;
        Json summary;
        summary["currency"] = cfg.currency;
        summary["n_paths"] = cfg.mc.n_paths;
        summary["seed"] = cfg.mc.seed;
        for (auto kind : cfg.structures()) {
            const auto r = cva(paths, model, cfg.model.discount_rate, kind, cfg.mc.threads);
            results.push_back(r);
            const auto profile = exposure_profile(paths, kind, cfg.model.discount_rate, cfg.mc.threads);
            ccds::detail::write_text_file(cfg.output / ("exposure_" + std::string(to_string(kind)) + ".csv"),
                                          exposure_csv(profile));
            summary["cva"][std::string(to_string(kind))] = {{"cva", r.cva},
                                                           {"std_error", r.std_error},
                                                           {"n_paths", r.n_paths},
                                                           {"lgd", r.lgd},
                                                           {"hazard_rate", r.hazard_rate}};
            out << std::left << std::setw(11) << to_string(kind) << std::right << " cva " << format_double(r.cva)
                << " (std error " << format_double(r.std_error) << ")\n";
        }

        const auto find = [&](StructureKind k) -> const CvaResult* {
            for (const auto& r : results) {
                if (r.structure == k) return &r;
            }
            return nullptr;
        };
        if (const CvaResult* base = find(StructureKind::Baseline)) {
            for (auto k : {StructureKind::Tpa, StructureKind::CcdsChain}) {
                if (const CvaResult* other = find(k)) {
                    const double delta = base->cva - other->cva;
                    summary["cva_delta"][std::string(to_string(k))] = delta;
                    out << "CVA reduction baseline -> " << to_string(k) << ": " << format_double(delta) << '\n';
                }
            }
        }
        if (cfg.format == OutputFormat::Structured) {
            ccds::detail::write_text_file(cfg.output / "cva_summary.json", summary.dump(2) + "\n");
        } else {
            ccds::detail::write_text_file(cfg.output / "cva.csv", cva_csv(results));
        }
        return static_cast<int>(kOk);
    });
}

}  // namespace ccds::cli
