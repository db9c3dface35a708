#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccds/analytics.hpp"
#include "ccds/closeout.hpp"
#include "ccds/contracts.hpp"
#include "ccds/errors.hpp"
#include "ccds/market.hpp"

namespace ccds {

using Json = nlohmann::json;

/// A single deterministic close-out scenario as stored on disk. Money fields
/// are integer minor units of `currency`.
struct ScenarioDocument {
    std::string currency = "EUR";
    DefaultScenario scenario;
    DefaultModel model;
    Money notional;
    std::vector<SchedulePeriod> schedule;

    DealTerms deal() const { return {notional, schedule, model.lgd, {}}; }

    friend bool operator==(const ScenarioDocument&, const ScenarioDocument&) = default;
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

inline Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(source + ": malformed JSON", line, column);
    }
}

inline void reject_unknown_keys(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where, "expected an object");
    std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) throw ValidationError(key, "unknown field in " + where);
    }
}

inline double number_field(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(key, "missing");
    if (!it->is_number()) throw ValidationError(key, "expected a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ValidationError(key, "must be finite");
    return v;
}

inline double number_field(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? number_field(j, key) : fallback;
}

inline std::int64_t integer_field(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(key, "missing");
    if (!it->is_number_integer()) throw ValidationError(key, "expected an integer number of minor units");
    return it->get<std::int64_t>();
}

inline std::uint64_t unsigned_field(const Json& j, const char* key, std::uint64_t fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) throw ValidationError(key, "expected an integer >= 0");
    return it->get<std::uint64_t>();
}

inline std::string string_field(const Json& j, const char* key, const std::string& fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) throw ValidationError(key, "expected a string");
    return it->get<std::string>();
}

}  // namespace detail

inline ScenarioDocument scenario_from_json(const Json& j) {
    detail::reject_unknown_keys(j,
                                {"currency", "tau", "back_swap_mtm_for_O", "lgd", "hazard_rate", "discount_rate",
                                 "notional", "schedule"},
                                "scenario");
    ScenarioDocument doc;
    doc.currency = detail::string_field(j, "currency", "EUR");
    doc.model.lgd = detail::number_field(j, "lgd");
    doc.model.hazard_rate = detail::number_field(j, "hazard_rate", 0.0);
    doc.model.validate();
    const double rate = detail::number_field(j, "discount_rate", 0.0);
    doc.notional = Money::from_minor(j.contains("notional") ? detail::integer_field(j, "notional") : 0);
    if (doc.notional.is_negative()) throw ValidationError("notional", "must be >= 0");

    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        if (!s.is_array()) throw ValidationError("schedule", "expected an array");
        for (const auto& e : s) {
            detail::reject_unknown_keys(e, {"time", "asset_rate", "note_rate"}, "schedule entry");
            doc.schedule.push_back({detail::number_field(e, "time"), detail::number_field(e, "asset_rate"),
                                    detail::number_field(e, "note_rate")});
        }
        make_back_swap(doc.notional, doc.schedule);  // validates the schedule
    }

    MarketState market = MarketState::curve(rate);
    if (j.contains("back_swap_mtm_for_O")) {
        market = MarketState::direct(rate, Money::from_minor(detail::integer_field(j, "back_swap_mtm_for_O")));
    } else if (doc.schedule.empty()) {
        throw ValidationError("schedule", "required when back_swap_mtm_for_O is absent");
    }

    if (j.contains("tau") && !j.at("tau").is_null()) {
        const double tau = detail::number_field(j, "tau");
        if (tau < 0.0) throw ValidationError("tau", "must be >= 0");
        if (!doc.schedule.empty() && tau > doc.schedule.back().payment_time) {
            throw ValidationError("tau", "default after the last payment date");
        }
        doc.scenario = DefaultScenario::at(tau, market);
    } else {
        doc.scenario = DefaultScenario::no_default(market);
    }
    return doc;
}

inline Json scenario_to_json(const ScenarioDocument& doc) {
    Json j;
    j["currency"] = doc.currency;
    if (doc.scenario.tau) j["tau"] = *doc.scenario.tau;
    if (const auto& m = doc.scenario.market_at_tau.back_swap_mtm_for_originator()) j["back_swap_mtm_for_O"] = m->minor();
    j["lgd"] = doc.model.lgd;
    j["hazard_rate"] = doc.model.hazard_rate;
    j["discount_rate"] = doc.scenario.market_at_tau.flat_discount_rate();
    j["notional"] = doc.notional.minor();
    if (!doc.schedule.empty()) {
        Json s = Json::array();
        for (const auto& p : doc.schedule) {
            s.push_back({{"time", p.payment_time}, {"asset_rate", p.asset_rate}, {"note_rate", p.note_rate}});
        }
        j["schedule"] = std::move(s);
    }
    return j;
}

inline ScenarioDocument parse_scenario(const std::string& text, const std::string& source = "scenario") {
    return scenario_from_json(detail::parse_json(text, source));
}

/// Reads and validates a scenario file.
inline ScenarioDocument load_scenario(const std::filesystem::path& path) {
    return parse_scenario(detail::read_text_file(path), path.string());
}

inline void save_scenario(const std::filesystem::path& path, const ScenarioDocument& doc) {
    detail::write_text_file(path, scenario_to_json(doc).dump(2) + "\n");
}

// --- close-out reports -------------------------------------------------------

inline Json market_to_json(const MarketState& m) {
    Json j;
    j["mode"] = m.mode() == ValuationMode::Curve ? "curve" : "direct_mtm";
    j["discount_rate"] = m.flat_discount_rate();
    if (const auto& x = m.back_swap_mtm_for_originator()) j["back_swap_mtm_for_O"] = x->minor();
    return j;
}

inline MarketState market_from_json(const Json& j) {
    detail::reject_unknown_keys(j, {"mode", "discount_rate", "back_swap_mtm_for_O"}, "market");
    const auto mode = detail::string_field(j, "mode", "");
    const double rate = detail::number_field(j, "discount_rate");
    if (mode == "curve") return MarketState::curve(rate);
    if (mode == "direct_mtm") return MarketState::direct(rate, Money::from_minor(detail::integer_field(j, "back_swap_mtm_for_O")));
    throw ValidationError("mode", "expected 'curve' or 'direct_mtm'");
}

inline Json report_to_json(const CloseoutReport& r, const std::string& currency = "EUR") {
    Json j;
    j["currency"] = currency;
    j["structure"] = std::string(to_string(r.structure));
    j["scenario"] = {{"tau", r.scenario.tau ? Json(*r.scenario.tau) : Json(nullptr)},
                     {"market_at_tau", market_to_json(r.scenario.market_at_tau)},
                     {"discount_to_tau", r.scenario.discount_to_tau}};
    Json flows = Json::array();
    for (const auto& f : r.flows) {
        flows.push_back({{"from", std::string(to_string(f.from))},
                         {"to", std::string(to_string(f.to))},
                         {"amount", f.amount.minor()},
                         {"label", std::string(to_string(f.label))},
                         {"netting_set", f.netting_set ? Json(*f.netting_set) : Json(nullptr)}});
    }
    j["flows"] = std::move(flows);
    Json parties = Json::object();
    for (const auto& [p, o] : r.per_party) {
        parties[std::string(to_string(p))] = {{"realized_loss", o.realized_loss.minor()},
                                              {"liquidity_delta", o.liquidity_delta.minor()},
                                              {"termination_amount", o.termination_amount.minor()}};
    }
    j["per_party"] = std::move(parties);
    j["estate_net"] = r.estate_net.minor();
    return j;
}

inline CloseoutReport report_from_json(const Json& j) {
    detail::reject_unknown_keys(j, {"currency", "structure", "scenario", "flows", "per_party", "estate_net"}, "report");
    CloseoutReport r;
    r.structure = structure_from_string(detail::string_field(j, "structure", ""));
    const auto& s = j.at("scenario");
    detail::reject_unknown_keys(s, {"tau", "market_at_tau", "discount_to_tau"}, "report scenario");
    r.scenario.tau = s.at("tau").is_null() ? std::nullopt : std::optional<double>(detail::number_field(s, "tau"));
    r.scenario.market_at_tau = market_from_json(s.at("market_at_tau"));
    r.scenario.discount_to_tau = detail::number_field(s, "discount_to_tau");
    for (const auto& f : j.at("flows")) {
        detail::reject_unknown_keys(f, {"from", "to", "amount", "label", "netting_set"}, "flow");
        CashFlow cf{party_from_string(detail::string_field(f, "from", "")),
                    party_from_string(detail::string_field(f, "to", "")),
                    Money::from_minor(detail::integer_field(f, "amount")),
                    flow_label_from_string(detail::string_field(f, "label", "")),
                    f.at("netting_set").is_null() ? std::nullopt
                                                  : std::optional<std::string>(f.at("netting_set").get<std::string>())};
        if (!cf.amount.is_positive()) throw ValidationError("amount", "flow amounts must be > 0");
        r.flows.push_back(std::move(cf));
    }
    for (const auto& [name, o] : j.at("per_party").items()) {
        r.per_party[party_from_string(name)] = {Money::from_minor(detail::integer_field(o, "realized_loss")),
                                                Money::from_minor(detail::integer_field(o, "liquidity_delta")),
                                                Money::from_minor(detail::integer_field(o, "termination_amount"))};
    }
    r.estate_net = Money::from_minor(detail::integer_field(j, "estate_net"));
    return r;
}

inline CloseoutReport parse_report(const std::string& text, const std::string& source = "report") {
    return report_from_json(detail::parse_json(text, source));
}

// --- CSV ---------------------------------------------------------------------

/// Shortest text that round-trips `x`.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string flows_csv(const CloseoutReport& r) {
    std::ostringstream out;
    out << "from,to,amount,label,netting_set\n";
    for (const auto& f : r.flows) {
        out << to_string(f.from) << ',' << to_string(f.to) << ',' << f.amount.minor() << ',' << to_string(f.label)
            << ',' << f.netting_set.value_or("") << '\n';
    }
    return out.str();
}

inline std::string parties_csv(const CloseoutReport& r) {
    std::ostringstream out;
    out << "party,realized_loss,liquidity_delta,termination_amount\n";
    for (const auto& [p, o] : r.per_party) {
        out << to_string(p) << ',' << o.realized_loss.minor() << ',' << o.liquidity_delta.minor() << ','
            << o.termination_amount.minor() << '\n';
    }
    out << "estate_net," << r.estate_net.minor() << ",,\n";
    return out.str();
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    out << "scenario,structure,realized_loss_O,realized_loss_V,liquidity_delta_O,liquidity_delta_V,estate_net\n";
    for (const auto& r : rows) {
        out << r.scenario_index << ',' << to_string(r.structure) << ',' << r.loss_o.minor() << ',' << r.loss_v.minor()
            << ',' << r.liquidity_o.minor() << ',' << r.liquidity_v.minor() << ',' << r.estate_net.minor() << '\n';
    }
    return out.str();
}

inline std::string exposure_csv(const ExposureProfile& p) {
    std::ostringstream out;
    out << "time,epe,std_error\n";
    for (std::size_t k = 0; k < p.times.size(); ++k) {
        out << format_double(p.times[k]) << ',' << format_double(p.epe[k]) << ',' << format_double(p.std_error[k])
            << '\n';
    }
    return out.str();
}

inline std::string cva_csv(const std::vector<CvaResult>& results) {
    std::ostringstream out;
    out << "structure,cva,std_error,n_paths,lgd,hazard_rate\n";
    for (const auto& c : results) {
        out << to_string(c.structure) << ',' << format_double(c.cva) << ',' << format_double(c.std_error) << ','
            << c.n_paths << ',' << format_double(c.lgd) << ',' << format_double(c.hazard_rate) << '\n';
    }
    return out.str();
}

}  // namespace ccds
