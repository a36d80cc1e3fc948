#ifndef MINOBS_SPEC_IO_HPP
#define MINOBS_SPEC_IO_HPP

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "minobs/env.hpp"
#include "minobs/error.hpp"
#include "minobs/experiments.hpp"
#include "minobs/observable.hpp"
#include "minobs/observer.hpp"

namespace minobs {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Environment specification document

inline RuleOp parse_rule_op(const Json& j)
{
    if (!j.is_array() || j.empty() || !j[0].is_string())
        throw Error(Errc::SpecInvalid, "rule op must be [\"SWAP\"|\"CXOR\"|\"NOT\", ...]");
    const std::string kind = j[0].get<std::string>();
    RuleOp op;
    if (kind == "NOT") {
        if (j.size() != 2) throw Error(Errc::SpecInvalid, "NOT takes one index");
        op.kind = OpKind::Not;
        op.a = j[1].get<std::size_t>();
    } else if (kind == "SWAP" || kind == "CXOR") {
        if (j.size() != 3) throw Error(Errc::SpecInvalid, kind + " takes two indices");
        op.kind = kind == "SWAP" ? OpKind::Swap : OpKind::Cxor;
        op.a = j[1].get<std::size_t>();
        op.b = j[2].get<std::size_t>();
    } else {
        throw Error(Errc::SpecInvalid, "unknown rule op '" + kind + "'");
    }
    return op;
}

inline SignalSource parse_source(const Json& j)
{
    SignalSource s;
    s.id = j.at("id").get<std::string>();
    s.tag = bits_from_string(j.at("tag").get<std::string>());
    s.dofs = j.at("dofs").get<std::vector<std::size_t>>();
    for (const auto& v : j.at("values")) s.values.push_back(scale_value(v.get<double>()));
    return s;
}

/// Builds a validated environment from a specification document.
inline Environment build_environment(const Json& spec)
{
    Environment env;
    try {
        env.num_dof = spec.at("num_dof").get<std::size_t>();
        env.framing.tag_width = spec.at("tag_width").get<std::size_t>();
        env.framing.payload_width = spec.at("payload_width").get<std::size_t>();
        env.framing.noise_slot_len = spec.value("noise_slot_len", std::size_t{4});
        env.epsilon = spec.value("epsilon", 0.0);
        env.seed = spec.value("seed", std::uint64_t{0});
        if (spec.contains("rule"))
            for (const auto& j : spec.at("rule")) env.rule.ops.push_back(parse_rule_op(j));
        if (spec.contains("sources"))
            for (const auto& j : spec.at("sources")) env.sources.push_back(parse_source(j));
        const std::string init = spec.value("init", std::string("random"));
        if (init == "random") {
            Rng rng(env.seed);
            env.config = random_config(env.num_dof, rng);
        } else {
            env.config = bits_from_string(init);
        }
    } catch (const Json::exception& e) {
        throw Error(Errc::SpecInvalid, e.what());
    }
    validate_environment(env);
    return env;
}

inline Environment load_environment(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw Error(Errc::SpecInvalid, std::string("parse error in '") + path + "': " + e.what());
    }
    return build_environment(j);
}

// ---------------------------------------------------------------------------
// Observer specification document

struct ObserverSpec {
    std::size_t memory_capacity_bits = 0;
    std::size_t ready_capacity_bits = Observer::default_ready_capacity_bits;
    std::optional<std::set<std::size_t>> window;
    std::vector<std::pair<std::string, BitString>> recognizers; // (source_id, tag)
    std::map<std::string, std::vector<ScaledValue>> extractor_values;
};

inline ObserverSpec parse_observer_spec(const Json& j)
{
    ObserverSpec spec;
    try {
        spec.memory_capacity_bits = j.at("memory_capacity_bits").get<std::size_t>();
        spec.ready_capacity_bits =
            j.value("ready_capacity_bits", Observer::default_ready_capacity_bits);
        if (j.contains("window")) {
            std::set<std::size_t> w;
            for (const auto& d : j.at("window")) w.insert(d.get<std::size_t>());
            spec.window = std::move(w);
        }
        for (const auto& r : j.at("recognizers"))
            spec.recognizers.emplace_back(r.at("source_id").get<std::string>(),
                                          bits_from_string(r.at("tag").get<std::string>()));
        for (const auto& e : j.at("extractors")) {
            std::vector<ScaledValue> values;
            for (const auto& v : e.at("values")) values.push_back(scale_value(v.get<double>()));
            spec.extractor_values[e.at("source_id").get<std::string>()] = std::move(values);
        }
    } catch (const Json::exception& e) {
        throw Error(Errc::SpecInvalid, e.what());
    }
    return spec;
}

inline Observer make_observer(const ObserverSpec& spec, std::size_t payload_width)
{
    Observer obs(spec.memory_capacity_bits, spec.ready_capacity_bits);
    for (const auto& [source_id, tag] : spec.recognizers) {
        auto it = spec.extractor_values.find(source_id);
        if (it == spec.extractor_values.end())
            throw Error(Errc::SpecInvalid, "no extractor values for source '" + source_id + "'");
        obs.load_recognizer(Recognizer::compile(source_id, tag, payload_width),
                            ExtractorFamily{source_id, it->second, payload_width});
    }
    return obs;
}

inline ObserverSpec load_observer_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw Error(Errc::SpecInvalid, std::string("parse error in '") + path + "': " + e.what());
    }
    return parse_observer_spec(j);
}

// ---------------------------------------------------------------------------
// Observable specification document

/// {source_id, window, backaction_dof}: resolved against the environment's
/// source table.
inline Observable parse_observable(const Json& j, const Environment& env)
{
    try {
        const std::string source_id = j.at("source_id").get<std::string>();
        const SignalSource* src = nullptr;
        for (const auto& s : env.sources)
            if (s.id == source_id) src = &s;
        if (!src)
            throw Error(Errc::SpecInvalid, "observable references unknown source '" + source_id + "'");
        std::set<std::size_t> window;
        for (const auto& d : j.at("window")) window.insert(d.get<std::size_t>());
        return Observable::make(std::move(window), *src, env.framing.payload_width,
                                j.at("backaction_dof").get<std::size_t>());
    } catch (const Json::exception& e) {
        throw Error(Errc::SpecInvalid, e.what());
    }
}

inline Json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw Error(Errc::SpecInvalid, std::string("parse error in '") + path + "': " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------------------
// Report documents

inline Json to_json(const SessionReport& report)
{
    Json records = Json::array();
    for (const auto& r : report.records) {
        records.push_back({{"cycle", r.cycle()},
                           {"source_id", r.source_id()},
                           {"k", r.k()},
                           {"value", r.value()},
                           {"provenance",
                            {{"window_read_id", r.window_read_id()},
                             {"recognizer_id", r.recognizer_id()},
                             {"extractor_id", r.extractor_id()}}}});
    }
    return {{"cycles_run", report.cycles_run},
            {"nulls", report.nulls},
            {"truncated", report.truncated},
            {"records", records}};
}

inline std::string to_csv(const SessionReport& report)
{
    std::string out = "cycle,source_id,k,value\n";
    for (const auto& r : report.records)
        out += std::to_string(r.cycle()) + "," + r.source_id() + "," + std::to_string(r.k()) +
               "," + std::to_string(r.value()) + "\n";
    return out;
}

/// Parses records back out of a session report document. Missing or null
/// provenance fields stay unset, which is what the LOCC audit looks for.
inline std::vector<AuditRecord> parse_audit_records(const Json& j)
{
    std::vector<AuditRecord> out;
    for (const auto& r : j.at("records")) {
        AuditRecord rec;
        rec.source_id = r.at("source_id").get<std::string>();
        rec.k = r.at("k").get<std::size_t>();
        if (r.contains("provenance") && r.at("provenance").is_object()) {
            const auto& p = r.at("provenance");
            auto field = [&](const char* name) -> std::optional<std::size_t> {
                if (!p.contains(name) || p.at(name).is_null()) return std::nullopt;
                return p.at(name).get<std::size_t>();
            };
            rec.window_read_id = field("window_read_id");
            rec.recognizer_id = field("recognizer_id");
            rec.extractor_id = field("extractor_id");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline Json to_json(const FrequencyReport& r)
{
    Json cells = Json::array();
    for (const auto& c : r.cells)
        cells.push_back(
            {{"k", c.k}, {"f_hat", c.f_hat}, {"p_hat", c.p_hat}, {"tolerance", c.tolerance}});
    return {{"experiment", "born-rule"},
            {"seed", r.seed},
            {"n_sort", r.n_sort},
            {"n_draw", r.n_draw},
            {"discarded", r.discarded},
            {"census", r.census},
            {"cells", cells},
            {"max_abs_deviation", r.max_abs_deviation},
            {"pass", r.pass}};
}

inline std::string to_csv(const FrequencyReport& r)
{
    std::string out = "k,f_hat,p_hat,tolerance\n";
    for (const auto& c : r.cells)
        out += std::to_string(c.k) + "," + std::to_string(c.f_hat) + "," +
               std::to_string(c.p_hat) + "," + std::to_string(c.tolerance) + "\n";
    return out;
}

inline Json to_json(const NoReplicationReport& r)
{
    return {{"experiment", "no-replication"},
            {"seed", r.seed},
            {"capacity_bits", r.capacity_bits},
            {"num_dof", r.num_dof},
            {"record_full_state", r.capacity_exceeded ? "CapacityExceeded" : "Stored"},
            {"distinguish", r.indistinguishable ? "Indistinguishable" : "Distinguished"},
            {"pass", r.pass}};
}

inline Json to_json(const LoccAuditReport& r)
{
    return {{"experiment", "locc-audit"},
            {"records_total", r.records_total},
            {"provenance_ok", r.provenance_ok},
            {"bound_ok", r.bound_ok},
            {"window_ok", r.window_ok},
            {"distinct_pairs", r.distinct_pairs},
            {"pair_bound", r.pair_bound},
            {"pass", r.pass}};
}

inline Json to_json(const CommutativityReport& r)
{
    return {{"experiment", "commutativity"},
            {"seed", r.seed},
            {"trials", r.trials},
            {"agreements", r.agreements},
            {"disagreement_rate", r.disagreement_rate},
            {"oracle_rate", r.oracle_rate},
            {"orthogonal", r.orthogonal},
            {"pass", r.pass}};
}

inline std::string to_csv(const CommutativityReport& r)
{
    return "trials,agreements,disagreement_rate\n" + std::to_string(r.trials) + "," +
           std::to_string(r.agreements) + "," + std::to_string(r.disagreement_rate) + "\n";
}

inline Json to_json(const ObjectiveIgnoranceReport& r)
{
    return {{"experiment", "objective-ignorance"},
            {"seed", r.seed},
            {"component_size", r.component_size},
            {"fine_value_count", r.fine_value_count},
            {"trials", r.trials},
            {"census", r.census},
            {"disagreement_rate", r.disagreement_rate},
            {"oracle_rate", r.oracle_rate},
            {"perturbable_trials", r.perturbable_trials},
            {"verdict", r.verdict},
            {"pass", r.pass}};
}

inline Json to_json(const TimeSymmetryReport& r)
{
    return {{"experiment", "time-symmetry"},
            {"seed", r.seed},
            {"trials", r.trials},
            {"steps", r.steps},
            {"recovered", r.recovered},
            {"pass", r.pass}};
}

inline Json to_json(const DecompEquivalenceReport& r)
{
    return {{"experiment", "decomp-equivalence"},
            {"steps", r.steps},
            {"identical_steps", r.identical_steps},
            {"pass", r.pass}};
}

} // namespace minobs

#endif // MINOBS_SPEC_IO_HPP
