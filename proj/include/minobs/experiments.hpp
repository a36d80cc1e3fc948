#ifndef MINOBS_EXPERIMENTS_HPP
#define MINOBS_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "minobs/env.hpp"
#include "minobs/error.hpp"
#include "minobs/observable.hpp"
#include "minobs/observer.hpp"

namespace minobs {

// ---------------------------------------------------------------------------
// Born rule

/// The ancilla C = ⋃C_k: configurations bucketed by the value the shared
/// observable assigns to them. Null outcomes are discarded.
struct Ancilla {
    std::vector<std::vector<Config>> cells; // cells[k]
    std::size_t discarded = 0;

    std::size_t population() const
    {
        std::size_t n = 0;
        for (const auto& c : cells) n += c.size();
        return n;
    }
};

inline Ancilla sort_into_ancilla(const Observable& obs, const std::vector<Config>& configs)
{
    Ancilla a;
    a.cells.resize(obs.source().value_count());
    for (const auto& c : configs) {
        const Outcome o = obs.peek(c); // the ancilla stores pre-measurement configurations
        if (o.has_value)
            a.cells[o.k].push_back(c);
        else
            ++a.discarded;
    }
    return a;
}

struct FrequencyCell {
    std::size_t k = 0;
    double f_hat = 0.0; // oracle fraction over the recognized ensemble
    double p_hat = 0.0; // empirical draw frequency
    double tolerance = 0.0;
};

struct FrequencyReport {
    std::vector<FrequencyCell> cells;
    std::size_t n_sort = 0;
    std::size_t n_draw = 0; // actual draws
    std::size_t discarded = 0;
    std::uint64_t seed = 0;
    bool census = false; // n_draw equals the recognized population
    double max_abs_deviation = 0.0;
    bool pass = false;
};

/// The ancilla sorting/drawing protocol: observer 1 sorts uniform random
/// configurations by observed value, observer 2 draws them back in a
/// uniformly random order without replacement and re-applies the shared
/// observable. Pass iff every cell's draw frequency is within 3 binomial
/// sigma of the recognized-population fraction.
inline FrequencyReport born_rule_experiment(const Environment& env, const Observable& obs,
                                            std::size_t n_sort, std::size_t n_draw,
                                            std::uint64_t seed)
{
    if (n_draw == 0 || n_sort < n_draw)
        throw Error(Errc::SpecInvalid, "need n_sort >= n_draw >= 1");
    Rng rng(seed);
    std::vector<Config> configs;
    configs.reserve(n_sort);
    for (std::size_t i = 0; i < n_sort; ++i) configs.push_back(random_config(env.num_dof, rng));

    const Ancilla ancilla = sort_into_ancilla(obs, configs);
    const std::size_t population = ancilla.population();
    if (population == 0)
        throw Error(Errc::NoRecognizedConfigurations, "every sorted configuration was Null");

    // Unbiased sequential selection: uniform random permutation of ⋃C_k.
    std::vector<const Config*> pool;
    pool.reserve(population);
    for (const auto& cell : ancilla.cells)
        for (const auto& c : cell) pool.push_back(&c);
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.next_below(i)]);

    const std::size_t draws = std::min(n_draw, population);
    std::vector<std::size_t> tally(ancilla.cells.size(), 0);
    for (std::size_t i = 0; i < draws; ++i) {
        const Outcome o = obs.peek(*pool[i]);
        ++tally[o.k]; // ancilla members always yield a value
    }

    FrequencyReport report;
    report.n_sort = n_sort;
    report.n_draw = draws;
    report.discarded = ancilla.discarded;
    report.seed = seed;
    report.census = draws == population;
    for (std::size_t k = 0; k < ancilla.cells.size(); ++k) {
        FrequencyCell cell;
        cell.k = k;
        cell.f_hat = static_cast<double>(ancilla.cells[k].size()) / static_cast<double>(population);
        cell.p_hat = static_cast<double>(tally[k]) / static_cast<double>(draws);
        cell.tolerance = 3.0 * std::sqrt(cell.f_hat * (1.0 - cell.f_hat) /
                                         static_cast<double>(draws));
        report.max_abs_deviation =
            std::max(report.max_abs_deviation, std::abs(cell.p_hat - cell.f_hat));
        report.cells.push_back(cell);
    }
    report.pass = true;
    for (const auto& cell : report.cells)
        if (std::abs(cell.p_hat - cell.f_hat) > cell.tolerance) report.pass = false;
    return report;
}

// ---------------------------------------------------------------------------
// No Replication

struct NoReplicationReport {
    std::size_t capacity_bits = 0;
    std::uint64_t seed = 0;
    std::size_t num_dof = 0;
    bool capacity_exceeded = false;
    bool indistinguishable = false;
    bool pass = false; // both hold
};

/// Flips one DOF outside every loaded recognizer's source component and
/// checks that (a) the observer cannot snapshot the environment state and
/// (b) identical sessions against the two environments agree.
inline NoReplicationReport no_replication_check(const Observer& obs, const Environment& env,
                                                std::size_t cycles, std::uint64_t seed)
{
    NoReplicationReport report;
    report.seed = seed;
    report.capacity_bits = obs.memory_capacity_bits();
    report.num_dof = env.num_dof;
    report.capacity_exceeded = obs.record_full_state(env) == StoreResult::CapacityExceeded;

    std::set<std::size_t> observed;
    for (const auto& rec : obs.recognizers())
        for (const auto& src : env.sources)
            if (src.id == rec.source_id())
                observed.insert(src.dofs.begin(), src.dofs.end());
    std::optional<std::size_t> hidden;
    for (std::size_t d = 0; d < env.num_dof; ++d)
        if (!observed.count(d)) {
            hidden = d;
            break;
        }
    if (!hidden)
        throw Error(Errc::SpecInvalid,
                    "every DOF is inside an observed component; no hidden DOF to perturb");

    Environment env_b = env;
    env_b.config[*hidden] ^= 1;
    report.indistinguishable =
        distinguish_states(obs, env, env_b, cycles, seed) == Verdict::Indistinguishable;
    report.pass = report.capacity_exceeded && report.indistinguishable;
    return report;
}

// ---------------------------------------------------------------------------
// Enforced LOCC audit

/// Document-level view of a session record, as it appears in a serialized
/// report. Provenance fields may be absent here (a forged document); typed
/// Records can only be built on the extractor-fire path.
struct AuditRecord {
    std::string source_id;
    std::size_t k = 0;
    std::optional<std::size_t> window_read_id;
    std::optional<std::size_t> recognizer_id;
    std::optional<std::size_t> extractor_id;
};

inline std::vector<AuditRecord> audit_view(const SessionReport& report)
{
    std::vector<AuditRecord> out;
    out.reserve(report.records.size());
    for (const auto& r : report.records)
        out.push_back({r.source_id(), r.k(), r.window_read_id(), r.recognizer_id(),
                       r.extractor_id()});
    return out;
}

struct LoccAuditReport {
    std::size_t records_total = 0;
    bool provenance_ok = false; // every record names a loaded pair
    bool bound_ok = false;      // distinct (source,k) within the loaded tables
    bool window_ok = false;     // recorded components inside the declared window
    std::size_t distinct_pairs = 0;
    std::size_t pair_bound = 0;
    bool pass = false;
};

/// Checks that every recorded bit of information passed through the loaded
/// classical tables at the declared boundary. Structurally true for any
/// session produced by observe_session; fails on forged documents.
inline LoccAuditReport locc_audit(const std::vector<AuditRecord>& records, const Observer& obs,
                                  const std::optional<std::set<std::size_t>>& window,
                                  const std::map<std::string, std::vector<std::size_t>>&
                                      source_components)
{
    LoccAuditReport report;
    report.records_total = records.size();
    report.provenance_ok = true;
    report.bound_ok = true;
    report.window_ok = true;

    std::set<std::pair<std::string, std::size_t>> pairs;
    for (const auto& r : records) {
        if (!r.window_read_id || !r.recognizer_id || !r.extractor_id) {
            report.provenance_ok = false;
            continue;
        }
        const std::size_t rid = *r.recognizer_id;
        const std::size_t eid = *r.extractor_id;
        if (rid >= obs.recognizers().size() || eid >= obs.extractors().size() ||
            obs.recognizers()[rid].source_id() != r.source_id ||
            obs.extractors()[eid].source_id != r.source_id) {
            report.provenance_ok = false;
            continue;
        }
        if (r.k >= obs.extractors()[eid].value_count()) report.bound_ok = false;
        pairs.insert({r.source_id, r.k});
        if (window) {
            auto it = source_components.find(r.source_id);
            if (it == source_components.end()) {
                report.window_ok = false;
            } else {
                for (std::size_t d : it->second)
                    if (!window->count(d)) report.window_ok = false;
            }
        }
    }
    report.distinct_pairs = pairs.size();
    for (const auto& fam : obs.extractors()) report.pair_bound += fam.value_count();
    if (report.distinct_pairs > report.pair_bound) report.bound_ok = false;
    report.pass = report.provenance_ok && report.bound_ok && report.window_ok;
    return report;
}

// ---------------------------------------------------------------------------
// Commutativity

struct CommutativityReport {
    std::size_t trials = 0;
    std::size_t agreements = 0;
    double disagreement_rate = 0.0;
    double oracle_rate = 0.0; // exhaustive joint-pattern enumeration
    bool orthogonal = false;
    std::uint64_t seed = 0;
    bool pass = false;
};

/// Two-observer order-swap protocol plus the exhaustive enumeration oracle.
/// Pass: orthogonal components must show zero disagreements exactly;
/// overlapping components must match the oracle rate within 2 binomial sigma.
/// Trials are pure functions of their configuration, so with jobs > 1 the
/// configurations are drawn sequentially and evaluated in parallel chunks;
/// the report is identical for any job count.
inline CommutativityReport commutativity_check(const Observable& first,
                                               const Observable& second,
                                               const Environment& env, std::size_t trials,
                                               std::uint64_t seed, std::size_t jobs = 1)
{
    CommutativityReport report;
    report.seed = seed;
    Rng rng(seed);
    AgreementStats stats;
    stats.trials = trials;
    if (jobs <= 1) {
        stats = commutativity_experiment(first, second, env, trials, rng);
    } else {
        std::vector<Config> configs;
        configs.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t)
            configs.push_back(random_config(env.num_dof, rng));
        std::vector<std::size_t> partial(jobs, 0);
        std::vector<std::thread> workers;
        for (std::size_t j = 0; j < jobs; ++j) {
            workers.emplace_back([&, j] {
                for (std::size_t t = j; t < trials; t += jobs)
                    if (commutativity_trial(first, second, configs[t])) ++partial[j];
            });
        }
        for (auto& w : workers) w.join();
        for (std::size_t c : partial) stats.agreements += c;
    }
    report.trials = stats.trials;
    report.agreements = stats.agreements;
    report.disagreement_rate = stats.disagreement_rate();
    report.oracle_rate = exhaustive_disagreement_rate(first, second, env.num_dof);
    report.orthogonal = components_orthogonal(first, second);
    if (report.oracle_rate == 0.0) {
        report.pass = report.disagreement_rate == 0.0;
    } else {
        const double sigma = std::sqrt(report.oracle_rate * (1.0 - report.oracle_rate) /
                                       static_cast<double>(trials));
        report.pass = report.disagreement_rate > 0.0 &&
                      std::abs(report.disagreement_rate - report.oracle_rate) <= 2.0 * sigma;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Objective Ignorance

struct ObjectiveIgnoranceReport {
    std::size_t component_size = 0;
    std::uint64_t seed = 0;
    std::size_t fine_value_count = 0;
    std::size_t trials = 0;
    double disagreement_rate = 0.0;
    double oracle_rate = 0.0;
    std::size_t perturbable_trials = 0; // back-action bit was set before apply
    bool census = false;
    std::string verdict; // "pass" | "fail" | "vacuous"
    bool pass = false;
};

/// Configuration-resolving probe of the same component: one value per bit
/// pattern. Observable::make validates against the window of the coarse
/// observable, so the probe reads exactly what the coarse observable reads.
inline Observable fine_grained_probe(const Observable& coarse)
{
    const std::size_t n = coarse.component().size();
    if (n < 2)
        throw Error(Errc::ComponentTooSmall, "fine-grained probe needs a component of >= 2 DOFs");
    if (n >= 20)
        throw Error(Errc::SpecInvalid, "component too large to enumerate");
    SignalSource fine;
    fine.id = coarse.source().id + "#fine";
    fine.tag = coarse.source().tag;
    fine.dofs = coarse.component();
    const std::size_t patterns = std::size_t{1} << n;
    fine.values.reserve(patterns);
    for (std::size_t j = 0; j < patterns; ++j)
        fine.values.push_back(static_cast<ScaledValue>(j));
    return Observable::make(coarse.window(), fine, n, coarse.backaction_dof());
}

/// Runs the order-swap protocol between an observable and the fine-grained
/// probe of its own component. A positive disagreement rate demonstrates
/// that configuration-resolving probing does not commute with the coarse
/// observable. `trials` = 0 selects census mode: one trial per enumerated
/// component pattern, which matches the oracle exactly.
inline ObjectiveIgnoranceReport objective_ignorance_experiment(const Environment& env,
                                                               const Observable& coarse,
                                                               std::size_t trials,
                                                               std::uint64_t seed)
{
    const Observable fine = fine_grained_probe(coarse);
    ObjectiveIgnoranceReport report;
    report.seed = seed;
    report.component_size = coarse.component().size();
    report.fine_value_count = fine.source().value_count();
    report.oracle_rate = exhaustive_disagreement_rate(coarse, fine, env.num_dof);
    report.census = trials == 0;

    std::size_t disagreements = 0;
    if (report.census) {
        const std::vector<std::size_t>& dofs = coarse.component();
        const std::uint64_t patterns = std::uint64_t{1} << dofs.size();
        Config config(env.num_dof, 0);
        for (std::uint64_t p = 0; p < patterns; ++p) {
            for (std::size_t i = 0; i < dofs.size(); ++i)
                config[dofs[i]] = static_cast<std::uint8_t>((p >> i) & 1);
            if (config[coarse.backaction_dof()]) ++report.perturbable_trials;
            if (!commutativity_trial(coarse, fine, config)) ++disagreements;
        }
        report.trials = static_cast<std::size_t>(patterns);
    } else {
        Rng rng(seed);
        for (std::size_t t = 0; t < trials; ++t) {
            const Config config = random_config(env.num_dof, rng);
            if (config[coarse.backaction_dof()]) ++report.perturbable_trials;
            if (!commutativity_trial(coarse, fine, config)) ++disagreements;
        }
        report.trials = trials;
    }
    report.disagreement_rate =
        static_cast<double>(disagreements) / static_cast<double>(report.trials);
    if (report.disagreement_rate > 0.0) {
        report.verdict = "pass";
        report.pass = true;
    } else if (report.perturbable_trials == 0) {
        report.verdict = "vacuous";
    } else {
        report.verdict = "fail";
    }
    return report;
}

/// Ensemble-mode variant: trials over the given configurations. When no
/// configuration ever has the back-action bit set, no perturbation is
/// possible and the verdict is "vacuous" rather than fail.
inline ObjectiveIgnoranceReport objective_ignorance_over(const Environment& env,
                                                         const Observable& coarse,
                                                         const std::vector<Config>& ensemble)
{
    if (ensemble.empty())
        throw Error(Errc::EmptyEnsemble, "objective ignorance over empty ensemble");
    const Observable fine = fine_grained_probe(coarse);
    ObjectiveIgnoranceReport report;
    report.component_size = coarse.component().size();
    report.fine_value_count = fine.source().value_count();
    report.oracle_rate = exhaustive_disagreement_rate(coarse, fine, env.num_dof);
    std::size_t disagreements = 0;
    for (const auto& config : ensemble) {
        if (config[coarse.backaction_dof()]) ++report.perturbable_trials;
        if (!commutativity_trial(coarse, fine, config)) ++disagreements;
    }
    report.trials = ensemble.size();
    report.disagreement_rate =
        static_cast<double>(disagreements) / static_cast<double>(report.trials);
    if (report.disagreement_rate > 0.0) {
        report.verdict = "pass";
        report.pass = true;
    } else if (report.perturbable_trials == 0) {
        report.verdict = "vacuous";
    } else {
        report.verdict = "fail";
    }
    return report;
}

// ---------------------------------------------------------------------------
// Time symmetry

struct TimeSymmetryReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    std::size_t recovered = 0;
    bool pass = false;
};

/// For each trial: random initial configuration, `steps` forward then
/// `steps` inverse steps, exact recovery required.
inline TimeSymmetryReport time_symmetry_check(const Environment& env, std::size_t steps,
                                              std::size_t trials, std::uint64_t seed)
{
    TimeSymmetryReport report;
    report.seed = seed;
    report.trials = trials;
    report.steps = steps;
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        Environment e = env;
        e.config = random_config(env.num_dof, rng);
        const Config initial = e.config;
        for (std::size_t s = 0; s < steps; ++s) step(e);
        for (std::size_t s = 0; s < steps; ++s) inverse_step(e);
        if (e.config == initial) ++report.recovered;
    }
    report.pass = report.recovered == report.trials;
    return report;
}

// ---------------------------------------------------------------------------
// Decompositional equivalence

struct DecompEquivalenceReport {
    std::size_t steps = 0;
    std::size_t identical_steps = 0;
    bool pass = false;
};

/// Runs the same trajectory under two source labelings and compares the
/// configuration sequences bit for bit.
inline DecompEquivalenceReport decomp_equivalence_check(const Environment& env,
                                                        std::vector<SignalSource> alt_sources,
                                                        std::size_t steps)
{
    Environment a = env;
    Environment b = repartition(env, std::move(alt_sources));
    DecompEquivalenceReport report;
    report.steps = steps;
    for (std::size_t s = 0; s < steps; ++s) {
        step(a);
        step(b);
        if (a.config == b.config) ++report.identical_steps;
    }
    report.pass = report.identical_steps == steps;
    return report;
}

} // namespace minobs

#endif // MINOBS_EXPERIMENTS_HPP
