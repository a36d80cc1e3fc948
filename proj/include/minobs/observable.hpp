#ifndef MINOBS_OBSERVABLE_HPP
#define MINOBS_OBSERVABLE_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "minobs/env.hpp"
#include "minobs/error.hpp"
#include "minobs/recognizer.hpp"

namespace minobs {

/// Observation outcome: a decoded value, or Null on non-recognition.
struct Outcome {
    bool has_value = false;
    std::size_t k = 0;
    ScaledValue value = 0;

    static Outcome null() { return {}; }
    static Outcome of(std::size_t k, ScaledValue v) { return {true, k, v}; }

    bool operator==(const Outcome&) const = default;
};

/// A composed observable: boundary window, recognizer, extractor family,
/// and a defined back-action (one component DOF reset to 0 on every value
/// outcome). The window models the ad hoc observer-environment boundary:
/// the component must lie inside it.
class Observable {
public:
    static Observable make(std::set<std::size_t> window, const SignalSource& source,
                           std::size_t payload_width, std::size_t backaction_dof)
    {
        for (std::size_t d : source.dofs)
            if (!window.count(d))
                throw Error(Errc::WindowTooSmall, "component dof " + std::to_string(d) +
                                                      " outside the boundary window");
        if (std::find(source.dofs.begin(), source.dofs.end(), backaction_dof) ==
            source.dofs.end())
            throw Error(Errc::BackactionOutsideComponent,
                        "backaction dof " + std::to_string(backaction_dof) +
                            " not in the source component");
        Observable o;
        o.window_ = std::move(window);
        o.source_ = source;
        o.recognizer_ = Recognizer::compile(source.id, source.tag, payload_width);
        o.extractors_ = ExtractorFamily{source.id, source.values, payload_width};
        o.backaction_dof_ = backaction_dof;
        return o;
    }

    const std::set<std::size_t>& window() const { return window_; }
    const std::vector<std::size_t>& component() const { return source_.dofs; }
    const SignalSource& source() const { return source_; }
    std::size_t backaction_dof() const { return backaction_dof_; }
    const Recognizer& recognizer() const { return recognizer_; }
    const ExtractorFamily& extractors() const { return extractors_; }

    /// Reads the component bits through the window and decodes them as a raw
    /// pattern index. Patterns at or beyond the value table are Null and
    /// leave the configuration untouched; a value outcome resets the
    /// back-action DOF to 0 and changes nothing else.
    Outcome apply(Config& config) const
    {
        const std::uint64_t k = decode_bits(config, source_.dofs);
        if (k >= source_.values.size()) return Outcome::null();
        config[backaction_dof_] = 0;
        return Outcome::of(static_cast<std::size_t>(k), source_.values[k]);
    }

    Outcome apply(Environment& env) const { return apply(env.config); }

    /// Side-effect-free variant.
    Outcome peek(const Config& config) const
    {
        Config copy = config;
        return apply(copy);
    }

private:
    Observable() = default;

    std::set<std::size_t> window_;
    SignalSource source_;
    Recognizer recognizer_;
    ExtractorFamily extractors_;
    std::size_t backaction_dof_ = 0;
};

/// Eq.-style output equivalence, decided over a sampled ensemble. Exact only
/// when the ensemble enumerates all component patterns: an observer cannot
/// certify equivalence over all states it cannot represent.
inline bool output_equivalent(const Observable& o1, const Observable& o2,
                              const std::vector<Config>& ensemble)
{
    if (ensemble.empty())
        throw Error(Errc::EmptyEnsemble, "output_equivalent over empty ensemble");
    for (const auto& c : ensemble)
        if (o1.peek(c) != o2.peek(c)) return false;
    return true;
}

inline bool components_orthogonal(const Observable& o1, const Observable& o2)
{
    std::set<std::size_t> a(o1.component().begin(), o1.component().end());
    for (std::size_t d : o2.component())
        if (a.count(d)) return false;
    return true;
}

struct AgreementStats {
    std::size_t trials = 0;
    std::size_t agreements = 0;

    double disagreement_rate() const
    {
        return trials == 0 ? 0.0
                           : static_cast<double>(trials - agreements) /
                                 static_cast<double>(trials);
    }
};

/// One trial of the two-observer cooperative protocol on one configuration:
/// observer 1 applies first O then Q, observer 2 applies Q then O on an
/// independent copy. Results are compared per observable (r vs r', s vs s');
/// Null matches Null.
inline bool commutativity_trial(const Observable& first, const Observable& second,
                                const Config& config)
{
    Config c1 = config;
    const Outcome r = first.apply(c1);
    const Outcome s = second.apply(c1);
    Config c2 = config;
    const Outcome s_prime = second.apply(c2);
    const Outcome r_prime = first.apply(c2);
    return r == r_prime && s == s_prime;
}

inline AgreementStats commutativity_experiment(const Observable& first,
                                               const Observable& second,
                                               const Environment& env, std::size_t trials,
                                               Rng& rng)
{
    AgreementStats stats;
    stats.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const Config config = random_config(env.num_dof, rng);
        if (commutativity_trial(first, second, config)) ++stats.agreements;
    }
    return stats;
}

/// Exact disagreement rate by enumerating every bit pattern over the union
/// of the two components. Bits outside the union never enter either
/// observable, so this equals the expected rate under uniform random
/// configurations.
inline double exhaustive_disagreement_rate(const Observable& first, const Observable& second,
                                           std::size_t num_dof)
{
    std::set<std::size_t> union_set(first.component().begin(), first.component().end());
    union_set.insert(second.component().begin(), second.component().end());
    const std::vector<std::size_t> dofs(union_set.begin(), union_set.end());
    const std::uint64_t patterns = std::uint64_t{1} << dofs.size();
    std::size_t disagreements = 0;
    Config config(num_dof, 0);
    for (std::uint64_t p = 0; p < patterns; ++p) {
        for (std::size_t i = 0; i < dofs.size(); ++i)
            config[dofs[i]] = static_cast<std::uint8_t>((p >> i) & 1);
        if (!commutativity_trial(first, second, config)) ++disagreements;
    }
    return static_cast<double>(disagreements) / static_cast<double>(patterns);
}

} // namespace minobs

#endif // MINOBS_OBSERVABLE_HPP
