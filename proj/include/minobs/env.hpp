#ifndef MINOBS_ENV_HPP
#define MINOBS_ENV_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "minobs/bits.hpp"
#include "minobs/error.hpp"
#include "minobs/rng.hpp"

namespace minobs {

/// Read-out values are finite precision: stored as value * 1000, rounded.
using ScaledValue = std::int64_t;

inline ScaledValue scale_value(double v)
{
    return static_cast<ScaledValue>(v >= 0 ? v * 1000.0 + 0.5 : v * 1000.0 - 0.5);
}

// ---------------------------------------------------------------------------
// Reversible dynamics

enum class OpKind { Swap, Cxor, Not };

struct RuleOp {
    OpKind kind;
    std::size_t a = 0;
    std::size_t b = 0; // unused for Not
};

/// An ordered list of primitive reversible operations. Each primitive is a
/// bijection on configurations, so the composite is too; the inverse is the
/// reversed list (every primitive is self-inverse).
struct ReversibleRule {
    std::vector<RuleOp> ops;

    void validate(std::size_t num_dof) const
    {
        for (const auto& op : ops) {
            if (op.a >= num_dof)
                throw Error(Errc::SpecInvalid, "rule index " + std::to_string(op.a) + " out of range");
            if (op.kind != OpKind::Not) {
                if (op.b >= num_dof)
                    throw Error(Errc::SpecInvalid, "rule index " + std::to_string(op.b) + " out of range");
                if (op.a == op.b)
                    throw Error(Errc::SpecInvalid, "rule op uses the same index twice");
            }
        }
    }

    static void apply_op(const RuleOp& op, Config& c)
    {
        switch (op.kind) {
        case OpKind::Swap: std::swap(c[op.a], c[op.b]); break;
        case OpKind::Cxor: c[op.b] ^= c[op.a]; break;
        case OpKind::Not: c[op.a] ^= 1; break;
        }
    }

    void apply(Config& c) const
    {
        for (const auto& op : ops) apply_op(op, c);
    }

    void apply_inverse(Config& c) const
    {
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) apply_op(*it, c);
    }
};

// ---------------------------------------------------------------------------
// Signal sources

/// A labeled subset of degrees of freedom with a tag and a finite read-out
/// value table. Labels are metadata: the dynamics never reads them.
struct SignalSource {
    std::string id;
    BitString tag;
    std::vector<std::size_t> dofs;
    std::vector<ScaledValue> values; // k_i entries

    std::size_t value_count() const { return values.size(); }

    /// Current read-out index: decode(component bits) mod k_i.
    std::size_t readout_index(const Config& config) const
    {
        return static_cast<std::size_t>(decode_bits(config, dofs) % values.size());
    }
};

// ---------------------------------------------------------------------------
// Channel

struct ChannelSlot {
    bool is_message = false;
    BitString body;
};

struct Framing {
    std::size_t tag_width = 2;
    std::size_t payload_width = 2;
    std::size_t noise_slot_len = 4;
};

// ---------------------------------------------------------------------------
// Environment

struct Environment {
    std::size_t num_dof = 0;
    Config config;
    ReversibleRule rule;
    std::vector<SignalSource> sources;
    double epsilon = 0.0;
    Framing framing;
    std::uint64_t seed = 0;
};

inline bool is_prefix(const BitString& a, const BitString& b)
{
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

inline void validate_sources(const std::vector<SignalSource>& sources, std::size_t num_dof,
                             const Framing& framing)
{
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& s = sources[i];
        if (s.tag.empty())
            throw Error(Errc::SpecInvalid, "source '" + s.id + "' has an empty tag");
        for (std::size_t j = i + 1; j < sources.size(); ++j) {
            const auto& t = sources[j];
            if (is_prefix(s.tag, t.tag) || is_prefix(t.tag, s.tag))
                throw Error(Errc::SpecInvalid, "tags not prefix-free: '" + bits_to_string(s.tag) +
                                                   "' and '" + bits_to_string(t.tag) + "'");
            if (s.id == t.id)
                throw Error(Errc::SpecInvalid, "duplicate source id '" + s.id + "'");
        }
        if (s.tag.size() != framing.tag_width)
            throw Error(Errc::SpecInvalid, "source '" + s.id + "' tag length " +
                                               std::to_string(s.tag.size()) + " != tag_width " +
                                               std::to_string(framing.tag_width));
        if (s.dofs.empty())
            throw Error(Errc::SpecInvalid, "source '" + s.id + "' has no degrees of freedom");
        std::set<std::size_t> seen;
        for (std::size_t d : s.dofs) {
            if (d >= num_dof)
                throw Error(Errc::SpecInvalid, "source '" + s.id + "' dof " + std::to_string(d) +
                                                   " >= num_dof " + std::to_string(num_dof));
            if (!seen.insert(d).second)
                throw Error(Errc::SpecInvalid, "source '" + s.id + "' repeats dof " + std::to_string(d));
        }
        if (s.values.empty())
            throw Error(Errc::SpecInvalid, "source '" + s.id + "' has an empty value table");
        if (framing.payload_width < 64 &&
            s.values.size() > (std::uint64_t{1} << framing.payload_width))
            throw Error(Errc::SpecInvalid, "source '" + s.id + "' has " +
                                               std::to_string(s.values.size()) +
                                               " values, more than 2^payload_width");
    }
}

inline void validate_environment(const Environment& env)
{
    if (env.num_dof == 0)
        throw Error(Errc::SpecInvalid, "num_dof must be positive");
    if (env.config.size() != env.num_dof)
        throw Error(Errc::SpecInvalid, "configuration length != num_dof");
    if (env.epsilon < 0.0 || env.epsilon > 1.0)
        throw Error(Errc::SpecInvalid, "epsilon outside [0,1]");
    env.rule.validate(env.num_dof);
    validate_sources(env.sources, env.num_dof, env.framing);
}

/// Advances the configuration one step under the reversible rule.
inline void step(Environment& env) { env.rule.apply(env.config); }

/// Exact inverse of step.
inline void inverse_step(Environment& env) { env.rule.apply_inverse(env.config); }

/// Serializes the current configuration onto the framed channel: one message
/// slot per source in declaration order, a noise slot before each message and
/// one after the last. Message body = tag ++ payload (current read-out index),
/// each body bit independently flipped with probability epsilon. Slot
/// structure depends only on the configuration, the source count, and the
/// generator; source labels never enter.
inline std::vector<ChannelSlot> emit_channel(const Environment& env, Rng& rng)
{
    std::vector<ChannelSlot> slots;
    slots.reserve(2 * env.sources.size() + 1);
    auto push_noise = [&] {
        ChannelSlot slot;
        slot.is_message = false;
        slot.body.resize(env.framing.noise_slot_len);
        for (auto& b : slot.body) b = static_cast<std::uint8_t>(rng.next_bit());
        slots.push_back(std::move(slot));
    };
    for (const auto& src : env.sources) {
        push_noise();
        ChannelSlot slot;
        slot.is_message = true;
        slot.body = src.tag;
        const BitString payload =
            encode_bits(src.readout_index(env.config), env.framing.payload_width);
        slot.body.insert(slot.body.end(), payload.begin(), payload.end());
        for (auto& b : slot.body)
            if (rng.bernoulli(env.epsilon)) b ^= 1;
        slots.push_back(std::move(slot));
    }
    push_noise();
    return slots;
}

/// Ground-truth fraction F(k): the exact share of ensemble configurations
/// whose decoded read-out index for `source` equals k.
inline double true_fraction(const std::vector<Config>& ensemble, const SignalSource& source,
                            std::size_t k)
{
    if (ensemble.empty()) throw Error(Errc::EmptyEnsemble, "true_fraction over empty ensemble");
    if (k >= source.value_count())
        throw Error(Errc::SpecInvalid, "k >= value count");
    std::size_t count = 0;
    for (const auto& c : ensemble)
        if (source.readout_index(c) == k) ++count;
    return static_cast<double>(count) / static_cast<double>(ensemble.size());
}

/// Replaces the source labeling. The configuration, rule and noise level are
/// untouched, so the trajectory under step is bit-identical by construction.
inline Environment repartition(const Environment& env, std::vector<SignalSource> new_sources)
{
    validate_sources(new_sources, env.num_dof, env.framing);
    Environment out = env;
    out.sources = std::move(new_sources);
    return out;
}

} // namespace minobs

#endif // MINOBS_ENV_HPP
