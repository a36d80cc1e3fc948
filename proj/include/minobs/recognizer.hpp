#ifndef MINOBS_RECOGNIZER_HPP
#define MINOBS_RECOGNIZER_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "minobs/bits.hpp"
#include "minobs/env.hpp"
#include "minobs/error.hpp"

namespace minobs {

/// Deterministic Moore machine over {0,1} that accepts exactly the
/// well-formed message bodies of one source: tag ++ payload, payload of
/// fixed width. Compiled ahead of time; there is no learning path.
class Recognizer {
public:
    Recognizer() = default;

    /// States 0..tag_len-1 match the tag bit by bit, the next payload_width
    /// states consume the payload unconditionally, then one accepting state
    /// and one dead state. Total = tag_len + payload_width + 2.
    static Recognizer compile(std::string source_id, const BitString& tag,
                              std::size_t payload_width)
    {
        if (tag.empty()) throw Error(Errc::EmptyTag, "recognizer tag is empty");
        Recognizer r;
        r.source_id_ = std::move(source_id);
        r.tag_ = tag;
        const std::size_t L = tag.size();
        const std::size_t P = payload_width;
        const State accept = static_cast<State>(L + P);
        const State dead = accept + 1;
        r.accept_ = accept;
        r.transitions_.resize(L + P + 2);
        for (std::size_t i = 0; i < L; ++i) {
            r.transitions_[i][tag[i]] = static_cast<State>(i + 1);
            r.transitions_[i][1 - tag[i]] = dead;
        }
        for (std::size_t j = 0; j < P; ++j) {
            r.transitions_[L + j][0] = static_cast<State>(L + j + 1);
            r.transitions_[L + j][1] = static_cast<State>(L + j + 1);
        }
        r.transitions_[accept] = {dead, dead};
        r.transitions_[dead] = {dead, dead};
        return r;
    }

    bool accepts(const BitString& body) const
    {
        State s = 0;
        for (auto bit : body) s = transitions_[s][bit];
        return s == accept_;
    }

    const std::string& source_id() const { return source_id_; }
    const BitString& tag() const { return tag_; }
    std::size_t state_count() const { return transitions_.size(); }

private:
    using State = std::uint32_t;

    std::string source_id_;
    BitString tag_;
    std::vector<std::array<State, 2>> transitions_;
    State accept_ = 0;
};

/// The per-source read-out decoding family {R_ik}: a payload decodes to at
/// most one index k, and indices at or beyond k_i yield no value.
struct ExtractorFamily {
    std::string source_id;
    std::vector<ScaledValue> values;
    std::size_t payload_width = 0;

    std::size_t value_count() const { return values.size(); }

    /// Returns k < k_i for an in-range payload, or k_i.. sentinel via
    /// bool=false when the payload falls outside the table.
    bool extract(const BitString& body, std::size_t tag_width, std::size_t& k_out,
                 ScaledValue& value_out) const
    {
        std::uint64_t k = 0;
        for (std::size_t i = tag_width; i < body.size(); ++i) k = (k << 1) | body[i];
        if (k >= values.size()) return false;
        k_out = static_cast<std::size_t>(k);
        value_out = values[k];
        return true;
    }
};

} // namespace minobs

#endif // MINOBS_RECOGNIZER_HPP
