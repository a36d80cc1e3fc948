#ifndef MINOBS_OBSERVER_HPP
#define MINOBS_OBSERVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minobs/env.hpp"
#include "minobs/error.hpp"
#include "minobs/recognizer.hpp"

namespace minobs {

/// One memory entry. Constructed only on the extractor-fire path inside
/// Observer::run_cycle; the provenance triple is therefore always present.
class Record {
public:
    std::size_t cycle() const { return cycle_; }
    const std::string& source_id() const { return source_id_; }
    std::size_t k() const { return k_; }
    ScaledValue value() const { return value_; }
    std::size_t window_read_id() const { return window_read_id_; }
    std::size_t recognizer_id() const { return recognizer_id_; }
    std::size_t extractor_id() const { return extractor_id_; }

    bool operator==(const Record&) const = default;

private:
    friend class Observer;

    Record(std::size_t cycle, std::string source_id, std::size_t k, ScaledValue value,
           std::size_t window_read_id, std::size_t recognizer_id, std::size_t extractor_id)
        : cycle_(cycle), source_id_(std::move(source_id)), k_(k), value_(value),
          window_read_id_(window_read_id), recognizer_id_(recognizer_id),
          extractor_id_(extractor_id)
    {
    }

    std::size_t cycle_;
    std::string source_id_;
    std::size_t k_;
    ScaledValue value_;
    std::size_t window_read_id_;
    std::size_t recognizer_id_;
    std::size_t extractor_id_;
};

struct SessionReport {
    std::vector<Record> records;
    std::size_t cycles_run = 0;
    std::size_t nulls = 0;
    bool truncated = false; // a record write hit the capacity bound

    bool operator==(const SessionReport&) const = default;
};

enum class CycleOutcome { Recorded, Null, MemoryFull };

enum class StoreResult { Stored, CapacityExceeded };

/// The minimal observer: compiled recognizer/extractor tables in a ready
/// state, a bounded classical memory of provenance-tagged records, and the
/// multiple-observation cycle. Every completed cycle ends back in the ready
/// state with the tables unchanged.
class Observer {
public:
    /// Fixed per-record cost: cycle 24 + source 8 + k 8 + value 16 +
    /// provenance 8 bits.
    static constexpr std::size_t record_size_bits = 64;
    /// Cost of holding one full environment snapshot, over the raw DOF bits.
    static constexpr std::size_t snapshot_overhead_bits = 64;

    explicit Observer(std::size_t memory_capacity_bits,
                      std::size_t ready_capacity_bits = default_ready_capacity_bits)
        : memory_capacity_bits_(memory_capacity_bits),
          ready_capacity_bits_(ready_capacity_bits)
    {
    }

    static constexpr std::size_t default_ready_capacity_bits = 1 << 20;

    std::size_t memory_capacity_bits() const { return memory_capacity_bits_; }
    std::size_t memory_used_bits() const { return memory_.size() * record_size_bits; }
    const std::vector<Record>& memory() const { return memory_; }
    const std::vector<Recognizer>& recognizers() const { return recognizers_; }
    const std::vector<ExtractorFamily>& extractors() const { return extractors_; }

    static std::size_t spec_cost_bits(const Recognizer& rec, const ExtractorFamily& fam)
    {
        return rec.tag().size() + fam.payload_width + 16 * fam.value_count();
    }

    /// Extends the ready state with a recognizer/extractor pair for a source
    /// not previously encountered. Data memory records are untouched.
    void load_recognizer(Recognizer rec, ExtractorFamily fam)
    {
        if (rec.source_id() != fam.source_id)
            throw Error(Errc::SpecInvalid, "recognizer/extractor source ids differ");
        for (const auto& r : recognizers_)
            if (r.source_id() == rec.source_id())
                throw Error(Errc::DuplicateSource, "source '" + rec.source_id() + "' already loaded");
        const std::size_t cost = spec_cost_bits(rec, fam);
        if (ready_used_bits_ + cost > ready_capacity_bits_)
            throw Error(Errc::CapacityExceeded, "ready-state capacity exhausted loading '" +
                                                    rec.source_id() + "'");
        ready_used_bits_ += cost;
        recognizers_.push_back(std::move(rec));
        extractors_.push_back(std::move(fam));
    }

    /// One observation cycle over a channel read-out. Scans slots in order;
    /// the first message slot accepted by some recognizer (declaration-order
    /// priority) fires its extractor family. A payload outside the value
    /// table, like non-recognition, is a Null outcome with no memory write.
    CycleOutcome run_cycle(const std::vector<ChannelSlot>& slots, std::size_t tag_width)
    {
        for (std::size_t slot_idx = 0; slot_idx < slots.size(); ++slot_idx) {
            const auto& slot = slots[slot_idx];
            if (!slot.is_message) continue;
            for (std::size_t rid = 0; rid < recognizers_.size(); ++rid) {
                if (!recognizers_[rid].accepts(slot.body)) continue;
                std::size_t k = 0;
                ScaledValue value = 0;
                if (!extractors_[rid].extract(slot.body, tag_width, k, value)) {
                    ++cycle_;
                    return CycleOutcome::Null;
                }
                if (memory_used_bits() + record_size_bits > memory_capacity_bits_) {
                    ++cycle_;
                    return CycleOutcome::MemoryFull;
                }
                memory_.push_back(Record(cycle_++, recognizers_[rid].source_id(), k, value,
                                         slot_idx, rid, rid));
                return CycleOutcome::Recorded;
            }
        }
        ++cycle_;
        return CycleOutcome::Null;
    }

    /// Runs `cycles` observation cycles against an environment copy
    /// (emit, scan, step), then reports the accumulated records and flushes
    /// data memory. The ready state is unchanged throughout.
    SessionReport observe_session(Environment env, std::size_t cycles, Rng& rng)
    {
        SessionReport report;
        for (std::size_t i = 0; i < cycles; ++i) {
            const auto slots = emit_channel(env, rng);
            switch (run_cycle(slots, env.framing.tag_width)) {
            case CycleOutcome::Recorded: break;
            case CycleOutcome::Null: ++report.nulls; break;
            case CycleOutcome::MemoryFull: report.truncated = true; break;
            }
            step(env);
        }
        report.cycles_run = cycles;
        report.records = memory_;
        flush();
        return report;
    }

    /// Attempts to store a full snapshot of the environment configuration.
    /// Succeeds only when num_dof plus the snapshot overhead fits in the free
    /// data memory; a minimal observer (capacity < num_dof) always fails.
    StoreResult record_full_state(const Environment& env) const
    {
        const std::size_t needed = env.num_dof + snapshot_overhead_bits;
        const std::size_t free_bits = memory_capacity_bits_ - memory_used_bits();
        return needed <= free_bits ? StoreResult::Stored : StoreResult::CapacityExceeded;
    }

    void flush()
    {
        memory_.clear();
        cycle_ = 0;
    }

private:
    std::size_t memory_capacity_bits_;
    std::size_t ready_capacity_bits_;
    std::size_t ready_used_bits_ = 0;
    std::vector<Recognizer> recognizers_;
    std::vector<ExtractorFamily> extractors_;
    std::vector<Record> memory_;
    std::size_t cycle_ = 0;
};

enum class Verdict { Distinguished, Indistinguishable };

/// Runs identical seeded sessions against two environments; they are
/// indistinguishable exactly when the two session reports are equal.
inline Verdict distinguish_states(const Observer& obs, const Environment& env_a,
                                  const Environment& env_b, std::size_t cycles,
                                  std::uint64_t seed)
{
    Observer a = obs;
    Observer b = obs;
    Rng rng_a(seed);
    Rng rng_b(seed);
    const SessionReport ra = a.observe_session(env_a, cycles, rng_a);
    const SessionReport rb = b.observe_session(env_b, cycles, rng_b);
    return ra == rb ? Verdict::Indistinguishable : Verdict::Distinguished;
}

} // namespace minobs

#endif // MINOBS_OBSERVER_HPP
