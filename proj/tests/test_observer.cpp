#include "doctest.h"

#include <map>

#include "minobs/observer.hpp"
#include "minobs/spec_io.hpp"

using namespace minobs;

namespace {

Observer make_basic_observer(std::size_t capacity_bits = 65536)
{
    Observer obs(capacity_bits);
    obs.load_recognizer(Recognizer::compile("s1", bits_from_string("01"), 2),
                        ExtractorFamily{"s1", {0, 1000, 2000, 3000}, 2});
    return obs;
}

ChannelSlot noise_slot()
{
    ChannelSlot s;
    s.body = bits_from_string("0000");
    return s;
}

ChannelSlot message_slot(const std::string& body)
{
    ChannelSlot s;
    s.is_message = true;
    s.body = bits_from_string(body);
    return s;
}

Environment session_env()
{
    return build_environment(Json{
        {"num_dof", 8},
        {"init", "10000000"},
        {"tag_width", 2},
        {"payload_width", 2},
        {"sources", Json::array({{{"id", "s1"},
                                  {"tag", "01"},
                                  {"dofs", {0, 1}},
                                  {"values", {0.0, 1.0, 2.0, 3.0}}}})}});
}

} // namespace

TEST_CASE("load_recognizer extends the ready state")
{
    Observer obs(1024);
    CHECK(obs.recognizers().empty());
    obs.load_recognizer(Recognizer::compile("s1", bits_from_string("01"), 2),
                        ExtractorFamily{"s1", {0, 1000}, 2});
    CHECK(obs.recognizers().size() == 1);
    CHECK(obs.memory().empty());
}

TEST_CASE("load_recognizer rejects a duplicate source")
{
    Observer obs = make_basic_observer();
    CHECK_THROWS_AS(obs.load_recognizer(Recognizer::compile("s1", bits_from_string("11"), 2),
                                        ExtractorFamily{"s1", {0}, 2}),
                    Error);
}

TEST_CASE("load_recognizer enforces the ready-state capacity bound")
{
    Observer obs(1024, /*ready_capacity_bits=*/100);
    bool threw = false;
    for (int i = 0; i < 10 && !threw; ++i) {
        try {
            const std::string id = "s" + std::to_string(i);
            obs.load_recognizer(Recognizer::compile(id, encode_bits(i, 4), 2),
                                ExtractorFamily{id, {0, 1000, 2000, 3000}, 2});
        } catch (const Error& e) {
            CHECK(e.code() == Errc::CapacityExceeded);
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("run_cycle: first accepted message fires the extractor")
{
    Observer obs = make_basic_observer();
    const auto outcome = obs.run_cycle({noise_slot(), message_slot("0110")}, 2);
    CHECK(outcome == CycleOutcome::Recorded);
    REQUIRE(obs.memory().size() == 1);
    const Record& r = obs.memory()[0];
    CHECK(r.source_id() == "s1");
    CHECK(r.k() == 2);
    CHECK(r.value() == 2000);
    CHECK(r.window_read_id() == 1);
    CHECK(r.recognizer_id() == 0);
    CHECK(r.extractor_id() == 0);
}

TEST_CASE("run_cycle: all-noise input is a Null with no memory write")
{
    Observer obs = make_basic_observer();
    const auto outcome = obs.run_cycle({noise_slot(), noise_slot()}, 2);
    CHECK(outcome == CycleOutcome::Null);
    CHECK(obs.memory().empty());
}

TEST_CASE("run_cycle: payload past the value table is a Null")
{
    Observer obs(65536);
    obs.load_recognizer(Recognizer::compile("s1", bits_from_string("01"), 2),
                        ExtractorFamily{"s1", {0, 1000, 2000}, 2}); // k_i = 3
    const auto outcome = obs.run_cycle({message_slot("0111")}, 2);
    CHECK(outcome == CycleOutcome::Null);
    CHECK(obs.memory().empty());
}

TEST_CASE("run_cycle: capacity bound aborts the write")
{
    Observer obs = make_basic_observer(Observer::record_size_bits); // room for one record
    CHECK(obs.run_cycle({message_slot("0110")}, 2) == CycleOutcome::Recorded);
    CHECK(obs.run_cycle({message_slot("0110")}, 2) == CycleOutcome::MemoryFull);
    CHECK(obs.memory().size() == 1);
    CHECK(obs.memory_used_bits() <= obs.memory_capacity_bits());
}

TEST_CASE("observe_session: zero cycles")
{
    Observer obs = make_basic_observer();
    Rng rng(0);
    const SessionReport report = obs.observe_session(session_env(), 0, rng);
    CHECK(report.records.empty());
    CHECK(report.cycles_run == 0);
    CHECK(report.nulls == 0);
}

TEST_CASE("observe_session: constant read-out under the identity rule")
{
    Observer obs = make_basic_observer();
    Rng rng(0);
    const SessionReport report = obs.observe_session(session_env(), 20, rng);
    REQUIRE(report.records.size() == 20);
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        CHECK(report.records[i].cycle() == i);
        CHECK(report.records[i].k() == 2); // bits "10" at [0,1]
        CHECK(report.records[i].value() == 2000);
    }
    // Report/flush: memory is empty afterwards.
    CHECK(obs.memory().empty());
}

TEST_CASE("observe_session: histogram matches the trajectory oracle")
{
    Environment env = session_env();
    env.rule.ops = {{OpKind::Cxor, 3, 0}, {OpKind::Swap, 1, 4}, {OpKind::Not, 2},
                    {OpKind::Cxor, 5, 1}};
    Rng init(77);
    env.config = random_config(8, init);

    // Oracle: replay the trajectory and decode directly.
    std::map<std::size_t, std::size_t> expected;
    {
        Environment replay = env;
        for (int i = 0; i < 1000; ++i) {
            ++expected[replay.sources[0].readout_index(replay.config)];
            step(replay);
        }
    }
    Observer obs = make_basic_observer();
    Rng rng(0);
    const SessionReport report = obs.observe_session(env, 1000, rng);
    REQUIRE(report.records.size() == 1000);
    std::map<std::size_t, std::size_t> got;
    for (const auto& r : report.records) ++got[r.k()];
    CHECK(got == expected);
}

TEST_CASE("observe_session: ready state is unchanged by a session")
{
    Observer obs = make_basic_observer();
    Rng rng(0);
    obs.observe_session(session_env(), 50, rng);
    REQUIRE(obs.recognizers().size() == 1);
    CHECK(obs.recognizers()[0].source_id() == "s1");
    CHECK(obs.recognizers()[0].tag() == bits_from_string("01"));
    CHECK(obs.extractors()[0].values == std::vector<ScaledValue>{0, 1000, 2000, 3000});
}

TEST_CASE("observe_session: capacity overflow truncates and flags the report")
{
    Observer obs = make_basic_observer(5 * Observer::record_size_bits);
    Rng rng(0);
    const SessionReport report = obs.observe_session(session_env(), 20, rng);
    CHECK(report.truncated);
    CHECK(report.records.size() == 5);
    CHECK(report.cycles_run == 20);
}

TEST_CASE("record_full_state capacity accounting")
{
    Environment env = session_env();
    SUBCASE("minimal observer always fails")
    {
        env.num_dof = 32;
        env.config.resize(32, 0);
        Observer obs(16);
        CHECK(obs.record_full_state(env) == StoreResult::CapacityExceeded);
    }
    SUBCASE("non-minimal observer succeeds")
    {
        Observer obs(1024);
        CHECK(obs.record_full_state(env) == StoreResult::Stored);
    }
    SUBCASE("exact boundary")
    {
        Observer at(8 + Observer::snapshot_overhead_bits);
        CHECK(at.record_full_state(env) == StoreResult::Stored);
        Observer below(8 + Observer::snapshot_overhead_bits - 1);
        CHECK(below.record_full_state(env) == StoreResult::CapacityExceeded);
    }
}

TEST_CASE("distinguish_states")
{
    Environment env_a = session_env(); // source over [0,1]
    Environment env_b = env_a;
    const Observer obs = make_basic_observer();

    SUBCASE("unobserved difference, identity rule: indistinguishable")
    {
        env_b.config[5] ^= 1;
        CHECK(distinguish_states(obs, env_a, env_b, 100, 42) == Verdict::Indistinguishable);
    }
    SUBCASE("difference inside the observed component: distinguished")
    {
        env_b.config[1] ^= 1;
        CHECK(distinguish_states(obs, env_a, env_b, 100, 42) == Verdict::Distinguished);
    }
    SUBCASE("rule carries the hidden difference into the component")
    {
        env_a.rule.ops = {{OpKind::Cxor, 5, 1}};
        env_b.rule = env_a.rule;
        env_b.config[5] ^= 1;
        // Trajectory oracle: the configs diverge at [0,1] from cycle 1 on.
        CHECK(distinguish_states(obs, env_a, env_b, 10, 42) == Verdict::Distinguished);
        // With a single cycle the difference has not yet propagated.
        CHECK(distinguish_states(obs, env_a, env_b, 1, 42) == Verdict::Indistinguishable);
    }
}
