#include "doctest.h"

#include <cmath>

#include "minobs/observable.hpp"

using namespace minobs;

namespace {

SignalSource two_dof_source(const std::string& id = "s", std::vector<std::size_t> dofs = {0, 1},
                            std::vector<ScaledValue> values = {0, 100, 200, 300})
{
    SignalSource s;
    s.id = id;
    s.tag = bits_from_string("01");
    s.dofs = std::move(dofs);
    s.values = std::move(values);
    return s;
}

std::vector<Config> all_patterns(std::size_t num_dof)
{
    std::vector<Config> out;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << num_dof); ++p)
        out.push_back(encode_bits(p, num_dof));
    return out;
}

} // namespace

TEST_CASE("make_observable validates window and back-action")
{
    const SignalSource src = two_dof_source();
    CHECK_NOTHROW(Observable::make({0, 1}, src, 2, 0));
    CHECK_THROWS_AS(Observable::make({0}, src, 2, 0), Error);    // window too small
    CHECK_THROWS_AS(Observable::make({0, 1, 5}, src, 2, 5), Error); // back-action outside component
}

TEST_CASE("apply: decode, value, and back-action")
{
    const Observable obs = Observable::make({0, 1}, two_dof_source(), 2, 0);
    Config c = bits_from_string("1000");
    const Outcome o = obs.apply(c);
    CHECK(o == Outcome::of(2, 200));
    CHECK(bits_to_string(c) == "0000"); // back-action zeroed dof 0

    // Second application reflects the zeroed bit: component now "00".
    const Outcome o2 = obs.apply(c);
    CHECK(o2 == Outcome::of(0, 0));
}

TEST_CASE("apply: pattern past the value table is Null and leaves the state alone")
{
    const Observable obs =
        Observable::make({0, 1}, two_dof_source("s", {0, 1}, {0, 100, 200}), 2, 0);
    Config c = bits_from_string("1100"); // decodes to 3 >= k_i
    const Config before = c;
    CHECK(obs.apply(c) == Outcome::null());
    CHECK(c == before);
}

TEST_CASE("back-action minimality: at most the designated DOF changes")
{
    const Observable obs = Observable::make({0, 1, 2}, two_dof_source("s", {0, 2}), 2, 2);
    Rng rng(8);
    for (int t = 0; t < 500; ++t) {
        Config c = random_config(6, rng);
        const Config before = c;
        const Outcome o = obs.apply(c);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] != before[i]) {
                ++changed;
                CHECK(i == 2);
            }
        CHECK(changed <= (o.has_value ? 1u : 0u));
    }
}

TEST_CASE("output_equivalent")
{
    const Observable o1 = Observable::make({0, 1}, two_dof_source(), 2, 0);
    const auto patterns = all_patterns(4);

    SUBCASE("reflexive") { CHECK(output_equivalent(o1, o1, patterns)); }
    SUBCASE("same component, distinct back-action DOF is still output-equivalent")
    {
        const Observable o2 = Observable::make({0, 1}, two_dof_source(), 2, 1);
        CHECK(output_equivalent(o1, o2, patterns));
    }
    SUBCASE("permuted value table differs")
    {
        const Observable o2 =
            Observable::make({0, 1}, two_dof_source("s", {0, 1}, {100, 0, 200, 300}), 2, 0);
        CHECK_FALSE(output_equivalent(o1, o2, patterns));
    }
    SUBCASE("empty ensemble rejected")
    {
        CHECK_THROWS_AS(output_equivalent(o1, o1, {}), Error);
    }
    SUBCASE("equivalence relation on a fixed ensemble")
    {
        const Observable o2 = Observable::make({0, 1, 2}, two_dof_source(), 2, 1);
        const Observable o3 = Observable::make({0, 1, 3}, two_dof_source(), 2, 0);
        CHECK(output_equivalent(o1, o2, patterns));
        CHECK(output_equivalent(o2, o1, patterns)); // symmetric
        CHECK(output_equivalent(o2, o3, patterns));
        CHECK(output_equivalent(o1, o3, patterns)); // transitive
    }
}

TEST_CASE("components_orthogonal")
{
    const Observable a = Observable::make({0, 1}, two_dof_source("a", {0, 1}), 2, 0);
    const Observable b = Observable::make({2, 3}, two_dof_source("b", {2, 3}), 2, 2);
    const Observable c = Observable::make({1, 2}, two_dof_source("c", {1, 2}), 2, 1);
    CHECK(components_orthogonal(a, b));
    CHECK_FALSE(components_orthogonal(a, c)); // shared DOF 1
    CHECK_FALSE(components_orthogonal(a, a));
}

TEST_CASE("commutativity: disjoint components never disagree")
{
    const Observable a = Observable::make({0, 1}, two_dof_source("a", {0, 1}), 2, 0);
    const Observable b = Observable::make({2, 3}, two_dof_source("b", {2, 3}), 2, 2);
    Environment env;
    env.num_dof = 8;
    env.config.resize(8, 0);
    Rng rng(123);
    const AgreementStats stats = commutativity_experiment(a, b, env, 10000, rng);
    CHECK(stats.trials == 10000);
    CHECK(stats.agreements == 10000);
    CHECK(stats.disagreement_rate() == 0.0);
    CHECK(exhaustive_disagreement_rate(a, b, 8) == 0.0);
}

TEST_CASE("commutativity: one shared DOF, oracle rate by enumeration")
{
    // a reads [0,1] and zeroes 0; c reads [1,2] and zeroes 1. Hand
    // enumeration over (b0,b1,b2): r differs from r' exactly when b1 = 1,
    // so the disagreement rate is 1/2.
    const Observable a = Observable::make({0, 1}, two_dof_source("a", {0, 1}), 2, 0);
    const Observable c = Observable::make({1, 2}, two_dof_source("c", {1, 2}), 2, 1);
    CHECK(exhaustive_disagreement_rate(a, c, 8) == doctest::Approx(0.5));

    Environment env;
    env.num_dof = 8;
    env.config.resize(8, 0);
    Rng rng(9);
    const AgreementStats stats = commutativity_experiment(a, c, env, 10000, rng);
    const double sigma = std::sqrt(0.5 * 0.5 / 10000.0);
    CHECK(stats.disagreement_rate() > 0.0);
    CHECK(std::abs(stats.disagreement_rate() - 0.5) <= 3.0 * sigma);
}

TEST_CASE("commutativity: same observable twice")
{
    // r (fresh) vs r' (after the back-action): they differ exactly when the
    // back-action bit was set, so the rate is 1/2 by enumeration.
    const Observable a = Observable::make({0, 1}, two_dof_source("a", {0, 1}), 2, 0);
    CHECK(exhaustive_disagreement_rate(a, a, 8) == doctest::Approx(0.5));
}

TEST_CASE("non-orthogonality has an enumerable witness configuration")
{
    const Observable a = Observable::make({0, 1}, two_dof_source("a", {0, 1}), 2, 0);
    const Observable c = Observable::make({1, 2}, two_dof_source("c", {1, 2}), 2, 1);
    bool found = false;
    for (const auto& config : all_patterns(4))
        if (!commutativity_trial(a, c, config)) found = true;
    CHECK(found);
}
