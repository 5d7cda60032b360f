#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "oracles.hpp"
#include "pursuit/eval.hpp"

using namespace pursuit;
using namespace pursuit::eval;

TEST_CASE("suite is the 5x4x4 grid in d-major order") {
    const auto suite = build_suite();
    REQUIRE(suite.size() == 80);
    CHECK(suite[0].init.rl == Pose{0.5, 0, 0});
    CHECK(suite[0].init.gs == Pose{0, 0, 0});

    // Enumeration oracle: rebuild every case independently and compare.
    const double ds[] = {0.5, 0.6, 0.7, 0.8, 0.9};
    int id = 0;
    std::set<std::tuple<double, double, double>> distinct;
    for (double d : ds) {
        for (int b = 0; b < 4; ++b) {
            for (int h = 0; h < 4; ++h) {
                const auto& tc = suite[static_cast<std::size_t>(id)];
                REQUIRE(tc.id == id);
                CHECK(std::abs(tc.init.rl.x - d * std::cos(b * kPi / 2)) < 1e-15);
                CHECK(std::abs(tc.init.rl.y - d * std::sin(b * kPi / 2)) < 1e-15);
                CHECK(oracle::angle_gap(tc.init.rl.heading, h * kPi / 2) < 1e-15);
                CHECK(tc.init.gs == Pose{0, 0, 0});
                CHECK(tc.init.step_count == 0);
                const double sep = std::hypot(tc.init.rl.x, tc.init.rl.y);
                CHECK(sep >= 0.5 - 1e-12);
                CHECK(sep <= 0.9 + 1e-12);
                distinct.insert({tc.init.rl.x, tc.init.rl.y, tc.init.rl.heading});
                ++id;
            }
        }
    }
    CHECK(distinct.size() == 80);
}

TEST_CASE("suite is constant and no case starts inside a targeting zone") {
    const auto a = build_suite();
    const auto b = build_suite();
    const SectorSpec zone{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].init == b[i].init);
        CHECK_FALSE(in_sector(a[i].init.rl, a[i].init.gs.x, a[i].init.gs.y, zone));
        CHECK_FALSE(in_sector(a[i].init.gs, a[i].init.rl.x, a[i].init.rl.y, zone));
    }
}

TEST_CASE("evaluation is greedy, deterministic and fully tallied") {
    const auto suite = build_suite();
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng = make_stream(seed, Stream::WeightInit);
        const nn::QNetwork net = nn::QNetwork::random(rng);
        // evaluate() plays with a stream that throws on any draw.
        EvalReport r1;
        CHECK_NOTHROW(r1 = evaluate(net, suite));
        const EvalReport r2 = evaluate(net, suite);
        CHECK(r1.total() == 80);
        CHECK(r1.wins < 80);
        CHECK(r1.wins == r2.wins);
        CHECK(r1.losses == r2.losses);
        CHECK(r1.mutual == r2.mutual);
        CHECK(r1.timeouts == r2.timeouts);
        REQUIRE(r1.cases.size() == 80);
        for (std::size_t i = 0; i < 80; ++i) {
            CHECK(r1.cases[i].id == static_cast<int>(i));
            CHECK(r1.cases[i].verdict == r2.cases[i].verdict);
            CHECK(r1.cases[i].length == r2.cases[i].length);
            CHECK(r1.cases[i].verdict != Verdict::Ongoing);
        }
    }
}

TEST_CASE("subset evaluation tallies only the given cases") {
    const auto suite = build_suite();
    const std::vector<TestCase> subset{suite[0], suite[5], suite[17]};
    const EvalReport r = evaluate(nn::QNetwork{}, subset);
    CHECK(r.total() == 3);
    CHECK(r.cases.size() == 3);
    CHECK(r.cases[2].id == 17);
}

TEST_CASE("greedy episodes export well-formed trajectories") {
    Rng rng = make_stream(1, Stream::WeightInit);
    const nn::QNetwork net = nn::QNetwork::random(rng);
    for (const auto& tc : build_suite()) {
        const Episode ep = run_greedy_episode(net, tc.init, {}, tc.id);
        REQUIRE(ep.rows.size() == static_cast<std::size_t>(ep.length) + 1);
        CHECK(ep.rows.front().step == 0);
        CHECK(ep.rows.front().rl_action_index == -1);
        for (std::size_t i = 0; i < ep.rows.size(); ++i) {
            CHECK(ep.rows[i].step == static_cast<int>(i));
            CHECK(ep.rows[i].episode_id == tc.id);
            if (i + 1 < ep.rows.size()) CHECK(ep.rows[i].verdict == Verdict::Ongoing);
        }
        CHECK(ep.rows.back().verdict == ep.verdict);
        CHECK(ep.verdict != Verdict::Ongoing);
    }
}

TEST_CASE("smooth_rewards averages the trailing window") {
    CHECK(smooth_rewards(std::vector<int>(50, 1)) == std::vector<double>(50, 1.0));
    CHECK(smooth_rewards(std::vector<int>{0, 1}) == std::vector<double>{0.0, 0.5});
    std::vector<int> r(200, 0);
    r.insert(r.end(), 200, 1);
    const auto s = smooth_rewards(r, 100);
    CHECK(s[299] == 1.0);
    CHECK(s[249] == 0.5);
    CHECK(s[199] == 0.0);
    CHECK(smooth_rewards(std::vector<int>{1, 0, 1}, 1) == std::vector<double>{1, 0, 1});
    CHECK_THROWS_AS((void)smooth_rewards(r, 0), std::invalid_argument);
}

TEST_CASE("report json carries per-case verdicts") {
    EvalReport r;
    r.wins = 1;
    r.timeouts = 1;
    r.cases = {{0, Verdict::RlWin, 12}, {1, Verdict::Timeout, 100}};
    r.mean_win_length = 12;
    const auto j = to_json(r);
    CHECK(j["wins"] == 1);
    CHECK(j["total"] == 2);
    CHECK(j["cases"][1]["verdict"] == "Timeout");
    CHECK(j["cases"][0]["length"] == 12);
}

TEST_CASE("cut-in slowdown detector") {
    const EnvConfig cfg;
    // RL ahead of the GS (on its +x axis) and using the slow speed 3 steps later.
    std::vector<TrajectoryRow> rows{
        {0, 0, {0.6, 0, kPi}, {0, 0, 0}, -1, 0, Verdict::Ongoing},
        {0, 1, {0.0, 0.6, 0}, {0, 0, 0}, 7, 0, Verdict::Ongoing},
        {0, 2, {0.0, 0.6, 0}, {0, 0, 0}, 7, 0, Verdict::Ongoing},
        {0, 3, {0.0, 0.6, 0}, {0, 0, 0}, 2, 0, Verdict::Ongoing},
    };
    CHECK(shows_cut_in_slowdown(rows, cfg));
    rows[3].rl_action_index = 7;
    CHECK_FALSE(shows_cut_in_slowdown(rows, cfg));
    rows[3].rl_action_index = 2;
    rows[0].rl = Pose{-0.6, 0, 0};
    CHECK_FALSE(shows_cut_in_slowdown(rows, cfg));
    CHECK(shows_cut_in_slowdown(rows, cfg, 10, kPi / 2 + 1e-9));
}
