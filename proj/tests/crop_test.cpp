#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "agropomdp/crop/env.hpp"
#include "agropomdp/crop/expert.hpp"
#include "agropomdp/random.hpp"
#include "agropomdp/weather/synth.hpp"
#include "agropomdp/weather/transform.hpp"

using namespace agro;
using namespace agro::crop;

namespace {

const RewardWeights k1999 = RewardWeights::for_year(1999);

EnvConfig default_config(std::uint64_t weather_seed = 1999) {
    EnvConfig c;
    c.weather = weather::synthesize_weather(weather_seed, 204);
    return c;
}

weather::WeatherRecord day(double srad, double tmax, double tmin, double rain) { return {1, srad, tmax, tmin, rain}; }

}  // namespace

// ---------------------------------------------------------------------------
// decode_action / compute_reward
// ---------------------------------------------------------------------------

TEST(DecodeAction, Grid) {
    EXPECT_EQ(decode_action(0), 0.0);
    EXPECT_EQ(decode_action(1), 10.0);
    EXPECT_EQ(decode_action(20), 200.0);
    EXPECT_THROW(decode_action(21), IndexError);
    EXPECT_THROW(decode_action(-1), IndexError);
}

TEST(RewardWeights, PublishedTableAndMultiplier) {
    EXPECT_DOUBLE_EQ(k1999.w1, 0.07087);
    EXPECT_DOUBLE_EQ(k1999.w2, 0.39);
    EXPECT_DOUBLE_EQ(k1999.w3, 1.95);
    EXPECT_DOUBLE_EQ(k1999.w3, RewardWeights::kDefaultLeachMultiplier * k1999.w2);
    EXPECT_DOUBLE_EQ(RewardWeights::for_year(2020).w1, 0.1827);
    EXPECT_THROW(RewardWeights::for_year(2001), ConfigError);
    EXPECT_DOUBLE_EQ(k1999.with_leach_multiplier(50).w3, 19.5);
    EXPECT_EQ(k1999.with_leach_multiplier(0).w3, 0.0);
    EXPECT_THROW(k1999.with_leach_multiplier(-1), ConfigError);
}

TEST(ComputeReward, HarvestAndDailyCases) {
    EXPECT_NEAR(compute_reward(0, 0, 9243.0, k1999), 655.05, 0.01);
    EXPECT_NEAR(compute_reward(20, 0.1, std::nullopt, k1999), -7.995, 1e-12);
    EXPECT_NEAR(season_reward(9243, 180, 0.12, k1999), 584.6, 0.05);
    EXPECT_NEAR(season_reward(9243, 180, 0.12, k1999), 584.0, 2.0);
    EXPECT_THROW(compute_reward(-1, 0, std::nullopt, k1999), DomainError);
    EXPECT_THROW(compute_reward(0, -0.1, std::nullopt, k1999), DomainError);
}

// ---------------------------------------------------------------------------
// observe
// ---------------------------------------------------------------------------

TEST(Observe, OrderingAndLengths) {
    CropState s;
    s.cumsumfert = 30;
    s.dap = 12;
    s.xlai = 2.5;
    s.wtnup = 77;
    std::array<double, kStateVariables> ones;
    ones.fill(1.0);
    auto o10 = observe(s, ObservationMode::MDP10, ones);
    ASSERT_EQ(o10.size(), 10u);
    EXPECT_EQ(o10[0], 30);
    EXPECT_EQ(o10[1], 12);
    EXPECT_EQ(o10[9], 2.5);
    auto o28 = observe(s, ObservationMode::POMDP28, ones);
    ASSERT_EQ(o28.size(), 28u);
    EXPECT_EQ(o28[27], 77);
    const auto raw = s.variables();
    for (std::size_t i = 0; i < 28; ++i) EXPECT_EQ(o28[i], raw[i]);

    auto scaled = observe(s, ObservationMode::MDP10, default_observation_scale());
    EXPECT_DOUBLE_EQ(scaled[0], 30.0 / 200.0);
}

TEST(Observe, NamesFollowTableOrder) {
    EXPECT_EQ(kVariableNames[0], "cumsumfert");
    EXPECT_EQ(kVariableNames[9], "xlai");
    EXPECT_EQ(kVariableNames[10], "cleach");
    EXPECT_EQ(kVariableNames[27], "wtnup");
}

// ---------------------------------------------------------------------------
// reset / step
// ---------------------------------------------------------------------------

TEST(Reset, DeterministicAndZeroed) {
    CropEnv a(default_config(), ObservationMode::MDP28);
    CropEnv b(default_config(), ObservationMode::MDP28);
    Rng r1(3), r2(3);
    a.reset(r1);
    b.reset(r2);
    EXPECT_EQ(a.state(), b.state());
    EXPECT_EQ(a.state().dap, 0);
    EXPECT_EQ(a.state().istage, 1);
    EXPECT_EQ(a.state().cumsumfert, 0);
    EXPECT_EQ(a.state().cleach, 0);
    EXPECT_EQ(a.state().totir, 0);
    EXPECT_DOUBLE_EQ(a.state().rain, a.config().weather[20].rain);
}

TEST(Reset, ShortWeatherRejected) {
    EnvConfig c;
    c.weather = weather::synthesize_weather(1, 150);
    EXPECT_THROW(CropEnv(c, ObservationMode::MDP10), DataError);
}

TEST(Step, EndsByDay180AndTotirStaysZero) {
    CropEnv env(default_config(), ObservationMode::MDP10);
    Rng rng(5);
    int steps = 0;
    bool done = false;
    while (!done) {
        auto r = env.step(static_cast<int>(rng.below(kActionCount)));
        done = r.done;
        ++steps;
        EXPECT_EQ(env.state().totir, 0.0);
        ASSERT_LE(steps, 180);
    }
    EXPECT_GT(env.state().grnwt, 0.0);
    EXPECT_THROW(env.step(0), StateError);
}

TEST(Step, NoFertiliserMeansOnlyLeachingPenalties) {
    CropEnv env(default_config(), ObservationMode::MDP10);
    StepResult r;
    do {
        r = env.step(0);
        if (!r.done) {
            EXPECT_LE(r.reward, 0.0);
            EXPECT_DOUBLE_EQ(r.reward, -k1999.w3 * env.state().tleachd);
        }
    } while (!r.done);
    EXPECT_EQ(env.summary().total_n, 0.0);
}

TEST(Step, Accumulates) {
    CropEnv env(default_config(), ObservationMode::MDP10);
    env.step(1);
    env.step(2);
    EXPECT_EQ(env.state().cumsumfert, 30.0);
    EXPECT_EQ(env.state().dap, 2.0);
    EXPECT_EQ(env.observation()[0], 30.0 / 200.0);
}

TEST(Step, GrainWeightZeroBeforeHarvest) {
    CropEnv env(default_config(), ObservationMode::MDP28);
    for (int d = 0; d < 60; ++d) {
        env.step(d % 3);
        EXPECT_EQ(env.state().grnwt, 0.0);
    }
}

// ---------------------------------------------------------------------------
// advance_crop
// ---------------------------------------------------------------------------

TEST(AdvanceCrop, DroughtBringsWaterStress) {
    EnvConfig cfg = default_config();
    cfg.soil.initial_water_fraction = 1.0;
    CropState s = initial_state(cfg, day(22, 28, 16, 0));
    for (int d = 0; d < 30; ++d) s = advance_crop(s, day(22, 28, 16, 0), 0, cfg);
    EXPECT_LT(s.swfac, 1.0);
    EXPECT_GE(s.swfac, 0.0);
}

TEST(AdvanceCrop, RainLeachesMore) {
    EnvConfig cfg = default_config();
    CropState s = initial_state(cfg, day(20, 25, 12, 0));
    auto wet = advance_crop(s, day(20, 25, 12, 50), 200, cfg);
    auto dry = advance_crop(s, day(20, 25, 12, 0), 200, cfg);
    EXPECT_GT(wet.tleachd, dry.tleachd);
    EXPECT_EQ(dry.tleachd, 0.0);
}

TEST(AdvanceCrop, NothingToLeach) {
    EnvConfig cfg = default_config();
    CropState s = initial_state(cfg, day(20, 25, 12, 0));
    s.soil_nitrogen = 0;
    auto next = advance_crop(s, day(20, 25, 12, 40), 0, cfg);
    EXPECT_EQ(next.tleachd, 0.0);
}

TEST(AdvanceCrop, RejectsNonFiniteWeather) {
    EnvConfig cfg = default_config();
    CropState s = initial_state(cfg, day(20, 25, 12, 0));
    EXPECT_THROW(advance_crop(s, day(20, NAN, 12, 0), 0, cfg), DataError);
}

TEST(TemperatureResponse, UnimodalWithPlateau) {
    CropParams p;
    double prev = -1;
    bool descending = false;
    for (double t = 0; t <= 45; t += 0.25) {
        const double f = temperature_response(t, p);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        if (t >= p.plateau_low && t <= p.plateau_high) {
            EXPECT_EQ(f, 1.0);
        }
        if (prev >= 0) {
            if (f < prev) descending = true;
            if (descending) {
                EXPECT_LE(f, prev) << "second rise at " << t;
            }
        }
        prev = f;
    }
    EXPECT_EQ(temperature_response(7.0, p), 0.0);
    EXPECT_EQ(temperature_response(41.0, p), 0.0);
}

// ---------------------------------------------------------------------------
// expert schedules
// ---------------------------------------------------------------------------

TEST(ExpertSchedule, Totals) {
    auto one = expert_schedule(1);
    auto two = expert_schedule(2);
    EXPECT_EQ(std::accumulate(one.begin(), one.end(), 0.0), 56.0);
    EXPECT_EQ(std::accumulate(two.begin(), two.end(), 0.0), 224.0);
    EXPECT_EQ(two[40], 112.0);
    EXPECT_THROW(expert_schedule(3), ConfigError);
}

TEST(ExpertSchedule, RunReportsExactInput) {
    CropEnv env(default_config(), ObservationMode::MDP10);
    auto s = run_schedule(env, expert_schedule(2));
    EXPECT_EQ(s.total_n, 224.0);
    auto s1 = run_schedule(env, expert_schedule(1));
    EXPECT_EQ(s1.total_n, 56.0);
    EXPECT_LT(s1.yield, s.yield);
}

// ---------------------------------------------------------------------------
// season-level properties
// ---------------------------------------------------------------------------

TEST(Properties, AccountingAndStressBoundsOverRandomEpisodes) {
    Rng rng(77);
    for (int ep = 0; ep < 50; ++ep) {
        CropEnv env(default_config(1000 + ep % 5), ObservationMode::MDP28);
        double reward_sum = 0, leach_sum = 0, applied = 0;
        StepResult r;
        do {
            const int a = rng.bernoulli(0.1) ? static_cast<int>(rng.below(kActionCount)) : 0;
            const double prev_cleach = env.state().cleach;
            r = env.step(a);
            reward_sum += r.reward;
            leach_sum += env.state().tleachd;
            applied += decode_action(a);
            const auto& s = env.state();
            EXPECT_GE(s.swfac, 0.0);
            EXPECT_LE(s.swfac, 1.0);
            EXPECT_GE(s.nstres, 0.0);
            EXPECT_LE(s.nstres, 1.0);
            EXPECT_GE(s.cleach, prev_cleach);
        } while (!r.done);
        const auto& s = env.state();
        const auto& sum = env.summary();
        EXPECT_NEAR(s.cleach, leach_sum, 1e-9);
        EXPECT_EQ(s.cumsumfert, applied);
        EXPECT_NEAR(reward_sum, season_reward(sum.yield, sum.total_n, sum.total_leach, k1999), 1e-9);
        EXPECT_LE(s.cleach + s.cnox + s.wtnup, env.config().soil.initial_nitrogen + applied + 1e-9);
    }
}

TEST(Properties, DeterministicTrajectory) {
    auto run = [] {
        CropEnv env(default_config(), ObservationMode::MDP28);
        Rng rng(9);
        std::vector<double> trace;
        StepResult r;
        do {
            r = env.step(static_cast<int>(rng.below(kActionCount)));
            trace.insert(trace.end(), r.observation.begin(), r.observation.end());
            trace.push_back(r.reward);
        } while (!r.done);
        return trace;
    };
    EXPECT_EQ(run(), run());
}

// Nitrogen-sufficient fixed schedules: hotter and drier seasons never help.
TEST(Properties, ClimateDirectionsUnderFixedSchedule) {
    std::vector<double> generous(180, 0.0);
    generous[0] = 100;
    generous[25] = 60;
    generous[45] = 60;
    generous[65] = 40;
    for (std::uint64_t seed : {1999u, 1u, 2u, 3u, 4u}) {
        for (const auto& plan : {expert_schedule(2), generous}) {
            const auto base = weather::synthesize_weather(seed, 204);
            auto yield_for = [&](const weather::WeatherSeries& w) {
                EnvConfig c;
                c.weather = w;
                CropEnv env(c, ObservationMode::MDP10);
                return run_schedule(env, plan).yield;
            };
            const double baseline = yield_for(base);
            EXPECT_LT(yield_for(weather::shift_temperature(base, 5.0)), baseline) << "seed " << seed;
            double prev = baseline;
            for (double f : {0.8, 0.65, 0.5, 0.35, 0.2}) {
                const double y = yield_for(weather::scale_rainfall(base, f));
                EXPECT_LE(y, prev) << "seed " << seed << " factor " << f;
                prev = y;
            }
        }
    }
}
