#include <cmath>

#include "doctest.h"

#include "qspirl/errors.hpp"
#include "qspirl/spiking.hpp"

using namespace qspirl;

namespace {
const LIFParams kParams{0.02, 0.01, 0.005, 1.0, 0.0}; // dt < tau: slow leak
}

TEST_CASE("decay factors lie in (0,1)") {
    CHECK(kParams.beta_v() > 0.0);
    CHECK(kParams.beta_v() < 1.0);
    CHECK(kParams.beta_i() > 0.0);
    CHECK(kParams.beta_i() < 1.0);
    LIFParams bad{0.0, 0.01, 0.005, 1.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero input and zero state never spikes") {
    LIFState state(4);
    for (int t = 0; t < 100; ++t) {
        const Vec spikes = lif_step(state, Vec(4, 0.0), kParams);
        for (double s : spikes) CHECK(s == 0.0);
    }
}

TEST_CASE("with zero input the membrane decays geometrically") {
    LIFState state(1);
    state.v[0] = 0.5;
    double expected = 0.5;
    for (int t = 0; t < 50; ++t) {
        const Vec spikes = lif_step(state, Vec(1, 0.0), kParams);
        expected *= kParams.beta_v();
        CHECK(state.v[0] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(spikes[0] == 0.0);
    }
}

TEST_CASE("soft reset subtracts exactly the threshold") {
    LIFState state(1);
    state.v[0] = 0.999;
    const double before_i = state.i[0];
    const Vec spikes = lif_step(state, Vec(1, 2.0), kParams);
    REQUIRE(spikes[0] == 1.0);
    const double i_new = kParams.beta_i() * before_i + 2.0;
    const double v_pre = kParams.beta_v() * 0.999 + (1.0 - kParams.beta_v()) * i_new;
    CHECK(state.v[0] == doctest::Approx(v_pre - kParams.v_th).epsilon(1e-12));
}

TEST_CASE("firing rate grows monotonically with constant drive") {
    double prev_rate = -1.0;
    for (double c : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        std::vector<Vec> inputs(1000, Vec(1, c));
        const std::vector<Vec> spikes = lif_forward(inputs, kParams, nullptr);
        double rate = 0.0;
        for (const Vec &s : spikes) rate += s[0];
        rate /= static_cast<double>(spikes.size());
        CHECK(rate >= prev_rate);
        prev_rate = rate;
    }
    CHECK(prev_rate > 0.0); // the largest drive certainly fires
}

TEST_CASE("state norms are non-increasing with zero input") {
    LIFState state(3);
    state.v = {0.9, 0.5, 0.2};
    state.i = {0.3, 0.1, 0.0};
    double prev = 0.0;
    for (double v : state.v) prev += v * v;
    for (double i : state.i) prev += i * i;
    for (int t = 0; t < 200; ++t) {
        lif_step(state, Vec(3, 0.0), kParams);
        double now = 0.0;
        for (double v : state.v) now += v * v;
        for (double i : state.i) now += i * i;
        CHECK(now <= prev + 1e-12);
        prev = now;
    }
}

TEST_CASE("forward is reproducible and matches the step-by-step path") {
    std::vector<Vec> inputs;
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        Vec u(5);
        for (double &v : u) v = rng.uniform(-0.5, 1.5);
        inputs.push_back(u);
    }
    const std::vector<Vec> a = lif_forward(inputs, kParams, nullptr);
    const std::vector<Vec> b = lif_forward(inputs, kParams, nullptr);
    CHECK(a == b);

    LIFState state(5);
    for (int t = 0; t < 20; ++t) CHECK(lif_step(state, inputs[t], kParams) == a[t]);
}

TEST_CASE("single-step backward scales the spike path by the surrogate") {
    LIFTape tape;
    std::vector<Vec> inputs{Vec(1, 0.3)}; // sub-threshold
    lif_forward(inputs, kParams, &tape);
    REQUIRE(tape.spikes[0][0] == 0.0);
    const std::vector<Vec> gin = lif_backward(tape, {Vec(1, 1.0)}, kParams);
    // T=1: d(spike)/d(input) = surrogate(v) * (1 - beta_v)
    const double expected = surrogate_grad(tape.v_pre[0][0], kParams.v_th) *
                            (1.0 - kParams.beta_v());
    CHECK(gin[0][0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero output gradient gives zero input gradient") {
    LIFTape tape;
    std::vector<Vec> inputs(10, Vec(3, 0.6));
    lif_forward(inputs, kParams, &tape);
    const std::vector<Vec> gin =
        lif_backward(tape, std::vector<Vec>(10, Vec(3, 0.0)), kParams);
    for (const Vec &g : gin)
        for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("surrogate gradient sign agrees with the smoothed rate derivative") {
    // 1 input spike channel, 1 neuron with weight w; loss = mean firing rate.
    // The surrogate gradient of the rate w.r.t. w should match the sign of a
    // finite difference of the Poisson-averaged rate (majority >= 90%).
    const LIFParams params{0.02, 0.01, 0.01, 1.0, 0.0};
    const int T = 40;
    Rng master(2024);
    int agree = 0, total = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const double w = master.uniform(0.2, 1.2);
        const double p_spike = 0.7;

        auto rate_for = [&](double weight, Rng &rng, int draws) {
            double rate = 0.0;
            for (int d = 0; d < draws; ++d) {
                std::vector<Vec> inputs;
                for (int t = 0; t < T; ++t)
                    inputs.push_back(Vec(1, rng.bernoulli(p_spike) ? weight : 0.0));
                const std::vector<Vec> spikes = lif_forward(inputs, params, nullptr);
                for (const Vec &s : spikes) rate += s[0];
            }
            return rate / (draws * T);
        };

        // surrogate gradient on one fixed draw
        Rng enc(900 + trial);
        std::vector<Vec> fixed;
        std::vector<double> raw;
        for (int t = 0; t < T; ++t) {
            raw.push_back(enc.bernoulli(p_spike) ? 1.0 : 0.0);
            fixed.push_back(Vec(1, raw.back() * w));
        }
        LIFTape tape;
        lif_forward(fixed, params, &tape);
        const std::vector<Vec> gmean(T, Vec(1, 1.0 / T));
        const std::vector<Vec> gin = lif_backward(tape, gmean, params);
        double gw = 0.0;
        for (int t = 0; t < T; ++t) gw += gin[t][0] * raw[t];

        Rng fd_rng(300 + trial);
        Rng fd_rng2(300 + trial); // same stream: common random numbers
        const double up = rate_for(w + 0.15, fd_rng, 400);
        const double down = rate_for(w - 0.15, fd_rng2, 400);
        const double fd = up - down;
        if (std::abs(fd) < 1e-9 || std::abs(gw) < 1e-12) continue;
        ++total;
        if ((fd > 0) == (gw > 0)) ++agree;
    }
    REQUIRE(total >= 10);
    CHECK(static_cast<double>(agree) / total >= 0.9);
}

TEST_CASE("mean pool") {
    SUBCASE("constant sequence") {
        const Vec pooled = mean_pool(std::vector<Vec>(7, Vec{0.25, 0.5}));
        CHECK(pooled == Vec{0.25, 0.5});
    }
    SUBCASE("binary spikes give rates in [0,1]") {
        std::vector<Vec> seq{{0.0, 1.0}, {1.0, 1.0}};
        const Vec pooled = mean_pool(seq);
        CHECK(pooled == Vec{0.5, 1.0});
    }
    SUBCASE("backward splits evenly") {
        const std::vector<Vec> g = mean_pool_backward({1.0, 2.0}, 4);
        REQUIRE(g.size() == 4);
        for (const Vec &row : g) {
            CHECK(row[0] == doctest::Approx(0.25));
            CHECK(row[1] == doctest::Approx(0.5));
        }
    }
}

TEST_CASE("pooled spiking outputs stay in [0,1]") {
    Rng rng(55);
    const LIFParams params{0.02, 0.01, 0.05, 1.0, 0.0};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec> inputs;
        const int T = 1 + static_cast<int>(rng.uniform_int(30));
        for (int t = 0; t < T; ++t) {
            Vec u(6);
            for (double &v : u) v = rng.uniform(-2.0, 4.0);
            inputs.push_back(u);
        }
        const Vec pooled = mean_pool(lif_forward(inputs, params, nullptr));
        for (double v : pooled) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}
