#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nsaf/adaptive.hpp"
#include "nsaf/decomposer.hpp"
#include "nsaf/signal_lab.hpp"
#include "nsaf/theory.hpp"
#include "oracles.hpp"

using namespace nsaf;
namespace th = nsaf::theory;

namespace {

th::SubbandStats stats(std::vector<double> s, double v, double q, std::size_t m) {
    th::SubbandStats st;
    st.sigma_u2 = std::move(s);
    st.sigma_eta2_subband = v;
    st.sigma_q2 = q;
    st.taps = m;
    return st;
}

oracle::Stats as_oracle(const th::SubbandStats& st) {
    return {st.sigma_u2, st.sigma_eta2_subband, st.sigma_q2, static_cast<double>(st.taps)};
}

th::SubbandStats random_stats(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> var(0.05, 2.0);
    std::uniform_int_distribution<int> subbands(1, 8);
    std::uniform_int_distribution<int> taps(8, 64);
    std::vector<double> s(static_cast<std::size_t>(subbands(gen)));
    for (auto& x : s) x = var(gen);
    return stats(s, 0.01 * var(gen), 1e-3 * var(gen), static_cast<std::size_t>(taps(gen)));
}

}  // namespace

TEST_CASE("SubbandStats validation") {
    CHECK_THROWS_AS(stats({}, 0.0, 0.0, 4).validate(), std::invalid_argument);
    CHECK_THROWS_AS(stats({1.0}, 0.0, 0.0, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(stats({-1.0}, 0.0, 0.0, 4).validate(), std::invalid_argument);
    CHECK_THROWS_AS(stats({1.0}, -1.0, 0.0, 4).validate(), std::invalid_argument);
    CHECK_THROWS_AS(stats({1.0}, 0.0, NAN, 4).validate(), std::invalid_argument);
    CHECK_NOTHROW(stats({1.0, 2.0}, 0.1, 0.0, 4).validate());
}

TEST_CASE("hbar") {
    const auto st = stats({1.0}, 0.0, 0.0, 2);
    for (double mu : {0.0, 0.25, 0.5, 1.0, 1.7})
        CHECK(th::hbar(st, {mu, 0.0}) == doctest::Approx(1.0 - mu + mu * mu).epsilon(1e-15));
    CHECK(th::optimal_step_convergence(st, 0.0) == doctest::Approx(0.5));

    std::mt19937_64 gen(1);
    for (int t = 0; t < 50; ++t) CHECK(th::hbar(random_stats(gen), {0.0, 0.3}) == 1.0);

    CHECK_THROWS_AS(th::hbar(stats({0.0}, 0.0, 0.0, 4), {1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(th::hbar(st, {1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("phi") {
    const auto st = stats({1.0}, 1.0, 0.0, 2);
    for (double mu : {0.0, 0.3, 1.0, 2.0}) CHECK(th::phi(st, {mu, 0.0}) == doctest::Approx(mu * mu / 2.0));
    CHECK(th::phi(stats({1.0, 0.4}, 0.3, 0.0, 8), {0.0, 0.1}) == 0.0);
    for (double mu : {0.0, 0.5, 1.0, 3.0}) CHECK(th::phi(stats({1.0, 0.4}, 0.0, 0.0, 8), {mu, 0.1}) == 0.0);
}

TEST_CASE("hbar and phi agree with the reference formulas") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> mu(0.0, 2.0);
    std::uniform_real_distribution<double> delta(0.0, 5.0);
    for (int t = 0; t < 100; ++t) {
        const auto st = random_stats(gen);
        const double m = mu(gen);
        const double d = delta(gen);
        CHECK(th::hbar(st, {m, d}) == doctest::Approx(oracle::hbar(as_oracle(st), m, d)).epsilon(1e-13));
        CHECK(th::phi(st, {m, d}) == doctest::Approx(oracle::phi(as_oracle(st), m, d)).epsilon(1e-13));
    }
}

TEST_CASE("hbar and phi are exactly quadratic in mu") {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 50; ++t) {
        const auto st = random_stats(gen);
        for (auto f : {+[](const th::SubbandStats& s, double mu) { return th::hbar(s, {mu, 0.2}); },
                       +[](const th::SubbandStats& s, double mu) { return th::phi(s, {mu, 0.2}); }}) {
            const double x0 = 0.0, x1 = 0.7, x2 = 1.5, x3 = 2.3;
            const double y0 = f(st, x0), y1 = f(st, x1), y2 = f(st, x2);
            const double l0 = (x3 - x1) * (x3 - x2) / ((x0 - x1) * (x0 - x2));
            const double l1 = (x3 - x0) * (x3 - x2) / ((x1 - x0) * (x1 - x2));
            const double l2 = (x3 - x0) * (x3 - x1) / ((x2 - x0) * (x2 - x1));
            const double predicted = y0 * l0 + y1 * l1 + y2 * l2;
            CHECK(std::abs(predicted - f(st, x3)) <= 1e-12 * std::max(1.0, std::abs(predicted)));
        }
    }
}

TEST_CASE("msd_recursion") {
    const auto still = stats({0.5, 0.2}, 0.1, 0.0, 8);
    const auto flat = th::msd_recursion(still, {0.0, 0.1}, 0.7, 20);
    REQUIRE(flat.values.size() == 21);
    for (double v : flat.values) CHECK(v == 0.7);

    const auto st = stats({0.5, 0.2, 0.9}, 0.02, 1e-5, 16);
    const th::StepParams p{0.6, 0.3};
    const double h = th::hbar(st, p);
    REQUIRE(std::abs(h) < 1.0);
    const double fixed_point = th::phi(st, p) / (1.0 - h);
    const auto traj = th::msd_recursion(st, p, 1.0, 5000);
    CHECK(traj.values.front() == 1.0);
    CHECK(std::abs(traj.values.back() - fixed_point) <= 1e-9);
    for (std::size_t k = 1; k < traj.values.size(); ++k)
        CHECK(traj.values[k] == doctest::Approx(h * traj.values[k - 1] + th::phi(st, p)).epsilon(1e-14));

    CHECK_THROWS_AS(th::msd_recursion(st, p, -1.0, 3), std::invalid_argument);
    CHECK(th::msd_recursion(st, p, 1.0, 0).values.size() == 1);
}

TEST_CASE("optimal convergence step") {
    for (std::size_t m : {2u, 8u, 64u, 512u}) {
        for (std::size_t n : {1u, 3u, 8u}) {
            const auto st = stats(std::vector<double>(n, 0.8), 0.01, 0.0, m);
            CHECK(std::abs(th::optimal_step_convergence(st, 0.0) - m / (m + 2.0)) <= 1e-12);
        }
    }
    CHECK(th::optimal_step_convergence(stats({1.0, 0.01}, 0.0, 0.0, 100000), 0.0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS(th::optimal_step_convergence(stats({0.0}, 0.0, 0.0, 4), 1.0), std::domain_error);
}

TEST_CASE("optimal steps are the argmins found by grid search over (0, 4)") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> delta(0.0, 3.0);
    const double step = 1e-4;
    for (int t = 0; t < 100; ++t) {
        const auto st = random_stats(gen);
        const double d = delta(gen);
        const auto o = as_oracle(st);
        const double con = oracle::grid_argmin([&](double mu) { return oracle::hbar(o, mu, d); }, step, 4.0, step);
        const double mis = oracle::grid_argmin([&](double mu) { return oracle::phi(o, mu, d); }, step, 4.0, step);
        CHECK(std::abs(th::optimal_step_convergence(st, d) - con) <= step);
        CHECK(std::abs(th::optimal_step_misadjustment(st, d) - mis) <= step);
    }
}

TEST_CASE("optimal misadjustment step limits") {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 20; ++t) {
        auto st = random_stats(gen);
        st.sigma_q2 = 0.0;
        CHECK(std::abs(th::optimal_step_misadjustment(st, 0.5)) <= 1e-12);
        st.sigma_q2 = 1e-3;
        st.sigma_eta2_subband = 0.0;
        CHECK(th::optimal_step_misadjustment(st, 0.5) ==
              doctest::Approx(th::optimal_step_convergence(st, 0.5)).epsilon(1e-12));
    }
}

TEST_CASE("stability range") {
    const auto two = th::stability_range(stats({1.0, 1.0}, 0.0, 0.0, 2), 0.0);
    CHECK(two.lower == 0.0);
    CHECK(two.upper == doctest::Approx(1.0).epsilon(1e-15));
    const auto wide = th::stability_range(stats({1.0}, 0.0, 0.0, 100000), 0.0);
    CHECK(wide.upper == doctest::Approx(2.0).epsilon(1e-4));
    CHECK_FALSE(wide.contains(0.0));
    CHECK(wide.contains(1.0));

    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> frac(0.0, 1.3);
    std::uniform_real_distribution<double> delta(0.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        const auto st = random_stats(gen);
        const double d = delta(gen);
        const auto range = th::stability_range(st, d);
        CHECK(range.upper == doctest::Approx(2.0 * th::optimal_step_convergence(st, d)).epsilon(1e-15));
        for (int s = 0; s < 10; ++s) {
            const double mu = frac(gen) * range.upper;
            if (std::abs(mu - range.upper) < 1e-9 * range.upper || mu < 1e-9) continue;
            CHECK((std::abs(th::hbar(st, {mu, d})) < 1.0) == range.contains(mu));
        }
        CHECK(std::abs(th::hbar(st, {1.01 * range.upper, d})) >= 1.0);
    }
}

TEST_CASE("step size and regularization move hbar in opposite directions") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    const double h = 1e-6;
    for (int t = 0; t < 100; ++t) {
        const auto st = random_stats(gen);
        const double d = 0.5;
        const double mu = frac(gen) * th::optimal_step_convergence(st, d);
        const double dmu = (th::hbar(st, {mu + h, d}) - th::hbar(st, {mu - h, d})) / (2 * h);
        CHECK(dmu < 0.0);
        const double ddelta = (th::hbar(st, {mu, d + h}) - th::hbar(st, {mu, d - h})) / (2 * h);
        CHECK(ddelta > 0.0);
        auto noise_only = st;
        noise_only.sigma_q2 = 0.0;
        const double dphi = (th::phi(noise_only, {mu, d + h}) - th::phi(noise_only, {mu, d - h})) / (2 * h);
        CHECK(dphi < 0.0);
    }
}

TEST_CASE("beta") {
    const auto quiet = stats({0.3, 1.2, 0.8}, 0.0, 1e-3, 30);
    for (double msd : {1e-6, 0.1, 1.0})
        CHECK(std::abs(th::beta(quiet, msd) - (1.0 - 3.0 / 32.0)) <= 1e-15);

    double prev = 0.0;
    for (double v : {1e-3, 1.0, 1e3, 1e9}) {
        const double b = th::beta(stats({0.3, 1.2}, v, 0.0, 30), 0.5);
        CHECK(b < 1.0);
        CHECK(b > prev);
        prev = b;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-8));

    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> msd(0.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const auto st = random_stats(gen);
        const double b = th::beta(st, msd(gen));
        CHECK(b >= 1.0 - static_cast<double>(st.num_subbands()) / (st.taps + 2.0) - 1e-15);
        CHECK(b < 1.0);
    }
    CHECK_THROWS_AS(th::beta(quiet, -1.0), std::invalid_argument);
}

TEST_CASE("josr_msd_recursion without noise contracts geometrically") {
    const auto st = stats({0.5, 0.7}, 0.0, 0.0, 10);
    const auto traj = th::josr_msd_recursion(st, 2.0, 30);
    REQUIRE(traj.values.size() == 31);
    for (std::size_t k = 0; k < traj.values.size(); ++k)
        CHECK(traj.values[k] == doctest::Approx(2.0 * std::pow(1.0 - 2.0 / 12.0, k)).epsilon(1e-12));
}

TEST_CASE("sigma_q stability bound") {
    CHECK(th::sigma_q_stability_bound(0.9, 0.9, 10, 2.0, 1) == doctest::Approx(0.1 / 9.0 * 2.0));
    double prev = INFINITY;
    for (std::size_t k = 1; k < 20; ++k) {
        const double b = th::sigma_q_stability_bound(0.95, 0.97, 16, 1.0, k);
        CHECK(b < prev);
        prev = b;
    }
    prev = INFINITY;
    for (double beta : {0.1, 0.3, 0.6, 0.9, 0.99}) {
        const double b = th::sigma_q_stability_bound(beta, 0.97, 16, 1.0, 5);
        CHECK(b < prev);
        prev = b;
    }
    CHECK_THROWS_AS(th::sigma_q_stability_bound(0.9, 0.9, 10, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(th::sigma_q_stability_bound(0.0, 0.9, 10, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(th::sigma_q_stability_bound(1.1, 0.9, 10, 1.0, 1), std::invalid_argument);
}

TEST_CASE("steady-state bound") {
    CHECK(th::steady_state_bound(0.0, 512, 0.99) == 0.0);
    CHECK(th::steady_state_bound(1.0, 2, 0.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(th::steady_state_bound(1.0, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(th::steady_state_bound(1.0, 2, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(th::steady_state_bound(-1.0, 2, 0.5), std::invalid_argument);
}

TEST_CASE("JOSR under random-walk drift stays below the steady-state bound") {
    const std::size_t n = 4;
    const std::size_t m = 16;
    const double sigma_q2 = 1e-6;
    const double noise = 1e-3;
    const auto bank = make_default_bank(n, 4);
    std::mt19937_64 gen(10);
    std::normal_distribution<double> nd;

    double tail_msd = 0.0;
    std::size_t tail_count = 0;
    double beta_max = 0.0;
    for (int run = 0; run < 4; ++run) {
        SubbandDecomposer dec(bank, m);
        Josr filter(m, n, noise);
        const EchoPath path = make_echo_path(m, 0.1, RngSeed{static_cast<std::uint64_t>(run + 1)});
        std::vector<double> w_o(path.taps().begin(), path.taps().end());
        std::vector<double> history(m, 0.0);
        SubbandFrame frame;
        StepReport report;
        const std::size_t iterations = 20000;
        for (std::size_t s = 0; s < iterations * n; ++s) {
            history.pop_back();
            history.insert(history.begin(), nd(gen));
            double d = std::sqrt(noise) * nd(gen);
            for (std::size_t j = 0; j < m; ++j) d += w_o[j] * history[j];
            if (!dec.push_samples(history.front(), d, frame)) continue;
            filter.step(frame, report);
            for (auto& w : w_o) w += std::sqrt(sigma_q2) * nd(gen);
            const std::size_t k = dec.frames_emitted();
            if (k > 100) beta_max = std::max(beta_max, *report.contraction);
            if (k > iterations / 2) {
                double dev = 0.0;
                for (std::size_t j = 0; j < m; ++j) dev += (w_o[j] - filter.weights()[j]) * (w_o[j] - filter.weights()[j]);
                tail_msd += dev;
                ++tail_count;
            }
        }
    }
    const double msd = tail_msd / static_cast<double>(tail_count);
    const double bound = th::steady_state_bound(sigma_q2, m, beta_max);
    CAPTURE(msd);
    CAPTURE(bound);
    CAPTURE(beta_max);
    CHECK(msd < bound);
}

TEST_CASE("subband variances for white input are the channel energies") {
    const auto bank = make_default_bank(4, 4);
    const auto v = th::subband_variances(bank, [](std::size_t lag) { return lag == 0 ? 2.0 : 0.0; });
    REQUIRE(v.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(v[i] == doctest::Approx(2.0 * bank.energy(i)).epsilon(1e-12));
    double total = 0.0;
    for (double x : v) total += x;
    CHECK(total == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("subband variances for AR(1) input match a direct double sum") {
    const auto bank = make_default_bank(2, 2);
    auto r = [](std::size_t lag) { return std::pow(0.9, static_cast<double>(lag)); };
    const auto v = th::subband_variances(bank, r);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto h = bank.filter(i);
        double expect = 0.0;
        for (std::size_t a = 0; a < h.size(); ++a)
            for (std::size_t b = 0; b < h.size(); ++b) expect += h[a] * h[b] * r(a > b ? a - b : b - a);
        CHECK(v[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}
