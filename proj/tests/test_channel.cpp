#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

#include "risuav/channel.hpp"
#include "risuav/random.hpp"
#include "support.hpp"

using namespace risuav;
using test::random_point;
using test::uniform;

namespace {

constexpr double pi = std::numbers::pi;

ChannelParams params(int m, double varpi = 0.0) {
    ChannelParams cp;
    cp.m_elements = m;
    cp.varpi = varpi;
    return cp;
}

// Principal-value difference of two angles.
double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * pi)); }

// Geometry with the UAV well above both ground ends.
void random_geometry(std::mt19937_64& rng, Vec3& bs, Vec3& uav, Vec3& mt) {
    bs = {uniform(rng, 0, 500), uniform(rng, 0, 500), uniform(rng, 0, 60)};
    uav = {uniform(rng, 0, 500), uniform(rng, 0, 500), uniform(rng, 35, 130)};
    mt = {uniform(rng, 0, 500), uniform(rng, 0, 500), 0.0};
}

}  // namespace

TEST(SteeringVector, SingleElement) {
    const ChannelParams cp = params(1);
    const auto g = bs_ris_gain({0, 0, 0}, {30, 0, 40}, cp);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_DOUBLE_EQ(g[0].real(), std::sqrt(10.0 * std::pow(50.0, -2.5)));
    EXPECT_EQ(g[0].imag(), 0.0);
}

TEST(SteeringVector, VerticalLinkHasNoProgression) {
    const ChannelParams cp = params(8);
    for (const auto& g : {bs_ris_gain({5, 5, 0}, {5, 5, 80}, cp), ris_mt_gain({5, 5, 80}, {5, 5, 0}, cp)})
        for (const Complex& e : g) EXPECT_EQ(e, g[0]);
}

TEST(SteeringVector, HalfWavelengthProgression) {
    const ChannelParams cp = params(4);  // d = lambda / 2
    // horizontal 1, slant 2: cosine 0.5
    const Vec3 a{0, 0, 0}, b{1, 0, std::sqrt(3.0)};
    ASSERT_NEAR(aoa_cosine(a, b), 0.5, 1e-15);
    const double expected[] = {0, -pi / 2, -pi, -3 * pi / 2};
    const auto g1 = bs_ris_gain(a, b, cp);
    const auto g2 = ris_mt_gain(b, a, cp);
    const double amp = std::sqrt(10.0 * std::pow(2.0, -2.5));
    for (std::size_t m = 0; m < 4; ++m) {
        EXPECT_NEAR(std::abs(g1[m]), amp, 1e-15);
        EXPECT_LT(angle_gap(std::arg(g1[m]), expected[m]), 1e-12) << m;
        EXPECT_LT(angle_gap(std::arg(g2[m]), expected[m]), 1e-12) << m;
    }
}

TEST(SteeringVector, CoincidentPointsThrow) {
    EXPECT_THROW(bs_ris_gain({1, 1, 1}, {1, 1, 1}, params(4)), GeometryError);
    EXPECT_THROW(ris_mt_gain({1, 1, 1}, {1, 1, 1}, params(4)), GeometryError);
}

TEST(OptimalPhases, Examples) {
    for (double varpi : {0.0, 1.3, 6.0}) {
        const auto ph = optimal_phases(0.4, 0.4, params(5, varpi));
        for (double p : ph) EXPECT_DOUBLE_EQ(p, varpi);
    }
    const auto ph = optimal_phases(0.7, 0.2, params(3));
    EXPECT_NEAR(ph[0], 0.0, 1e-15);
    EXPECT_NEAR(ph[1], pi / 2, 1e-12);
    EXPECT_NEAR(ph[2], pi, 1e-12);
}

TEST(OptimalPhases, WrappedIntoRange) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        const auto ph = optimal_phases(uniform(rng, 0, 1), uniform(rng, 0, 1), params(64, uniform(rng, 0, 2 * pi)));
        for (double p : ph) {
            EXPECT_GE(p, 0.0);
            EXPECT_LT(p, 2 * pi);
        }
    }
}

TEST(CascadedGain, SingleElement) {
    const std::vector<Complex> a{{1.5, -0.5}}, b{{0.25, 2.0}};
    const std::vector<double> ph{0.0};
    const Complex expected = std::conj(b[0]) * a[0];
    EXPECT_EQ(cascaded_gain(a, b, ph), expected);
    EXPECT_THROW(cascaded_gain(a, b, std::vector<double>{0, 0}), std::invalid_argument);
}

TEST(CascadedGain, CoherentCombiningIdentity) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
        Vec3 bs, uav, mt;
        random_geometry(rng, bs, uav, mt);
        const int m = std::array{1, 4, 16, 64}[i % 4];
        const ChannelParams cp = params(m, uniform(rng, 0, 2 * pi));
        const double d1 = distance(bs, uav), d2 = distance(uav, mt);
        const double closed = m * cp.rho * std::pow(d1 * d2, -cp.gamma / 2);
        const auto ph = optimal_phases(aoa_cosine(bs, uav), aod_cosine(uav, mt), cp);
        const double got = std::abs(cascaded_gain(bs_ris_gain(bs, uav, cp), ris_mt_gain(uav, mt, cp), ph));
        EXPECT_NEAR(got / closed, 1.0, 1e-9) << i;
    }
}

TEST(CascadedGain, MagnitudeInvariantUnderVarpi) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 200; ++i) {
        Vec3 bs, uav, mt;
        random_geometry(rng, bs, uav, mt);
        double ref = -1;
        for (double varpi : {0.0, 0.7, 3.1, 5.9}) {
            const ChannelParams cp = params(16, varpi);
            const auto ph = optimal_phases(aoa_cosine(bs, uav), aod_cosine(uav, mt), cp);
            const double mag = std::abs(cascaded_gain(bs_ris_gain(bs, uav, cp), ris_mt_gain(uav, mt, cp), ph));
            if (ref < 0) ref = mag;
            EXPECT_NEAR(mag / ref, 1.0, 1e-12);
        }
    }
}

TEST(CascadedGain, RandomPhasesNeverBeatOptimal) {
    std::mt19937_64 rng(31);
    Vec3 bs, uav, mt;
    random_geometry(rng, bs, uav, mt);
    const ChannelParams cp = params(16);
    const auto g1 = bs_ris_gain(bs, uav, cp), g2 = ris_mt_gain(uav, mt, cp);
    const double best = std::abs(cascaded_gain(g1, g2, optimal_phases(aoa_cosine(bs, uav), aod_cosine(uav, mt), cp)));
    // Triangle inequality bound: sum of element magnitudes.
    double bound = 0;
    for (std::size_t m = 0; m < g1.size(); ++m) bound += std::abs(g1[m]) * std::abs(g2[m]);
    EXPECT_NEAR(best, bound, 1e-9 * bound);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> ph(16);
        for (double& p : ph) p = uniform(rng, 0, 2 * pi);
        EXPECT_LE(std::abs(cascaded_gain(g1, g2, ph)), best * (1 + 1e-12));
    }
}

TEST(DirectGain, DeterministicForSeed) {
    const ChannelParams cp = params(1);
    Rng a = make_rng(7, Stream::direct_link, 3), b = make_rng(7, Stream::direct_link, 3);
    EXPECT_EQ(direct_gain({0, 0, 10}, {100, 0, 0}, cp, a), direct_gain({0, 0, 10}, {100, 0, 0}, cp, b));
}

TEST(DirectGain, UnitVarianceScatter) {
    Rng rng(99);
    double power = 0;
    Complex mean{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Complex g = cscg_sample(rng);
        power += std::norm(g);
        mean += g;
    }
    EXPECT_NEAR(power / n, 1.0, 0.02);
    EXPECT_LT(std::abs(mean / static_cast<double>(n)), 0.01);
}

TEST(DirectGain, PathLossLaw) {
    ChannelParams cp = params(1);
    cp.gamma = 2.0;
    // Same scatter draw at distances 50 and 100: power ratio is exactly 1/4.
    Rng a(5), b(5);
    const Complex near = direct_gain({0, 0, 0}, {50, 0, 0}, cp, a);
    const Complex far = direct_gain({0, 0, 0}, {100, 0, 0}, cp, b);
    EXPECT_NEAR(std::norm(far) / std::norm(near), 0.25, 1e-12);
    // Expected power over many draws tracks rho * d^-gamma.
    Rng rng(6);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) sum += std::norm(direct_gain({0, 0, 0}, {100, 0, 0}, cp, rng));
    EXPECT_NEAR(sum / 100000 / (cp.rho * 1e-4), 1.0, 0.02);
}

TEST(Snr, Examples) {
    const ChannelParams cp = params(4);
    EXPECT_EQ(snr({}, {}, cp), 0.0);
    const Complex c{std::sqrt(cp.noise_w / cp.p_bs_w), 0.0};
    EXPECT_NEAR(snr({}, c, cp), 1.0, 1e-12);
    const Complex g{3e-6, -1e-6};
    EXPECT_EQ(snr(-g, g, cp), 0.0);
}

TEST(Snr, InvariantUnderCommonRotation) {
    std::mt19937_64 rng(37);
    const ChannelParams cp = params(4);
    for (int i = 0; i < 1000; ++i) {
        const Complex d{uniform(rng, -1e-5, 1e-5), uniform(rng, -1e-5, 1e-5)};
        const Complex c{uniform(rng, -1e-5, 1e-5), uniform(rng, -1e-5, 1e-5)};
        const Complex r = std::polar(1.0, uniform(rng, 0, 2 * pi));
        const double base = snr(d, c, cp);
        EXPECT_NEAR(snr(d * r, c * r, cp), base, 1e-9 * base);
    }
}

TEST(Rate, Examples) {
    EXPECT_EQ(rate(0), 0.0);
    EXPECT_DOUBLE_EQ(rate(1), 1.0);
    EXPECT_DOUBLE_EQ(rate(3), 2.0);
    EXPECT_THROW(rate(-0.1), std::invalid_argument);
}

TEST(Rate, StrictlyIncreasing) {
    double prev = rate(0);
    for (double s = 0.01; s < 1e6; s *= 1.7) {
        EXPECT_GT(rate(s), prev);
        prev = rate(s);
    }
}

TEST(SlotCost, Examples) {
    EXPECT_DOUBLE_EQ(slot_cost({0, 0, 0}, {100, 0, 0}, {200, 0, 0}), 1e4);
    EXPECT_THROW(slot_cost({0, 0, 0}, {0, 0, 0}, {1, 0, 0}), GeometryError);
}

TEST(SlotCost, BaselineGrid) {
    // On the baseline the product is x (200 - x): largest at the midpoint, falling toward both ends.
    double best = std::numeric_limits<double>::infinity();
    double best_x = -1;
    for (int i = 1; i < 200; ++i) {
        const double x = i;
        const double c = slot_cost({0, 0, 0}, {x, 0, 0}, {200, 0, 0});
        EXPECT_NEAR(c, x * (200 - x), 1e-9);
        if (i != 100) {
            EXPECT_LT(c, 1e4);
        }
        if (c < best) {
            best = c;
            best_x = x;
        }
    }
    EXPECT_TRUE(best_x == 1 || best_x == 199);
}

TEST(SlotCost, HomogeneousOfDegreeTwo) {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 a = random_point(rng, -100, 100), b = random_point(rng, -100, 100), c = random_point(rng, -100, 100);
        const double s = uniform(rng, 0.1, 10);
        EXPECT_NEAR(slot_cost(a * s, b * s, c * s), s * s * slot_cost(a, b, c), 1e-9 * s * s * slot_cost(a, b, c));
    }
}

TEST(SlotCost, RankAgreesWithCoherentGain) {
    std::mt19937_64 rng(43);
    const ChannelParams cp = params(16);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 bs{0, 0, 25}, mt{uniform(rng, 100, 400), uniform(rng, 100, 400), 0};
        std::vector<Vec3> uavs;
        for (int i = 0; i < 30; ++i) uavs.push_back({uniform(rng, 0, 400), uniform(rng, 0, 400), uniform(rng, 35, 130)});
        std::vector<std::size_t> by_cost(uavs.size()), by_gain(uavs.size());
        std::iota(by_cost.begin(), by_cost.end(), 0);
        std::iota(by_gain.begin(), by_gain.end(), 0);
        std::sort(by_cost.begin(), by_cost.end(),
                  [&](auto i, auto j) { return slot_cost(bs, uavs[i], mt) < slot_cost(bs, uavs[j], mt); });
        auto gain = [&](const Vec3& u) {
            const auto ph = optimal_phases(aoa_cosine(bs, u), aod_cosine(u, mt), cp);
            return std::abs(cascaded_gain(bs_ris_gain(bs, u, cp), ris_mt_gain(u, mt, cp), ph));
        };
        std::sort(by_gain.begin(), by_gain.end(), [&](auto i, auto j) { return gain(uavs[i]) > gain(uavs[j]); });
        EXPECT_EQ(by_cost, by_gain);
    }
}

TEST(RisLink, NoDirectLinkMatchesClosedForm) {
    std::mt19937_64 rng(47);
    const ChannelParams cp = params(16);
    for (int i = 0; i < 200; ++i) {
        Vec3 bs, uav, mt;
        random_geometry(rng, bs, uav, mt);
        const RisLink link = evaluate_ris_link(bs, uav, mt, cp);
        const double d1 = distance(bs, uav), d2 = distance(uav, mt);
        const double expected = cp.p_bs_w * 16 * 16 * cp.rho * cp.rho * std::pow(d1 * d2, -cp.gamma) / cp.noise_w;
        EXPECT_NEAR(link.sample.snr / expected, 1.0, 1e-9);
        EXPECT_NEAR(coherent_snr(bs, uav, mt, cp) / expected, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(link.sample.rate, std::log2(1 + link.sample.snr));
    }
}

TEST(Units, Conversions) {
    EXPECT_DOUBLE_EQ(dbm_to_watt(30), 1.0);
    EXPECT_NEAR(dbm_to_watt(-80), 1e-11, 1e-25);
    EXPECT_DOUBLE_EQ(db_to_linear(10), 10.0);
}
