#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "risuav/geometry.hpp"

namespace risuav {

using Complex = std::complex<double>;

/// Link budget in linear units. Built once from the dB-valued scenario fields.
struct ChannelParams {
    double p_bs_w = 1.0;      // BS transmit power [W]
    double noise_w = 1e-11;   // noise variance [W]
    double rho = 10.0;        // reference path gain (linear)
    double gamma = 2.5;       // path-loss exponent
    double lambda_m = 1e-2;   // carrier wavelength [m]
    double d_m = 5e-3;        // element spacing [m]
    int m_elements = 16;
    double snr_min = 1.0;     // linear
    double varpi = 0.0;       // global phase offset [rad]
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

using SteeringVector = std::vector<Complex>;
using PhaseVector = std::vector<double>;

/// Per-slot channel evaluation.
struct LinkSample {
    double snr = 0.0;
    double rate = 0.0;
    double aoa_cos = 0.0;
    double aod_cos = 0.0;
    Complex cascaded_gain{};
    Complex direct_gain{};
};

/// sqrt(rho * dist^-gamma), the free-space amplitude of one hop.
inline double path_amplitude(double dist, const ChannelParams& cp) {
    if (dist == 0.0) throw GeometryError("coincident link endpoints");
    return std::sqrt(cp.rho * std::pow(dist, -cp.gamma));
}

namespace detail {
inline SteeringVector ula_response(double amplitude, double cosine, const ChannelParams& cp) {
    SteeringVector g(static_cast<std::size_t>(cp.m_elements));
    const double step = 2.0 * std::numbers::pi / cp.lambda_m * cp.d_m * cosine;
    for (std::size_t m = 0; m < g.size(); ++m) g[m] = std::polar(amplitude, -step * static_cast<double>(m));
    return g;
}
}  // namespace detail

inline SteeringVector bs_ris_gain(const Vec3& bs, const Vec3& uav, const ChannelParams& cp) {
    const double amp = path_amplitude(distance(bs, uav), cp);
    return detail::ula_response(amp, aoa_cosine(bs, uav), cp);
}

inline SteeringVector ris_mt_gain(const Vec3& uav, const Vec3& mt, const ChannelParams& cp) {
    const double amp = path_amplitude(distance(uav, mt), cp);
    return detail::ula_response(amp, aod_cosine(uav, mt), cp);
}

/// Zero-mean unit-variance circularly symmetric complex Gaussian.
template <class Rng>
Complex cscg_sample(Rng& rng) {
    std::normal_distribution<double> half(0.0, std::sqrt(0.5));
    const double re = half(rng);
    const double im = half(rng);
    return {re, im};
}

/// Rayleigh-faded direct BS-MT gain.
template <class Rng>
Complex direct_gain(const Vec3& bs, const Vec3& mt, const ChannelParams& cp, Rng& rng) {
    const double amp = path_amplitude(distance(bs, mt), cp);
    return amp * cscg_sample(rng);
}

/// Phases that co-phase all reflected paths; wrapped into [0, 2pi).
inline PhaseVector optimal_phases(double aoa_cos, double aod_cos, const ChannelParams& cp) {
    PhaseVector phases(static_cast<std::size_t>(cp.m_elements));
    const double step = 2.0 * std::numbers::pi * cp.d_m / cp.lambda_m * (aoa_cos - aod_cos);
    for (std::size_t m = 0; m < phases.size(); ++m)
        phases[m] = wrap_two_pi(step * static_cast<double>(m) + cp.varpi);
    return phases;
}

/// g_rumt^H * diag(e^{j phases}) * g_bsru
inline Complex cascaded_gain(std::span<const Complex> g_bsru, std::span<const Complex> g_rumt,
                             std::span<const double> phases) {
    if (g_bsru.size() != g_rumt.size() || g_bsru.size() != phases.size())
        throw std::invalid_argument("steering/phase vector length mismatch");
    Complex sum{};
    for (std::size_t m = 0; m < phases.size(); ++m) sum += std::conj(g_rumt[m]) * std::polar(1.0, phases[m]) * g_bsru[m];
    return sum;
}

inline double snr(Complex direct, Complex cascaded, const ChannelParams& cp) {
    return cp.p_bs_w * std::norm(direct + cascaded) / cp.noise_w;
}

inline double rate(double snr_linear) {
    if (snr_linear < 0.0) throw std::invalid_argument("negative SNR");
    return std::log2(1.0 + snr_linear);
}

/// Product of hop lengths; the per-slot refinement objective.
inline double slot_cost(const Vec3& bs, const Vec3& uav, const Vec3& mt) {
    const double d_ru_mt = distance(uav, mt);
    const double d_bs_ru = distance(bs, uav);
    if (d_ru_mt == 0.0 || d_bs_ru == 0.0) throw GeometryError("coincident link endpoints");
    return d_ru_mt * d_bs_ru;
}

/// Full RIS link evaluation with optimal phases applied and a given direct-link sample.
struct RisLink {
    PhaseVector phases;
    LinkSample sample;
};

inline RisLink evaluate_ris_link(const Vec3& bs, const Vec3& uav, const Vec3& mt, const ChannelParams& cp,
                                 Complex direct = {}) {
    RisLink out;
    out.sample.aoa_cos = aoa_cosine(bs, uav);
    out.sample.aod_cos = aod_cosine(uav, mt);
    out.phases = optimal_phases(out.sample.aoa_cos, out.sample.aod_cos, cp);
    out.sample.cascaded_gain = cascaded_gain(bs_ris_gain(bs, uav, cp), ris_mt_gain(uav, mt, cp), out.phases);
    out.sample.direct_gain = direct;
    out.sample.snr = snr(direct, out.sample.cascaded_gain, cp);
    out.sample.rate = rate(out.sample.snr);
    return out;
}

/// SNR of the reflected path alone with optimal phases, in closed form:
/// P * (M rho)^2 (d1 d2)^-gamma / sigma^2. Used for planning-time feasibility.
inline double coherent_snr(const Vec3& bs, const Vec3& uav, const Vec3& mt, const ChannelParams& cp) {
    const double product = slot_cost(bs, uav, mt);
    const double amplitude = cp.m_elements * cp.rho * std::pow(product, -0.5 * cp.gamma);
    return cp.p_bs_w * amplitude * amplitude / cp.noise_w;
}

}  // namespace risuav
