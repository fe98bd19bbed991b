#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rmwg/dynamics.hpp"

namespace rmwg {

inline constexpr double kDefaultLowPassMHz = 6.0;
inline constexpr double kDefaultTransitionMHz = 2.0;

// Zero-phase windowed-sinc (Hamming) low-pass on a uniform grid. Near the
// edges the kernel is truncated and renormalized to unit DC gain.
std::vector<double> lowpass_filter(const std::vector<double>& t, const std::vector<double>& x, double cutoff_MHz,
                                   double transition_MHz = kDefaultTransitionMHz);

// Mix with sin(2pi 1e-3 f t), low-pass, integrate (trapezoid) and divide by
// the duration. The whole chain is linear, so it is folded into one weight
// vector at construction and apply() is a dot product.
class Demodulator {
public:
    Demodulator(const std::vector<double>& t, double f_rabi_MHz, double cutoff_MHz = kDefaultLowPassMHz,
                double transition_MHz = kDefaultTransitionMHz);

    double apply(const std::vector<double>& x) const;  // |sum w_j x_j|
    double signed_apply(const std::vector<double>& x) const;
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

// Projection onto the IQ axis with the largest variance.
std::vector<double> best_quadrature(const std::vector<cplx>& x);

struct DemodOptions {
    double cutoff_MHz = kDefaultLowPassMHz;
    double transition_MHz = kDefaultTransitionMHz;
    double display_prefilter_MHz = 0.0;  // > 0 applies a presentation low-pass first
};

double demodulate_amplitude(const std::vector<double>& t, const std::vector<double>& x, double f_rabi_MHz,
                            const DemodOptions& options = {});
double demodulate_amplitude(const TimeTrace& trace, const std::string& channel, double f_rabi_MHz,
                            const DemodOptions& options = {});

struct AmplitudeEstimate {
    double mean = 0.0;
    double std = 0.0;
};

// Resamples time points with replacement, fills the original grid from the
// nearest drawn sample and demodulates each copy. Resample i uses a generator
// seeded by (seed, i).
AmplitudeEstimate bootstrap_amplitude(const std::vector<double>& t, const std::vector<double>& x, double f_rabi_MHz,
                                      int n, std::uint64_t seed, int threads = 1, const DemodOptions& options = {});

// s_<state><port>: amplitude of the left/right edge state measured on port L/R.
struct SignalAmplitudes {
    double s_lL = 0.0, s_lR = 0.0, s_rL = 0.0, s_rR = 0.0;
    std::array<double, 4> stds{};  // same order

    std::array<double, 4> values() const { return {s_lL, s_lR, s_rL, s_rR}; }
};

struct ChiEstimate {
    double chi_l = 0.0;
    double chi_r = 0.0;
    double chi = 0.0;
    double chi_dB = 0.0;
    double fidelity = 0.0;
    double chi_std = 0.0;  // first-order propagation of the amplitude stds
    bool infinite = false;
};

// chi_l = s_lL / s_lR, chi_r = s_rR / s_rL, chi = sqrt(chi_l chi_r). Port gains
// multiply s_lL and s_rL (or s_lR and s_rR) alike and cancel in the product.
ChiEstimate chi_estimate(const SignalAmplitudes& amps);

}  // namespace rmwg
