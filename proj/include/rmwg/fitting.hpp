#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rmwg/scattering.hpp"

namespace rmwg {

struct Peak {
    double position = 0.0;   // flux or qubit energy of the slice
    double frequency = 0.0;  // MHz
    double amplitude = 0.0;
};

struct PeakSet {
    std::vector<Peak> peaks;
    std::string source;

    std::size_t size() const { return peaks.size(); }
    std::vector<double> frequencies() const;
};

// Subtracts, row by row (fixed frequency), the running median along the
// qubit/flux axis. Windows are clamped at the edges.
SpectrumMap median_background_subtract(const SpectrumMap& map, int window);

// Local maxima of y(x) with scipy-style topographic prominence >= min_prominence,
// refined by a parabola through the sample and its two neighbours.
PeakSet extract_peaks(const std::vector<double>& x, const std::vector<double>& y, double min_prominence,
                      double position = 0.0);

// Splitting between the two eigenvalues that straddle the qubit energy VQ
// (model frame) of the closed model.
double anticrossing_gap(const ModelParams& params, double VQ);

// Waveguide levels of the closed model with the qubit at VQ_far (model frame):
// all eigenvalues except the one closest to the qubit energy, ascending.
std::vector<double> waveguide_levels(const ModelParams& params, double VQ_far);

struct GapObservation {
    double VQ = 0.0;   // lab frame, MHz
    double gap = 0.0;  // MHz
};

struct FitObservations {
    PeakSet peaks;                      // far-detuned transmission peaks, lab frame
    std::vector<GapObservation> gaps;   // anti-crossing sizes
    double far_detuned_VQ = 0.0;        // lab-frame qubit energy of the far-detuned slice
};

enum FitParam : int { kT1 = 0, kT2, kV, kVM, kF0, kTQ, kFitParamCount };
inline constexpr std::array<const char*, kFitParamCount> kFitParamNames = {"t1", "t2", "V", "VM", "f0", "tQ"};

using FitMask = std::array<bool, kFitParamCount>;  // true = free
inline constexpr FitMask kAllFree = {true, true, true, true, true, true};

double fit_param_value(const ModelParams& params, FitParam which);
void set_fit_param(ModelParams& params, FitParam which, double value);

struct ParamStats {
    double best = 0.0;
    double p2_5 = 0.0;
    double p97_5 = 0.0;
    double median = 0.0;
    double std = 0.0;
};

struct FitResult {
    ModelParams best;
    FitMask mask = kAllFree;
    std::array<ParamStats, kFitParamCount> stats{};
    int n_bootstrap = 0;
    int n_failed = 0;
    double residual_rms = 0.0;     // stage-1 peak residual, MHz
    double gap_residual_rms = 0.0;
    double objective_initial = 0.0;
    double objective_final = 0.0;
    bool converged = true;         // false: best-found after restarts, with warning
};

enum class RefitMethod {
    levenberg_marquardt,  // local least squares with exact eigenvalue slopes
    simplex,              // same simplex as the full fit, without restarts
};

struct FitOptions {
    int restarts = 5;
    std::uint64_t seed = 1;
    int max_iterations = 5000;
    double size_tol = 1e-5;  // simplex size, MHz
    bool polish = true;      // second simplex started at the first optimum
    RefitMethod refit = RefitMethod::levenberg_marquardt;  // bootstrap refits
};

// Stage 1: sorted far-detuned peaks vs waveguide levels + f0 over
// {t1, t2, V, VM, f0} with tQ held. Stage 2: tQ against anti-crossing gaps.
// The two stages alternate twice; V, t1, t2 and tQ are reported as magnitudes
// since the spectrum is invariant under their sign.
FitResult fit_hamiltonian(const FitObservations& obs, const ModelParams& initial, const FitMask& mask,
                          const FitOptions& options = {});

// Case resampling of peaks (keeping their full-data level assignment) and of
// gaps, refit from the full-data optimum with two alternations of the stages. Resample i draws from a generator
// seeded by (master seed, i), so results do not depend on the thread count.
FitResult bootstrap_fit(const FitObservations& obs, const ModelParams& initial, const FitMask& mask, int n,
                        std::uint64_t seed, int threads = 1, const FitOptions& options = {});

// Observations generated from known parameters: 4p+3 peaks at the waveguide
// levels (+ f0) and anti-crossing gaps at the three levels closest to the
// reference gap centre, each with Gaussian jitter of the given width.
FitObservations synthesize_observations(const ModelParams& truth, double jitter_MHz, std::uint64_t seed);

}  // namespace rmwg
