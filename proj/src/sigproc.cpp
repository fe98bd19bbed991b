#include "rmwg/sigproc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "parallel.hpp"

namespace rmwg {

namespace {

double check_uniform(const std::vector<double>& t) {
    require(t.size() >= 3, ErrorCode::invalid_input, "signal needs at least 3 samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    require(dt > 0.0, ErrorCode::invalid_input, "time grid must be increasing");
    for (std::size_t i = 1; i < t.size(); ++i)
        require(std::abs(t[i] - t[i - 1] - dt) <= 1e-6 * dt, ErrorCode::invalid_input,
                "time grid must be uniform (sample " + std::to_string(i) + ")");
    return dt;
}

// Half-kernel h[0..K] of a symmetric Hamming windowed sinc. Hamming's
// transition width is about 3.3 / (taps * dt).
std::vector<double> lowpass_kernel(double dt, double cutoff_MHz, double transition_MHz) {
    require(cutoff_MHz > 0.0 && transition_MHz > 0.0, ErrorCode::invalid_parameter,
            "filter cutoff and transition width must be positive");
    const double fc = cutoff_MHz * 1e-3;  // cycles per ns
    const double taps = 3.3 / (transition_MHz * 1e-3 * dt);
    const auto K = static_cast<std::size_t>(std::ceil(taps / 2.0));
    std::vector<double> h(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const double x = 2.0 * fc * dt * static_cast<double>(k);
        const double sinc = k == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double win = K == 0 ? 1.0 : 0.54 + 0.46 * std::cos(std::numbers::pi * static_cast<double>(k) / K);
        h[k] = 2.0 * fc * dt * sinc * win;
    }
    return h;
}

// Sum of kernel taps that land inside [0, n) around output j.
std::vector<double> edge_norms(const std::vector<double>& h, std::size_t n) {
    const auto K = static_cast<long>(h.size()) - 1;
    const auto N = static_cast<long>(n);
    std::vector<double> norm(n, 0.0);
    for (long j = 0; j < N; ++j) {
        double s = 0.0;
        for (long k = std::max(-K, j - N + 1); k <= std::min(K, j); ++k) s += h[static_cast<std::size_t>(std::abs(k))];
        norm[static_cast<std::size_t>(j)] = s;
    }
    return norm;
}

}  // namespace

std::vector<double> lowpass_filter(const std::vector<double>& t, const std::vector<double>& x, double cutoff_MHz,
                                   double transition_MHz) {
    require(t.size() == x.size(), ErrorCode::invalid_input, "signal and time grid lengths differ");
    const double dt = check_uniform(t);
    const auto h = lowpass_kernel(dt, cutoff_MHz, transition_MHz);
    const auto norm = edge_norms(h, x.size());
    const auto K = static_cast<long>(h.size()) - 1;
    const auto N = static_cast<long>(x.size());
    std::vector<double> y(x.size());
    for (long j = 0; j < N; ++j) {
        double s = 0.0;
        for (long k = std::max(-K, j - N + 1); k <= std::min(K, j); ++k)
            s += h[static_cast<std::size_t>(std::abs(k))] * x[static_cast<std::size_t>(j - k)];
        y[static_cast<std::size_t>(j)] = s / norm[static_cast<std::size_t>(j)];
    }
    return y;
}

Demodulator::Demodulator(const std::vector<double>& t, double f_rabi_MHz, double cutoff_MHz, double transition_MHz) {
    const double dt = check_uniform(t);
    require(f_rabi_MHz > 0.0, ErrorCode::invalid_parameter, "Rabi frequency must be positive");
    const double duration = t.back() - t.front();
    require(duration * f_rabi_MHz * 1e-3 >= 2.0, ErrorCode::invalid_input,
            "trace must span at least 2 Rabi periods");
    const auto h = lowpass_kernel(dt, cutoff_MHz, transition_MHz);
    const auto norm = edge_norms(h, t.size());
    const auto K = static_cast<long>(h.size()) - 1;
    const auto N = static_cast<long>(t.size());

    // integral = sum_j trap_j y_j with y_j = sum_k h_k m_{j-k} / norm_j, so the
    // weight on m_i is sum_j trap_j h_{j-i} / norm_j.
    std::vector<double> scaled(t.size());
    for (long j = 0; j < N; ++j) {
        const double trap = (j == 0 || j == N - 1) ? 0.5 * dt : dt;
        scaled[static_cast<std::size_t>(j)] = trap / norm[static_cast<std::size_t>(j)];
    }
    weights_.assign(t.size(), 0.0);
    const double omega = kRadPerNsPerMHz * f_rabi_MHz;
    for (long i = 0; i < N; ++i) {
        double c = 0.0;
        for (long j = std::max(0L, i - K); j <= std::min(N - 1, i + K); ++j)
            c += scaled[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(std::abs(j - i))];
        const auto iu = static_cast<std::size_t>(i);
        weights_[iu] = std::sin(omega * t[iu]) * c / duration;
    }
}

double Demodulator::signed_apply(const std::vector<double>& x) const {
    require(x.size() == weights_.size(), ErrorCode::invalid_input, "signal length differs from the demodulator grid");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weights_[i] * x[i];
    return s;
}

double Demodulator::apply(const std::vector<double>& x) const { return std::abs(signed_apply(x)); }

std::vector<double> best_quadrature(const std::vector<cplx>& x) {
    require(!x.empty(), ErrorCode::invalid_input, "empty channel");
    double mr = 0.0, mi = 0.0;
    for (const auto& v : x) {
        mr += v.real();
        mi += v.imag();
    }
    mr /= static_cast<double>(x.size());
    mi /= static_cast<double>(x.size());
    double srr = 0.0, sii = 0.0, sri = 0.0;
    for (const auto& v : x) {
        const double a = v.real() - mr, b = v.imag() - mi;
        srr += a * a;
        sii += b * b;
        sri += a * b;
    }
    // Principal axis of the 2x2 covariance.
    const double theta = 0.5 * std::atan2(2.0 * sri, srr - sii);
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i].real() + s * x[i].imag();
    return out;
}

double demodulate_amplitude(const std::vector<double>& t, const std::vector<double>& x, double f_rabi_MHz,
                            const DemodOptions& options) {
    require(t.size() == x.size(), ErrorCode::invalid_input, "signal and time grid lengths differ");
    const Demodulator demod(t, f_rabi_MHz, options.cutoff_MHz, options.transition_MHz);
    if (options.display_prefilter_MHz > 0.0)
        return demod.apply(lowpass_filter(t, x, options.display_prefilter_MHz, options.transition_MHz));
    return demod.apply(x);
}

double demodulate_amplitude(const TimeTrace& trace, const std::string& channel, double f_rabi_MHz,
                            const DemodOptions& options) {
    return demodulate_amplitude(trace.t, best_quadrature(trace.channel(channel)), f_rabi_MHz, options);
}

AmplitudeEstimate bootstrap_amplitude(const std::vector<double>& t, const std::vector<double>& x, double f_rabi_MHz,
                                      int n, std::uint64_t seed, int threads, const DemodOptions& options) {
    require(n >= 100, ErrorCode::invalid_parameter, "bootstrap needs n >= 100");
    require(t.size() == x.size(), ErrorCode::invalid_input, "signal and time grid lengths differ");
    const Demodulator demod(t, f_rabi_MHz, options.cutoff_MHz, options.transition_MHz);
    const std::vector<double> base =
        options.display_prefilter_MHz > 0.0 ? lowpass_filter(t, x, options.display_prefilter_MHz, options.transition_MHz)
                                            : x;
    const std::size_t N = t.size();
    std::vector<double> draws(static_cast<std::size_t>(n));

    detail::parallel_for(draws.size(), threads, [&](std::size_t r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, N - 1);
        std::vector<char> drawn(N, 0);
        for (std::size_t k = 0; k < N; ++k) drawn[pick(rng)] = 1;

        // Nearest drawn index on each side; ties go to the earlier sample.
        constexpr auto kNone = static_cast<std::size_t>(-1);
        std::vector<std::size_t> prev(N, kNone), next(N, kNone);
        for (std::size_t j = 0, last = kNone; j < N; ++j) {
            if (drawn[j]) last = j;
            prev[j] = last;
        }
        for (std::size_t j = N, last = kNone; j-- > 0;) {
            if (drawn[j]) last = j;
            next[j] = last;
        }
        const auto& w = demod.weights();
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            std::size_t src;
            if (prev[j] == kNone) src = next[j];
            else if (next[j] == kNone) src = prev[j];
            else src = (j - prev[j] <= next[j] - j) ? prev[j] : next[j];
            s += w[j] * base[src];
        }
        draws[r] = std::abs(s);
    });

    AmplitudeEstimate est;
    for (double d : draws) est.mean += d;
    est.mean /= static_cast<double>(n);
    double var = 0.0;
    for (double d : draws) var += (d - est.mean) * (d - est.mean);
    est.std = std::sqrt(var / static_cast<double>(n - 1));
    return est;
}

ChiEstimate chi_estimate(const SignalAmplitudes& amps) {
    const auto v = amps.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        require(std::isfinite(v[i]) && v[i] >= 0.0, ErrorCode::invalid_input,
                "signal amplitudes must be finite and non-negative");
        require(std::isfinite(amps.stds[i]) && amps.stds[i] >= 0.0, ErrorCode::invalid_input,
                "amplitude standard deviations must be finite and non-negative");
    }
    ChiEstimate out;
    constexpr double inf = std::numeric_limits<double>::infinity();
    out.chi_l = amps.s_lR > 0.0 ? amps.s_lL / amps.s_lR : inf;
    out.chi_r = amps.s_rL > 0.0 ? amps.s_rR / amps.s_rL : inf;
    if (amps.s_lR == 0.0 || amps.s_rL == 0.0) {
        out.infinite = true;
        out.chi = inf;
        out.chi_dB = inf;
        out.fidelity = 1.0;
        out.chi_std = 0.0;
        return out;
    }
    out.chi = std::sqrt(out.chi_l * out.chi_r);
    out.chi_dB = 10.0 * std::log10(out.chi);
    out.fidelity = out.chi / (1.0 + out.chi);
    // d ln chi = (d ln s_lL - d ln s_lR + d ln s_rR - d ln s_rL) / 2
    double rel2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] > 0.0) rel2 += (amps.stds[i] / v[i]) * (amps.stds[i] / v[i]);
    out.chi_std = 0.5 * out.chi * std::sqrt(rel2);
    return out;
}

}  // namespace rmwg
