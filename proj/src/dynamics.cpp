#include "rmwg/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "rmwg/optim.hpp"

namespace rmwg {

const std::vector<cplx>& TimeTrace::channel(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return channels[i];
    fail(ErrorCode::invalid_input, "trace has no channel '" + name + "'");
}

void TimeTrace::add(std::string name, std::vector<cplx> samples) {
    require(samples.size() == t.size(), ErrorCode::invalid_input, "channel length differs from the time grid");
    names.push_back(std::move(name));
    channels.push_back(std::move(samples));
}

std::vector<double> uniform_grid(double t_end, std::size_t n) {
    require(n >= 2 && t_end > 0.0, ErrorCode::usage, "time grid needs n >= 2 and t_end > 0");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

namespace {

constexpr double kMaxEigenvectorCondition = 1e10;

void check_grid(const std::vector<double>& t) {
    require(!t.empty(), ErrorCode::usage, "time grid is empty");
    for (std::size_t i = 1; i < t.size(); ++i)
        require(t[i] > t[i - 1], ErrorCode::invalid_input, "time grid must be strictly increasing");
}

}  // namespace

TimeTrace evolve_single_excitation(const LabeledHamiltonian& h, const Eigen::VectorXcd& psi0,
                                   const std::vector<double>& t_grid) {
    check_grid(t_grid);
    require(psi0.size() == h.dim(), ErrorCode::invalid_input, "psi0 length does not match the Hamiltonian");
    require(std::abs(psi0.norm() - 1.0) < 1e-9, ErrorCode::invalid_input, "psi0 must be unit-normalized");
    const int n = h.dim();
    const cplx mi{0.0, -kRadPerNsPerMHz};

    // amplitudes(i, site)
    Eigen::MatrixXcd amp(static_cast<Eigen::Index>(t_grid.size()), n);
    std::string method = "eigendecomposition";

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.matrix);
    bool diagonalizable = es.info() == Eigen::Success;
    Eigen::VectorXcd coeff;
    if (diagonalizable) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
        const auto& sv = svd.singularValues();
        diagonalizable = sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) < kMaxEigenvectorCondition;
        if (diagonalizable) coeff = es.eigenvectors().partialPivLu().solve(psi0);
    }
    if (diagonalizable) {
        const auto& lam = es.eigenvalues();
        const auto& R = es.eigenvectors();
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const Eigen::VectorXcd phase = (mi * t_grid[i] * lam.array()).exp().matrix().cwiseProduct(coeff);
            amp.row(static_cast<Eigen::Index>(i)) = (R * phase).transpose();
        }
    } else {
        method = "propagator-stepping";
        Eigen::VectorXcd psi = psi0;
        if (t_grid.front() != 0.0) psi = (Eigen::MatrixXcd(mi * t_grid.front() * h.matrix)).exp() * psi;
        amp.row(0) = psi.transpose();
        double cached_dt = -1.0;
        Eigen::MatrixXcd U;
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            const double dt = t_grid[i] - t_grid[i - 1];
            if (std::abs(dt - cached_dt) > 1e-12 * std::max(1.0, dt)) {
                U = (Eigen::MatrixXcd(mi * dt * h.matrix)).exp();
                cached_dt = dt;
            }
            psi = U * psi;
            amp.row(static_cast<Eigen::Index>(i)) = psi.transpose();
        }
    }

    TimeTrace tr;
    tr.t = t_grid;
    tr.method = method;
    for (int s = 1; s <= n; ++s) {
        std::vector<cplx> ch(t_grid.size());
        for (std::size_t i = 0; i < t_grid.size(); ++i) ch[i] = amp(static_cast<Eigen::Index>(i), s - 1);
        tr.add("site_" + std::to_string(s), std::move(ch));
    }
    auto port = [&](int site, cplx sigma) {
        const double gamma = std::max(0.0, -2.0 * sigma.imag());
        std::vector<cplx> ch(t_grid.size());
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            ch[i] = std::sqrt(gamma) * amp(static_cast<Eigen::Index>(i), SiteRoles::idx(site));
        return ch;
    };
    tr.add("port_L", port(h.roles.portL, h.sigmaL));
    tr.add("port_R", port(h.roles.portR, h.sigmaR));
    return tr;
}

namespace {

struct DressedGapMode {
    cplx energy;
    Eigen::VectorXcd vector;
};

DressedGapMode dressed_gap_mode(const ModelParams& params, const BandGap& gap) {
    const ModeSet modes = eigenmodes(build_hamiltonian(params, true));
    int best = -1;
    for (int k = 0; k < modes.size(); ++k) {
        if (!gap.contains(modes.eigenvalues[k].real())) continue;
        if (best < 0 || modes.classes[k].qubit_weight > modes.classes[best].qubit_weight) best = k;
    }
    if (best < 0) fail(ErrorCode::not_found, "no in-gap dressed mode at VQ = " + std::to_string(params.VQ));
    return {modes.eigenvalues[best], modes.vector(best)};
}

double decay_time_from(cplx energy) {
    const double rate = 2.0 * kRadPerNsPerMHz * std::abs(energy.imag());
    return rate > 0.0 ? 1.0 / rate : kInfiniteTime;
}

}  // namespace

double dressed_decay_time(const ModelParams& params) {
    params.validate();
    return decay_time_from(dressed_gap_mode(params, reference_gap(params)).energy);
}

cplx infer_port_self_energy(const ModelParams& params, double target_T1) {
    require(target_T1 > 0.0, ErrorCode::invalid_parameter, "target T1 must be positive");
    if (std::isinf(target_T1)) return {};
    params.validate();
    const BandGap gap = reference_gap(params);
    auto t1_at = [&](double s) {
        ModelParams at = params;
        at.sigmaL = at.sigmaR = cplx{0.0, -s};
        return decay_time_from(dressed_gap_mode(at, gap).energy);
    };
    auto g = [&](double s) { return std::log(t1_at(s)) - std::log(target_T1); };

    // T1 falls as the ports open up; bracket the first sign change on a log scan.
    constexpr int kScan = 80;
    const double s_min = 1e-3, s_max = 1e5;
    double prev_s = s_min, prev_g = g(s_min);
    double t1_lo = t1_at(s_min), t1_hi = t1_lo;
    for (int i = 1; i <= kScan; ++i) {
        const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) / kScan);
        const double gs = g(s);
        const double t1 = t1_at(s);
        t1_lo = std::min(t1_lo, t1);
        t1_hi = std::max(t1_hi, t1);
        if (prev_g > 0.0 && gs <= 0.0) {
            const double root = optim::brent_root(g, prev_s, s, 1e-12, 200);
            return {0.0, -root};
        }
        prev_s = s;
        prev_g = gs;
    }
    std::ostringstream os;
    os << "target T1 = " << target_T1 << " ns not bracketed: scanned |Im sigma| in [" << s_min << ", " << s_max
       << "] MHz giving T1 in [" << t1_lo << ", " << t1_hi << "] ns";
    fail(ErrorCode::numerical, os.str());
}

EmissionSummary qubit_emission(const ModelParams& params, Excitation excitation, std::size_t samples) {
    params.validate();
    const BandGap gap = reference_gap(params);
    const LabeledHamiltonian h = build_hamiltonian(params, true);
    const DressedGapMode mode = dressed_gap_mode(params, gap);
    const double t1 = decay_time_from(mode.energy);
    require(std::isfinite(t1), ErrorCode::invalid_parameter, "qubit emission needs lossy ports");

    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(h.dim());
    if (excitation == Excitation::bare_qubit) psi0(SiteRoles::idx(h.roles.Q)) = 1.0;
    else psi0 = mode.vector.normalized();

    // 30 dressed lifetimes leave < 1e-13 of the gap-mode population.
    EmissionSummary out;
    out.trace = evolve_single_excitation(h, psi0, uniform_grid(30.0 * t1, samples));
    const auto& t = out.trace.t;
    auto integrate = [&](const std::vector<cplx>& ch) {
        double acc = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i)
            acc += 0.5 * (t[i] - t[i - 1]) * (std::norm(ch[i]) + std::norm(ch[i - 1]));
        return acc;
    };
    out.emitted_L = integrate(out.trace.channel("port_L"));
    out.emitted_R = integrate(out.trace.channel("port_R"));
    out.ratio = out.emitted_R > 0.0 ? out.emitted_L / out.emitted_R : kInfiniteTime;
    out.ratio_dB = 10.0 * std::log10(out.ratio);
    double norm = 0.0;
    for (int s = 1; s <= h.dim(); ++s) norm += std::norm(out.trace.channel("site_" + std::to_string(s)).back());
    out.final_norm = norm;
    return out;
}

void BlochParams::validate() const {
    require(T1 > 0.0 && T2 > 0.0, ErrorCode::invalid_parameter, "T1 and T2 must be positive");
    require(T2 <= 2.0 * T1 * (1.0 + 1e-12), ErrorCode::invalid_parameter, "T2 must not exceed 2 T1");
    require(w_left >= 0.0 && w_right >= 0.0 && w_left <= 1.0 && w_right <= 1.0 && w_left + w_right <= 1.0 + 1e-12,
            ErrorCode::invalid_parameter, "emission weights must lie in [0, 1] with w_left + w_right <= 1");
    require(std::isfinite(rabi_freq) && std::isfinite(detuning), ErrorCode::invalid_parameter,
            "Rabi frequency and detuning must be finite");
}

namespace {

using Bloch = std::array<double, 3>;

Bloch bloch_rhs(const Bloch& r, double omega, double delta, double g1, double g2) {
    const auto [x, y, z] = r;
    return {-delta * y - g2 * x, delta * x - omega * z - g2 * y, omega * y - g1 * (z + 1.0)};
}

Bloch rk4(const Bloch& r, double h, double omega, double delta, double g1, double g2) {
    auto add = [](const Bloch& a, const Bloch& b, double s) { return Bloch{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]}; };
    const Bloch k1 = bloch_rhs(r, omega, delta, g1, g2);
    const Bloch k2 = bloch_rhs(add(r, k1, h / 2), omega, delta, g1, g2);
    const Bloch k3 = bloch_rhs(add(r, k2, h / 2), omega, delta, g1, g2);
    const Bloch k4 = bloch_rhs(add(r, k3, h), omega, delta, g1, g2);
    Bloch out;
    for (int i = 0; i < 3; ++i) out[i] = r[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

double bloch_length(const Bloch& r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); }

// Integrates over [t0, t1] with a constant drive; step refined on instability.
Bloch advance(Bloch r, double t0, double t1, double h_max, double omega, double delta, double g1, double g2) {
    constexpr double kMinStep = 1e-6;
    double t = t0;
    double h = h_max;
    while (t < t1) {
        const double step = std::min(h, t1 - t);
        const Bloch next = rk4(r, step, omega, delta, g1, g2);
        if (!(bloch_length(next) <= 1.0 + 1e-9) || !std::isfinite(next[0] + next[1] + next[2])) {
            h *= 0.5;
            if (h < kMinStep) fail(ErrorCode::numerical, "Bloch integration unstable at the minimum step size");
            continue;
        }
        r = next;
        t += step;
    }
    return r;
}

}  // namespace

double bloch_time_step(const BlochParams& bp) {
    bp.validate();
    const double g2 = std::isinf(bp.T2) ? 0.0 : 1.0 / bp.T2;
    // At least 50 steps per fastest time scale.
    const double fastest =
        std::max({std::abs(bp.rabi_freq) * 1e-3, std::abs(bp.detuning) * 1e-3, 1.0 / bp.T1, g2, 1e-9});
    return 1.0 / (50.0 * fastest);
}

TimeTrace bloch_rabi_trace(const BlochParams& bp, const std::vector<double>& t_grid, double drive_on_until,
                           BlochVector initial) {
    bp.validate();
    check_grid(t_grid);
    require(t_grid.front() >= 0.0, ErrorCode::invalid_input, "Bloch traces start at t >= 0");
    const double omega = kRadPerNsPerMHz * bp.rabi_freq;
    const double delta = kRadPerNsPerMHz * bp.detuning;
    const double g1 = 1.0 / bp.T1;
    const double g2 = std::isinf(bp.T2) ? 0.0 : 1.0 / bp.T2;
    const double h_max = bloch_time_step(bp);

    Bloch r{initial.x, initial.y, initial.z};
    double t = 0.0;
    auto step_to = [&](double target) {
        if (t < drive_on_until && target > drive_on_until) {
            r = advance(r, t, drive_on_until, h_max, omega, delta, g1, g2);
            t = drive_on_until;
        }
        const double w = t < drive_on_until ? omega : 0.0;
        r = advance(r, t, target, h_max, w, delta, g1, g2);
        t = target;
    };

    TimeTrace tr;
    tr.t = t_grid;
    tr.method = "rk4";
    std::vector<cplx> sz(t_grid.size()), sm(t_grid.size()), pl(t_grid.size()), pr(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        step_to(t_grid[i]);
        sz[i] = r[2];
        sm[i] = cplx{r[0], -r[1]} * 0.5;
        pl[i] = std::sqrt(bp.w_left) * sm[i];
        pr[i] = std::sqrt(bp.w_right) * sm[i];
    }
    tr.add("sigma_z", std::move(sz));
    tr.add("sigma_minus", std::move(sm));
    tr.add("port_L", std::move(pl));
    tr.add("port_R", std::move(pr));
    return tr;
}

std::vector<double> ramsey_trace(double detuning, const std::vector<double>& wait_grid, double T2) {
    require(T2 > 0.0, ErrorCode::invalid_parameter, "T2 must be positive");
    std::vector<double> out(wait_grid.size());
    for (std::size_t i = 0; i < wait_grid.size(); ++i) {
        const double tau = wait_grid[i];
        require(tau >= 0.0, ErrorCode::invalid_input, "Ramsey waits must be non-negative");
        const double env = std::isinf(T2) ? 1.0 : std::exp(-tau / T2);
        out[i] = 0.5 * (1.0 + env * std::cos(kRadPerNsPerMHz * detuning * tau));
    }
    return out;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double baseline, double floor) {
    require(t.size() == y.size(), ErrorCode::invalid_input, "decay fit needs matching t and y");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = std::abs(y[i] - baseline);
        if (!(a > floor)) continue;
        const double ly = std::log(a);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        syy += ly * ly;
        ++n;
    }
    require(n >= 3, ErrorCode::invalid_input, "decay fit needs at least 3 samples above the floor");
    const double dn = static_cast<double>(n);
    const double cov = sxy - sx * sy / dn;
    const double varx = sxx - sx * sx / dn;
    const double vary = syy - sy * sy / dn;
    const double slope = cov / varx;
    DecayFit fit;
    fit.tau = slope < 0.0 ? -1.0 / slope : kInfiniteTime;
    fit.amplitude = std::exp((sy - slope * sx) / dn);
    fit.r_squared = vary > 0.0 ? cov * cov / (varx * vary) : 1.0;
    return fit;
}

}  // namespace rmwg
