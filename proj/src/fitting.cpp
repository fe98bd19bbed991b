#include "rmwg/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <gsl/gsl_statistics_double.h>

#include "parallel.hpp"
#include "rmwg/optim.hpp"
#include "rmwg/spectral.hpp"

namespace rmwg {

std::vector<double> PeakSet::frequencies() const {
    std::vector<double> out;
    out.reserve(peaks.size());
    for (const auto& p : peaks) out.push_back(p.frequency);
    return out;
}

SpectrumMap median_background_subtract(const SpectrumMap& map, int window) {
    require(window >= 3 && window % 2 == 1, ErrorCode::invalid_parameter, "median window must be odd and >= 3");
    const std::size_t nvq = map.VQ_grid.size();
    require(static_cast<std::size_t>(window) <= nvq, ErrorCode::invalid_parameter,
            "median window exceeds the qubit/flux axis length");
    SpectrumMap out = map;
    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    std::vector<double> buf;
    for (std::size_t i = 0; i < map.E_grid.size(); ++i) {
        for (std::size_t j = 0; j < nvq; ++j) {
            const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(j) - half);
            const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(nvq) - 1,
                                                     static_cast<std::ptrdiff_t>(j) + half);
            buf.clear();
            for (auto k = lo; k <= hi; ++k) buf.push_back(map.at(i, static_cast<std::size_t>(k)));
            const std::size_t m = buf.size() / 2;
            std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m), buf.end());
            double med = buf[m];
            if (buf.size() % 2 == 0) {
                const double below = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m));
                med = 0.5 * (med + below);
            }
            out.at(i, j) = map.at(i, j) - med;
        }
    }
    return out;
}

PeakSet extract_peaks(const std::vector<double>& x, const std::vector<double>& y, double min_prominence,
                      double position) {
    require(x.size() == y.size(), ErrorCode::invalid_input, "peak search needs matching x and y");
    require(y.size() >= 3, ErrorCode::invalid_input, "peak search needs at least 3 samples");
    PeakSet out;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 >= n || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t k = (i + j) / 2;  // plateau middle
        // Topographic prominence: lowest ground on each side before a higher sample.
        double left_min = y[k];
        for (std::size_t a = i; a-- > 0;) {
            if (y[a] > y[k]) break;
            left_min = std::min(left_min, y[a]);
        }
        double right_min = y[k];
        for (std::size_t b = j + 1; b < n; ++b) {
            if (y[b] > y[k]) break;
            right_min = std::min(right_min, y[b]);
        }
        const double prominence = y[k] - std::max(left_min, right_min);
        if (prominence >= min_prominence) {
            Peak pk{position, x[k], y[k]};
            if (i == j) {
                const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
                const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
                const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
                const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
                const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
                const double c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom;
                if (a < 0.0) {
                    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
                    pk.frequency = xv;
                    pk.amplitude = (a * xv + b) * xv + c;
                }
            }
            out.peaks.push_back(pk);
        }
        i = j + 1;
    }
    return out;
}

double anticrossing_gap(const ModelParams& params, double VQ) {
    ModelParams at = params;
    at.VQ = VQ;
    const Eigen::VectorXd e = closed_eigenvalues(at);
    for (Eigen::Index j = 0; j + 1 < e.size(); ++j)
        if (e(j) <= VQ && VQ < e(j + 1)) return e(j + 1) - e(j);
    fail(ErrorCode::not_found, "qubit energy " + std::to_string(VQ) + " MHz is outside the spectrum");
}

std::vector<double> waveguide_levels(const ModelParams& params, double VQ_far) {
    ModelParams at = params;
    at.VQ = VQ_far;
    const Eigen::VectorXd e = closed_eigenvalues(at);
    Eigen::Index skip = 0;
    (e.array() - VQ_far).abs().minCoeff(&skip);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(e.size()) - 1);
    for (Eigen::Index k = 0; k < e.size(); ++k)
        if (k != skip) out.push_back(e(k));
    return out;
}

double fit_param_value(const ModelParams& prm, FitParam which) {
    switch (which) {
        case kT1: return prm.t1;
        case kT2: return prm.t2;
        case kV: return prm.V;
        case kVM: return prm.VM;
        case kF0: return prm.f0;
        case kTQ: return prm.tQ;
        default: break;
    }
    fail(ErrorCode::invalid_parameter, "unknown fit parameter");
}

void set_fit_param(ModelParams& prm, FitParam which, double value) {
    switch (which) {
        case kT1: prm.t1 = std::abs(value); return;
        case kT2: prm.t2 = std::abs(value); return;
        case kV: prm.V = std::abs(value); return;
        case kVM: prm.VM = value; return;
        case kF0: prm.f0 = value; return;
        case kTQ: prm.tQ = std::abs(value); return;
        default: break;
    }
    fail(ErrorCode::invalid_parameter, "unknown fit parameter");
}

namespace {

// Observations in fitting order with resampling weights (case counts).
struct Data {
    std::vector<double> peaks;  // ascending, lab frame; peaks[i] <-> level i
    std::vector<double> peak_weight;
    std::vector<GapObservation> gaps;
    std::vector<double> gap_weight;
    double far_lab = 0.0;
};

Data make_data(const FitObservations& obs) {
    Data d;
    d.peaks = obs.peaks.frequencies();
    std::sort(d.peaks.begin(), d.peaks.end());
    d.peak_weight.assign(d.peaks.size(), 1.0);
    d.gaps = obs.gaps;
    d.gap_weight.assign(d.gaps.size(), 1.0);
    d.far_lab = obs.far_detuned_VQ;
    return d;
}

double stage1_objective(const Data& d, const ModelParams& prm) {
    const auto levels = waveguide_levels(prm, d.far_lab - prm.f0);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.peaks.size(); ++i) {
        if (d.peak_weight[i] == 0.0) continue;
        const double r = d.peaks[i] - levels[i] - prm.f0;
        acc += d.peak_weight[i] * r * r;
    }
    return acc;
}

double stage2_objective(const Data& d, const ModelParams& prm) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d.gaps.size(); ++j) {
        if (d.gap_weight[j] == 0.0) continue;
        double model = 0.0;
        try {
            model = anticrossing_gap(prm, d.gaps[j].VQ - prm.f0);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
        const double r = model - d.gaps[j].gap;
        acc += d.gap_weight[j] * r * r;
    }
    return acc;
}

std::vector<FitParam> stage1_free(const FitMask& mask) {
    std::vector<FitParam> out;
    for (FitParam p : {kT1, kT2, kV, kVM, kF0})
        if (mask[p]) out.push_back(p);
    return out;
}

struct StageResult {
    ModelParams params;
    double objective = 0.0;
    bool converged = true;
};

StageResult run_stage1(const Data& d, const ModelParams& start, const std::vector<FitParam>& free,
                       const FitOptions& opt, std::mt19937_64* rng, int restarts) {
    StageResult best{start, stage1_objective(d, start), true};
    if (free.empty()) return best;
    auto unpack = [&](const std::vector<double>& x) {
        ModelParams prm = start;
        for (std::size_t i = 0; i < free.size(); ++i) set_fit_param(prm, free[i], x[i]);
        return prm;
    };
    auto f = [&](const std::vector<double>& x) { return stage1_objective(d, unpack(x)); };

    bool any_converged = false;
    for (int attempt = 0; attempt <= restarts; ++attempt) {
        std::vector<double> x0(free.size()), step(free.size());
        for (std::size_t i = 0; i < free.size(); ++i) {
            const double v = fit_param_value(best.params, free[i]);
            x0[i] = v;
            step[i] = (0.05 * std::abs(v) + 5.0);
            if (attempt > 0 && rng) {
                std::normal_distribution<double> jitter(0.0, 0.15 * std::abs(v) + 10.0);
                x0[i] = fit_param_value(start, free[i]) + jitter(*rng);
            }
        }
        auto res = optim::nelder_mead(f, x0, step, opt.size_tol, opt.max_iterations);
        if (opt.polish) {
            // Restart the simplex at the optimum once to escape premature collapse.
            for (auto& s : step) s *= 0.1;
            auto polished = optim::nelder_mead(f, res.x, step, opt.size_tol, opt.max_iterations);
            if (polished.value <= res.value) res = polished;
        }
        any_converged = any_converged || res.converged;
        if (res.value < best.objective) best = {unpack(res.x), res.value, res.converged};
    }
    best.converged = any_converged;
    return best;
}

StageResult run_stage2(const Data& d, const ModelParams& start, double half_width, int scan = 41) {
    StageResult out{start, stage2_objective(d, start), true};
    if (d.gaps.empty()) return out;
    auto f = [&](double tq) {
        ModelParams prm = start;
        prm.tQ = std::abs(tq);
        const double v = stage2_objective(d, prm);
        return std::isfinite(v) ? v : 1e300;
    };
    const int kScan = scan;
    const double lo = std::max(0.0, start.tQ - half_width);
    const double hi = start.tQ + half_width;
    std::vector<double> xs(kScan), fs(kScan);
    int best = 0;
    for (int i = 0; i < kScan; ++i) {
        xs[i] = lo + (hi - lo) * i / (kScan - 1);
        fs[i] = f(xs[i]);
        if (fs[i] < fs[best]) best = i;
    }
    double x = xs[best];
    if (best > 0 && best + 1 < kScan && fs[best] < fs[best - 1] && fs[best] < fs[best + 1])
        x = optim::brent_minimize(f, xs[best - 1], xs[best], xs[best + 1], 1e-7, 200);
    ModelParams prm = start;
    prm.tQ = std::abs(x);
    const double v = stage2_objective(d, prm);
    if (v < out.objective) out = {prm, v, true};
    return out;
}

// Gradient refits. H is linear in every fitted quantity, so each eigenvalue
// slope is v_k^T (H(value + 1) - H(value)) v_k.
struct ClosedSpectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

ClosedSpectrum closed_spectrum(const ModelParams& prm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_real_hamiltonian(prm));
    if (es.info() != Eigen::Success) fail(ErrorCode::numerical, "eigen-decomposition did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

double& raw_field(ModelParams& prm, FitParam which) {
    switch (which) {
        case kT1: return prm.t1;
        case kT2: return prm.t2;
        case kV: return prm.V;
        case kVM: return prm.VM;
        case kF0: return prm.f0;
        case kTQ: return prm.tQ;
        default: break;
    }
    fail(ErrorCode::invalid_parameter, "unknown fit parameter");
}

bool folded(FitParam which) { return which == kT1 || which == kT2 || which == kV || which == kTQ; }

Eigen::VectorXd level_slopes(const ModelParams& prm, const ClosedSpectrum& sp, FitParam which) {
    ModelParams up = prm;
    raw_field(up, which) += 1.0;
    const Eigen::MatrixXd dH = build_real_hamiltonian(up) - build_real_hamiltonian(prm);
    return (sp.vectors.transpose() * dH * sp.vectors).diagonal();
}

StageResult lm_stage1(const Data& d, const ModelParams& start, const std::vector<FitParam>& free) {
    StageResult out{start, stage1_objective(d, start), true};
    if (free.empty()) return out;
    const int q = SiteRoles::idx(site_roles(start.p).Q);
    auto unpack = [&](const std::vector<double>& x) {
        ModelParams prm = start;
        for (std::size_t i = 0; i < free.size(); ++i) set_fit_param(prm, free[i], x[i]);
        return prm;
    };
    auto eval = [&](const std::vector<double>& x, std::vector<double>* r, std::vector<double>* J) {
        ModelParams at = unpack(x);
        at.VQ = d.far_lab - at.f0;
        const ClosedSpectrum sp = closed_spectrum(at);
        Eigen::Index skip = 0;
        (sp.values.array() - at.VQ).abs().minCoeff(&skip);
        std::vector<Eigen::VectorXd> slopes;
        if (J)
            for (FitParam fp : free) slopes.push_back(fp == kF0 ? Eigen::VectorXd() : level_slopes(at, sp, fp));
        for (std::size_t i = 0; i < d.peaks.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i) + (static_cast<Eigen::Index>(i) >= skip ? 1 : 0);
            const double sw = std::sqrt(d.peak_weight[i]);
            if (r) (*r)[i] = sw * (d.peaks[i] - sp.values(k) - at.f0);
            if (!J) continue;
            for (std::size_t j = 0; j < free.size(); ++j) {
                double dr;
                if (free[j] == kF0) {
                    // f0 shifts the peak and, through VQ = far - f0, the qubit.
                    const double wq = sp.vectors(q, k) * sp.vectors(q, k);
                    dr = -sw * (1.0 - wq);
                } else {
                    const double sign = folded(free[j]) && x[j] < 0.0 ? -1.0 : 1.0;
                    dr = -sw * sign * slopes[j](k);
                }
                (*J)[i * free.size() + j] = dr;
            }
        }
    };
    std::vector<double> x0;
    for (FitParam fp : free) x0.push_back(fit_param_value(start, fp));
    const auto res = optim::levenberg_marquardt([&](const std::vector<double>& x, std::vector<double>& r) { eval(x, &r, nullptr); },
                                                [&](const std::vector<double>& x, std::vector<double>& J) { eval(x, nullptr, &J); },
                                                x0, d.peaks.size(), 1e-10, 200);
    const ModelParams prm = unpack(res.x);
    const double v = stage1_objective(d, prm);
    if (v <= out.objective) out = {prm, v, res.converged};
    return out;
}

StageResult lm_stage2(const Data& d, const ModelParams& start) {
    StageResult out{start, stage2_objective(d, start), true};
    if (d.gaps.empty()) return out;
    auto eval = [&](const std::vector<double>& x, std::vector<double>* r, std::vector<double>* J) {
        ModelParams prm = start;
        prm.tQ = std::abs(x[0]);
        for (std::size_t j = 0; j < d.gaps.size(); ++j) {
            ModelParams at = prm;
            at.VQ = d.gaps[j].VQ - prm.f0;
            const ClosedSpectrum sp = closed_spectrum(at);
            Eigen::Index a = -1;
            for (Eigen::Index k = 0; k + 1 < sp.values.size(); ++k)
                if (sp.values(k) <= at.VQ && at.VQ < sp.values(k + 1)) a = k;
            if (a < 0) fail(ErrorCode::not_found, "qubit energy is outside the spectrum");
            const double sw = std::sqrt(d.gap_weight[j]);
            if (r) (*r)[j] = sw * (sp.values(a + 1) - sp.values(a) - d.gaps[j].gap);
            if (J) {
                const Eigen::VectorXd sl = level_slopes(at, sp, kTQ);
                (*J)[j] = sw * (x[0] < 0.0 ? -1.0 : 1.0) * (sl(a + 1) - sl(a));
            }
        }
    };
    const auto res = optim::levenberg_marquardt([&](const std::vector<double>& x, std::vector<double>& r) { eval(x, &r, nullptr); },
                                                [&](const std::vector<double>& x, std::vector<double>& J) { eval(x, nullptr, &J); },
                                                {start.tQ}, d.gaps.size(), 1e-10, 200);
    ModelParams prm = start;
    prm.tQ = std::abs(res.x[0]);
    const double v = stage2_objective(d, prm);
    if (v <= out.objective) out = {prm, v, res.converged};
    return out;
}

void check_observations(const Data& d, const ModelParams& initial, const FitMask& mask) {
    initial.validate();
    const std::size_t levels = static_cast<std::size_t>(4 * initial.p + 3);
    if (d.peaks.size() != levels) {
        std::ostringstream os;
        os << "expected " << levels << " far-detuned peaks (one per waveguide site) for p = " << initial.p << ", got "
           << d.peaks.size();
        fail(ErrorCode::invalid_input, os.str());
    }
    const std::size_t free1 = stage1_free(mask).size();
    if (free1 > d.peaks.size())
        fail(ErrorCode::invalid_input, "under-determined: more free parameters than peaks");
    if (mask[kTQ] && d.gaps.empty())
        fail(ErrorCode::invalid_input, "under-determined: tQ is free but no anti-crossing gaps were given");
}

FitResult finish(const Data& d, const ModelParams& initial, const FitMask& mask, const StageResult& s1,
                 const ModelParams& best, bool converged) {
    FitResult r;
    r.mask = mask;
    r.best = best;
    r.converged = converged && s1.converged;
    r.objective_initial = stage1_objective(d, initial) + stage2_objective(d, initial);
    r.objective_final = stage1_objective(d, best) + stage2_objective(d, best);
    if (r.objective_final > r.objective_initial) {
        r.best = initial;
        r.objective_final = r.objective_initial;
        r.converged = false;
    }
    const double n1 = std::accumulate(d.peak_weight.begin(), d.peak_weight.end(), 0.0);
    const double n2 = std::accumulate(d.gap_weight.begin(), d.gap_weight.end(), 0.0);
    r.residual_rms = std::sqrt(stage1_objective(d, r.best) / n1);
    r.gap_residual_rms = n2 > 0 ? std::sqrt(stage2_objective(d, r.best) / n2) : 0.0;
    for (int p = 0; p < kFitParamCount; ++p) {
        const double v = fit_param_value(r.best, static_cast<FitParam>(p));
        r.stats[p] = {v, v, v, v, 0.0};
    }
    return r;
}

FitResult fit_data(const Data& d, const ModelParams& initial, const FitMask& mask, const FitOptions& opt) {
    check_observations(d, initial, mask);
    std::mt19937_64 rng(opt.seed);
    const auto free = stage1_free(mask);
    const double tq_span = 3.0 * std::max({initial.t1, initial.t2, initial.tQ, 1.0});

    StageResult s1 = run_stage1(d, initial, free, opt, &rng, opt.restarts);
    ModelParams cur = s1.params;
    bool converged = s1.converged;
    for (int round = 0; round < 2; ++round) {
        if (mask[kTQ]) cur = run_stage2(d, cur, round == 0 ? tq_span : 0.25 * tq_span).params;
        if (round == 0) {
            s1 = run_stage1(d, cur, free, opt, nullptr, 0);
            cur = s1.params;
            converged = converged && s1.converged;
        }
    }
    return finish(d, initial, mask, s1, cur, converged);
}

}  // namespace

FitResult fit_hamiltonian(const FitObservations& obs, const ModelParams& initial, const FitMask& mask,
                          const FitOptions& options) {
    return fit_data(make_data(obs), initial, mask, options);
}

FitResult bootstrap_fit(const FitObservations& obs, const ModelParams& initial, const FitMask& mask, int n,
                        std::uint64_t seed, int threads, const FitOptions& options) {
    require(n >= 100, ErrorCode::invalid_parameter, "bootstrap needs n >= 100 resamples");
    const Data full = make_data(obs);
    FitOptions opt = options;
    opt.seed = seed;
    FitResult result = fit_data(full, initial, mask, opt);
    const ModelParams centre = result.best;
    // Refits start at the full-data optimum; a single simplex at a tolerance
    // well below the interval resolution is enough there.
    opt.polish = false;
    opt.size_tol = std::max(opt.size_tol, 1e-2);
    const auto free = stage1_free(mask);

    std::vector<std::array<double, kFitParamCount>> samples(static_cast<std::size_t>(n));
    std::vector<char> ok(static_cast<std::size_t>(n), 0);
    detail::parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        Data d = full;
        std::fill(d.peak_weight.begin(), d.peak_weight.end(), 0.0);
        std::fill(d.gap_weight.begin(), d.gap_weight.end(), 0.0);
        std::uniform_int_distribution<std::size_t> pick_peak(0, d.peaks.size() - 1);
        for (std::size_t k = 0; k < d.peaks.size(); ++k) d.peak_weight[pick_peak(rng)] += 1.0;
        if (!d.gaps.empty()) {
            std::uniform_int_distribution<std::size_t> pick_gap(0, d.gaps.size() - 1);
            for (std::size_t k = 0; k < d.gaps.size(); ++k) d.gap_weight[pick_gap(rng)] += 1.0;
        }
        try {
            ModelParams cur = centre;
            for (int round = 0; round < 2; ++round) {
                if (opt.refit == RefitMethod::simplex) {
                    cur = run_stage1(d, cur, free, opt, nullptr, 0).params;
                    if (mask[kTQ]) cur = run_stage2(d, cur, 0.5 * std::max(cur.tQ, 20.0), 11).params;
                } else {
                    cur = lm_stage1(d, cur, free).params;
                    if (mask[kTQ]) cur = lm_stage2(d, cur).params;
                }
            }
            for (int p = 0; p < kFitParamCount; ++p) samples[i][p] = fit_param_value(cur, static_cast<FitParam>(p));
            ok[i] = 1;
        } catch (const Error&) {
            ok[i] = 0;
        }
    });

    result.n_bootstrap = n;
    result.n_failed = static_cast<int>(std::count(ok.begin(), ok.end(), 0));
    if (result.n_failed > n / 10) {
        std::ostringstream os;
        os << "bootstrap aborted: " << result.n_failed << " of " << n << " refits failed";
        fail(ErrorCode::numerical, os.str());
    }
    for (int p = 0; p < kFitParamCount; ++p) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (ok[i]) v.push_back(samples[i][p]);
        std::sort(v.begin(), v.end());
        ParamStats& st = result.stats[p];
        st.best = fit_param_value(result.best, static_cast<FitParam>(p));
        st.p2_5 = gsl_stats_quantile_from_sorted_data(v.data(), 1, v.size(), 0.025);
        st.p97_5 = gsl_stats_quantile_from_sorted_data(v.data(), 1, v.size(), 0.975);
        st.median = gsl_stats_median_from_sorted_data(v.data(), 1, v.size());
        st.std = v.size() > 1 ? gsl_stats_sd(v.data(), 1, v.size()) : 0.0;
    }
    return result;
}

FitObservations synthesize_observations(const ModelParams& truth, double jitter_MHz, std::uint64_t seed) {
    truth.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, jitter_MHz);
    auto jitter = [&] { return jitter_MHz > 0.0 ? noise(rng) : 0.0; };

    FitObservations obs;
    const ModelParams far = far_detuned(truth);
    obs.far_detuned_VQ = far.VQ + truth.f0;
    for (double level : waveguide_levels(truth, far.VQ))
        obs.peaks.peaks.push_back({obs.far_detuned_VQ, level + truth.f0 + jitter(), 1.0});
    obs.peaks.source = "synthetic";

    const BandGap gap = reference_gap(truth);
    std::vector<double> levels = waveguide_levels(truth, far.VQ);
    std::sort(levels.begin(), levels.end(),
              [&](double a, double b) { return std::abs(a - gap.centre()) < std::abs(b - gap.centre()); });
    for (std::size_t k = 0; k < 3 && k < levels.size(); ++k) {
        const double vq = levels[k];
        obs.gaps.push_back({vq + truth.f0, anticrossing_gap(truth, vq) + jitter()});
    }
    return obs;
}

}  // namespace rmwg
