#include "rmwg/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace rmwg {

const char* to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::S_LL: return "S_LL";
        case SpectrumKind::S_LR: return "S_LR";
        case SpectrumKind::S_RL: return "S_RL";
        case SpectrumKind::S_RR: return "S_RR";
        case SpectrumKind::LDOS: return "LDOS";
    }
    return "?";
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
    for (auto k : {SpectrumKind::S_LL, SpectrumKind::S_LR, SpectrumKind::S_RL, SpectrumKind::S_RR, SpectrumKind::LDOS})
        if (name == to_string(k)) return k;
    fail(ErrorCode::usage, "unknown spectrum kind '" + name + "' (expected S_LL, S_LR, S_RL, S_RR or LDOS)");
}

std::vector<double> SpectrumMap::column(std::size_t iVQ) const {
    std::vector<double> out(E_grid.size());
    for (std::size_t i = 0; i < E_grid.size(); ++i) out[i] = at(i, iVQ);
    return out;
}

namespace {

constexpr double kSingularRcond = 1e-14;

Eigen::PartialPivLU<Eigen::MatrixXcd> resolvent_lu(const LabeledHamiltonian& h, double E) {
    require(std::isfinite(E), ErrorCode::invalid_input, "probe energy must be finite");
    Eigen::MatrixXcd a = -h.matrix;
    a.diagonal().array() += E;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    if (!(lu.rcond() > kSingularRcond))
        fail(ErrorCode::singular, "E - H is singular at E = " + std::to_string(E) + " MHz (lossless ports?)");
    return lu;
}

double port_gamma(cplx sigma) { return -2.0 * sigma.imag(); }

}  // namespace

Eigen::MatrixXcd greens_function(const LabeledHamiltonian& h, double E) {
    return resolvent_lu(h, E).inverse();
}

SMatrixPoint s_matrix(const LabeledHamiltonian& h, double E) {
    const double gL = port_gamma(h.sigmaL);
    const double gR = port_gamma(h.sigmaR);
    require(gL > 0.0 && gR > 0.0, ErrorCode::invalid_parameter,
            "scattering needs lossy ports (Im sigmaL < 0 and Im sigmaR < 0)");
    const auto lu = resolvent_lu(h, E);
    const int l = SiteRoles::idx(h.roles.portL);
    const int r = SiteRoles::idx(h.roles.portR);
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(h.dim(), 2);
    rhs(l, 0) = 1.0;
    rhs(r, 1) = 1.0;
    const Eigen::MatrixXcd cols = lu.solve(rhs);
    const cplx i{0.0, 1.0};
    SMatrixPoint s;
    s.E = E;
    s.S_LL = -1.0 + i * gL * cols(l, 0);
    s.S_RL = i * std::sqrt(gL * gR) * cols(r, 0);
    s.S_LR = i * std::sqrt(gL * gR) * cols(l, 1);
    s.S_RR = -1.0 + i * gR * cols(r, 1);
    return s;
}

SMatrixPoint s_matrix(const ModelParams& params, double E) { return s_matrix(build_hamiltonian(params, true), E); }

double ldos(const LabeledHamiltonian& h, double E, int site) {
    require(site >= 1 && site <= h.dim(), ErrorCode::invalid_input, "LDOS site out of range");
    const auto lu = resolvent_lu(h, E);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(h.dim());
    e(SiteRoles::idx(site)) = 1.0;
    const Eigen::VectorXcd g = lu.solve(e);
    return -g(SiteRoles::idx(site)).imag() / std::numbers::pi;
}

double ldos(const ModelParams& params, double E, int site) { return ldos(build_hamiltonian(params, true), E, site); }

SpectrumMap transmission_map(const ModelParams& params, const std::vector<double>& E_grid,
                             const std::vector<double>& VQ_grid, SpectrumKind kind, int ldos_site, int threads) {
    require(!E_grid.empty() && !VQ_grid.empty(), ErrorCode::usage, "transmission map needs non-empty grids");
    params.validate();
    SpectrumMap map;
    map.kind = kind;
    map.VQ_grid = VQ_grid;
    map.E_grid.resize(E_grid.size());
    std::transform(E_grid.begin(), E_grid.end(), map.E_grid.begin(), [&](double e) { return e + params.f0; });
    map.values.assign(E_grid.size() * VQ_grid.size(), 0.0);
    const int site = ldos_site > 0 ? ldos_site : site_roles(params.p).portL;

    detail::parallel_for(VQ_grid.size(), threads, [&](std::size_t j) {
        ModelParams at = params;
        at.VQ = VQ_grid[j];
        const LabeledHamiltonian h = build_hamiltonian(at, true);
        for (std::size_t i = 0; i < E_grid.size(); ++i) {
            double v = 0.0;
            if (kind == SpectrumKind::LDOS) {
                v = ldos(h, E_grid[i], site);
            } else {
                const auto s = s_matrix(h, E_grid[i]);
                switch (kind) {
                    case SpectrumKind::S_LL: v = std::abs(s.S_LL); break;
                    case SpectrumKind::S_LR: v = std::abs(s.S_LR); break;
                    case SpectrumKind::S_RL: v = std::abs(s.S_RL); break;
                    case SpectrumKind::S_RR: v = std::abs(s.S_RR); break;
                    case SpectrumKind::LDOS: break;
                }
            }
            map.at(i, j) = v;
        }
    });
    return map;
}

std::vector<double> dressed_pole_energies(const ModelParams& params) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(build_hamiltonian(params, true).matrix, false);
    if (es.info() != Eigen::Success) fail(ErrorCode::numerical, "pole eigensolve did not converge");
    std::vector<double> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()(k).real());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> pole_aware_grid(const ModelParams& params, double lo, double hi, std::size_t n) {
    require(n >= 2 && hi > lo, ErrorCode::usage, "energy grid needs n >= 2 and hi > lo");
    std::vector<double> grid(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
    std::vector<bool> taken(n, false);
    for (double pole : dressed_pole_energies(params)) {
        if (pole < lo || pole > hi) continue;
        auto i = static_cast<std::size_t>(std::lround((pole - lo) / step));
        i = std::min(i, n - 1);
        // Two poles closer than one spacing: keep the first, move the second
        // to the free neighbour if there is one.
        if (taken[i]) {
            if (i + 1 < n && !taken[i + 1] && pole > grid[i]) ++i;
            else if (i > 0 && !taken[i - 1] && pole < grid[i]) --i;
            else continue;
        }
        grid[i] = pole;
        taken[i] = true;
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::vector<double> default_energy_grid(const ModelParams& params) {
    const double c = band_centre(params);
    const double fine = params.t1 + params.t2 + 2.0 * std::abs(params.V);
    double lo = c - fine, hi = c + fine;
    const bool qubit_far = std::abs(params.VQ - c) >= 10.0 * std::max(params.t1, params.t2);
    for (double pole : dressed_pole_energies(params)) {
        if (qubit_far && std::abs(pole - params.VQ) < 1e-6 * std::max(1.0, std::abs(params.VQ)) + 5.0 * params.tQ)
            continue;
        lo = std::min(lo, pole - 50.0);
        hi = std::max(hi, pole + 50.0);
    }
    std::vector<double> grid;
    for (double e = lo; e < c - fine; e += 5.0) grid.push_back(e);
    const auto n_fine = static_cast<long>(std::floor(2.0 * fine / 0.5));
    for (long i = 0; i <= n_fine; ++i) grid.push_back(c - fine + 0.5 * static_cast<double>(i));
    for (double e = c + fine + 5.0; e <= hi; e += 5.0) grid.push_back(e);
    for (double pole : dressed_pole_energies(params)) {
        if (pole < grid.front() || pole > grid.back()) continue;
        auto it = std::lower_bound(grid.begin(), grid.end(), pole);
        if (it == grid.end()) continue;
        if (it != grid.begin() && pole - *(it - 1) < *it - pole) --it;
        *it = pole;
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace rmwg
