#include "rmwg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "parallel.hpp"

namespace rmwg {

namespace {

void classify(ModeSet& ms) {
    const int n = ms.size();
    ms.classes.assign(n, {});
    const int q = SiteRoles::idx(ms.roles.Q);
    const int m = SiteRoles::idx(ms.roles.M);
    std::vector<double> prs(n);
    for (int k = 0; k < n; ++k) {
        auto col = ms.eigenvectors.col(k);
        ModeClass& c = ms.classes[k];
        c.qubit_weight = std::norm(col(q));
        c.central_weight = std::norm(col(m));
        double s4 = 0.0;
        for (Eigen::Index i = 0; i < col.size(); ++i) s4 += std::norm(col(i)) * std::norm(col(i));
        c.participation_ratio = 1.0 / s4;
        prs[k] = c.participation_ratio;
    }
    std::nth_element(prs.begin(), prs.begin() + n / 2, prs.end());
    const double median = prs[n / 2];
    for (auto& c : ms.classes) c.localized = c.participation_ratio < 0.5 * median;
}

std::string diagnostics(const Eigen::MatrixXcd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& sv = svd.singularValues();
    std::ostringstream os;
    os << "dim=" << a.rows() << " max_sv=" << sv(0) << " min_sv=" << sv(sv.size() - 1)
       << " cond=" << (sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY);
    return os.str();
}

}  // namespace

ModeSet eigenmodes(const LabeledHamiltonian& h) {
    require(h.matrix.rows() == h.matrix.cols() && h.matrix.rows() > 0, ErrorCode::invalid_input,
            "eigenmodes needs a non-empty square matrix");
    require(h.matrix.allFinite(), ErrorCode::invalid_input, "matrix has non-finite entries");
    ModeSet ms;
    ms.roles = h.roles;
    ms.hermitian = h.hermitian;
    const int n = h.dim();
    std::vector<cplx> values(n);
    Eigen::MatrixXcd vectors;
    if (h.hermitian) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix);
        if (es.info() != Eigen::Success)
            fail(ErrorCode::numerical, "Hermitian eigensolver did not converge: " + diagnostics(h.matrix));
        for (int k = 0; k < n; ++k) values[k] = es.eigenvalues()(k);
        vectors = es.eigenvectors();
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.matrix);
        if (es.info() != Eigen::Success)
            fail(ErrorCode::numerical, "complex eigensolver did not converge: " + diagnostics(h.matrix));
        for (int k = 0; k < n; ++k) values[k] = es.eigenvalues()(k);
        vectors = es.eigenvectors();
        vectors.colwise().normalize();
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
        return values[a].imag() < values[b].imag();
    });
    ms.eigenvalues.resize(n);
    ms.eigenvectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        ms.eigenvalues[k] = values[order[k]];
        ms.eigenvectors.col(k) = vectors.col(order[k]);
    }
    classify(ms);
    return ms;
}

Eigen::VectorXd closed_eigenvalues(const ModelParams& params) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_real_hamiltonian(params), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorCode::numerical, "eigenvalue solve did not converge");
    return es.eigenvalues();
}

BandGap band_gap(const ModeSet& modes, const ModelParams& params) {
    std::vector<double> band;
    for (int k = 0; k < modes.size(); ++k) {
        const auto& c = modes.classes[k];
        if (c.qubit_weight > 0.5 || c.central_weight > 0.5 || c.localized) continue;
        band.push_back(modes.eigenvalues[k].real());
    }
    if (band.size() < 4)
        fail(ErrorCode::insufficient_modes,
             "band gap needs at least 4 band modes, found " + std::to_string(band.size()));
    std::sort(band.begin(), band.end());

    const double centre = band_centre(params);
    const double reach = params.t1 + params.t2;
    BandGap gap;
    double widest = -1.0;
    std::vector<double> spacings;
    for (std::size_t i = 0; i + 1 < band.size(); ++i) {
        const double w = band[i + 1] - band[i];
        spacings.push_back(w);
        const double mid = 0.5 * (band[i] + band[i + 1]);
        if (std::abs(mid - centre) <= reach && w > widest) {
            widest = w;
            gap.lower = band[i];
            gap.upper = band[i + 1];
        }
    }
    if (widest < 0.0)
        fail(ErrorCode::not_found, "no band interval has its midpoint within +-(t1+t2) of the band centre");
    std::nth_element(spacings.begin(), spacings.begin() + spacings.size() / 2, spacings.end());
    const double median_spacing = spacings[spacings.size() / 2];
    gap.degenerate = !(gap.width() > 2.0 * median_spacing);

    for (int k = 0; k < modes.size(); ++k)
        if (gap.contains(modes.eigenvalues[k].real())) gap.in_gap_mode_indices.push_back(k);
    return gap;
}

BandGap reference_gap(const ModelParams& params) {
    const ModeSet modes = eigenmodes(build_hamiltonian(far_detuned(params), false));
    return band_gap(modes, params);
}

ModeSet with_gap(ModeSet modes, const BandGap& gap) {
    for (int k = 0; k < modes.size(); ++k) modes.classes[k].in_gap = gap.contains(modes.eigenvalues[k].real());
    return modes;
}

std::vector<bool> qubit_coupling_flags(const ModeSet& modes, const SiteRoles& roles, double threshold) {
    std::vector<bool> flags(modes.size());
    const int m = SiteRoles::idx(roles.M);
    for (int k = 0; k < modes.size(); ++k) flags[k] = std::norm(modes.eigenvectors(m, k)) > threshold;
    return flags;
}

std::vector<SweepPoint> sweep_qubit_energy(const ModelParams& params, const std::vector<double>& VQ_grid,
                                           int threads) {
    require(!VQ_grid.empty(), ErrorCode::usage, "qubit-energy grid is empty");
    params.validate();
    const BandGap gap = reference_gap(params);
    std::vector<SweepPoint> out(VQ_grid.size());
    detail::parallel_for(VQ_grid.size(), threads, [&](std::size_t i) {
        ModelParams at = params;
        at.VQ = VQ_grid[i];
        out[i].VQ = at.VQ;
        out[i].modes = with_gap(eigenmodes(build_hamiltonian(at, false)), gap);
    });
    return out;
}

std::vector<std::vector<int>> track_branches(const std::vector<SweepPoint>& sweep) {
    std::vector<std::vector<int>> assign;
    if (sweep.empty()) return assign;
    const int n = sweep.front().modes.size();
    std::vector<int> current(n);
    std::iota(current.begin(), current.end(), 0);
    assign.push_back(current);

    struct Pair {
        double cost;
        double overlap;
        int branch;
        int next;
    };
    for (std::size_t s = 1; s < sweep.size(); ++s) {
        const ModeSet& a = sweep[s - 1].modes;
        const ModeSet& b = sweep[s].modes;
        require(b.size() == n, ErrorCode::invalid_input, "sweep points differ in dimension");
        std::vector<Pair> pairs;
        pairs.reserve(static_cast<std::size_t>(n) * n);
        for (int br = 0; br < n; ++br) {
            const int k = current[br];
            for (int j = 0; j < n; ++j) {
                const double cost = std::abs(a.eigenvalues[k].real() - b.eigenvalues[j].real());
                const double ov = std::abs(a.eigenvectors.col(k).dot(b.eigenvectors.col(j)));
                pairs.push_back({cost, ov, br, j});
            }
        }
        // Costs within a small absolute window count as ties; overlap decides.
        constexpr double kTie = 1e-6;
        std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
            if (std::abs(x.cost - y.cost) > kTie) return x.cost < y.cost;
            return x.overlap > y.overlap;
        });
        std::vector<int> next(n, -1);
        std::vector<bool> used(n, false);
        for (const Pair& pr : pairs) {
            if (next[pr.branch] >= 0 || used[pr.next]) continue;
            next[pr.branch] = pr.next;
            used[pr.next] = true;
        }
        current = next;
        assign.push_back(current);
    }
    return assign;
}

}  // namespace rmwg
