#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rmwg/edge_states.hpp"
#include "rmwg/fitting.hpp"
#include "rmwg/scattering.hpp"

using namespace rmwg;

namespace {

SiteRoles one_site() {
    SiteRoles r;
    r.dim = 1;
    r.portL = r.portR = r.M = r.NL = r.NR = r.Q = 1;
    return r;
}

ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams m;
    m.p = 1 + static_cast<int>(u(rng) * 6);
    m.V = 100 * u(rng);
    m.t1 = 20 + 300 * u(rng);
    m.t2 = 20 + 300 * u(rng);
    m.tQ = 150 * u(rng);
    m.VQ = -300 + 600 * u(rng);
    m.VM = -600 + 1200 * u(rng);
    m.sigmaL = {0.0, -(1 + 40 * u(rng))};
    m.sigmaR = {0.0, -(1 + 40 * u(rng))};
    return m;
}

std::vector<double> abs_s_rl(const ModelParams& m, const std::vector<double>& E) {
    std::vector<double> y;
    y.reserve(E.size());
    for (double e : E) y.push_back(std::abs(s_matrix(m, e).S_RL));
    return y;
}

double dip_depth(const LabeledHamiltonian& h, double centre, double half_width, bool left) {
    double lowest = HUGE_VAL;
    for (double E = centre - half_width; E <= centre + half_width; E += 0.002) {
        const auto s = s_matrix(h, E);
        lowest = std::min(lowest, std::abs(left ? s.S_LL : s.S_RR));
    }
    return 1.0 - lowest;
}

}  // namespace

TEST_CASE("one-site Green's function is a scalar inverse") {
    Eigen::MatrixXcd h(1, 1);
    h << 3.0;
    const auto lh = make_labeled(h, one_site(), cplx(0.0, -2.0), 0.0);
    for (double E : {-10.0, 0.0, 3.0, 7.5}) {
        const auto G = greens_function(lh, E);
        CHECK(std::abs(G(0, 0) - 1.0 / (E - 3.0 - cplx(0.0, -2.0))) < 1e-14);
    }
}

TEST_CASE("Green's function solves (E - H) G = I") {
    const auto h = build_hamiltonian(presets::fig3(), true);
    const auto G = greens_function(h, 0.0);
    const Eigen::MatrixXcd A = -h.matrix;
    const Eigen::MatrixXcd R = A * G - Eigen::MatrixXcd::Identity(h.dim(), h.dim());
    CHECK(R.norm() / (A.norm() * G.norm()) < 1e-9);
    CHECK((G - oracle::invert(A)).norm() / G.norm() < 1e-9);
}

TEST_CASE("dressed eigenvalues are poles of G") {
    std::mt19937_64 rng(5);
    auto m = random_params(rng);
    m.p = 2;
    const auto h = build_hamiltonian(m, true);
    const auto modes = eigenmodes(h);
    for (const auto& lambda : modes.eigenvalues) {
        const Eigen::MatrixXcd A = lambda * Eigen::MatrixXcd::Identity(h.dim(), h.dim()) - h.matrix;
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        const double smallest = svd.singularValues().minCoeff();
        CHECK(smallest < 1e-6);
    }
    auto real_poles = dressed_pole_energies(m);
    std::sort(real_poles.begin(), real_poles.end());
    for (std::size_t k = 0; k < real_poles.size(); ++k)
        CHECK(std::abs(real_poles[k] - modes.eigenvalues[k].real()) < 1e-6);
}

TEST_CASE("one site between equal ports transmits fully on resonance") {
    Eigen::MatrixXcd h(1, 1);
    h << 5.0;
    const auto lh = make_labeled(h, one_site(), cplx(0.0, -9.0), cplx(0.0, -9.0));
    const auto s = s_matrix(lh, 5.0);
    CHECK(std::abs(s.S_RL) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s.S_LL) < 1e-12);
    // Lorentzian off resonance: |S_RL|^2 = G^2 / ((E - e)^2 + G^2) with G the total half-width.
    const auto off = s_matrix(lh, 5.0 + 18.0);
    CHECK(std::norm(off.S_RL) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("far off resonance nothing is transmitted") {
    const auto s = s_matrix(presets::fig3(), 1e5);
    CHECK(std::abs(s.S_RL) < 1e-3);
}

TEST_CASE("lossless ports are rejected") {
    auto m = presets::fig3();
    m.sigmaR = 0.0;
    CHECK_THROWS_AS(s_matrix(m, 0.0), Error);
    const auto lh = build_hamiltonian(m, true);
    CHECK_THROWS_AS(s_matrix(lh, 0.0), Error);
}

TEST_CASE("reciprocity and flux conservation on random draws") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1200.0, 1200.0);
    double worst_recip = 0.0, worst_flux = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto m = random_params(rng);
        const auto s = s_matrix(m, u(rng));
        worst_recip = std::max(worst_recip, std::abs(s.S_RL - s.S_LR));
        worst_flux = std::max(worst_flux, std::abs(std::norm(s.S_LL) + std::norm(s.S_RL) - 1.0));
        worst_flux = std::max(worst_flux, std::abs(std::norm(s.S_RR) + std::norm(s.S_LR) - 1.0));
    }
    CHECK(worst_recip < 1e-10);
    CHECK(worst_flux < 1e-8);
}

TEST_CASE("device transmission has 19 peaks with the qubit far-detuned") {
    const auto m = presets::fig3();
    // Waveguide poles only: the qubit pole sits near VQ, far outside the band.
    std::vector<double> poles;
    for (double e : dressed_pole_energies(m))
        if (std::abs(e - m.VQ) > 100.0) poles.push_back(e);
    REQUIRE(poles.size() == 19);
    const auto [lo, hi] = std::minmax_element(poles.begin(), poles.end());
    const auto E = pole_aware_grid(m, *lo - 100.0, *hi + 100.0, 4000);
    REQUIRE(E.size() == 4000);
    const auto peaks = extract_peaks(E, abs_s_rl(m, E), 1e-3);
    CHECK(peaks.size() == 19);

    std::vector<double> ldos_values;
    for (double e : E) ldos_values.push_back(ldos(m, e, 1));
    double top = 0.0;
    for (double v : ldos_values) top = std::max(top, v);
    const auto ldos_peaks = extract_peaks(E, ldos_values, 1e-3 * top);
    CHECK(ldos_peaks.size() == 19);
}

TEST_CASE("transmission maxima sit near dressed poles") {
    const auto m = presets::fig3();
    const auto h = build_hamiltonian(m, true);
    const auto modes = eigenmodes(h);
    const double gamma = -2.0 * m.sigmaL.imag();
    const auto E = default_energy_grid(m);
    const auto peaks = extract_peaks(E, abs_s_rl(m, E), 1e-3);
    REQUIRE(peaks.size() > 0);
    for (const auto& pk : peaks.peaks) {
        double nearest = HUGE_VAL;
        for (const auto& e : modes.eigenvalues) nearest = std::min(nearest, std::abs(pk.frequency - e.real()));
        CHECK(nearest < gamma);
    }
}

TEST_CASE("pole-aware grid contains every pole in range") {
    const auto m = presets::fig3();
    const auto grid = pole_aware_grid(m, -600.0, 900.0, 500);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    for (double pole : dressed_pole_energies(m)) {
        if (pole < -600.0 || pole > 900.0) continue;
        bool hit = false;
        for (double g : grid) hit = hit || g == pole;
        CHECK(hit);
    }
}

TEST_CASE("LDOS of one site is a Lorentzian") {
    Eigen::MatrixXcd h(1, 1);
    h << 0.0;
    const auto lh = make_labeled(h, one_site(), cplx(0.0, -9.0), 0.0);
    CHECK(ldos(lh, 0.0, 1) == doctest::Approx(1.0 / (9.0 * M_PI)).epsilon(1e-12));
    CHECK(ldos(lh, 9.0, 1) == doctest::Approx(0.5 / (9.0 * M_PI)).epsilon(1e-12));
    CHECK(ldos(lh, -9.0, 1) == doctest::Approx(0.5 / (9.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("LDOS sum rule") {
    ModelParams m;
    m.p = 1;
    m.V = 20;
    m.t1 = 60;
    m.t2 = 80;
    m.tQ = 40;
    m.VQ = 10;
    m.VM = 30;
    m.sigmaL = {0.0, -30.0};
    m.sigmaR = {0.0, -30.0};
    const auto h = build_hamiltonian(m, true);
    // E = w tan(theta) maps the whole real line onto (-pi/2, pi/2) so the
    // Lorentzian tails are included; trapezoid in theta.
    const int n = 200000;
    const double w = 200.0, dtheta = M_PI / n;
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(h.dim());
    for (int i = 1; i < n; ++i) {
        const double theta = -0.5 * M_PI + i * dtheta;
        const double E = w * std::tan(theta);
        const double jac = w / (std::cos(theta) * std::cos(theta));
        const Eigen::MatrixXcd G = greens_function(h, E);
        for (int s = 0; s < h.dim(); ++s) integral[s] += -G(s, s).imag() / M_PI * jac * dtheta;
        if (i % 50000 == 0) CHECK(ldos(h, E, 2) == doctest::Approx(-G(1, 1).imag() / M_PI).epsilon(1e-12));
    }
    for (int s = 0; s < h.dim(); ++s) {
        CAPTURE(s + 1);
        CHECK(integral[s] == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("decoupled qubit gives a map constant along VQ") {
    auto m = presets::fig3();
    m.tQ = 0.0;
    std::vector<double> E;
    for (double e = -300.0; e <= 300.0; e += 5.0) E.push_back(e);
    const auto map = transmission_map(m, E, {-100.0, 0.0, 50.0, 2000.0}, SpectrumKind::S_RL);
    REQUIRE(map.values.size() == E.size() * 4);
    double worst = 0.0;
    for (std::size_t i = 0; i < E.size(); ++i)
        for (std::size_t j = 1; j < 4; ++j) worst = std::max(worst, std::abs(map.at(i, j) - map.at(i, 0)));
    CHECK(worst < 1e-10);
}

TEST_CASE("map kinds, f0 shift and threads agree with pointwise values") {
    auto m = presets::fig3();
    m.f0 = 5000.0;
    const std::vector<double> E = {-50.0, 0.0, 17.5, 80.0};
    const std::vector<double> VQ = {-40.0, 40.0};
    for (auto kind : {SpectrumKind::S_LL, SpectrumKind::S_LR, SpectrumKind::S_RL, SpectrumKind::S_RR,
                      SpectrumKind::LDOS}) {
        const auto a = transmission_map(m, E, VQ, kind, 0, 1);
        const auto b = transmission_map(m, E, VQ, kind, 0, 3);
        CHECK(a.values == b.values);
        CHECK(a.E_grid.front() == doctest::Approx(E.front() + m.f0));
        CHECK(spectrum_kind_from_string(to_string(kind)) == kind);
        auto at = m;
        at.VQ = VQ[1];
        const auto s = s_matrix(at, E[2]);
        const double expected = kind == SpectrumKind::S_LL   ? std::abs(s.S_LL)
                                : kind == SpectrumKind::S_LR ? std::abs(s.S_LR)
                                : kind == SpectrumKind::S_RL ? std::abs(s.S_RL)
                                : kind == SpectrumKind::S_RR ? std::abs(s.S_RR)
                                                             : ldos(at, E[2], 1);
        CHECK(a.at(2, 1) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(spectrum_kind_from_string("S_XX"), Error);
    CHECK_THROWS_AS(transmission_map(m, {}, VQ, SpectrumKind::S_RL), Error);
}

TEST_CASE("sweeping the qubit through the gap shows two transmission branches") {
    auto m = presets::fig3();
    const auto gap = reference_gap(m);
    std::vector<double> E;
    for (double e = gap.lower; e <= gap.upper; e += 0.05) E.push_back(e);
    // At the working points (+-V) the edge branch is dark in transmission.
    const std::vector<double> VQ = {-60.0, -20.0, 0.0, 20.0, 60.0};
    const auto map = transmission_map(m, E, VQ, SpectrumKind::S_RL);
    std::vector<double> lower, upper;
    for (std::size_t j = 0; j < VQ.size(); ++j) {
        const auto peaks = extract_peaks(E, map.column(j), 1e-3);
        CAPTURE(VQ[j]);
        REQUIRE(peaks.size() == 2);
        lower.push_back(peaks.peaks[0].frequency);
        upper.push_back(peaks.peaks[1].frequency);
    }
    // Both branches rise with the qubit energy and never cross.
    for (std::size_t j = 1; j < VQ.size(); ++j) {
        CHECK(lower[j] > lower[j - 1]);
        CHECK(upper[j] > upper[j - 1]);
        CHECK(upper[j] - lower[j] > 10.0);
    }
}

TEST_CASE("reflection dips at the leftward working point") {
    auto m = presets::fig3();
    m.VQ = working_points(m).VQ_left;
    auto h = build_hamiltonian(m, true);
    const auto gap = reference_gap(m);
    std::vector<double> branches;
    for (const auto& e : eigenmodes(h).eigenvalues)
        if (gap.contains(e.real())) branches.push_back(e.real());
    REQUIRE(branches.size() == 2);

    // A unitary two-port has |S_LL| = |S_RR| at every energy.
    for (double b : branches) CHECK(dip_depth(h, b, 10.0, true) == doctest::Approx(dip_depth(h, b, 10.0, false)));

    // Intrinsic qubit loss makes the ports distinguishable: the lower (edge)
    // branch is seen from the port it faces, the upper one from the other.
    h.matrix(h.roles.Q - 1, h.roles.Q - 1) += cplx(0.0, -1.0);
    CHECK(dip_depth(h, branches[0], 10.0, true) > dip_depth(h, branches[0], 10.0, false));
    CHECK(dip_depth(h, branches[1], 10.0, false) > dip_depth(h, branches[1], 10.0, true));
}
