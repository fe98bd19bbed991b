#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>

#include "oracles.hpp"
#include "rmwg/model.hpp"

using namespace rmwg;

namespace {

ModelParams make(int p, double V, double t1, double t2, double tQ, double VQ, double VM) {
    ModelParams m;
    m.p = p;
    m.V = V;
    m.t1 = t1;
    m.t2 = t2;
    m.tQ = tQ;
    m.VQ = VQ;
    m.VM = VM;
    return m;
}

}  // namespace

TEST_CASE("site roles follow the canonical layout") {
    const auto r4 = site_roles(4);
    CHECK(r4.M == 10);
    CHECK(r4.NL == 9);
    CHECK(r4.NR == 11);
    CHECK(r4.Q == 20);
    CHECK(r4.dim == 20);
    const auto r1 = site_roles(1);
    CHECK(r1.M == 4);
    CHECK(r1.NL == 3);
    CHECK(r1.NR == 5);
    CHECK(r1.portL == 1);
    CHECK(r1.portR == 7);
    CHECK(r1.Q == 8);
    CHECK(r1.dim == 8);
    const auto r10 = site_roles(10);
    CHECK(r10.M == 22);
    CHECK(r10.Q == 44);
    CHECK(r10.dim == 44);
    CHECK_THROWS_AS(site_roles(0), Error);
}

TEST_CASE("p=1 diagonal matches the hand enumeration") {
    const auto h = build_hamiltonian(make(1, 3.0, 10.0, 20.0, 5.0, 7.0, 11.0), false);
    const std::vector<double> expected = {-3.0, 3.0, -3.0, 11.0, 3.0, -3.0, 3.0, 7.0};
    REQUIRE(h.dim() == 8);
    for (int s = 1; s <= 8; ++s) CHECK(h.at(s, s).real() == expected[static_cast<std::size_t>(s - 1)]);
    CHECK(h.hermitian);
}

TEST_CASE("matrix equals the site-by-site oracle for p=1..10") {
    for (int p = 1; p <= 10; ++p) {
        const auto m = make(p, 37.5, 120.0, 150.0, 62.5, -20.0, 15.0);
        const auto h = build_hamiltonian(m, false);
        const Eigen::MatrixXd ref = oracle::chain_hamiltonian(p, m.V, m.t1, m.t2, m.tQ, m.VQ, m.VM);
        CHECK((h.matrix - ref.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((build_real_hamiltonian(m) - ref).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("bond counts by brute-force scan") {
    const double t1 = 1.25, t2 = 1.75, tQ = 0.5;
    for (int p = 1; p <= 10; ++p) {
        const auto h = build_hamiltonian(make(p, 0.3, t1, t2, tQ, 0.1, 0.2), false);
        std::map<double, int> counts;
        int nonzero = 0;
        for (int i = 0; i < h.dim(); ++i)
            for (int j = i + 1; j < h.dim(); ++j) {
                const double v = h.matrix(i, j).real();
                if (v != 0.0) {
                    ++counts[-v];
                    ++nonzero;
                }
            }
        CAPTURE(p);
        CHECK(counts[t2] == 2 * p);
        CHECK(counts[t1] == 2 * p + 2);
        CHECK(counts[tQ] == 1);
        CHECK(nonzero == 4 * p + 3);
    }
}

TEST_CASE("p=4 device is Hermitian with 19 bonds") {
    const auto h = build_hamiltonian(make(4, 40, 230, 280, 130, 0, 590), false);
    REQUIRE(h.dim() == 20);
    CHECK((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    int offdiag = 0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            if (i != j && h.matrix(i, j) != cplx(0.0)) ++offdiag;
    CHECK(offdiag == 2 * 19);
}

TEST_CASE("qubit decouples when tQ=0") {
    auto m = make(3, 20, 100, 140, 0, -50, 30);
    const auto h = build_hamiltonian(m, false);
    const int q = h.roles.Q;
    for (int s = 1; s <= h.dim(); ++s)
        if (s != q) CHECK(h.at(q, s) == cplx(0.0));
    const int n = h.dim() - 1;
    auto waveguide = [&](double VQ) {
        m.VQ = VQ;
        const auto hh = build_hamiltonian(m, false);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hh.matrix.topLeftCorner(n, n));
        return Eigen::VectorXd(es.eigenvalues());
    };
    CHECK((waveguide(-50) - waveguide(900)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ports add self-energies and clear the Hermitian flag") {
    auto m = make(2, 10, 50, 60, 20, 0, 0);
    m.sigmaL = {0.0, -18.0};
    m.sigmaR = {1.0, -9.0};
    const auto open = build_hamiltonian(m, true);
    const auto closed = build_hamiltonian(m, false);
    CHECK_FALSE(open.hermitian);
    CHECK(open.at(1, 1) - closed.at(1, 1) == m.sigmaL);
    const int r = open.roles.portR;
    CHECK(open.at(r, r) - closed.at(r, r) == m.sigmaR);
}

TEST_CASE("mirror asymmetry of the on-site pattern") {
    for (int p = 1; p <= 6; ++p) {
        const auto roles = site_roles(p);
        auto diag = [&](double V) {
            const auto h = build_hamiltonian(make(p, V, 100, 140, 30, 0, 25), false);
            std::vector<double> left, right;
            for (int s = 1; s <= roles.NL; ++s) left.push_back(h.at(s, s).real());
            for (int s = roles.portR; s >= roles.NR; --s) right.push_back(h.at(s, s).real());
            return left == right;
        };
        CHECK_FALSE(diag(10.0));
        CHECK(diag(0.0));
    }
}

TEST_CASE("V=0 SSH limit has a spectrum symmetric about zero") {
    for (int p = 1; p <= 6; ++p) {
        const auto h = build_hamiltonian(make(p, 0, 100, 140, 30, 0, 0), false);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix);
        const auto& e = es.eigenvalues();
        const int n = static_cast<int>(e.size());
        for (int k = 0; k < n; ++k) CHECK(std::abs(e[k] + e[n - 1 - k]) < 1e-10);
    }
}

TEST_CASE("parameter validation") {
    auto m = make(2, 10, 50, 60, 20, 0, 0);
    m.sigmaL = {0.0, 5.0};
    CHECK_THROWS_AS(build_hamiltonian(m, true), Error);
    m = make(0, 10, 50, 60, 20, 0, 0);
    CHECK_THROWS_AS(build_hamiltonian(m, false), Error);
    m = make(2, std::nan(""), 50, 60, 20, 0, 0);
    CHECK_THROWS_AS(build_hamiltonian(m, false), Error);
}

TEST_CASE("config round trip") {
    auto m = presets::fig3();
    m.f0 = 4321.5;
    m.sigmaR = {0.25, -7.125};
    const auto path = (std::filesystem::temp_directory_path() / "rmwg_test_params.cfg").string();
    save_params(m, path);
    const auto back = load_params(path);
    std::filesystem::remove(path);
    CHECK(back == m);

    const auto kv = parse_key_values("# comment\np = 3\nV=12.5\n\nsigmaL_im = -4\n");
    const auto parsed = params_from_key_values(kv);
    CHECK(parsed.p == 3);
    CHECK(parsed.V == 12.5);
    CHECK(parsed.sigmaL == cplx(0.0, -4.0));

    CHECK_THROWS_AS(parse_key_values("p = 3\nnot a pair\n"), Error);
    CHECK_THROWS_AS(params_from_key_values(parse_key_values("V = abc\n")), Error);
    CHECK_THROWS_AS(load_params("/nonexistent/dir/params.cfg"), Error);
}

TEST_CASE("get and set by key") {
    ModelParams m;
    set_param(m, "t1", 3.5);
    set_param(m, "sigmaR_im", -2.0);
    CHECK(get_param(m, "t1") == 3.5);
    CHECK(m.sigmaR.imag() == -2.0);
    CHECK_THROWS_AS(set_param(m, "bogus", 1.0), Error);
    CHECK_THROWS_AS(get_param(m, "bogus"), Error);
}

TEST_CASE("presets") {
    const auto f1 = presets::fig1();
    CHECK(f1.p == 10);
    CHECK(f1.V == 37.5);
    CHECK(f1.t1 == 120.0);
    CHECK(f1.t2 == 150.0);
    CHECK(f1.tQ == 62.5);
    CHECK(f1.VQ == -37.5);
    const auto f3 = presets::fig3();
    CHECK(f3.p == 4);
    CHECK(f3.sigmaL == cplx(0.0, -18.0));
    CHECK(std::abs(f3.VQ) >= 10.0 * 280.0);
    CHECK(presets::by_name("fig5").VQ == -40.0);
    CHECK_THROWS_AS(presets::by_name("nope"), Error);
}
