// Exercises the shared library through rmwg.h only.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "rmwg/rmwg.h"

namespace {

struct Params {
    rmwg_params* p = nullptr;
    explicit Params(const char* preset) { REQUIRE(rmwg_params_preset(preset, &p) == RMWG_OK); }
    ~Params() { rmwg_params_destroy(p); }
};

double get(const rmwg_params* p, const char* key) {
    double v = 0.0;
    REQUIRE(rmwg_params_get(p, key, &v) == RMWG_OK);
    return v;
}

}  // namespace

TEST_CASE("status names and exit codes") {
    CHECK(std::string(rmwg_status_name(RMWG_OK)) == "ok");
    CHECK(rmwg_exit_code(RMWG_OK) == 0);
    CHECK(rmwg_exit_code(RMWG_USAGE) == 2);
    CHECK(rmwg_exit_code(RMWG_INVALID_PARAMETER) == 2);
    CHECK(rmwg_exit_code(RMWG_PARSE) == 3);
    CHECK(rmwg_exit_code(RMWG_INVALID_INPUT) == 3);
    CHECK(rmwg_exit_code(RMWG_IO) == 3);
    CHECK(rmwg_exit_code(RMWG_NUMERICAL) == 4);
    CHECK(rmwg_exit_code(RMWG_SINGULAR) == 4);
    CHECK(rmwg_exit_code(RMWG_INTERNAL) == 4);
    CHECK(std::string(rmwg_version()).size() > 0);
}

TEST_CASE("null handles are rejected with a message") {
    double v = 0.0;
    CHECK(rmwg_params_get(nullptr, "V", &v) == RMWG_INVALID_INPUT);
    CHECK(std::string(rmwg_last_error()).find("params") != std::string::npos);
    CHECK(rmwg_params_create(nullptr) == RMWG_INVALID_INPUT);
    CHECK(rmwg_modes_compute(nullptr, nullptr) == RMWG_INVALID_INPUT);
    rmwg_params_destroy(nullptr);
    rmwg_hamiltonian_destroy(nullptr);
    rmwg_modes_destroy(nullptr);
    rmwg_run_config_destroy(nullptr);
}

TEST_CASE("last error is per thread") {
    double v = 0.0;
    CHECK(rmwg_params_get(nullptr, "V", &v) == RMWG_INVALID_INPUT);
    std::string other;
    std::thread([&] { other = rmwg_last_error(); }).join();
    CHECK(other.empty());
    CHECK_FALSE(std::string(rmwg_last_error()).empty());
}

TEST_CASE("parameters: presets, get/set and validation") {
    Params fig1("fig1");
    CHECK(get(fig1.p, "p") == 10);
    CHECK(get(fig1.p, "V") == 37.5);
    CHECK(get(fig1.p, "t1") == 120);
    CHECK(rmwg_params_set(fig1.p, "V", 20.0) == RMWG_OK);
    CHECK(get(fig1.p, "V") == 20.0);
    CHECK(rmwg_params_set(fig1.p, "t1", -1.0) == RMWG_INVALID_PARAMETER);
    CHECK(get(fig1.p, "t1") == 120);
    CHECK(rmwg_params_set(fig1.p, "bogus", 1.0) != RMWG_OK);
    rmwg_params* none = nullptr;
    CHECK(rmwg_params_preset("nosuch", &none) == RMWG_USAGE);
    CHECK(none == nullptr);
    CHECK(rmwg_params_load("/nonexistent/x.cfg", &none) == RMWG_IO);
}

TEST_CASE("parameters survive a save/load round trip") {
    Params fig3("fig3");
    const auto path = (std::filesystem::temp_directory_path() / "rmwg_capi_params.cfg").string();
    REQUIRE(rmwg_params_save(fig3.p, path.c_str()) == RMWG_OK);
    rmwg_params* back = nullptr;
    REQUIRE(rmwg_params_load(path.c_str(), &back) == RMWG_OK);
    for (const char* k : {"p", "V", "t1", "t2", "tQ", "VQ", "VM", "sigmaL_im", "sigmaR_im", "f0"})
        CHECK_MESSAGE(get(back, k) == get(fig3.p, k), k);
    rmwg_params_destroy(back);
}

TEST_CASE("site roles and Hamiltonian entries") {
    rmwg_site_roles r{};
    REQUIRE(rmwg_site_roles_for(4, &r) == RMWG_OK);
    CHECK(r.dim == 20);
    CHECK(r.portL == 1);
    CHECK(r.M == 10);
    CHECK(r.Q == 20);
    CHECK(rmwg_site_roles_for(0, &r) == RMWG_INVALID_PARAMETER);

    Params fig1("fig1");
    rmwg_hamiltonian* h = nullptr;
    REQUIRE(rmwg_hamiltonian_build(fig1.p, 0, &h) == RMWG_OK);
    CHECK(rmwg_hamiltonian_dim(h) == 44);
    CHECK(rmwg_hamiltonian_is_hermitian(h) == 1);
    double re = 0.0, im = 0.0;
    REQUIRE(rmwg_hamiltonian_entry(h, 1, 1, &re, &im) == RMWG_OK);
    CHECK(re == -37.5);
    REQUIRE(rmwg_hamiltonian_entry(h, 44, 44, &re, &im) == RMWG_OK);
    CHECK(re == get(fig1.p, "VQ"));
    CHECK(rmwg_hamiltonian_entry(h, 0, 1, &re, &im) == RMWG_INVALID_INPUT);
    rmwg_hamiltonian_destroy(h);

    REQUIRE(rmwg_hamiltonian_build(fig1.p, 1, &h) == RMWG_OK);
    CHECK(rmwg_hamiltonian_is_hermitian(h) == 0);
    rmwg_hamiltonian_destroy(h);
}

TEST_CASE("modes, gap and directionality") {
    Params fig1("fig1");
    double left = 0.0, right = 0.0;
    REQUIRE(rmwg_working_points(fig1.p, &left, &right) == RMWG_OK);
    CHECK(left == doctest::Approx(-37.5).epsilon(0.5 / 37.5));
    CHECK(right == doctest::Approx(37.5).epsilon(0.5 / 37.5));

    REQUIRE(rmwg_params_set(fig1.p, "VQ", left) == RMWG_OK);
    rmwg_hamiltonian* h = nullptr;
    REQUIRE(rmwg_hamiltonian_build(fig1.p, 0, &h) == RMWG_OK);
    rmwg_modes* m = nullptr;
    REQUIRE(rmwg_modes_compute(h, &m) == RMWG_OK);
    CHECK(rmwg_modes_count(m) == 44);
    rmwg_band_gap gap{};
    REQUIRE(rmwg_compute_band_gap(m, fig1.p, &gap) == RMWG_OK);
    CHECK(gap.n_in_gap == 2);
    CHECK(gap.lower < -37.5);
    CHECK(gap.upper > 37.5);

    int checked = 0;
    for (int k = 0; k < rmwg_modes_count(m); ++k) {
        rmwg_mode_class c{};
        REQUIRE(rmwg_modes_class(m, k, &c) == RMWG_OK);
        if (!c.in_gap) continue;
        rmwg_directionality d{};
        REQUIRE(rmwg_directionality_of(m, k, RMWG_LEFT, &d) == RMWG_OK);
        CHECK(d.pop_left + d.pop_right + d.pop_M + d.pop_Q == doctest::Approx(1.0));
        CHECK(d.fidelity == doctest::Approx(d.chi_infinite ? 1.0 : d.chi / (1.0 + d.chi)));
        ++checked;
    }
    CHECK(checked == 2);
    double re = 0.0, im = 0.0;
    CHECK(rmwg_modes_eigenvalue(m, 44, &re, &im) == RMWG_INVALID_INPUT);
    CHECK(rmwg_modes_amplitude(m, 0, 45, &re, &im) == RMWG_INVALID_INPUT);
    rmwg_modes_destroy(m);
    rmwg_hamiltonian_destroy(h);
}

TEST_CASE("S-matrix is reciprocal and conserves flux for a lossless interior") {
    Params fig4("fig4");
    rmwg_s_matrix s{};
    const double f0 = get(fig4.p, "f0");
    for (double E : {-150.0, -20.0, 0.0, 33.0, 120.0}) {
        REQUIRE(rmwg_s_matrix_at(fig4.p, E + f0, &s) == RMWG_OK);
        const std::complex<double> LL(s.LL_re, s.LL_im), LR(s.LR_re, s.LR_im), RL(s.RL_re, s.RL_im),
            RR(s.RR_re, s.RR_im);
        CHECK(std::abs(LR - RL) < 1e-10);
        CHECK(std::norm(LL) + std::norm(RL) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::norm(RR) + std::norm(LR) == doctest::Approx(1.0).epsilon(1e-9));
    }
    double rho = 0.0;
    REQUIRE(rmwg_ldos(fig4.p, f0, 10, &rho) == RMWG_OK);
    CHECK(rho >= 0.0);
}

TEST_CASE("decay time and self-energy inference") {
    Params fig5("fig5");
    double T1 = 0.0;
    REQUIRE(rmwg_dressed_decay_time(fig5.p, &T1) == RMWG_OK);
    CHECK(T1 > 55.0);
    CHECK(T1 < 220.0);
    double sigma_im = 0.0;
    REQUIRE(rmwg_infer_port_self_energy(fig5.p, 110.0, &sigma_im) == RMWG_OK);
    CHECK(-sigma_im > 9.0);
    CHECK(-sigma_im < 36.0);
    CHECK(rmwg_infer_port_self_energy(fig5.p, -1.0, &sigma_im) == RMWG_INVALID_PARAMETER);

    const std::vector<double> waits = {0.0, 50.0, 100.0};
    std::vector<double> pe(3);
    REQUIRE(rmwg_ramsey(2.0, waits.data(), waits.size(), 1000.0, pe.data()) == RMWG_OK);
    CHECK(pe[0] == doctest::Approx(1.0));
}

TEST_CASE("chi and demodulation") {
    rmwg_amplitudes a{108.2, 0.3, 0.7, 54.5, 0.3, 0.3, 0.3, 0.3};
    rmwg_chi c{};
    REQUIRE(rmwg_chi_estimate(&a, &c) == RMWG_OK);
    CHECK(c.chi == doctest::Approx(167.5).epsilon(1.0 / 167.5));
    CHECK(c.fidelity == doctest::Approx(0.994).epsilon(0.001));
    CHECK(c.chi_std > 0.0);
    a.s_lR = 0.0;
    REQUIRE(rmwg_chi_estimate(&a, &c) == RMWG_OK);
    CHECK(c.infinite == 1);
    a.s_lL = -1.0;
    CHECK(rmwg_chi_estimate(&a, &c) == RMWG_INVALID_INPUT);

    const std::size_t n = 2001;
    std::vector<double> t(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = 0.5 * static_cast<double>(i);
        x[i] = 4.0 * std::sin(2.0 * M_PI * 1e-2 * t[i]);
    }
    double amp = 0.0;
    REQUIRE(rmwg_demodulate(t.data(), x.data(), n, 10.0, 6.0, &amp) == RMWG_OK);
    CHECK(amp == doctest::Approx(2.0).epsilon(0.01));
    double mean = 0.0, sd = 0.0;
    REQUIRE(rmwg_bootstrap_amplitude(t.data(), x.data(), n, 10.0, 200, 7, 1, &mean, &sd) == RMWG_OK);
    CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
    CHECK(rmwg_demodulate(t.data(), x.data(), n, -1.0, 6.0, &amp) == RMWG_INVALID_PARAMETER);
}

TEST_CASE("running a recipe through the C API") {
    const auto dir = (std::filesystem::temp_directory_path() / "rmwg_capi_run").string();
    std::filesystem::remove_all(dir);
    rmwg_run_config* cfg = nullptr;
    REQUIRE(rmwg_run_config_create("chi", "appc", nullptr, dir.c_str(), &cfg) == RMWG_OK);
    CHECK(rmwg_run_config_set_seed(cfg, 42) == RMWG_OK);
    CHECK(rmwg_run_config_set_threads(cfg, 0) == RMWG_USAGE);
    std::size_t n = 0;
    REQUIRE(rmwg_run(cfg, &n) == RMWG_OK);
    CHECK(n == 2);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.emplace_back(rmwg_run_output(cfg, i));
    CHECK(names.back() == "manifest.json");
    CHECK(rmwg_run_output(cfg, n) == nullptr);
    CHECK(std::filesystem::exists(dir + "/chi.json"));
    rmwg_run_config_destroy(cfg);

    CHECK(rmwg_run_config_create("chi", nullptr, nullptr, dir.c_str(), &cfg) == RMWG_USAGE);
    CHECK(rmwg_run_config_create("nosuch", "appc", nullptr, dir.c_str(), &cfg) == RMWG_USAGE);
}
