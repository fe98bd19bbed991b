#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rmwg/io.hpp"
#include "rmwg/recipes.hpp"

using namespace rmwg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("rmwg_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::invalid_input;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("format_number round-trips doubles") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(io::format_number(v)) == v);
    }
    CHECK(io::format_number(0.5) == "0.5");
    CHECK(io::format_number(-2.0) == "-2");
    CHECK(io::format_number(HUGE_VAL) == "inf");
}

TEST_CASE("csv parsing skips comments and records line numbers") {
    const auto t = io::parse_csv("# comment\na, b\n\n1, 2\n# more\n3,4\n", "x.csv");
    REQUIRE(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1] == std::vector<double>{3.0, 4.0});
    CHECK(t.line_numbers == std::vector<int>{4, 6});
    CHECK(t.column("b", "x.csv") == 1);
    CHECK(code_of([&] { t.column("c", "x.csv"); }) == ErrorCode::parse);
}

TEST_CASE("csv errors name the offending line") {
    const auto bad_number = message_of([] { io::parse_csv("a,b\n1,2\n3,x\n", "obs.csv"); });
    CHECK(bad_number.find("obs.csv:3") != std::string::npos);
    const auto short_row = message_of([] { io::parse_csv("a,b\n1,2\n\n5\n", "obs.csv"); });
    CHECK(short_row.find("obs.csv:4") != std::string::npos);
    CHECK(code_of([] { io::parse_csv("a,b\n1,2,3\n", "s"); }) == ErrorCode::parse);
    CHECK(code_of([] { io::parse_csv("# only comments\n", "s"); }) == ErrorCode::parse);
    CHECK(code_of([] { io::read_csv("/nonexistent/dir/file.csv"); }) == ErrorCode::io);
}

TEST_CASE("trace csv round trip") {
    TimeTrace tr;
    tr.t = uniform_grid(10.0, 11);
    std::vector<cplx> a, b;
    for (double t : tr.t) {
        a.emplace_back(std::cos(t) / 3.0, std::sin(t) * 1e-7);
        b.emplace_back(t * t, -t);
    }
    tr.add("port_L", a);
    tr.add("sigma_z", b);
    const auto back = io::parse_trace_csv(io::trace_csv(tr), "mem");
    CHECK(back.t == tr.t);
    CHECK(back.names == tr.names);
    CHECK(back.channel("port_L") == a);
    CHECK(back.channel("sigma_z") == b);
    const auto only = io::parse_trace_csv(io::trace_csv(tr, {"sigma_z"}), "mem");
    CHECK(only.names == std::vector<std::string>{"sigma_z"});
    CHECK_THROWS_AS(tr.channel("nope"), Error);

    CHECK(code_of([] { io::parse_trace_csv("t_ns,x_re\n0,1\n", "tr"); }) == ErrorCode::parse);
    CHECK(code_of([] { io::parse_trace_csv("t_ns,x_re,y_im\n0,1,2\n", "tr"); }) == ErrorCode::parse);
    const auto order = message_of([] { io::parse_trace_csv("t_ns,x_re,x_im\n0,1,2\n1,1,2\n1,1,2\n", "tr"); });
    CHECK(order.find("tr:4") != std::string::npos);
}

TEST_CASE("observation and gap csv round trip") {
    const auto d = scratch_dir("obs");
    PeakSet ps;
    ps.peaks = {{0.0, 4900.5, 1.0}, {0.0, 5012.25, 0.5}};
    io::write_text((d / "obs.csv").string(), io::observations_csv(ps));
    const auto back = io::read_observations_csv((d / "obs.csv").string());
    REQUIRE(back.size() == 2);
    CHECK(back.peaks[1].frequency == 5012.25);
    CHECK(back.peaks[1].amplitude == 0.5);

    io::write_text((d / "gaps.csv").string(), io::gaps_csv({{5100.0, 30.0}}));
    const auto gaps = io::read_gaps_csv((d / "gaps.csv").string());
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].gap == 30.0);
    io::write_text((d / "neg.csv").string(), "VQ_MHz,gap_MHz\n5100,-3\n");
    const auto neg = message_of([&] { io::read_gaps_csv((d / "neg.csv").string()); });
    CHECK(neg.find("neg.csv:2") != std::string::npos);
}

TEST_CASE("infinite values serialize as null") {
    CHECK(io::number_or_null(HUGE_VAL).is_null());
    CHECK(io::number_or_null(2.5) == 2.5);
    ChiEstimate c;
    c.infinite = true;
    c.chi = HUGE_VAL;
    c.chi_dB = HUGE_VAL;
    c.fidelity = 1.0;
    const auto j = io::to_json(c, SignalAmplitudes{});
    CHECK(j.at("chi").is_null());
    CHECK(j.at("chi_dB").is_null());
    CHECK(j.at("infinite") == true);
    CHECK(io::json::parse(j.dump()) == j);
}

TEST_CASE("run config layering and validation") {
    const auto d = scratch_dir("cfg");
    io::write_text((d / "a.cfg").string(), "V = 12\nVQ_steps = 5\n");
    const auto cfg = make_run_config("spectrum", "fig1", (d / "a.cfg").string(), d.string(), 9, 2);
    CHECK(cfg.params.p == 10);
    CHECK(cfg.params.V == 12.0);
    CHECK(cfg.settings.at("VQ_steps") == "5");
    CHECK(cfg.settings.at("VQ_min") == "-150");
    CHECK(cfg.seed == 9);
    CHECK(cfg.threads == 2);

    io::write_text((d / "bad.cfg").string(), "frobnicate = 1\n");
    CHECK(code_of([&] { make_run_config("spectrum", "", (d / "bad.cfg").string(), d.string()); }) == ErrorCode::usage);
    CHECK(code_of([&] { make_run_config("spectrum", "", "", d.string()); }) == ErrorCode::usage);
    CHECK(code_of([&] { make_run_config("spectrum", "nosuch", "", d.string()); }) == ErrorCode::usage);
    CHECK(code_of([&] { make_run_config("nosuch", "fig1", "", d.string()); }) == ErrorCode::usage);
}

TEST_CASE("empty or inverted grids are usage errors") {
    const auto d = scratch_dir("grid");
    io::write_text((d / "empty.cfg").string(), "VQ_steps = 0\n");
    const auto cfg = make_run_config("spectrum", "fig1", (d / "empty.cfg").string(), d.string());
    CHECK(code_of([&] { run_command(cfg); }) == ErrorCode::usage);
    io::write_text((d / "inv.cfg").string(), "VQ_min = 10\nVQ_max = -10\n");
    const auto inv = make_run_config("spectrum", "fig1", (d / "inv.cfg").string(), d.string());
    CHECK(code_of([&] { run_command(inv); }) == ErrorCode::usage);
    io::write_text((d / "nan.cfg").string(), "VQ_steps = lots\n");
    const auto nan = make_run_config("spectrum", "fig1", (d / "nan.cfg").string(), d.string());
    CHECK(code_of([&] { run_command(nan); }) == ErrorCode::parse);
}

TEST_CASE("spectrum recipe is byte-deterministic and finds the edge states") {
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    io::write_text((a / "c.cfg").string(), "VQ_min = -60\nVQ_max = 60\nVQ_steps = 121\n");
    auto ca = make_run_config("spectrum", "fig1", (a / "c.cfg").string(), a.string(), 5, 1);
    auto cb = make_run_config("spectrum", "fig1", (a / "c.cfg").string(), b.string(), 5, 1);
    const auto files = run_command(ca);
    REQUIRE(run_command(cb) == files);
    for (const auto& f : files) CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);

    const auto j = io::json::parse(slurp(a / "directionality.json"));
    CHECK(j.at("working_points").at("VQ_left").get<double>() == doctest::Approx(-37.5).epsilon(0.5 / 37.5));
    CHECK(j.at("working_points").at("VQ_right").get<double>() == doctest::Approx(37.5).epsilon(0.5 / 37.5));
    const auto m = io::json::parse(slurp(a / "manifest.json"));
    CHECK(m.at("seed") == 5);
    CHECK(m.at("params").at("p") == 10);
}

TEST_CASE("chi recipe on the reference amplitude quadruple") {
    const auto d = scratch_dir("chi");
    const auto files = run_command(make_run_config("chi", "appc", "", d.string()));
    CHECK(std::find(files.begin(), files.end(), "chi.json") != files.end());
    const auto j = io::json::parse(slurp(d / "chi.json"));
    CHECK(j.at("chi").get<double>() == doctest::Approx(167.5).epsilon(1.0 / 167.5));
    CHECK(j.at("fidelity").get<double>() == doctest::Approx(0.994).epsilon(0.001));
}

TEST_CASE("emit recipe with all emission to the left leaves port R silent") {
    const auto d = scratch_dir("emit");
    io::write_text((d / "w.cfg").string(), "w_left = 1\nt_end = 300\nt_steps = 301\n");
    run_command(make_run_config("emit", "fig5", (d / "w.cfg").string(), d.string()));
    const auto tr = io::read_trace_csv((d / "bloch_trace.csv").string());
    for (const auto& v : tr.channel("port_R")) CHECK(v == cplx(0.0, 0.0));
    double peak = 0.0;
    for (const auto& v : tr.channel("port_L")) peak = std::max(peak, std::abs(v));
    CHECK(peak > 0.1);
}
