#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "circulaw/cli.hpp"
#include "circulaw/errors.hpp"
#include "circulaw/experiments.hpp"
#include "circulaw/report.hpp"

using namespace circulaw;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("circulaw_cli_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run_binary(const std::string& args) {
    const std::string cmd = std::string(CIRCULAW_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

EnsembleConfig gaussian(std::size_t n, std::uint64_t seed) {
    return EnsembleConfig{n, 1.0, EntryDistribution::real_gaussian(), seed, std::nullopt};
}

}  // namespace

TEST_CASE("esd and sample are thin adapters over the library") {
    const auto esd = cli({"esd", "--n", "12", "--seed", "5", "--trial", "2"});
    REQUIRE(esd.code == 0);
    std::ostringstream direct;
    write_spectrum_csv(eigenvalues(sample_matrix(gaussian(12, 5), 2)), direct);
    CHECK(esd.out == direct.str());
    CHECK(count(esd.out, "\n") == 13);

    const auto sample = cli({"sample", "--n", "6", "--p", "0.5", "--dist", "rademacher", "--seed", "3"});
    REQUIRE(sample.code == 0);
    std::ostringstream matrix;
    write_matrix_csv(sample_matrix(EnsembleConfig{6, 0.5, EntryDistribution::rademacher(), 3, std::nullopt}, 0),
                     matrix);
    CHECK(sample.out == matrix.str());
    CHECK(count(sample.out, "\n") == 37);

    const auto theta = cli({"esd", "--n", "64", "--theta", "0.5", "--seed", "1"});
    REQUIRE(theta.code == 0);
    std::ostringstream sparse;
    write_spectrum_csv(eigenvalues(sample_matrix(EnsembleConfig::with_theta(64, 0.5, EntryDistribution::real_gaussian(), 1), 0)),
                       sparse);
    CHECK(theta.out == sparse.str());
}

TEST_CASE("experiment subcommands match direct runner output") {
    ExperimentSpec spec;
    spec.ensemble = EnsembleConfig{16, 1.0, EntryDistribution::complex_gaussian(), 8, std::nullopt};
    spec.trials = 5;
    spec.z_points = {Complex{0.5, 0}, Complex{0, -1.5}};

    auto as_json = [](const ExperimentReport& r) {
        std::ostringstream s;
        write_report(r, s, ReportFormat::Json);
        return s.str();
    };
    const std::vector<std::string> common = {"--n", "16", "--dist", "cgaussian", "--seed", "8", "--trials", "5",
                                             "--z", "0.5+0i", "--z", "0-1.5i"};
    auto with = [&](std::string sub, std::vector<std::string> extra) {
        std::vector<std::string> args{std::move(sub)};
        args.insert(args.end(), common.begin(), common.end());
        args.insert(args.end(), extra.begin(), extra.end());
        return cli(args);
    };

    spec.kind = ExperimentKind::SvLaw;
    const auto sv = with("svlaw", {});
    REQUIRE(sv.code == 0);
    CHECK(sv.out == as_json(run_sv_law(spec)));

    spec.kind = ExperimentKind::Potential;
    spec.r.automatic = true;
    spec.b_exponent = 2.5;
    const auto pot = with("potential", {"--r", "auto", "--B", "2.5"});
    REQUIRE(pot.code == 0);
    CHECK(pot.out == as_json(run_potential(spec)));

    spec.kind = ExperimentKind::MinSv;
    spec.r = SmoothingRadius{};
    spec.b_exponent = 3.0;
    spec.thresholds = {0.001, 0.1};
    spec.trials = 50;
    const auto mins = cli({"minsv", "--n", "16", "--dist", "cgaussian", "--seed", "8", "--trials", "50", "--z", "0.5+0i",
                           "--z", "0-1.5i", "--thresholds", "0.001,0.1", "--format", "csv"});
    REQUIRE(mins.code == 0);
    std::ostringstream csv;
    write_report(run_minsv(spec), csv, ReportFormat::Csv);
    CHECK(mins.out == csv.str());
}

TEST_CASE("minsv defaults to 50 trials") {
    const auto r = cli({"minsv", "--n", "8", "--seed", "2", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",50,") != std::string::npos);
}

TEST_CASE("report subcommand writes where and how the spec or flags ask") {
    TempDir dir;
    const std::string spec_path = dir / "spec.json";
    {
        std::ofstream s(spec_path);
        s << R"({"kind": "max_sv", "ensemble": {"n": 8, "p_n": 1.0, "dist": {"tag": "rademacher", "params": {}},
                 "master_seed": 4}, "trials": 10, "output": ")"
          << (dir / "from_spec.csv") << "\"}";
    }
    REQUIRE(cli({"report", "--spec", spec_path}).code == 0);
    const auto text = slurp(dir / "from_spec.csv");
    CHECK(text.rfind("spec_hash,n,p_n,threshold,frequency", 0) == 0);
    const auto spec = load_experiment(spec_path);
    std::ostringstream direct;
    write_report(run_experiment(spec), direct, ReportFormat::Csv);
    CHECK(text == direct.str());

    REQUIRE(cli({"report", "--spec", spec_path, "--out", dir / "flag.out", "--format", "json"}).code == 0);
    CHECK(slurp(dir / "flag.out").front() == '{');
}

TEST_CASE("exit codes") {
    TempDir dir;
    const auto missing_seed = cli({"esd", "--n", "8"});
    CHECK(missing_seed.code == 2);
    CHECK(missing_seed.err.find("--seed") != std::string::npos);
    CHECK(missing_seed.err.find("Usage") != std::string::npos);
    CHECK(cli({}).code == 2);
    CHECK(cli({"esd", "--n", "8", "--seed", "1", "--bogus"}).code == 2);
    CHECK(cli({"esd", "--n", "8", "--seed", "1", "--p", "0.5", "--theta", "0.5"}).code == 2);
    CHECK(cli({"esd", "--n", "8", "--seed", "1", "--dist", "cauchy"}).code == 2);
    CHECK(cli({"esd", "--n", "8", "--seed", "1", "--p", "1.5"}).code == 2);
    CHECK(cli({"potential", "--n", "8", "--seed", "1", "--r", "wide"}).code == 2);
    CHECK(cli({"minsv", "--n", "8", "--seed", "1", "--thresholds", "1e-3,x"}).code == 2);
    CHECK(cli({"svlaw", "--n", "8", "--seed", "1", "--z", "1+"}).code == 2);
    CHECK(cli({"report", "--spec", dir / "absent.json"}).code == 4);
    {
        std::ofstream s(dir / "broken.json");
        s << "{\"kind\": ";
    }
    CHECK(cli({"report", "--spec", dir / "broken.json"}).code == 2);
    CHECK(cli({"esd", "--n", "8", "--seed", "1", "--out", "/nonexistent-dir/x.csv"}).code == 4);
    const auto help = cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("plot") != std::string::npos);
}

TEST_CASE("installed executable") {
    TempDir dir;
    CHECK(run_binary("esd --n 16 --seed 3 --out " + dir / "ev.csv") == 0);
    CHECK(count(slurp(dir / "ev.csv"), "\n") == 17);
    CHECK(run_binary("esd --n 16") == 2);
    CHECK(run_binary("plot --in " + dir / "missing.csv --out " + dir / "x.svg") == 4);
    CHECK(run_binary("plot --in " + dir / "ev.csv --out " + dir / "ev.svg") == 0);
    CHECK(count(slurp(dir / "ev.svg"), "class=\"marker\"") == 16);
}

TEST_CASE("plot output") {
    TempDir dir;
    const std::string data = CIRCULAW_TEST_DATA;
    REQUIRE(cli({"plot", "--in", data + "/plot_input.csv", "--out", dir / "p.svg"}).code == 0);
    const auto svg = slurp(dir / "p.svg");
    CHECK(svg == slurp(data + "/plot_golden.svg"));
    CHECK(count(svg, "class=\"marker\"") == 4);
    CHECK(count(svg, "class=\"unit-circle\"") == 1);

    // extent 1.05 * 1.5, 220 px from centre to margin
    const double scale = 220.0 / (1.05 * 1.5);
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex(R"re(<circle[^>]* r="([0-9.]+)")re")));
    CHECK(std::stod(m[1]) == doctest::Approx(scale).epsilon(1e-6));
    char expected[128];
    std::snprintf(expected, sizeof expected, "x=\"%.4f\" y=\"%.4f\"", 240.0 - 1.5 * scale - 1, 240.0 - 1.25 * scale - 1);
    CHECK(svg.find(expected) != std::string::npos);

    REQUIRE(cli({"plot", "--in", data + "/plot_input.csv", "--out", dir / "bare.svg", "--no-circle"}).code == 0);
    CHECK(count(slurp(dir / "bare.svg"), "<circle") == 0);

    {
        std::ofstream e(dir / "empty.csv");
        e << "re,im\n";
    }
    REQUIRE(cli({"plot", "--in", dir / "empty.csv", "--out", dir / "empty.svg"}).code == 0);
    const auto empty = slurp(dir / "empty.svg");
    CHECK(count(empty, "class=\"marker\"") == 0);
    CHECK(count(empty, "class=\"unit-circle\"") == 1);
    CHECK(empty.find("</svg>") != std::string::npos);

    {
        std::ofstream b(dir / "bad.csv");
        b << "re,im\n0.1,0.2\n0.3,oops\n";
    }
    const auto bad = cli({"plot", "--in", dir / "bad.csv", "--out", dir / "bad.svg"});
    CHECK(bad.code == 4);
    CHECK(bad.err.find("line 3") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "bad.svg"));

    {
        std::ofstream r(dir / "ragged.csv");
        r << "re,im\n0.1,0.2\n0.3\n";
    }
    CHECK(cli({"plot", "--in", dir / "ragged.csv", "--out", dir / "r.svg"}).code == 4);
    {
        std::ofstream h(dir / "header.csv");
        h << "x,y\n0.1,0.2\n";
    }
    CHECK(cli({"plot", "--in", dir / "header.csv", "--out", dir / "h.svg"}).code == 4);
}

TEST_CASE("spectrum CSV round trip") {
    const auto ev = eigenvalues(sample_matrix(gaussian(20, 11), 0));
    std::stringstream ss;
    write_spectrum_csv(ev, ss);
    const auto back = read_spectrum_csv(ss);
    REQUIRE(back.size() == ev.values.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == ev.values[i]);
}
