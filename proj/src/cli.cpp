#include "circulaw/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "circulaw/errors.hpp"
#include "circulaw/experiments.hpp"
#include "circulaw/report.hpp"

namespace circulaw {

void write_spectrum_csv(const ComplexSpectrum& spectrum, std::ostream& out) {
    out << "re,im\n";
    for (const auto& l : spectrum.values) out << format_double(l.real()) << ',' << format_double(l.imag()) << '\n';
}

void write_matrix_csv(const MatrixSample& sample, std::ostream& out) {
    out << "row,col,re,im\n";
    const auto& m = sample.entries();
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            out << j << ',' << k << ',' << format_double(m(j, k).real()) << ',' << format_double(m(j, k).imag()) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double cell_value(const std::string& cell, std::size_t lineno) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used == cell.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw IoError("line " + std::to_string(lineno) + ": not a finite number: '" + cell + "'");
}

}  // namespace

std::vector<Complex> read_spectrum_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("line 1: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    const auto re_it = std::find(header.begin(), header.end(), "re");
    const auto im_it = std::find(header.begin(), header.end(), "im");
    if (re_it == header.end() || im_it == header.end()) throw IoError("line 1: header must contain re and im columns");
    const auto re_col = static_cast<std::size_t>(re_it - header.begin());
    const auto im_col = static_cast<std::size_t>(im_it - header.begin());
    std::vector<Complex> points;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw IoError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                          " fields, found " + std::to_string(cells.size()));
        }
        points.emplace_back(cell_value(cells[re_col], lineno), cell_value(cells[im_col], lineno));
    }
    return points;
}

void plot_spectrum(const std::vector<Complex>& points, std::ostream& svg, bool overlay_unit_circle) {
    constexpr double size = 480.0;
    constexpr double margin = 20.0;
    double extent = 1.2;
    for (const auto& p : points) extent = std::max(extent, 1.05 * std::max(std::abs(p.real()), std::abs(p.imag())));
    const double scale = (size / 2 - margin) / extent;
    const double c = size / 2;
    char buf[256];
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  size, size, size, size);
    svg << buf;
    svg << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.4f\" y1=\"%.4f\" x2=\"%.4f\" y2=\"%.4f\" stroke=\"#dddddd\"/>\n"
                  "<line x1=\"%.4f\" y1=\"%.4f\" x2=\"%.4f\" y2=\"%.4f\" stroke=\"#dddddd\"/>\n",
                  margin, c, size - margin, c, c, margin, c, size - margin);
    svg << buf;
    if (overlay_unit_circle) {
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"unit-circle\" cx=\"%.4f\" cy=\"%.4f\" r=\"%.4f\" fill=\"none\" "
                      "stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n",
                      c, c, scale);
        svg << buf;
    }
    svg << "<g class=\"eigenvalues\" fill=\"#1f4e79\">\n";
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "<rect class=\"marker\" x=\"%.4f\" y=\"%.4f\" width=\"2\" height=\"2\"/>\n",
                      c + scale * p.real() - 1.0, c - scale * p.imag() - 1.0);
        svg << buf;
    }
    svg << "</g>\n</svg>\n";
}

void plot_spectrum(const std::string& csv_in, const std::string& svg_out, bool overlay_unit_circle) {
    std::ifstream in(csv_in);
    if (!in) throw IoError("cannot open '" + csv_in + "'");
    std::vector<Complex> points;
    try {
        points = read_spectrum_csv(in);
    } catch (const IoError& e) {
        throw IoError(csv_in + ": " + e.what());
    }
    std::ostringstream svg;
    plot_spectrum(points, svg, overlay_unit_circle);
    std::ofstream out(svg_out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + svg_out + "' for writing");
    out << svg.str();
    if (!out.flush()) throw IoError("failed writing '" + svg_out + "'");
}

namespace {

struct EnsembleFlags {
    std::size_t n = 0;
    double p = 1.0;
    std::optional<double> theta;
    std::string dist = "gaussian";
    std::optional<std::uint64_t> seed;
};

struct ExperimentFlags {
    std::vector<std::string> z{"0"};
    std::string r = "0";
    std::size_t trials = 20;
    std::string thresholds;
    double b_exponent = 3.0;
};

struct OutputFlags {
    std::string out;
    std::string format;
    std::size_t threads = 0;
};

EntryDistribution dist_from_flag(const std::string& name) {
    if (name == "gaussian") return EntryDistribution::real_gaussian();
    if (name == "cgaussian") return EntryDistribution::complex_gaussian();
    if (name == "rademacher") return EntryDistribution::rademacher();
    if (name == "crademacher") return EntryDistribution::complex_rademacher();
    if (name == "uniform") return EntryDistribution::uniform_symmetric();
    throw ConfigError("unknown distribution '" + name + "'");
}

EnsembleConfig ensemble_from_flags(const EnsembleFlags& f) {
    if (!f.seed) throw UsageError("--seed is required");
    EnsembleConfig c;
    if (f.theta) {
        c = EnsembleConfig::with_theta(f.n, *f.theta, dist_from_flag(f.dist), *f.seed);
    } else {
        c.n = f.n;
        c.p_n = f.p;
        c.dist = dist_from_flag(f.dist);
        c.master_seed = *f.seed;
    }
    c.validate();
    return c;
}

SmoothingRadius radius_from_flag(const std::string& text) {
    SmoothingRadius r;
    if (text == "auto") {
        r.automatic = true;
        return r;
    }
    try {
        std::size_t used = 0;
        r.value = std::stod(text, &used);
        if (used == text.size()) return r;
    } catch (const std::exception&) {
    }
    throw ConfigError("--r must be a number or 'auto'");
}

std::vector<double> list_from_flag(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    for (const auto& cell : split(text, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw ConfigError("");
        } catch (const std::exception&) {
            throw ConfigError("--thresholds: cannot parse '" + cell + "'");
        }
    }
    return out;
}

void add_ensemble_flags(CLI::App& cmd, EnsembleFlags& f) {
    cmd.add_option("--n", f.n, "Matrix dimension")->required()->check(CLI::PositiveNumber);
    auto* p = cmd.add_option("--p", f.p, "Sparsity probability p_n");
    cmd.add_option("--theta", f.theta, "Sparsity exponent: p_n = n^-(1-theta)")->excludes(p);
    cmd.add_option("--dist", f.dist, "Entry law")
        ->check(CLI::IsMember({"gaussian", "cgaussian", "rademacher", "crademacher", "uniform"}));
    cmd.add_option("--seed", f.seed, "Master seed")->required();
}

void add_output_flags(CLI::App& cmd, OutputFlags& f, bool with_format) {
    cmd.add_option("--out", f.out, "Output file (standard output if omitted)");
    if (with_format) cmd.add_option("--format", f.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--threads", f.threads, "Worker threads (0 = all, capped by CIRCULAW_THREADS)");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << text;
    if (!file.flush()) throw IoError("failed writing '" + path + "'");
}

void emit_report(const ExperimentReport& report, const OutputFlags& f, const std::optional<std::string>& spec_format,
                 std::ostream& out) {
    ReportFormat format = ReportFormat::Json;
    if (!f.format.empty()) format = format_from_name(f.format);
    else if (spec_format) format = format_from_name(*spec_format);
    else if (!f.out.empty()) format = format_for_path(f.out);
    std::ostringstream text;
    write_report(report, text, format);
    emit(text.str(), f.out, out);
}

ExperimentSpec spec_from_flags(ExperimentKind kind, const EnsembleFlags& e, const ExperimentFlags& x) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.ensemble = ensemble_from_flags(e);
    spec.trials = x.trials;
    for (const auto& z : x.z) spec.z_points.push_back(parse_complex(z));
    spec.r = radius_from_flag(x.r);
    spec.thresholds = list_from_flag(x.thresholds);
    spec.b_exponent = x.b_exponent;
    spec.validate();
    return spec;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return 4;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e) ||
        dynamic_cast<const DomainError*>(&e)) {
        return 2;
    }
    return 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random-matrix spectral laboratory", "circulaw"};
    app.require_subcommand(1);

    EnsembleFlags ens;
    ExperimentFlags exp;
    OutputFlags outf;
    std::size_t trial = 0;
    std::string spec_path, csv_in;
    bool no_circle = false;

    auto* sample = app.add_subcommand("sample", "Write the entries of one matrix draw as CSV");
    add_ensemble_flags(*sample, ens);
    sample->add_option("--trial", trial, "Trial index");
    add_output_flags(*sample, outf, false);

    auto* esd = app.add_subcommand("esd", "Write the eigenvalues of one draw as CSV");
    add_ensemble_flags(*esd, ens);
    esd->add_option("--trial", trial, "Trial index");
    add_output_flags(*esd, outf, false);

    auto* svlaw = app.add_subcommand("svlaw", "Distance of the singular-value law to its limit");
    add_ensemble_flags(*svlaw, ens);
    svlaw->add_option("--z", exp.z, "Shift points a+bi");
    svlaw->add_option("--trials", exp.trials)->check(CLI::PositiveNumber);
    add_output_flags(*svlaw, outf, true);

    auto* potential = app.add_subcommand("potential", "Empirical log-potential against the limit");
    add_ensemble_flags(*potential, ens);
    potential->add_option("--z", exp.z, "Shift points a+bi");
    potential->add_option("--r", exp.r, "Smoothing radius or 'auto'");
    potential->add_option("--trials", exp.trials)->check(CLI::PositiveNumber);
    potential->add_option("--B", exp.b_exponent, "Truncation exponent");
    add_output_flags(*potential, outf, true);

    auto* minsv = app.add_subcommand("minsv", "Tail of the smallest singular value");
    add_ensemble_flags(*minsv, ens);
    minsv->add_option("--z", exp.z, "Shift points a+bi");
    auto* minsv_trials = minsv->add_option("--trials", exp.trials, "Trials (default 50)")->check(CLI::PositiveNumber);
    minsv->add_option("--thresholds", exp.thresholds, "Comma-separated thresholds");
    minsv->add_option("--B", exp.b_exponent, "Default threshold is 1/n^B");
    add_output_flags(*minsv, outf, true);

    auto* report = app.add_subcommand("report", "Run an experiment described by a JSON spec file");
    report->add_option("--spec", spec_path, "Spec file")->required();
    add_output_flags(*report, outf, true);

    auto* plot = app.add_subcommand("plot", "Render an eigenvalue CSV as SVG");
    plot->add_option("--in", csv_in, "CSV with re,im columns")->required();
    plot->add_option("--out", outf.out, "SVG output file")->required();
    plot->add_flag("--no-circle", no_circle, "Omit the unit circle overlay");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }

    try {
        if (sample->parsed()) {
            std::ostringstream text;
            write_matrix_csv(sample_matrix(ensemble_from_flags(ens), trial), text);
            emit(text.str(), outf.out, out);
        } else if (esd->parsed()) {
            std::ostringstream text;
            write_spectrum_csv(eigenvalues(sample_matrix(ensemble_from_flags(ens), trial)), text);
            emit(text.str(), outf.out, out);
        } else if (svlaw->parsed()) {
            const auto spec = spec_from_flags(ExperimentKind::SvLaw, ens, exp);
            emit_report(run_sv_law(spec, {outf.threads}), outf, std::nullopt, out);
        } else if (potential->parsed()) {
            const auto spec = spec_from_flags(ExperimentKind::Potential, ens, exp);
            emit_report(run_potential(spec, {outf.threads}), outf, std::nullopt, out);
        } else if (minsv->parsed()) {
            if (minsv_trials->count() == 0) exp.trials = 50;
            const auto spec = spec_from_flags(ExperimentKind::MinSv, ens, exp);
            emit_report(run_minsv(spec, {outf.threads}), outf, std::nullopt, out);
        } else if (report->parsed()) {
            const auto spec = load_experiment(spec_path);
            OutputFlags target = outf;
            if (target.out.empty()) target.out = spec.output;
            emit_report(run_experiment(spec, {outf.threads}), target, spec.format, out);
        } else if (plot->parsed()) {
            plot_spectrum(csv_in, outf.out, !no_circle);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}

}  // namespace circulaw
