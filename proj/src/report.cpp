#include <algorithm>
#include <cmath>

#include "regpot/io.hpp"
#include "regpot/pipeline.hpp"
#include "regpot/svg.hpp"

namespace fs = std::filesystem;

namespace regpot {
namespace {

bool has(const fs::path& dir, const char* file) { return fs::exists(dir / file); }

std::vector<double> absolute(const std::vector<double>& y) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::fabs(y[i]);
    return out;
}

void emit(const fs::path& dir, const std::string& name, const PlotSpec& spec, const std::vector<PlotSeries>& series,
          std::vector<std::string>& figures) {
    write_file_atomic(dir / name, render_svg(spec, series));
    figures.push_back(name);
}

}  // namespace

void stage_report(const ExperimentConfig& cfg, const fs::path& dir) {
    std::vector<std::string> figures;

    if (has(dir, artifact::kLandscape) && has(dir, artifact::kEigenpairs)) {
        const auto land = read_csv(dir / artifact::kLandscape);
        const auto x = land.column("x");
        const auto u = land.column("u");
        const auto pairs = load_eigenpairs(dir);
        std::vector<PlotSeries> s;
        s.push_back({"u / max u", x, normalize_unit(u)});
        for (std::size_t k = 0; k < std::min<std::size_t>(5, pairs.size()); ++k)
            s.push_back({"|phi_" + std::to_string(k + 1) + "|", x, absolute(pairs[k].phi)});
        emit(dir, "overlay.svg", {"Landscape peaks and low-lying eigenfunctions", "x", "normalized", false, false}, s,
             figures);
    }

    if (has(dir, artifact::kRegularized)) {
        const auto reg = read_csv(dir / artifact::kRegularized);
        const auto x = reg.column("x");
        std::vector<PlotSeries> s;
        s.push_back({"V", x, reg.column("V")});
        for (const auto& name : reg.header())
            if (name.starts_with("vt_")) s.push_back({"V * k_t, t = " + name.substr(3), x, reg.column(name)});
        if (has(dir, artifact::kLandscape)) s.push_back({"1 / u", x, read_csv(dir / artifact::kLandscape).column("inv_u")});
        emit(dir, "regularized.svg", {"Potential and effective potentials", "x", "value", false, false}, s, figures);
    }

    if (has(dir, artifact::kGeneralized)) {
        const auto gen = read_csv(dir / artifact::kGeneralized);
        const auto x = gen.column("x");
        emit(dir, "generalized_fields.svg",
             {"Right-hand side f, its convolution, and v", "x", "normalized", false, false},
             {{"f", x, normalize_unit(gen.column("f"))},
              {"f * k_t", x, normalize_unit(gen.column("f_conv"))},
              {"v", x, normalize_unit(gen.column("v"))}},
             figures);
        if (has(dir, artifact::kLandscape)) {
            const auto u = read_csv(dir / artifact::kLandscape).column("u");
            emit(dir, "generalized_compare.svg", {"u against v / (f * k_t)", "x", "normalized", false, false},
                 {{"u", x, normalize_unit(u)}, {"v / (f * k_t)", x, normalize_unit(gen.column("ratio"))}}, figures);
        }
    }

    if (has(dir, artifact::kResiduals)) {
        const auto res = read_csv(dir / artifact::kResiduals);
        std::vector<PlotSeries> s;
        auto series_for = [&](const std::string& kind, const std::string& index, const std::string& label) {
            PlotSeries ps{label, {}, {}, false};
            for (std::size_t r = 0; r < res.rows(); ++r)
                if (res.cell(r, 0) == kind && res.cell(r, 1) == index) {
                    ps.x.push_back(parse_double(res.cell(r, 2)));
                    ps.y.push_back(parse_double(res.cell(r, 3)));
                }
            if (!ps.x.empty()) s.push_back(std::move(ps));
        };
        series_for("eigen", "1", "eigenfunction 1");
        series_for("landscape", "0", "landscape");
        emit(dir, "residuals.svg", {"Interior sup-norm residual", "t", "max |R|", true, true}, s, figures);
    }

    if (has(dir, artifact::kAgmon)) {
        const auto ag = read_csv(dir / artifact::kAgmon);
        const auto x = ag.column("x");
        std::vector<PlotSeries> s = {{"rho with w = 1/u", x, ag.column("rho_inverse_landscape")},
                                     {"rho with w = V * k_t", x, ag.column("rho_regularized")}};
        if (has(dir, artifact::kEigenpairs)) {
            const auto phi = load_eigenpairs(dir).front().phi;
            std::vector<double> neglog(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i) neglog[i] = -std::log(std::max(std::fabs(phi[i]), 1e-300));
            s.push_back({"-log |phi_1|", x, neglog});
        }
        emit(dir, "agmon.svg", {"Agmon distance from the first eigenfunction's peak", "x", "distance", false, false},
             s, figures);
    }

    std::string html = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Artifacts</title>"
                       "<style>body{font-family:sans-serif;margin:2em}img{max-width:820px;display:block;"
                       "margin-bottom:1.5em}td,th{padding:2px 10px;text-align:left}</style></head><body>\n";
    html += "<h1>Artifacts</h1>\n";
    if (has(dir, artifact::kGates)) {
        const auto gates = read_csv(dir / artifact::kGates);
        html += "<h2>Gates</h2>\n<table><tr><th>gate</th><th>result</th><th>value</th><th>threshold</th></tr>\n";
        for (std::size_t r = 0; r < gates.rows(); ++r)
            html += "<tr><td>" + gates.cell(r, 0) + "</td><td>" + (gates.cell(r, 1) == "1" ? "pass" : "FAIL") +
                    "</td><td>" + gates.cell(r, 2) + "</td><td>" + gates.cell(r, 3) + "</td></tr>\n";
        html += "</table>\n";
    }
    html += "<h2>Figures</h2>\n";
    for (const auto& f : figures) html += "<img src=\"" + f + "\" alt=\"" + f + "\">\n";
    html += "<h2>Tables</h2>\n<ul>\n";
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv" || e.path().filename() == artifact::kManifest)
            files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) html += "<li><a href=\"" + f + "\">" + f + "</a></li>\n";
    html += "</ul>\n<p>boundary policy: " + to_string(cfg.boundary) + "; version " + code_version() + "</p>\n";
    html += "</body></html>\n";
    write_file_atomic(dir / artifact::kIndex, html);
}

}  // namespace regpot
