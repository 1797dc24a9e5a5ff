// Command-line front end.  Each subcommand runs one pipeline stage against
// an artifact directory; `run` executes every stage from a config file.
//
// Exit status: 0 on success (and, for `run`, all enabled gates passing),
// 1 when a gate fails, 2 on any error.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "regpot/config.hpp"
#include "regpot/error.hpp"
#include "regpot/io.hpp"
#include "regpot/pipeline.hpp"

namespace fs = std::filesystem;
using namespace regpot;

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::vector<std::string> overrides;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config_path, "experiment config (key = value)");
    sub->add_option("-o,--out", c.out, "artifact directory (overrides `output`)");
    sub->add_option("-s,--set", c.overrides, "config override key=value (repeatable)");
    sub->add_option("-j,--threads", c.threads, "worker threads for Monte Carlo (0 = hardware)");
}

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("cli", "override '" + kv + "' is not key=value");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.out.empty()) cfg.output = c.out;
    validate(cfg);
    return cfg;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void print_gates(const std::vector<GateResult>& gates) {
    for (const auto& g : gates)
        std::printf("%-16s %s  value=%s  threshold=%s\n", g.name.c_str(), g.pass ? "PASS" : "FAIL",
                    format_double(g.value).c_str(), format_double(g.threshold).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized potentials, landscape functions and Feynman-Kac checks for 1-D Schroedinger operators"};
    app.require_subcommand(1);

    Common common;
    std::string sweep;
    int dump_paths = 0;

    std::vector<std::pair<CLI::App*, std::function<int(const ExperimentConfig&)>>> commands;
    auto stage = [&](const char* name, const char* help, std::function<int(const ExperimentConfig&)> fn) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, common);
        commands.emplace_back(sub, std::move(fn));
        return sub;
    };

    const auto dir = [](const ExperimentConfig& cfg) {
        fs::create_directories(cfg.output);
        return fs::path(cfg.output);
    };

    auto* gen = stage("gen-potential", "write potential.csv", [&](const ExperimentConfig& cfg) {
        const auto v = stage_potential(cfg, dir(cfg));
        std::printf("potential: n=%d max=%s mean=%s\n", v.grid().size(), format_double(v.max()).c_str(),
                    format_double(v.mean()).c_str());
        return 0;
    });
    gen->add_option_function<int>("--n", [&](int n) { common.overrides.push_back("n=" + std::to_string(n)); },
                                  "interior nodes");
    gen->add_option_function<int>(
        "--intervals", [&](int m) { common.overrides.push_back("intervals=" + std::to_string(m)); }, "block count M");
    gen->add_option_function<double>(
        "--vmax", [&](double v) { common.overrides.push_back("vmax=" + format_double(v)); }, "amplitude bound");
    gen->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { common.overrides.push_back("seed=" + std::to_string(s)); }, "RNG seed");

    auto* eig = stage("eigen", "lowest eigenpairs -> eigenpairs.csv", [&](const ExperimentConfig& cfg) {
        const auto pairs = stage_eigen(cfg, dir(cfg));
        for (const auto& p : pairs) std::printf("lambda_%d = %s\n", p.index, format_double(p.lambda).c_str());
        return 0;
    });
    eig->add_option_function<int>(
        "-k,--count", [&](int k) { common.overrides.push_back("eigen_count=" + std::to_string(k)); },
        "number of eigenpairs");

    stage("landscape", "landscape and generalized landscape -> landscape.csv, generalized.csv",
          [&](const ExperimentConfig& cfg) {
              const auto s = stage_landscape(cfg, dir(cfg));
              std::printf("landscape: max u=%s, solve residual %s\n",
                          format_double(*std::max_element(s.u.values.begin(), s.u.values.end())).c_str(),
                          format_double(s.u.residual).c_str());
              return 0;
          });

    stage("regularize", "V * k_t per configured scale -> regularized.csv", [&](const ExperimentConfig& cfg) {
        const auto s = stage_regularize(cfg, dir(cfg));
        for (double t : s.scales) std::printf("regularized at t=%s\n", format_double(t).c_str());
        return 0;
    });

    auto* res = stage("residuals", "residual sweep -> residuals.csv, residual_slopes.csv",
                      [&](const ExperimentConfig& cfg) {
                          ExperimentConfig c = cfg;
                          if (!sweep.empty()) set_config_value(c, "sweep", sweep);
                          validate(c);
                          const auto s = stage_residuals(c, dir(c));
                          for (std::size_t i = 0; i < s.eigen.size(); ++i)
                              std::printf("eigen %zu: slope %s\n", i + 1, format_double(s.eigen[i].slope).c_str());
                          std::printf("landscape: slope %s\n", format_double(s.landscape.slope).c_str());
                          return 0;
                      });
    res->add_option("--sweep", sweep, "t range, e.g. 1e-6..1e-4");

    auto* fk = stage("feynman-kac", "reproducing-formula check -> feynman_kac.csv", [&](const ExperimentConfig& cfg) {
        const auto s = stage_feynman_kac(cfg, dir(cfg), worker_count(common.threads), dump_paths);
        std::printf("feynman-kac: estimate %s +- %s, target %s, allowance %s: %s\n",
                    format_double(s.estimate).c_str(), format_double(s.std_error).c_str(),
                    format_double(s.target).c_str(), format_double(s.allowance).c_str(), s.pass ? "PASS" : "FAIL");
        return s.pass ? 0 : 1;
    });
    fk->add_option("--dump-paths", dump_paths, "write up to 100 sample paths to paths.csv")
        ->check(CLI::Range(0, 100));

    stage("agmon", "Agmon distances and decay envelopes -> agmon.csv, envelopes.csv",
          [&](const ExperimentConfig& cfg) {
              const auto env = stage_agmon(cfg, dir(cfg));
              for (std::size_t i = 0; i < env.size(); ++i)
                  std::printf("pair %zu: C(1/u)=%s C(V_t)=%s rel.diff=%s\n", i + 1,
                              format_double(env[i].inverse_landscape.offset).c_str(),
                              format_double(env[i].regularized.offset).c_str(),
                              format_double(env[i].relative_difference).c_str());
              return 0;
          });

    stage("predict", "localization match table -> matches.csv, peaks.csv", [&](const ExperimentConfig& cfg) {
        const auto m = stage_predict(cfg, dir(cfg));
        std::printf("matches within %d nodes: landscape %d, regularized %d, raw %d (of %zu)\n", m.tolerance,
                    m.landscape_matches, m.regularized_matches, m.raw_matches, m.rows.size());
        return 0;
    });

    stage("report", "SVG figures and index.html over existing artifacts", [&](const ExperimentConfig& cfg) {
        const fs::path d = cfg.output;
        if (!fs::exists(d / artifact::kPotential))
            throw DependencyError("cli", "no artifacts in " + d.string() + "; run a stage first");
        stage_report(cfg, d);
        std::printf("wrote %s\n", (d / artifact::kIndex).string().c_str());
        return 0;
    });

    stage("run", "all stages from a config, then gates and manifest", [&](const ExperimentConfig& cfg) {
        const auto summary = run_pipeline(cfg, worker_count(common.threads), dump_paths);
        print_gates(summary.gates);
        std::printf("%s: %s\n", cfg.output.c_str(), summary.pass ? "all gates pass" : "gate failure");
        return summary.pass ? 0 : 1;
    });

    CLI11_PARSE(app, argc, argv);

    for (auto& [sub, fn] : commands) {
        if (!sub->parsed()) continue;
        ExperimentConfig cfg;
        try {
            cfg = resolve(common);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
        try {
            return fn(cfg);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            try {
                mark_failed(cfg.output, e.what());
            } catch (...) {
            }
            return 2;
        }
    }
    return 2;
}
