#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "regpot/config.hpp"
#include "regpot/error.hpp"
#include "regpot/io.hpp"
#include "regpot/pipeline.hpp"
#include "regpot/svg.hpp"

using namespace regpot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("regpot-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig small_config(const fs::path& dir) {
    ExperimentConfig cfg;
    cfg.n = 600;
    cfg.intervals = 10;
    cfg.eigen_count = 3;
    cfg.ts = {1e-3, 1e-4};
    cfg.sweep_count = 5;
    cfg.output = dir.string();
    return cfg;
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("shortest round-trip doubles") {
        for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 5e-324, 123456789.0}) {
            const std::string s = format_double(x);
            CHECK(parse_double(s) == x);
            CHECK(std::signbit(parse_double(s)) == std::signbit(x));
        }
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
        CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
        CHECK(std::isnan(parse_double("nan")));
        CHECK_THROWS_AS(parse_double("1.5x"), ValidationError);
        CHECK_THROWS_AS(parse_double(""), ValidationError);
        CHECK(parse_integer("-42") == -42);
        CHECK_THROWS_AS(parse_integer("4.2"), ValidationError);
    }

    TEST_CASE("CSV round trip with quoting") {
        CsvTable t({"name", "value"});
        t.add_row(std::vector<std::string>{"plain", "1"});
        t.add_row(std::vector<std::string>{"has,comma", "2"});
        t.add_row(std::vector<std::string>{"has \"quote\"", "3"});
        const std::string text = t.to_string();
        CHECK(text.substr(0, 11) == "name,value\n");
        const CsvTable back = CsvTable::parse(text);
        REQUIRE(back.rows() == 3);
        CHECK(back.cell(1, 0) == "has,comma");
        CHECK(back.cell(2, 0) == "has \"quote\"");
        CHECK(back.column("value") == std::vector<double>{1, 2, 3});
        CHECK(back.column_index("missing") == -1);
        CHECK(back.to_string() == text);
        CHECK_THROWS_AS(t.add_row(std::vector<std::string>{"short"}), ValidationError);
    }

    TEST_CASE("atomic writes leave no temporary behind") {
        const fs::path dir = scratch("atomic");
        const std::vector<double> a = {1.0, 2.5}, b = {0.1, 1e-20};
        write_csv(dir / "t.csv", columns_table({"a", "b"}, {a, b}));
        const CsvTable back = read_csv(dir / "t.csv");
        CHECK(back.column("b") == b);
        int entries = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
        CHECK(entries == 1);
        CHECK_THROWS(read_file(dir / "absent.csv"));
    }
}

TEST_SUITE("svg") {
    TEST_CASE("polyline plot structure") {
        PlotSpec spec;
        spec.title = "a < b & c";
        spec.xlabel = "x";
        spec.ylabel = "y";
        PlotSeries s;
        s.label = "sine";
        for (int i = 0; i <= 20; ++i) {
            s.x.push_back(i / 20.0);
            s.y.push_back(std::sin(i / 3.0));
        }
        const std::string svg = render_svg(spec, {s});
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("<polyline") != std::string::npos);
        CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
        CHECK(svg.find("sine") != std::string::npos);
        spec.log_y = true;
        PlotSeries bad = s;
        for (double& y : bad.y) y = std::fabs(y) + 1e-3;
        CHECK(render_svg(spec, {bad}).find("<polyline") != std::string::npos);
        const auto n = normalize_unit({2.0, -4.0, 1.0});
        CHECK(n == std::vector<double>{1.0, 0.0, 5.0 / 6.0});
    }
}

TEST_SUITE("config") {
    TEST_CASE("defaults validate and round-trip") {
        const ExperimentConfig cfg;
        CHECK_NOTHROW(validate(cfg));
        CHECK(parse_config(serialize_config(cfg)) == cfg);
        CHECK(cfg.gate_enabled("identity"));
        CHECK_FALSE(cfg.gate_enabled("feynman-kac"));
    }

    TEST_CASE("non-default values round-trip") {
        ExperimentConfig cfg;
        cfg.seed = 18446744073709551615ULL;
        cfg.n = 1234;
        cfg.ts = {0.1, 1.0 / 3.0, 2e-7};
        cfg.rhs = "formula";
        cfg.sweep_hi = 3e-4;
        cfg.sweep_lo = 1.0 / 7.0 * 1e-6;
        cfg.mc_paths = 5000;
        cfg.boundary = BoundaryPolicy::ZeroPad;
        cfg.gates = {"localization", "generalized", "feynman-kac"};
        cfg.output = "some dir/out";
        const std::string text = serialize_config(cfg);
        CHECK(parse_config(text) == cfg);
        CHECK(serialize_config(parse_config(text)) == text);
    }

    TEST_CASE("parsing: comments, overrides, manifest keys") {
        const auto cfg = parse_config("# comment\n n = 500 \nts=1e-3, 1e-4\nsweep = 1e-6..1e-4\nmanifest.version = x\n");
        CHECK(cfg.n == 500);
        CHECK(cfg.ts == std::vector<double>{1e-3, 1e-4});
        CHECK(cfg.sweep_hi == 1e-4);
        CHECK(cfg.sweep_lo == 1e-6);
        ExperimentConfig c;
        set_config_value(c, "vmax", "250");
        CHECK(c.vmax == 250.0);
        CHECK(parse_range("1e-4..1e-6") == std::pair<double, double>{1e-4, 1e-6});
        CHECK_THROWS_AS(parse_range("1e-4"), ValidationError);
    }

    TEST_CASE("validation names the offending key") {
        auto rejects = [](const std::string& text, const std::string& key) {
            try {
                parse_config(text);
            } catch (const ValidationError& e) {
                return std::string(e.what()).find(key) != std::string::npos;
            }
            return false;
        };
        CHECK(rejects("n = 2\n", "n"));
        CHECK(rejects("intervals = 0\n", "intervals"));
        CHECK(rejects("vmax = -1\n", "vmax"));
        CHECK(rejects("ts = 1e-3, -1\n", "ts"));
        CHECK(rejects("eigen_count = 0\n", "eigen_count"));
        CHECK(rejects("boundary = periodic\n", "boundary"));
        CHECK(rejects("gates = identity, speed\n", "gates"));
        CHECK(rejects("mc_substeps = 4\n", "mc_substeps"));
        CHECK(rejects("colour = blue\n", "colour"));
        CHECK(rejects("sweep_count = 3\n", "sweep_count"));
    }
}

TEST_SUITE("pipeline") {
    TEST_CASE("stages report missing inputs as dependency errors") {
        const fs::path dir = scratch("deps");
        const auto cfg = small_config(dir);
        CHECK_THROWS_AS(stage_eigen(cfg, dir), DependencyError);
        CHECK_THROWS_AS(stage_predict(cfg, dir), DependencyError);
        stage_potential(cfg, dir);
        CHECK_NOTHROW(stage_eigen(cfg, dir));
        try {
            stage_predict(cfg, dir);
            FAIL("expected a dependency error");
        } catch (const DependencyError& e) {
            CHECK(std::string(e.what()).find("landscape") != std::string::npos);
        }
    }

    TEST_CASE("stage composition: potential, eigen, landscape, regularize, predict") {
        const fs::path dir = scratch("compose");
        const auto cfg = small_config(dir);
        const Potential v = stage_potential(cfg, dir);
        const auto pairs = stage_eigen(cfg, dir);
        stage_landscape(cfg, dir);
        stage_regularize(cfg, dir);
        const auto rep = stage_predict(cfg, dir);
        CHECK(rep.rows.size() == 3);
        CHECK(fs::exists(dir / artifact::kMatches));
        CHECK(load_potential(dir).vector() == v.vector());
        const auto back = load_eigenpairs(dir);
        REQUIRE(back.size() == pairs.size());
        CHECK(back[1].lambda == pairs[1].lambda);
        CHECK(back[1].phi == pairs[1].phi);
        const auto reg = load_regularized(dir);
        CHECK(reg.scales == cfg.ts);
    }

    TEST_CASE("full run writes gates, manifest and report; manifest re-runs identically") {
        const fs::path dir = scratch("run");
        auto cfg = small_config(dir);
        cfg.gates = {"identity", "landscape-bound"};
        const auto summary = run_pipeline(cfg, 2);
        CHECK(summary.pass);
        for (const char* f : {artifact::kGates, artifact::kManifest, artifact::kIndex, artifact::kResiduals,
                              artifact::kAgmon, artifact::kPeaks})
            CHECK(fs::exists(dir / f));
        CHECK_FALSE(fs::exists(dir / artifact::kFailed));
        const auto again = load_config(dir / artifact::kManifest);
        CHECK(again == cfg);
        CHECK(read_csv(dir / artifact::kGates).rows() == 2);
    }

    TEST_CASE("a failing stage leaves a FAILED marker") {
        const fs::path dir = scratch("failed");
        auto cfg = small_config(dir);
        cfg.potential = "file";
        cfg.potential_file = (dir / "missing.csv").string();
        CHECK_THROWS(run_pipeline(cfg, 1));
        REQUIRE(fs::exists(dir / artifact::kFailed));
        CHECK_FALSE(read_file(dir / artifact::kFailed).empty());
    }

    TEST_CASE("code version is recorded") { CHECK_FALSE(code_version().empty()); }
}
