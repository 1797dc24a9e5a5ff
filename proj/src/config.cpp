#include "regpot/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "regpot/error.hpp"
#include "regpot/io.hpp"

namespace regpot {
namespace {

constexpr std::array<std::string_view, 5> kGates = {"identity", "landscape-bound", "localization", "generalized",
                                                    "feynman-kac"};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (true) {
        const auto c = s.find(',');
        const auto item = trim(s.substr(0, c));
        if (!item.empty()) out.emplace_back(item);
        if (c == std::string_view::npos) break;
        s.remove_prefix(c + 1);
    }
    return out;
}

template <class F>
auto keyed(std::string_view key, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError("config", "key '" + std::string(key) + "': " + e.what());
    }
}

int to_int(std::string_view key, std::string_view v) {
    return keyed(key, [&] {
        const long long x = parse_integer(v);
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
            throw ValidationError("io", "integer out of range");
        return static_cast<int>(x);
    });
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t x = 0;
    const char* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError("config", "key '" + std::string(key) + "': not an unsigned 64-bit integer");
    return x;
}

double to_real(std::string_view key, std::string_view v) {
    return keyed(key, [&] { return parse_double(v); });
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

void fail(const std::string& key, const std::string& why) { throw ValidationError("config", key + " " + why); }

}  // namespace

bool ExperimentConfig::gate_enabled(std::string_view name) const {
    return std::find(gates.begin(), gates.end(), name) != gates.end();
}

std::pair<double, double> parse_range(std::string_view text) {
    const auto dots = text.find("..");
    if (dots == std::string_view::npos) throw ValidationError("config", "range must look like lo..hi");
    const double a = parse_double(trim(text.substr(0, dots)));
    const double b = parse_double(trim(text.substr(dots + 2)));
    return {std::max(a, b), std::min(a, b)};
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "n") cfg.n = to_int(key, value);
    else if (key == "potential") cfg.potential = value;
    else if (key == "intervals") cfg.intervals = to_int(key, value);
    else if (key == "vmax") cfg.vmax = to_real(key, value);
    else if (key == "potential_file") cfg.potential_file = value;
    else if (key == "t_policy") cfg.t_policy = value;
    else if (key == "ts") {
        cfg.ts.clear();
        for (const auto& s : split_list(value)) cfg.ts.push_back(to_real(key, s));
    } else if (key == "eigen_count") cfg.eigen_count = to_int(key, value);
    else if (key == "rhs") cfg.rhs = value;
    else if (key == "rhs_seed") cfg.rhs_seed = to_u64(key, value);
    else if (key == "rhs_file") cfg.rhs_file = value;
    else if (key == "generalized_scale") cfg.generalized_scale = to_real(key, value);
    else if (key == "sweep") {
        const auto [hi, lo] = keyed(key, [&] { return parse_range(value); });
        cfg.sweep_hi = hi;
        cfg.sweep_lo = lo;
    } else if (key == "sweep_count") cfg.sweep_count = to_int(key, value);
    else if (key == "mc_paths") cfg.mc_paths = to_int(key, value);
    else if (key == "mc_substeps") cfg.mc_substeps = to_int(key, value);
    else if (key == "mc_horizon") cfg.mc_horizon = to_real(key, value);
    else if (key == "boundary") cfg.boundary = keyed(key, [&] { return parse_boundary_policy(std::string(value)); });
    else if (key == "match_tolerance") cfg.match_tolerance = to_int(key, value);
    else if (key == "prominence") cfg.prominence = to_real(key, value);
    else if (key == "gates") cfg.gates = split_list(value);
    else if (key == "output") cfg.output = value;
    else throw ValidationError("config", "unknown key '" + std::string(key) + "'");
}

void validate(const ExperimentConfig& c) {
    if (c.n < 3) fail("n", "must be at least 3");
    if (c.potential != "piecewise" && c.potential != "file") fail("potential", "must be piecewise or file");
    if (c.potential == "piecewise") {
        if (c.intervals < 1 || c.intervals > c.n) fail("intervals", "must lie in [1, n]");
        if (!(c.vmax >= 0.0) || !std::isfinite(c.vmax)) fail("vmax", "must be finite and nonnegative");
    }
    if (c.potential == "file" && c.potential_file.empty()) fail("potential_file", "required when potential = file");
    if (c.t_policy != "list" && c.t_policy != "inverse-mean") fail("t_policy", "must be list or inverse-mean");
    if (c.t_policy == "list" && c.ts.empty()) fail("ts", "must list at least one scale");
    for (double t : c.ts)
        if (!(t > 0.0) || !std::isfinite(t)) fail("ts", "entries must be positive");
    if (c.eigen_count < 1 || c.eigen_count > c.n) fail("eigen_count", "must lie in [1, n]");
    if (c.rhs != "constant" && c.rhs != "formula" && c.rhs != "file") fail("rhs", "must be constant, formula or file");
    if (c.rhs == "file" && c.rhs_file.empty()) fail("rhs_file", "required when rhs = file");
    if (!(c.generalized_scale > 0.0)) fail("generalized_scale", "must be positive");
    if (!(c.sweep_hi > c.sweep_lo) || !(c.sweep_lo > 0.0)) fail("sweep", "needs 0 < lo < hi");
    if (c.sweep_count < 5) fail("sweep_count", "must be at least 5");
    if (c.mc_paths < 0) fail("mc_paths", "must be nonnegative");
    if (c.mc_substeps < 8) fail("mc_substeps", "must be at least 8");
    if (!(c.mc_horizon > 0.0)) fail("mc_horizon", "must be positive");
    if (c.match_tolerance < 0) fail("match_tolerance", "must be nonnegative");
    if (!(c.prominence > 0.0 && c.prominence < 1.0)) fail("prominence", "must lie in (0, 1)");
    for (const auto& g : c.gates)
        if (std::find(kGates.begin(), kGates.end(), g) == kGates.end()) fail("gates", "has unknown gate '" + g + "'");
    if (c.gate_enabled("feynman-kac") && c.mc_paths == 0) fail("gates", "feynman-kac needs mc_paths > 0");
    if (c.output.empty()) fail("output", "must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("config", "line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.starts_with("manifest.")) continue;
        set_config_value(cfg, key, line.substr(eq + 1));
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string serialize_config(const ExperimentConfig& c) {
    std::vector<std::string> ts;
    for (double t : c.ts) ts.push_back(format_double(t));
    std::string out;
    auto kv = [&](const char* k, const std::string& v) { out += std::string(k) + " = " + v + "\n"; };
    kv("seed", std::to_string(c.seed));
    kv("n", std::to_string(c.n));
    kv("potential", c.potential);
    kv("intervals", std::to_string(c.intervals));
    kv("vmax", format_double(c.vmax));
    kv("potential_file", c.potential_file);
    kv("t_policy", c.t_policy);
    kv("ts", join(ts));
    kv("eigen_count", std::to_string(c.eigen_count));
    kv("rhs", c.rhs);
    kv("rhs_seed", std::to_string(c.rhs_seed));
    kv("rhs_file", c.rhs_file);
    kv("generalized_scale", format_double(c.generalized_scale));
    kv("sweep", format_double(c.sweep_lo) + ".." + format_double(c.sweep_hi));
    kv("sweep_count", std::to_string(c.sweep_count));
    kv("mc_paths", std::to_string(c.mc_paths));
    kv("mc_substeps", std::to_string(c.mc_substeps));
    kv("mc_horizon", format_double(c.mc_horizon));
    kv("boundary", to_string(c.boundary));
    kv("match_tolerance", std::to_string(c.match_tolerance));
    kv("prominence", format_double(c.prominence));
    kv("gates", join(c.gates));
    kv("output", c.output);
    return out;
}

}  // namespace regpot
