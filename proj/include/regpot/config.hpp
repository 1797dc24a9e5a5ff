#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "regpot/regularize.hpp"

namespace regpot {

// Flat `key = value` experiment description.  Lines starting with '#' are
// comments; lists are comma separated.  Keys prefixed "manifest." are
// ignored on input so a run manifest can be fed back as a config.
//
//   seed              uint64   RNG seed for the potential
//   n                 int      interior nodes (>= 3)
//   potential         piecewise | file
//   intervals         int      block count M (1 <= M <= n)
//   vmax              real     block amplitude bound (>= 0)
//   potential_file    path     CSV with a `value` column (potential = file)
//   t_policy          list | inverse-mean
//   ts                reals    regularization scales (t_policy = list)
//   eigen_count       int      lowest eigenpairs to compute (1 <= k <= n)
//   rhs               constant | formula | file
//   rhs_seed          uint64   RNG seed for the random right-hand side
//   rhs_file          path     CSV with a `value` column (rhs = file)
//   generalized_scale real     t used for f * k_t
//   sweep             "hi..lo" residual sweep range
//   sweep_count       int      points in the residual sweep (>= 5)
//   mc_paths          int      Feynman-Kac paths (0 disables the stage)
//   mc_substeps       int      substeps per path (>= 8)
//   mc_horizon        real     path horizon t
//   boundary          reflect | zero-pad
//   match_tolerance   int      nodes
//   prominence        real     peak threshold as a fraction of range
//   gates             names    identity, landscape-bound, localization, generalized, feynman-kac
//   output            path     artifact directory
struct ExperimentConfig {
    std::uint64_t seed = 7;
    int n = 3000;
    std::string potential = "piecewise";
    int intervals = 20;
    double vmax = 1e5;
    std::string potential_file;
    std::string t_policy = "list";
    std::vector<double> ts = {0.001};
    int eigen_count = 5;
    std::string rhs = "constant";
    std::uint64_t rhs_seed = 11;
    std::string rhs_file;
    double generalized_scale = 0.001;
    double sweep_hi = 1e-4;
    double sweep_lo = 1e-6;
    int sweep_count = 9;
    int mc_paths = 0;
    int mc_substeps = 64;
    double mc_horizon = 1e-5;
    BoundaryPolicy boundary = BoundaryPolicy::Reflect;
    int match_tolerance = 60;
    double prominence = 0.1;
    std::vector<std::string> gates = {"identity", "landscape-bound"};
    std::string output = "out";

    bool gate_enabled(std::string_view name) const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// ValidationError naming the offending key.
void validate(const ExperimentConfig& cfg);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Applies one `key=value` override (as from the command line).
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// "1e-6..1e-4" -> (hi, lo) regardless of order.
std::pair<double, double> parse_range(std::string_view text);

}  // namespace regpot
