#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "regpot/analysis.hpp"
#include "regpot/config.hpp"
#include "regpot/eigen.hpp"
#include "regpot/hamiltonian.hpp"
#include "regpot/landscape.hpp"

// Experiment stages.  Each stage reads its inputs from the artifact
// directory, writes its outputs there atomically, and returns what it
// computed.  A missing input file raises DependencyError naming the stage
// that produces it.

namespace regpot {

namespace artifact {
inline constexpr const char* kPotential = "potential.csv";
inline constexpr const char* kEigenpairs = "eigenpairs.csv";
inline constexpr const char* kLandscape = "landscape.csv";
inline constexpr const char* kGeneralized = "generalized.csv";
inline constexpr const char* kRegularized = "regularized.csv";
inline constexpr const char* kResiduals = "residuals.csv";
inline constexpr const char* kSlopes = "residual_slopes.csv";
inline constexpr const char* kAgmon = "agmon.csv";
inline constexpr const char* kEnvelopes = "envelopes.csv";
inline constexpr const char* kPeaks = "peaks.csv";
inline constexpr const char* kMatches = "matches.csv";
inline constexpr const char* kFeynmanKac = "feynman_kac.csv";
inline constexpr const char* kPaths = "paths.csv";
inline constexpr const char* kGates = "gates.csv";
inline constexpr const char* kManifest = "manifest.txt";
inline constexpr const char* kFailed = "FAILED";
inline constexpr const char* kIndex = "index.html";
}  // namespace artifact

struct GateResult {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // limit it was held to
    std::string detail;
};

/// Regularization scales implied by the config's t policy.
std::vector<double> config_scales(const ExperimentConfig& cfg, const Potential& v);

// Stages.  `dir` is the artifact directory.
Potential stage_potential(const ExperimentConfig& cfg, const std::filesystem::path& dir);
std::vector<EigenPair> stage_eigen(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct LandscapeStage {
    LandscapeSolution u;            // f = 1
    LandscapeSolution v;            // configured f
    std::vector<double> f_conv;     // f * k_t at generalized_scale
    std::vector<double> effective;  // (f * k_t) / v
};
LandscapeStage stage_landscape(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct RegularizeStage {
    std::vector<double> scales;
    std::vector<std::vector<double>> fields;  // V * k_t per scale
};
RegularizeStage stage_regularize(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct ResidualStage {
    std::vector<ResidualReport> eigen;  // one per eigenpair
    ResidualReport landscape;
};
ResidualStage stage_residuals(const ExperimentConfig& cfg, const std::filesystem::path& dir);

std::vector<EnvelopeComparison> stage_agmon(const ExperimentConfig& cfg, const std::filesystem::path& dir);
MatchReport stage_predict(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct FeynmanKacStage {
    double horizon = 0.0;
    int node = 0;
    double target = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double allowance = 0.0;
    bool pass = false;
};
/// Reproducing-formula check for the first eigenpair at its peak.
/// `dump_paths` (at most 100) sample paths are written to paths.csv.
FeynmanKacStage stage_feynman_kac(const ExperimentConfig& cfg, const std::filesystem::path& dir, int threads,
                                  int dump_paths = 0);

/// SVG figures plus an HTML index over every artifact present.
void stage_report(const ExperimentConfig& cfg, const std::filesystem::path& dir);

// Loaders (DependencyError when the file is absent).
Potential load_potential(const std::filesystem::path& dir);
std::vector<EigenPair> load_eigenpairs(const std::filesystem::path& dir);
LandscapeSolution load_landscape(const std::filesystem::path& dir);
RegularizeStage load_regularized(const std::filesystem::path& dir);

/// max_i (|phi_i| - lambda u_i ||phi||_inf) / (lambda ||u||_inf) over all pairs.
double landscape_bound_excess(const std::vector<EigenPair>& pairs, std::span<const double> u);

/// Top-3 peaks of v / (f * k_t) against top-3 peaks of u; worst distance in nodes.
int generalized_peak_distance(const LandscapeStage& stage, double prominence_fraction);

struct RunSummary {
    std::vector<GateResult> gates;
    bool pass = false;
};

/// Every stage in order, then gates, manifest and report.  On error a
/// FAILED marker holding the message is left in the directory and the
/// exception is rethrown.
RunSummary run_pipeline(const ExperimentConfig& cfg, int threads, int dump_paths = 0);

/// Writes FAILED with a module-qualified message.
void mark_failed(const std::filesystem::path& dir, const std::string& message);

/// Build identifier recorded in manifests.
std::string code_version();

}  // namespace regpot
