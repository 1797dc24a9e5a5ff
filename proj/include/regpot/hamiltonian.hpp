#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

// One-dimensional discretization of -d^2/dx^2 + V on (0, 1) with Dirichlet
// conditions at both ends, and the random potentials / right-hand sides the
// experiments run on.

namespace regpot {

class Grid1D {
public:
    explicit Grid1D(int n);  // n >= 3

    int size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    /// Coordinate of 0-based node i, (i+1)/(n+1).
    double node(int i) const noexcept { return static_cast<double>(i + 1) / (n_ + 1); }
    std::vector<double> nodes() const;
    /// Distance from node i to the nearer boundary point.
    double boundary_distance(int i) const noexcept;

    bool operator==(const Grid1D&) const = default;

private:
    int n_;
    double h_;
};

inline Grid1D make_grid(int n) { return Grid1D(n); }

struct PotentialProvenance {
    std::string generator = "explicit";
    std::uint64_t seed = 0;
    int intervals = 0;
    double vmax = 0.0;
};

class Potential {
public:
    Potential(Grid1D grid, std::vector<double> values, PotentialProvenance provenance = {});

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    const PotentialProvenance& provenance() const noexcept { return provenance_; }
    double max() const;
    double mean() const;

private:
    Grid1D grid_;
    std::vector<double> values_;
    PotentialProvenance provenance_;
};

/// Omega split into `intervals` equal blocks (the last absorbs the remainder
/// nodes), each set to an independent Uniform[0, vmax] draw from the
/// Philox potential stream of `seed`.
Potential gen_piecewise_potential(const Grid1D& grid, int intervals, double vmax, std::uint64_t seed);

/// Potential given by a function of x sampled at the nodes.
template <class F>
Potential sample_potential(const Grid1D& grid, F&& fn) {
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) v[static_cast<std::size_t>(i)] = fn(grid.node(i));
    return Potential(grid, std::move(v), {"function", 0, 0, 0.0});
}

struct RhsField {
    std::vector<double> values;
    bool index_rescaled = false;  // grid was not 3000 nodes; k mapped linearly
};

/// Smallest value the random right-hand side is clamped to.
inline constexpr double kRhsFloor = 1e-12;

/// f_k = (1 + k/2000)(2 + cos(k)/50) * U_k, k = 1..n, U_k ~ Uniform[0, 1]
/// from the Philox rhs stream; clamped below at kRhsFloor.
RhsField gen_random_rhs(const Grid1D& grid, std::uint64_t seed);

/// The formula above with an explicit draw, exposed for testing.
double random_rhs_value(double k, double uniform_draw);

struct TridiagonalOperator {
    std::vector<double> diag;     // n entries, 2/h^2 + V_i
    std::vector<double> offdiag;  // n-1 entries, -1/h^2
    double spacing = 0.0;

    int size() const noexcept { return static_cast<int>(diag.size()); }
};

TridiagonalOperator assemble_hamiltonian(const Grid1D& grid, const Potential& v);

/// H w with zero Dirichlet extension.
std::vector<double> apply_operator(const TridiagonalOperator& h, std::span<const double> w);

/// -Delta_h w = (2 w_i - w_{i-1} - w_{i+1}) / h^2 with zero extension.
std::vector<double> apply_negative_laplacian(const Grid1D& grid, std::span<const double> w);

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> a);

}  // namespace regpot
