#include "regpot/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regpot/error.hpp"
#include "regpot/rng.hpp"

namespace regpot {

Grid1D::Grid1D(int n) : n_(n), h_(0.0) {
    if (n < 3) throw ValidationError("operator", "grid needs n >= 3 interior nodes, got " + std::to_string(n));
    h_ = 1.0 / (n + 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = node(i);
    return x;
}

double Grid1D::boundary_distance(int i) const noexcept {
    return static_cast<double>(std::min(i + 1, n_ - i)) / (n_ + 1);
}

Potential::Potential(Grid1D grid, std::vector<double> values, PotentialProvenance provenance)
    : grid_(grid), values_(std::move(values)), provenance_(std::move(provenance)) {
    if (static_cast<int>(values_.size()) != grid_.size())
        throw ValidationError("operator", "potential length " + std::to_string(values_.size()) +
                                              " does not match grid size " + std::to_string(grid_.size()));
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("operator", "potential must be finite and nonnegative");
}

double Potential::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Potential::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

Potential gen_piecewise_potential(const Grid1D& grid, int intervals, double vmax, std::uint64_t seed) {
    const int n = grid.size();
    if (intervals < 1 || intervals > n)
        throw ValidationError("operator", "interval count must lie in [1, n]");
    if (!(vmax >= 0.0) || !std::isfinite(vmax))
        throw ValidationError("operator", "vmax must be finite and nonnegative");
    const rng::CounterStream stream(seed, rng::Stream::Potential);
    const int block = n / intervals;
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int b = std::min(i / block, intervals - 1);
        values[static_cast<std::size_t>(i)] = vmax * stream.uniform(static_cast<std::uint64_t>(b));
    }
    return Potential(grid, std::move(values), {"piecewise-uniform", seed, intervals, vmax});
}

double random_rhs_value(double k, double uniform_draw) {
    const double f = (1.0 + k / 2000.0) * (2.0 + std::cos(k) / 50.0) * uniform_draw;
    return std::max(f, kRhsFloor);
}

RhsField gen_random_rhs(const Grid1D& grid, std::uint64_t seed) {
    constexpr int kReferenceNodes = 3000;
    const int n = grid.size();
    const rng::CounterStream stream(seed, rng::Stream::Rhs);
    RhsField out;
    out.index_rescaled = n != kReferenceNodes;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double k = out.index_rescaled ? (i + 1.0) * kReferenceNodes / n : i + 1.0;
        out.values[static_cast<std::size_t>(i)] =
            random_rhs_value(k, stream.uniform(static_cast<std::uint64_t>(i)));
    }
    return out;
}

TridiagonalOperator assemble_hamiltonian(const Grid1D& grid, const Potential& v) {
    if (!(v.grid() == grid)) throw ValidationError("operator", "potential is defined on a different grid");
    const int n = grid.size();
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    TridiagonalOperator op;
    op.spacing = h;
    op.diag.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) op.diag[static_cast<std::size_t>(i)] = 2.0 * inv_h2 + v[i];
    op.offdiag.assign(static_cast<std::size_t>(n - 1), -inv_h2);
    return op;
}

std::vector<double> apply_operator(const TridiagonalOperator& h, std::span<const double> w) {
    const int n = h.size();
    if (static_cast<int>(w.size()) != n) throw ValidationError("operator", "vector length mismatch");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double s = h.diag[k] * w[k];
        if (i > 0) s += h.offdiag[k - 1] * w[k - 1];
        if (i + 1 < n) s += h.offdiag[k] * w[k + 1];
        out[k] = s;
    }
    return out;
}

std::vector<double> apply_negative_laplacian(const Grid1D& grid, std::span<const double> w) {
    const int n = grid.size();
    if (static_cast<int>(w.size()) != n) throw ValidationError("operator", "vector length mismatch");
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double left = i > 0 ? w[k - 1] : 0.0;
        const double right = i + 1 < n ? w[k + 1] : 0.0;
        out[k] = (2.0 * w[k] - left - right) * inv_h2;
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("operator", "vector length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace regpot
