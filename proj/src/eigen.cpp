#include "regpot/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "regpot/error.hpp"
#include "regpot/rng.hpp"

namespace regpot {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const TridiagonalOperator& h) {
    double emax = 1.0;
    for (double e : h.offdiag) emax = std::max(emax, e * e);
    return std::numeric_limits<double>::min() * emax / kEps;
}

// LU with partial pivoting of the shifted tridiagonal matrix (dgttrf layout).
class ShiftedFactor {
public:
    ShiftedFactor(const TridiagonalOperator& h, double shift, double zero_pivot) {
        const int n = h.size();
        lower_ = h.offdiag;
        diag_ = h.diag;
        for (double& d : diag_) d -= shift;
        upper_ = h.offdiag;
        upper2_.assign(static_cast<std::size_t>(std::max(n - 2, 0)), 0.0);
        swapped_.assign(static_cast<std::size_t>(std::max(n - 1, 0)), false);
        for (int i = 0; i + 1 < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (std::fabs(diag_[k]) >= std::fabs(lower_[k])) {
                if (diag_[k] == 0.0) diag_[k] = zero_pivot;
                const double fact = lower_[k] / diag_[k];
                lower_[k] = fact;
                diag_[k + 1] -= fact * upper_[k];
            } else {
                const double fact = diag_[k] / lower_[k];
                diag_[k] = lower_[k];
                lower_[k] = fact;
                const double tmp = upper_[k];
                upper_[k] = diag_[k + 1];
                diag_[k + 1] = tmp - fact * diag_[k + 1];
                if (i + 2 < n) {
                    upper2_[k] = upper_[k + 1];
                    upper_[k + 1] = -fact * upper_[k + 1];
                }
                swapped_[k] = true;
            }
        }
        if (n > 0 && diag_.back() == 0.0) diag_.back() = zero_pivot;
    }

    void solve(std::vector<double>& b) const {
        const int n = static_cast<int>(diag_.size());
        for (int i = 0; i + 1 < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (swapped_[k]) std::swap(b[k], b[k + 1]);
            b[k + 1] -= lower_[k] * b[k];
        }
        for (int i = n - 1; i >= 0; --i) {
            const auto k = static_cast<std::size_t>(i);
            double s = b[k];
            if (i + 1 < n) s -= upper_[k] * b[k + 1];
            if (i + 2 < n) s -= upper2_[k] * b[k + 2];
            b[k] = s / diag_[k];
        }
    }

private:
    std::vector<double> lower_, diag_, upper_, upper2_;
    std::vector<bool> swapped_;
};

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double bisect_eigenvalue(const TridiagonalOperator& h, int index, double lo, double hi) {
    // Invariant: sturm_count(lo) < index <= sturm_count(hi).
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-12 * std::max(std::fabs(lo), std::fabs(hi)) || mid <= lo || mid >= hi) break;
        if (sturm_count(h, mid) >= index)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

void normalize_sign_inf(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::fabs(v[i]) > std::fabs(v[arg])) arg = i;
    const double scale = 1.0 / v[arg];
    for (double& x : v) x *= scale;
}

}  // namespace

int sturm_count(const TridiagonalOperator& h, double x) {
    const int n = h.size();
    if (n == 0) return 0;
    const double pivmin = pivot_floor(h);
    int count = 0;
    double q = h.diag[0] - x;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (int i = 1; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double e = h.offdiag[k - 1];
        q = h.diag[k] - x - e * e / q;
        if (std::fabs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

SpectrumBounds gershgorin_bounds(const TridiagonalOperator& h) {
    const int n = h.size();
    SpectrumBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double radius = 0.0;
        if (i > 0) radius += std::fabs(h.offdiag[k - 1]);
        if (i + 1 < n) radius += std::fabs(h.offdiag[k]);
        b.lower = std::min(b.lower, h.diag[k] - radius);
        b.upper = std::max(b.upper, h.diag[k] + radius);
    }
    // Widen slightly so the bounds are strict under rounding.
    const double pad = 2.0 * kEps * std::max(std::fabs(b.lower), std::fabs(b.upper)) + pivot_floor(h);
    b.lower -= pad;
    b.upper += pad;
    return b;
}

std::vector<EigenPair> lowest_eigenpairs(const TridiagonalOperator& h, int k) {
    const int n = h.size();
    if (k < 1 || k > n) throw ValidationError("eigen", "requested eigenpair count must lie in [1, n]");

    const SpectrumBounds bounds = gershgorin_bounds(h);
    const double spread = bounds.upper - bounds.lower;
    const double cluster_gap = 1e-6 * spread;
    const double hnorm = std::max(std::fabs(bounds.lower), std::fabs(bounds.upper));
    const double stencil_scale = 2.0 / (h.spacing * h.spacing);

    std::vector<double> values(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
        const double lo = j == 1 ? bounds.lower : values[static_cast<std::size_t>(j - 2)];
        // lo from the previous eigenvalue may have count == j-1 or less; the
        // bisection invariant only needs count(lo) < j.
        const double start = sturm_count(h, lo) < j ? lo : bounds.lower;
        values[static_cast<std::size_t>(j - 1)] = bisect_eigenvalue(h, j, start, bounds.upper);
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(static_cast<std::size_t>(k));
    std::vector<std::vector<double>> unit;  // l2-normalized vectors for orthogonalization

    constexpr int kMinSweeps = 3;
    constexpr int kMaxSweeps = 12;
    constexpr int kMaxRestarts = 4;

    for (int j = 0; j < k; ++j) {
        const double lambda = values[static_cast<std::size_t>(j)];
        const double tol = 1e-10 * (std::fabs(lambda) + stencil_scale);
        const double accept = 1e-8 * (std::fabs(lambda) + stencil_scale);
        const ShiftedFactor lu(h, lambda, kEps * hnorm);

        std::vector<std::size_t> cluster;
        for (std::size_t p = 0; p < pairs.size(); ++p)
            if (std::fabs(pairs[p].lambda - lambda) < cluster_gap) cluster.push_back(p);

        std::vector<double> x(static_cast<std::size_t>(n));
        double best_res = std::numeric_limits<double>::infinity();
        bool done = false;
        for (int restart = 0; restart < kMaxRestarts && !done; ++restart) {
            const rng::CounterStream stream(static_cast<std::uint64_t>(restart), rng::Stream::InverseIteration,
                                            static_cast<std::uint64_t>(j));
            for (int i = 0; i < n; ++i)
                x[static_cast<std::size_t>(i)] = 2.0 * stream.uniform(static_cast<std::uint64_t>(i)) - 1.0;

            for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
                lu.solve(x);
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::size_t p : cluster) {
                        const double c = dot(unit[p], x);
                        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] -= c * unit[p][static_cast<std::size_t>(i)];
                    }
                }
                const double nrm = norm2(x);
                if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
                for (double& v : x) v /= nrm;

                const auto hx = apply_operator(h, x);
                double res = 0.0;
                for (int i = 0; i < n; ++i) {
                    const auto q = static_cast<std::size_t>(i);
                    res = std::max(res, std::fabs(hx[q] - lambda * x[q]));
                }
                res /= norm_inf(x);
                best_res = std::min(best_res, res);
                if (sweep >= kMinSweeps && res <= tol) {
                    done = true;
                    break;
                }
            }
            if (!done && best_res <= accept) {
                done = true;
            }
        }
        if (!done)
            throw NumericalError("eigen", "inverse iteration did not converge for eigenpair " + std::to_string(j + 1) +
                                              " (best residual " + std::to_string(best_res) + ")");
        unit.push_back(x);
        EigenPair pair;
        pair.index = j + 1;
        // Bisection is limited to ~eps ||H|| absolute accuracy; the energy-form
        // Rayleigh quotient of the converged vector is accurate relative to lambda.
        const double refined = rayleigh_quotient(h, x);
        pair.lambda = std::fabs(refined - lambda) <= accept ? refined : lambda;
        pair.phi = x;
        normalize_sign_inf(pair.phi);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

double rayleigh_quotient(const TridiagonalOperator& h, std::span<const double> w) {
    if (static_cast<int>(w.size()) != h.size()) throw ValidationError("eigen", "vector length mismatch");
    const double ww = dot(w, w);
    if (!(ww > 0.0)) throw ValidationError("eigen", "Rayleigh quotient of the zero vector");
    // Energy form  sum_i p_i w_i^2 + sum_i (-e_i)(w_i - w_{i+1})^2  with
    // p_i = d_i + e_{i-1} + e_i.  For V >= 0 every term is nonnegative, so
    // small eigenvalues keep full relative accuracy (w^T H w cancels ~2/h^2).
    const std::size_t n = w.size();
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? h.offdiag[i - 1] : 0.0;
        const double right = i + 1 < n ? h.offdiag[i] : 0.0;
        energy += (h.diag[i] + left + right) * w[i] * w[i];
        if (i + 1 < n) {
            const double d = w[i] - w[i + 1];
            energy -= h.offdiag[i] * d * d;
        }
    }
    return energy / ww;
}

double eigen_residual(const TridiagonalOperator& h, const EigenPair& pair) {
    const auto hphi = apply_operator(h, pair.phi);
    double r = 0.0;
    for (std::size_t i = 0; i < hphi.size(); ++i) r = std::max(r, std::fabs(hphi[i] - pair.lambda * pair.phi[i]));
    return r;
}

}  // namespace regpot
