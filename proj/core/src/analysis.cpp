#include "cpstap/analysis.hpp"

#include <cmath>

#include "cpstap/errors.hpp"
#include "cpstap/seed.hpp"

namespace cpstap {

ErrorCovariance error_covariance(const CMatrix& r, const CMatrix& d, int n_samples) {
    if (n_samples < 1) throw ConfigError("sample count must be >= 1");
    const Eigen::Index nm = r.rows();
    if (r.cols() != nm || d.cols() != nm * nm) throw ShapeError("covariance does not match D");
    const Eigen::Index rows = d.rows();
    CMatrix w(nm * nm, rows);
    for (Eigen::Index s = 0; s < rows; ++s) {
        // conj(A_s), reshaped from the column-major vec index.
        CMatrix a(nm, nm);
        for (Eigen::Index col = 0; col < nm; ++col)
            for (Eigen::Index row = 0; row < nm; ++row) a(row, col) = std::conj(d(s, row + col * nm));
        const CMatrix x = r * a * r;
        w.col(s) = Eigen::Map<const CVector>(x.data(), x.size());
    }
    ErrorCovariance out;
    out.c = d * w / static_cast<double>(n_samples);
    out.c = (0.5 * (out.c + out.c.adjoint())).eval();
    out.trace_value = out.c.trace().real();
    out.dof = rows * rows;
    return out;
}

namespace {

std::vector<CMatrix> cross_bin_blocks(const CMatrix& r, const VirtualMaps& vm,
                                      const std::vector<double>& centers) {
    const int n = vm.n();
    const int mp = vm.m_pulses;
    if (r.rows() != n * mp || r.cols() != n * mp) throw ShapeError("covariance does not match geometry");
    const std::size_t m = centers.size();
    std::vector<CVector> u;
    for (double c : centers) u.push_back(dft_bin_vector(c, mp));
    // R (u_j kron I) for each j, then left-multiply by (u_i^H kron I).
    std::vector<CMatrix> ru(m);
    for (std::size_t j = 0; j < m; ++j) {
        ru[j] = CMatrix::Zero(n * mp, n);
        for (int q = 0; q < mp; ++q) ru[j] += u[j][q] * r.middleCols(q * n, n);
    }
    std::vector<CMatrix> h(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            CMatrix b = CMatrix::Zero(n, n);
            for (int p = 0; p < mp; ++p) b += std::conj(u[i][p]) * ru[j].middleRows(p * n, n);
            h[i * m + j] = b;
        }
    return h;
}

// Lag-indexed sums of an N x N matrix: out[k] = sum over d_a - d_b = n_k of y(a, b).
CVector lag_sums(const CMatrix& y, const VirtualMaps& vm, const std::vector<int>& lag_of_pair) {
    CVector out = CVector::Zero(vm.n_v());
    const int n = vm.n();
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) out[lag_of_pair[a + b * n]] += y(a, b);
    return out;
}

std::vector<int> pair_lags(const VirtualMaps& vm) {
    const int n = vm.n();
    std::vector<int> out(static_cast<std::size_t>(n) * n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            out[a + b * n] = vm.spatial.index_of(vm.geom.positions[a] - vm.geom.positions[b]);
    return out;
}

CMatrix lag_mask(int k, const VirtualMaps& vm, const std::vector<int>& lag_of_pair) {
    const int n = vm.n();
    CMatrix s = CMatrix::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            if (lag_of_pair[a + b * n] == k) s(a, b) = 1.0;
    return s;
}

}  // namespace

ErrorCovariance error_covariance_structured(const CMatrix& r, const VirtualMaps& vm,
                                            const std::vector<double>& centers, int n_samples) {
    if (n_samples < 1) throw ConfigError("sample count must be >= 1");
    const auto h = cross_bin_blocks(r, vm, centers);
    const auto lag_of_pair = pair_lags(vm);
    const std::size_t m = centers.size();
    const int nv = vm.n_v();
    const Eigen::Index dim = static_cast<Eigen::Index>(m) * nv;
    ErrorCovariance out;
    out.c = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (int l = 0; l < nv; ++l) {
                const CMatrix y = h[i * m + j] * lag_mask(l, vm, lag_of_pair) * h[j * m + i];
                const CVector sums = lag_sums(y, vm, lag_of_pair);
                for (int k = 0; k < nv; ++k)
                    out.c(static_cast<Eigen::Index>(i) * nv + k, static_cast<Eigen::Index>(j) * nv + l) =
                        sums[k] / (double(vm.spatial.weights[k]) * vm.spatial.weights[l] * n_samples);
            }
    out.c = (0.5 * (out.c + out.c.adjoint())).eval();
    out.trace_value = out.c.trace().real();
    out.dof = dim * dim;
    return out;
}

double error_trace_structured(const CMatrix& r, const VirtualMaps& vm,
                              const std::vector<double>& centers, int n_samples) {
    if (n_samples < 1) throw ConfigError("sample count must be >= 1");
    const auto lag_of_pair = pair_lags(vm);
    const int n = vm.n();
    const int mp = vm.m_pulses;
    double total = 0.0;
    for (double c : centers) {
        const CVector u = dft_bin_vector(c, mp);
        CMatrix ru = CMatrix::Zero(n * mp, n);
        for (int q = 0; q < mp; ++q) ru += u[q] * r.middleCols(q * n, n);
        CMatrix hb = CMatrix::Zero(n, n);
        for (int p = 0; p < mp; ++p) hb += std::conj(u[p]) * ru.middleRows(p * n, n);
        for (int k = 0; k < vm.n_v(); ++k) {
            const CMatrix s = lag_mask(k, vm, lag_of_pair);
            const double w = vm.spatial.weights[k];
            total += (s.cwiseProduct(hb * s * hb)).sum().real() / (w * w);
        }
    }
    return total / n_samples;
}

WhitenedStatistic whitened_norm(const CMatrix& c, const CVector& e, double rel_tol) {
    if (c.rows() != e.size()) throw ShapeError("covariance does not match error vector");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of C failed");
    const RVector& lam = es.eigenvalues();
    const double cut = rel_tol * lam.maxCoeff();
    const CVector proj = es.eigenvectors().adjoint() * e;
    WhitenedStatistic out;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam[i] > cut) {
            out.value += std::norm(proj[i]) / lam[i];
            ++out.rank;
        }
    return out;
}

std::vector<VarianceRow> variance_experiment(const RadarScenario& s, int m_bins,
                                             const std::vector<int>& sample_grid, int trials,
                                             std::uint64_t seed) {
    if (trials < 1) throw ConfigError("variance experiment needs at least one trial");
    const VirtualMaps vm = build_virtual_maps(s.geom, s.m_pulses);
    const auto centers = doppler_bin_centers(s.target.doppler, m_bins, s.m_pulses);
    const CVector z = rd_virtual_snapshot_blocks(true_covariance(s), vm, centers);
    const SnapshotSource src(s);
    std::vector<VarianceRow> rows;
    for (std::size_t li = 0; li < sample_grid.size(); ++li) {
        const int n_samples = sample_grid[li];
        double emp = 0.0, theo = 0.0;
        for (int t = 0; t < trials; ++t) {
            const CMatrix rh = sample_covariance(src.draw(n_samples, trial_seed(seed, t, li)));
            emp += (rd_virtual_snapshot_blocks(rh, vm, centers) - z).squaredNorm();
            theo += error_trace_structured(rh, vm, centers, n_samples);
        }
        rows.push_back({n_samples, s.cnr_db, emp / trials, theo / trials});
    }
    return rows;
}

}  // namespace cpstap
