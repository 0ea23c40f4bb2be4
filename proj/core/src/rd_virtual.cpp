#include "cpstap/rd_virtual.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include "cpstap/errors.hpp"
#include "cpstap/signal_model.hpp"

namespace cpstap {

std::vector<double> doppler_bin_centers(double target_doppler, int m_bins, int m_pulses) {
    if (m_bins < 1 || m_bins % 2 == 0)
        throw ConfigError("number of Doppler channels must be odd and >= 1, got " +
                          std::to_string(m_bins));
    if (m_pulses < 1) throw ConfigError("pulse count must be >= 1");
    std::vector<double> c(m_bins);
    for (int i = 0; i < m_bins; ++i)
        c[i] = target_doppler + (i - (m_bins - 1) / 2.0) / m_pulses;
    return c;
}

CVector dft_bin_vector(double doppler, int m_pulses) {
    return temporal_steering(doppler, m_pulses);
}

CMatrix build_d(const RSparse& p, const std::vector<double>& centers, int m_pulses) {
    const Eigen::Index n2 = p.cols();
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
    if (static_cast<Eigen::Index>(n) * n != n2) throw ShapeError("P must have N^2 columns");
    const Eigen::Index nm = static_cast<Eigen::Index>(n) * m_pulses;
    const Eigen::Index nv = p.rows();
    const Eigen::Index m = static_cast<Eigen::Index>(centers.size());

    CMatrix d = CMatrix::Zero(m * nv, nm * nm);
    for (Eigen::Index i = 0; i < m; ++i) {
        const CVector u = dft_bin_vector(centers[i], m_pulses);
        for (int k = 0; k < p.outerSize(); ++k) {
            for (RSparse::InnerIterator it(p, k); it; ++it) {
                const Eigen::Index a = it.col() % n;
                const Eigen::Index b = it.col() / n;
                const Eigen::Index row = i * nv + k;
                for (int q = 0; q < m_pulses; ++q) {
                    const Eigen::Index col_base = (q * n + b) * nm + a;
                    const cd uq = u[q] * it.value();
                    for (int pp = 0; pp < m_pulses; ++pp)
                        d(row, col_base + pp * n) = std::conj(u[pp]) * uq;
                }
            }
        }
    }
    return d;
}

RMatrix pinv_weight(const RSparse& f, double rel_tol) {
    const RMatrix fft = RMatrix(f * RSparse(f.transpose()));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(fft);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of F F^T failed");
    const RVector& lam = es.eigenvalues();
    const double smax = std::sqrt(std::max(lam.maxCoeff(), 0.0));
    RVector inv(lam.size());
    Eigen::Index cut = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const double s = std::sqrt(std::max(lam[i], 0.0));
        if (s > rel_tol * smax) {
            inv[i] = 1.0 / lam[i];
        } else {
            inv[i] = 0.0;
            ++cut;
        }
    }
    if (cut > 0)
        throw NumericalError("F is row-rank deficient: " + std::to_string(cut) +
                             " singular values below tolerance");
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

CMatrix build_g(const CMatrix& d, const RSparse& f, const RMatrix& pinv_w) {
    if (d.cols() != f.cols())
        throw ShapeError("D has " + std::to_string(d.cols()) + " columns, F has " +
                         std::to_string(f.cols()));
    // D F^T, exploiting the sparsity of F.
    CMatrix dft = CMatrix::Zero(d.rows(), f.rows());
    for (int r = 0; r < f.outerSize(); ++r)
        for (RSparse::InnerIterator it(f, r); it; ++it) dft.col(r) += it.value() * d.col(it.col());
    return dft * pinv_w.cast<cd>();
}

CMatrix build_g(const CMatrix& d, const RSparse& f) {
    return build_g(d, f, pinv_weight(f));
}

RdVirtualMaps build_rd_maps(const VirtualMaps& vm, double target_doppler, int m_bins,
                            const RMatrix& pinv_w) {
    RdVirtualMaps rd;
    rd.target_doppler = target_doppler;
    rd.centers = doppler_bin_centers(target_doppler, m_bins, vm.m_pulses);
    rd.d = build_d(vm.p, rd.centers, vm.m_pulses);
    rd.g = build_g(rd.d, vm.f, pinv_w);
    rd.e0_rd = rd.g.col(vm.e0_index);
    return rd;
}

RdVirtualMaps build_rd_maps(const VirtualMaps& vm, double target_doppler, int m_bins) {
    return build_rd_maps(vm, target_doppler, m_bins, pinv_weight(vm.f));
}

CVector rd_virtual_snapshot(const CMatrix& r, const CMatrix& d) {
    if (r.rows() != r.cols() || r.size() != d.cols())
        throw ShapeError("covariance size does not match D");
    return d * Eigen::Map<const CVector>(r.data(), r.size());
}

CVector rd_virtual_snapshot_blocks(const CMatrix& r, const VirtualMaps& vm,
                                   const std::vector<double>& centers) {
    const int n = vm.n();
    const int mp = vm.m_pulses;
    if (r.rows() != n * mp || r.cols() != n * mp)
        throw ShapeError("covariance size does not match geometry");
    const int nv = vm.n_v();
    CVector z = CVector::Zero(static_cast<Eigen::Index>(centers.size()) * nv);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const CVector u = dft_bin_vector(centers[i], mp);
        // S = (u^H kron I) R (u kron I), computed blockwise.
        CMatrix s = CMatrix::Zero(n, n);
        for (int pp = 0; pp < mp; ++pp) {
            CMatrix row = CMatrix::Zero(n, n);
            for (int q = 0; q < mp; ++q) row += u[q] * r.block(pp * n, q * n, n, n);
            s += std::conj(u[pp]) * row;
        }
        for (int b = 0; b < n; ++b)
            for (int a = 0; a < n; ++a) {
                const int k = vm.spatial.index_of(vm.geom.positions[a] - vm.geom.positions[b]);
                z[static_cast<Eigen::Index>(i) * nv + k] += s(a, b) / double(vm.spatial.weights[k]);
            }
    }
    return z;
}

CVector virtual_steering(double doppler, double spatial, const VirtualMaps& vm) {
    const int nv = vm.n_v();
    CVector av(nv);
    for (int s = 0; s < nv; ++s) av[s] = phasor(vm.spatial.lags[s] * spatial);
    CVector v(static_cast<Eigen::Index>(vm.m_v()) * nv);
    for (int t = 0; t < vm.m_v(); ++t) v.segment(t * nv, nv) = phasor(vm.temporal.lags[t] * doppler) * av;
    return v;
}

CMatrix virtual_steering_matrix(const std::vector<double>& doppler,
                                const std::vector<double>& spatial, const VirtualMaps& vm) {
    if (doppler.size() != spatial.size()) throw ShapeError("frequency lists differ in length");
    CMatrix out(vm.virtual_dim(), static_cast<Eigen::Index>(doppler.size()));
    for (std::size_t i = 0; i < doppler.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = virtual_steering(doppler[i], spatial[i], vm);
    return out;
}

CVector rd_virtual_steering(double doppler, double spatial, const VirtualMaps& vm,
                            const RdVirtualMaps& rd) {
    return rd.g * virtual_steering(doppler, spatial, vm);
}

CVector rd_virtual_steering_closed_form(double doppler, double spatial, const VirtualMaps& vm,
                                        const std::vector<double>& centers) {
    const int nv = vm.n_v();
    const CVector b = temporal_steering(doppler, vm.m_pulses);
    CVector av(nv);
    for (int s = 0; s < nv; ++s) av[s] = phasor(vm.spatial.lags[s] * spatial);
    CVector out(static_cast<Eigen::Index>(centers.size()) * nv);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double w = std::norm(dft_bin_vector(centers[i], vm.m_pulses).dot(b));
        out.segment(static_cast<Eigen::Index>(i) * nv, nv) = w * av;
    }
    return out;
}

RdMapCache::RdMapCache(std::shared_ptr<const VirtualMaps> vm)
    : vm_(std::move(vm)), pinv_w_(pinv_weight(vm_->f)) {}

std::shared_ptr<const RdVirtualMaps> RdMapCache::get(double target_doppler, int m_bins) {
    const auto key = std::make_pair(m_bins, target_doppler);
    {
        std::shared_lock lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const RdVirtualMaps>(
        build_rd_maps(*vm_, target_doppler, m_bins, pinv_w_));
    std::unique_lock lk(mu_);
    auto [it, inserted] = cache_.emplace(key, built);
    return it->second;
}

std::size_t RdMapCache::size() const {
    std::shared_lock lk(mu_);
    return cache_.size();
}

}  // namespace cpstap
