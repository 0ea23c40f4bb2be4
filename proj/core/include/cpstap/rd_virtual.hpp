#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "cpstap/geometry.hpp"
#include "cpstap/types.hpp"

namespace cpstap {

std::vector<double> doppler_bin_centers(double target_doppler, int m_bins, int m_pulses);

CVector dft_bin_vector(double doppler, int m_pulses);

// Stack of m blocks P (u^T kron u^H), each N_v x N^2 M^2, dense.
CMatrix build_d(const RSparse& p, const std::vector<double>& centers, int m_pulses);

// Right factor of the pseudo-inverse: pinv(F) = F^T * W. F F^T is
// eigen-decomposed and cut at sigma > 1e-10 sigma_max; any cut is a
// rank deficiency and raises NumericalError.
RMatrix pinv_weight(const RSparse& f, double rel_tol = 1e-10);

CMatrix build_g(const CMatrix& d, const RSparse& f);
CMatrix build_g(const CMatrix& d, const RSparse& f, const RMatrix& pinv_w);

struct RdVirtualMaps {
    double target_doppler = 0.0;
    std::vector<double> centers;
    CMatrix d;
    CMatrix g;
    CVector e0_rd;  // G e0

    int m_bins() const { return static_cast<int>(centers.size()); }
    Eigen::Index rows() const { return g.rows(); }
};

RdVirtualMaps build_rd_maps(const VirtualMaps& vm, double target_doppler, int m_bins);
RdVirtualMaps build_rd_maps(const VirtualMaps& vm, double target_doppler, int m_bins,
                            const RMatrix& pinv_w);

// z_r = D vec(R).
CVector rd_virtual_snapshot(const CMatrix& r, const CMatrix& d);

// Same quantity assembled per Doppler bin: lag-average of (u^H kron I) R (u kron I).
CVector rd_virtual_snapshot_blocks(const CMatrix& r, const VirtualMaps& vm,
                                   const std::vector<double>& centers);

// Steering on the joint virtual grid, entry t*N_v + s = e^{j2pi(m_t w + n_s theta)}.
CVector virtual_steering(double doppler, double spatial, const VirtualMaps& vm);
CMatrix virtual_steering_matrix(const std::vector<double>& doppler,
                                const std::vector<double>& spatial, const VirtualMaps& vm);

CVector rd_virtual_steering(double doppler, double spatial, const VirtualMaps& vm,
                            const RdVirtualMaps& rd);

// Closed form of G v_v: Fejer weights |u_i^H b|^2 per bin times coarray steering.
CVector rd_virtual_steering_closed_form(double doppler, double spatial, const VirtualMaps& vm,
                                        const std::vector<double>& centers);

// Thread-safe cache of RD maps keyed by (m, target Doppler).
class RdMapCache {
public:
    explicit RdMapCache(std::shared_ptr<const VirtualMaps> vm);
    std::shared_ptr<const RdVirtualMaps> get(double target_doppler, int m_bins);
    const VirtualMaps& maps() const { return *vm_; }
    std::size_t size() const;

private:
    std::shared_ptr<const VirtualMaps> vm_;
    RMatrix pinv_w_;
    mutable std::shared_mutex mu_;
    std::map<std::pair<int, double>, std::shared_ptr<const RdVirtualMaps>> cache_;
};

}  // namespace cpstap
