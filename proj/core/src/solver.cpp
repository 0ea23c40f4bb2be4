#include "cpstap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpstap/errors.hpp"

namespace cpstap {

SubspaceEstimate omp_subspace(const CVector& z, const CMatrix& psi, int k, double gs_tol) {
    if (k < 0) throw ConfigError("iteration count must be >= 0");
    if (psi.rows() != z.size()) throw ShapeError("dictionary rows do not match snapshot length");
    SubspaceEstimate out;
    out.basis.resize(z.size(), 0);
    if (k == 0) return out;
    if (z.norm() == 0.0) throw EmptyInputError("virtual snapshot is identically zero");
    if (k > std::min<Eigen::Index>(z.size(), psi.cols()))
        throw ConfigError("iteration count exceeds min(rows, atoms)");

    std::vector<char> available(static_cast<std::size_t>(psi.cols()), 1);
    Eigen::Index remaining = psi.cols();
    CVector gamma = z;
    CMatrix basis(z.size(), k);
    int found = 0;
    while (found < k) {
        if (remaining == 0) {
            out.exhausted = true;
            break;
        }
        const RVector corr = (psi.adjoint() * gamma).cwiseAbs();
        Eigen::Index best = -1;
        for (Eigen::Index c = 0; c < psi.cols(); ++c)
            if (available[c] && (best < 0 || corr[c] > corr[best])) best = c;
        available[best] = 0;
        --remaining;

        CVector v = psi.col(best);
        if (found > 0) {
            const auto q = basis.leftCols(found);
            v -= q * (q.adjoint() * v);
        }
        const double nv = v.norm();
        if (nv < gs_tol) {
            out.skipped.push_back(best);
            continue;
        }
        v /= nv;
        basis.col(found++) = v;
        gamma -= v.dot(gamma) * v;
        out.indices.push_back(best);
        out.residual_norms.push_back(gamma.norm());
    }
    out.basis = basis.leftCols(found);
    return out;
}

FilterWeight filter_weight(const CMatrix& basis, const CVector& target_steering) {
    if (basis.cols() > 0 && basis.rows() != target_steering.size())
        throw ShapeError("basis rows do not match steering length");
    FilterWeight fw;
    fw.w = target_steering;
    if (basis.cols() > 0) fw.w -= basis * (basis.adjoint() * target_steering);
    fw.degenerate = fw.w.norm() <= 1e-10 * std::max(1.0, target_steering.norm());
    return fw;
}

double output_sinr_db(const CVector& w, const CVector& v, cd alpha, const CMatrix& r_metric) {
    if (w.size() != v.size() || r_metric.rows() != w.size())
        throw ShapeError("SINR operands differ in size");
    const double den = std::real(w.dot(r_metric * w));
    if (!(den > 0.0)) return -std::numeric_limits<double>::infinity();
    const double num = std::norm(alpha) * std::norm(w.dot(v));
    if (num == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}

LoadedSolve regularized_solve(const CMatrix& a, const CVector& b) {
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() == Eigen::Success) return {llt.solve(b), false};
    CMatrix loaded = a;
    const double load = 1e-10 * std::abs(a.trace()) / static_cast<double>(a.rows());
    loaded.diagonal().array() += load;
    Eigen::LLT<CMatrix> llt2(loaded);
    if (llt2.info() == Eigen::Success) return {llt2.solve(b), true};
    return {loaded.ldlt().solve(b), true};
}

CMatrix virtual_covariance(const RadarScenario& s, const VirtualMaps& vm) {
    const auto patches = clutter_patches(s);
    CMatrix vv = virtual_steering_matrix(patches.doppler, patches.spatial, vm);
    for (int i = 0; i < patches.size(); ++i) vv.col(i) *= std::sqrt(patches.power[i]);
    CMatrix rv = vv * vv.adjoint();
    rv.diagonal().array() += s.sigma_n2;
    return rv;
}

CMatrix rd_metric_covariance(const CMatrix& r_virtual, const RdVirtualMaps& rd) {
    if (r_virtual.rows() != rd.g.cols()) throw ShapeError("virtual covariance does not match G");
    CMatrix out = rd.g * r_virtual * rd.g.adjoint();
    return (0.5 * (out + out.adjoint())).eval();
}

int clamp_rank(int k, const RdVirtualMaps& rd, const Dictionary& dict) {
    const int cap = static_cast<int>(std::min<Eigen::Index>(rd.rows() - 1, dict.size()));
    return std::clamp(k, 0, std::max(cap, 0));
}

PipelineResult run_pipeline(const CMatrix& r_hat, const RadarScenario& s, const VirtualMaps& vm,
                            const RdVirtualMaps& rd, const Dictionary& dict, int k,
                            const PipelineOptions& opt) {
    PipelineResult res;
    res.z = rd_virtual_snapshot_blocks(r_hat, vm, rd.centers);
    if (opt.subtract_noise) res.z -= s.sigma_n2 * rd.e0_rd;
    res.k = clamp_rank(k, rd, dict);
    res.subspace = omp_subspace(res.z, dict.atoms, res.k, opt.gs_tol);
    res.steering = rd_virtual_steering(s.target.doppler, s.target.spatial, vm, rd);
    res.weight = filter_weight(res.subspace.basis, res.steering);
    return res;
}

ClairvoyantResult clairvoyant_filters(const RadarScenario& s, const VirtualMaps& vm,
                                      const RdVirtualMaps& rd, const Dictionary& dict, int k,
                                      const CMatrix& r, const CMatrix& r_virtual,
                                      const PipelineOptions& opt) {
    ClairvoyantResult out;
    const CVector v = space_time_steering(s.target.doppler, s.target.spatial, s);
    const auto el = regularized_solve(r, v);
    out.element_w = el.x;
    out.element_opt_db = output_sinr_db(el.x, v, s.target.alpha, r);

    const CVector vv = virtual_steering(s.target.doppler, s.target.spatial, vm);
    const auto cv = regularized_solve(r_virtual, vv);
    out.cpa_v_w = cv.x;
    out.cpa_v_opt_db = output_sinr_db(cv.x, vv, s.target.alpha, r_virtual);

    const auto pipe = run_pipeline(r, s, vm, rd, dict, k, opt);
    out.proposed_w = pipe.weight.w;
    out.proposed_opt_db = output_sinr_db(pipe.weight.w, pipe.steering, s.target.alpha,
                                         rd_metric_covariance(r_virtual, rd));
    out.loaded = el.loaded || cv.loaded;
    return out;
}

ClairvoyantResult clairvoyant_filters(const RadarScenario& s, const VirtualMaps& vm,
                                      const RdVirtualMaps& rd, const Dictionary& dict, int k,
                                      const PipelineOptions& opt) {
    return clairvoyant_filters(s, vm, rd, dict, k, true_covariance(s), virtual_covariance(s, vm), opt);
}

CVector pc_weight(const CMatrix& r_hat, const CVector& steering, int k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r_hat);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
    const RVector& lam = es.eigenvalues();  // ascending
    const double tol = 1e-10 * std::max(lam.maxCoeff(), 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) rank += lam[i] > tol;
    const int use = std::clamp(k, 0, rank);
    const auto u = es.eigenvectors().rightCols(use);
    return steering - u * (u.adjoint() * steering);
}

}  // namespace cpstap
