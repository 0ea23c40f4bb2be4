#pragma once

#include <vector>

#include "cpstap/dictionary.hpp"
#include "cpstap/rd_virtual.hpp"
#include "cpstap/signal_model.hpp"

namespace cpstap {

struct SubspaceEstimate {
    CMatrix basis;                  // orthonormal columns
    std::vector<Eigen::Index> indices;
    std::vector<double> residual_norms;
    std::vector<Eigen::Index> skipped;  // atoms already in the span
    bool exhausted = false;             // ran out of candidates before K
};

// Greedy clutter-subspace recovery: pick the atom most correlated with the
// residual, orthonormalize it against the basis, deflate the residual.
SubspaceEstimate omp_subspace(const CVector& z, const CMatrix& psi, int k, double gs_tol = 1e-12);

struct FilterWeight {
    CVector w;
    bool degenerate = false;
};

FilterWeight filter_weight(const CMatrix& basis, const CVector& target_steering);

// 10 log10(|alpha|^2 |w^H v|^2 / w^H R w); -inf when the denominator vanishes.
double output_sinr_db(const CVector& w, const CVector& v, cd alpha, const CMatrix& r_metric);

struct LoadedSolve {
    CVector x;
    bool loaded = false;  // diagonal loading 1e-10 * trace / dim was needed
};

LoadedSolve regularized_solve(const CMatrix& a, const CVector& b);

// R_v = V_v diag(p) V_v^H + sigma^2 I on the joint virtual grid.
CMatrix virtual_covariance(const RadarScenario& s, const VirtualMaps& vm);
CMatrix rd_metric_covariance(const CMatrix& r_virtual, const RdVirtualMaps& rd);

struct PipelineOptions {
    int m_bins = 3;
    bool subtract_noise = false;  // remove sigma^2 G e0 from z_r before recovery
    double gs_tol = 1e-12;
};

int clamp_rank(int k, const RdVirtualMaps& rd, const Dictionary& dict);

struct PipelineResult {
    CVector z;
    SubspaceEstimate subspace;
    FilterWeight weight;
    CVector steering;  // RD virtual target steering
    int k = 0;
};

PipelineResult run_pipeline(const CMatrix& r_hat, const RadarScenario& s, const VirtualMaps& vm,
                            const RdVirtualMaps& rd, const Dictionary& dict, int k,
                            const PipelineOptions& opt = {});

struct ClairvoyantResult {
    CVector element_w;
    CVector cpa_v_w;
    CVector proposed_w;
    double element_opt_db = 0.0;
    double cpa_v_opt_db = 0.0;
    double proposed_opt_db = 0.0;
    bool loaded = false;
};

// r and r_virtual may be passed in to share them across a Doppler sweep.
ClairvoyantResult clairvoyant_filters(const RadarScenario& s, const VirtualMaps& vm,
                                      const RdVirtualMaps& rd, const Dictionary& dict, int k,
                                      const CMatrix& r, const CMatrix& r_virtual,
                                      const PipelineOptions& opt = {});
ClairvoyantResult clairvoyant_filters(const RadarScenario& s, const VirtualMaps& vm,
                                      const RdVirtualMaps& rd, const Dictionary& dict, int k,
                                      const PipelineOptions& opt = {});

// Element-space principal-components canceller on a sample covariance.
// Uses the min(k, rank(R_hat)) dominant eigenvectors.
CVector pc_weight(const CMatrix& r_hat, const CVector& steering, int k);

}  // namespace cpstap
