#pragma once

#include <cstdint>
#include <vector>

#include "cpstap/rd_virtual.hpp"
#include "cpstap/signal_model.hpp"

namespace cpstap {

struct ErrorCovariance {
    CMatrix c;
    double trace_value = 0.0;
    Eigen::Index dof = 0;  // (m N_v)^2
};

// C = (1/L) D (R^T kron R) D^H without forming the Kronecker product:
// C_rs = (1/L) <A_r, R conj(A_s) R> with A_r the row r of D reshaped NM x NM.
ErrorCovariance error_covariance(const CMatrix& r, const CMatrix& d, int n_samples);
inline ErrorCovariance estimated_error_covariance(const CMatrix& r_hat, const CMatrix& d,
                                                  int n_samples) {
    return error_covariance(r_hat, d, n_samples);
}

// Same matrix from the per-bin structure, O(m^2 N_v N^3) after forming the
// m^2 cross-bin blocks (u_i^H kron I) R (u_j kron I).
ErrorCovariance error_covariance_structured(const CMatrix& r, const VirtualMaps& vm,
                                            const std::vector<double>& centers, int n_samples);

double error_trace_structured(const CMatrix& r, const VirtualMaps& vm,
                              const std::vector<double>& centers, int n_samples);

struct WhitenedStatistic {
    double value = 0.0;
    int rank = 0;
};

// ||C^{-1/2} e||^2 with C^{-1/2} restricted to eigenvalues above 1e-10 lambda_max.
WhitenedStatistic whitened_norm(const CMatrix& c, const CVector& e, double rel_tol = 1e-10);

struct VarianceRow {
    int n_samples;
    double cnr_db;
    double empirical;
    double theoretical;
};

// Empirical mean ||z_hat - z||^2 against the mean plug-in trace of C over
// the same trials. Trial t at grid point i is seeded with trial_seed(seed, t, i).
std::vector<VarianceRow> variance_experiment(const RadarScenario& s, int m_bins,
                                             const std::vector<int>& sample_grid, int trials,
                                             std::uint64_t seed);

}  // namespace cpstap
