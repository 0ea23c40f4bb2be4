#include "cpstap/signal_model.hpp"

#include <cmath>
#include <random>

#include "cpstap/errors.hpp"

namespace cpstap {

double RadarScenario::patch_power() const {
    return sigma_n2 * std::pow(10.0, cnr_db / 10.0) / n_clutter;
}

CVector temporal_steering(double doppler, int m_pulses) {
    CVector b(m_pulses);
    for (int k = 0; k < m_pulses; ++k) b[k] = phasor(k * doppler);
    return b;
}

CVector spatial_steering(double spatial, const ArrayGeometry& geom) {
    CVector a(geom.size());
    for (int i = 0; i < geom.size(); ++i) a[i] = phasor(geom.positions[i] * spatial);
    return a;
}

CVector space_time_steering(double doppler, double spatial, const RadarScenario& s) {
    const CVector b = temporal_steering(doppler, s.m_pulses);
    const CVector a = spatial_steering(spatial, s.geom);
    CVector v(b.size() * a.size());
    for (Eigen::Index m = 0; m < b.size(); ++m) v.segment(m * a.size(), a.size()) = b[m] * a;
    return v;
}

ClutterFrequency clutter_frequencies(double azimuth, const RadarScenario& s, double v_p_used,
                                     double psi_used) {
    const double c = std::cos(s.phi);
    return {s.geom.d0 / s.lambda * c * std::sin(azimuth),
            2.0 * v_p_used * s.t_r / s.lambda * c * std::sin(azimuth + psi_used)};
}

ClutterPatchSet clutter_patches(const RadarScenario& s) {
    if (s.n_clutter < 1) throw ConfigError("n_clutter must be >= 1");
    ClutterPatchSet out;
    const double p = s.patch_power();
    for (int i = 0; i < s.n_clutter; ++i) {
        const double th = s.n_clutter == 1 ? 0.0 : -kPi / 2 + kPi * i / (s.n_clutter - 1);
        const auto f = clutter_frequencies(th, s);
        out.azimuth.push_back(th);
        out.spatial.push_back(f.spatial);
        out.doppler.push_back(f.doppler);
        out.power.push_back(p);
    }
    return out;
}

CMatrix clutter_steering_matrix(const RadarScenario& s, const ClutterPatchSet& patches) {
    CMatrix v(s.dim(), patches.size());
    for (int i = 0; i < patches.size(); ++i)
        v.col(i) = space_time_steering(patches.doppler[i], patches.spatial[i], s);
    return v;
}

CMatrix true_covariance(const RadarScenario& s) {
    const auto patches = clutter_patches(s);
    CMatrix v = clutter_steering_matrix(s, patches);
    for (int i = 0; i < patches.size(); ++i) v.col(i) *= std::sqrt(patches.power[i]);
    CMatrix r = v * v.adjoint();
    r.diagonal().array() += s.sigma_n2;
    return r;
}

SnapshotSource::SnapshotSource(const RadarScenario& s) {
    const auto patches = clutter_patches(s);
    v_ = clutter_steering_matrix(s, patches);
    for (double p : patches.power) amp_.push_back(std::sqrt(p / 2.0));
    noise_amp_ = std::sqrt(s.sigma_n2 / 2.0);
}

CMatrix SnapshotSource::draw(int n_samples, std::uint64_t seed) const {
    if (n_samples < 1) throw EmptyInputError("snapshot count must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::Index nc = v_.cols();
    CMatrix alpha(nc, n_samples);
    for (int l = 0; l < n_samples; ++l)
        for (Eigen::Index i = 0; i < nc; ++i) {
            const double re = g(rng), im = g(rng);
            alpha(i, l) = amp_[i] * cd(re, im);
        }
    CMatrix x = v_ * alpha;
    for (int l = 0; l < n_samples; ++l)
        for (Eigen::Index k = 0; k < x.rows(); ++k) {
            const double re = g(rng), im = g(rng);
            x(k, l) += noise_amp_ * cd(re, im);
        }
    return x;
}

CMatrix generate_snapshots(const RadarScenario& s, int n_samples, std::uint64_t seed) {
    return SnapshotSource(s).draw(n_samples, seed);
}

CMatrix sample_covariance(const CMatrix& snapshots) {
    if (snapshots.cols() == 0 || snapshots.rows() == 0)
        throw EmptyInputError("sample covariance needs at least one snapshot");
    CMatrix r = snapshots * snapshots.adjoint() / static_cast<double>(snapshots.cols());
    // Exact Hermitian symmetry regardless of GEMM rounding.
    return (0.5 * (r + r.adjoint())).eval();
}

}  // namespace cpstap
