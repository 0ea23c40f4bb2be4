#pragma once

#include <cstdint>
#include <vector>

#include "cpstap/geometry.hpp"
#include "cpstap/types.hpp"

namespace cpstap {

struct Target {
    double doppler = 0.1667;  // normalized by PRF
    double spatial = 0.0;     // boresight
    cd alpha{1.0, 0.0};
};

struct RadarScenario {
    ArrayGeometry geom = coprime_positions(2, 3);
    int m_pulses = 18;
    double lambda = 0.125;
    double t_r = 1.0 / 4000.0;
    double v_p = 125.0;
    double psi = 0.0;
    double phi = 0.0;
    int n_clutter = 361;
    double cnr_db = 40.0;
    double sigma_n2 = 1.0;
    Target target;

    int n() const { return geom.size(); }
    int dim() const { return n() * m_pulses; }

    // Slope of the side-looking clutter ridge, 2 v_p T_r / d0.
    double beta() const { return 2.0 * v_p * t_r / geom.d0; }
    void set_beta(double b) { v_p = b * geom.d0 / (2.0 * t_r); }

    double patch_power() const;
};

struct ClutterPatchSet {
    std::vector<double> azimuth;
    std::vector<double> spatial;
    std::vector<double> doppler;
    std::vector<double> power;
    int size() const { return static_cast<int>(azimuth.size()); }
};

struct ClutterFrequency {
    double spatial;
    double doppler;
};

CVector temporal_steering(double doppler, int m_pulses);
CVector spatial_steering(double spatial, const ArrayGeometry& geom);
CVector space_time_steering(double doppler, double spatial, const RadarScenario& s);

ClutterFrequency clutter_frequencies(double azimuth, const RadarScenario& s, double v_p_used,
                                     double psi_used);
inline ClutterFrequency clutter_frequencies(double azimuth, const RadarScenario& s) {
    return clutter_frequencies(azimuth, s, s.v_p, s.psi);
}

// Equal-power patches uniformly spread over [-pi/2, pi/2].
ClutterPatchSet clutter_patches(const RadarScenario& s);

// Columns are the patch space-time steering vectors.
CMatrix clutter_steering_matrix(const RadarScenario& s, const ClutterPatchSet& patches);

CMatrix true_covariance(const RadarScenario& s);

// Draws snapshots as columns. Holds the patch steering matrix so repeated
// draws skip the setup.
class SnapshotSource {
public:
    explicit SnapshotSource(const RadarScenario& s);
    CMatrix draw(int n_samples, std::uint64_t seed) const;
    const CMatrix& steering() const { return v_; }

private:
    CMatrix v_;
    std::vector<double> amp_;  // sqrt(p_i / 2)
    double noise_amp_;         // sqrt(sigma_n2 / 2)
};

CMatrix generate_snapshots(const RadarScenario& s, int n_samples, std::uint64_t seed);
CMatrix sample_covariance(const CMatrix& snapshots);

}  // namespace cpstap
