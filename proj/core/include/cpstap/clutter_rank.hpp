#pragma once

#include <vector>

#include "cpstap/dictionary.hpp"
#include "cpstap/geometry.hpp"
#include "cpstap/signal_model.hpp"

namespace cpstap {

// Sorted positions d_n + beta * t_m (t_m = 0..M-1), merged within 1e-9.
std::vector<double> equivalent_array(double beta, const std::vector<int>& positions, int m_pulses);

struct SubAperture {
    double start;
    double end;
    double length() const { return end - start; }
};

// Split wherever consecutive positions are more than one Nyquist interval apart.
std::vector<SubAperture> subdivide_aperture(const std::vector<double>& positions,
                                            double nyquist_spacing = 1.0);

struct RankAngleInput {
    double theta;
    double spatial;
    double b_s;                  // spatial-frequency width of the angle cell
    std::vector<double> betas;   // candidate ridge slopes
};

struct RankAngleReport {
    double theta;
    double spatial;
    double b_s;
    double beta;
    double span;
    double effective;            // sum of sub-aperture lengths
    std::vector<SubAperture> parts;
};

struct RankEstimate {
    int value = 1;
    double raw = 1.0;
    std::vector<RankAngleReport> per_angle;
};

RankEstimate estimate_rank(const std::vector<int>& positions, int m_pulses,
                           const std::vector<RankAngleInput>& angles);

// Even angle sampling with Q = n_angles rounded up to even, so no cell is
// centred on broadside. Candidate slopes come from the prior Doppler grid.
std::vector<RankAngleInput> rank_angle_inputs(const RadarScenario& s, const PriorKnowledge& prior,
                                              int n_angles);

RankEstimate estimate_rank(const RadarScenario& s, const PriorKnowledge& prior);

}  // namespace cpstap
