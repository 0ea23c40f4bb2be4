#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cpstap/rd_virtual.hpp"
#include "cpstap/signal_model.hpp"

namespace cpstap {

enum class BoundMode { Literal, Simplified };

struct PriorKnowledge {
    double v_p_measured = 125.0;  // m/s
    double psi_measured = 0.0;    // rad
    double dv_pm = 2.0;           // m/s
    double dpsi_m = 0.017453292519943295;  // 1 degree
    int m_e = 15;
    int n_angles = 85;
    BoundMode bound_mode = BoundMode::Literal;

    void validate() const;
};

// Maximum Doppler deviation, in PRF-normalized units, implied by the
// velocity and crab-angle error bounds.
double doppler_uncertainty_bound(const PriorKnowledge& prior, const RadarScenario& s);

struct DopplerGrid {
    std::vector<double> points;
    bool degenerate = false;  // m_e = 1 with a nonzero bound
};

DopplerGrid doppler_grid(double assumed, double bound, int m_e);

// theta_i = -pi/2 + i*pi/n for i = 1..n.
std::vector<double> azimuth_grid(int n_angles);

struct AtomInfo {
    int angle_index;
    double azimuth;
    double spatial;
    double doppler;
};

struct Dictionary {
    CMatrix atoms;  // unit-norm columns, angle-major
    std::vector<AtomInfo> grid;
    double doppler_bound = 0.0;
    bool degenerate_grid = false;
    std::vector<std::string> warnings;

    Eigen::Index size() const { return atoms.cols(); }
};

Dictionary build_dictionary(const RadarScenario& s, const PriorKnowledge& prior,
                            const VirtualMaps& vm, const RdVirtualMaps& rd);

// One row per atom with its grid metadata. With include_atoms the atom
// entries follow as re/im column pairs.
void write_dictionary_csv(std::ostream& os, const Dictionary& dict, bool include_atoms = false);

}  // namespace cpstap
