#include "cpstap/dictionary.hpp"

#include <cmath>
#include <string>

#include "cpstap/csv.hpp"
#include "cpstap/errors.hpp"

namespace cpstap {

void PriorKnowledge::validate() const {
    if (!(dv_pm >= 0.0)) throw InvalidPriorError("velocity error bound must be >= 0");
    if (!(dpsi_m >= 0.0)) throw InvalidPriorError("crab-angle error bound must be >= 0");
    if (m_e < 1) throw ConfigError("m_e must be >= 1");
    if (n_angles < 1) throw ConfigError("n_angles must be >= 1");
}

double doppler_uncertainty_bound(const PriorKnowledge& prior, const RadarScenario& s) {
    prior.validate();
    const double v = prior.v_p_measured;
    double radicand;
    if (prior.bound_mode == BoundMode::Literal) {
        // The velocity offsets are mixed with a bare constant; kept exactly as stated.
        const double a = v / 2.0 * prior.dpsi_m * prior.dpsi_m + v - 1.0;
        radicand = a * a + prior.dv_pm * prior.dv_pm - (v - 1.0) * (v - 1.0);
    } else {
        radicand = std::pow(v * prior.dpsi_m, 2) + prior.dv_pm * prior.dv_pm;
    }
    if (radicand < 0.0) {
        // Tiny negatives from cancellation are zero.
        if (radicand > -1e-12 * (1.0 + v * v)) radicand = 0.0;
        else throw InvalidPriorError("Doppler bound radicand is negative: " + std::to_string(radicand));
    }
    return 2.0 / s.lambda * std::abs(std::cos(s.phi)) * std::sqrt(radicand) * s.t_r;
}

DopplerGrid doppler_grid(double assumed, double bound, int m_e) {
    if (m_e < 1) throw ConfigError("m_e must be >= 1");
    if (bound < 0.0) throw InvalidPriorError("Doppler bound must be >= 0");
    DopplerGrid g;
    if (m_e == 1) {
        g.points = {assumed};
        g.degenerate = bound > 0.0;
        return g;
    }
    const double lo = assumed - bound;
    const double step = 2.0 * bound / (m_e - 1);
    for (int k = 0; k < m_e; ++k) g.points.push_back(lo + k * step);
    g.points.back() = assumed + bound;
    return g;
}

std::vector<double> azimuth_grid(int n_angles) {
    std::vector<double> th(n_angles);
    for (int i = 1; i <= n_angles; ++i) th[i - 1] = -kPi / 2 + i * kPi / n_angles;
    return th;
}

Dictionary build_dictionary(const RadarScenario& s, const PriorKnowledge& prior,
                            const VirtualMaps& vm, const RdVirtualMaps& rd) {
    prior.validate();
    Dictionary dict;
    dict.doppler_bound = doppler_uncertainty_bound(prior, s);

    const int nv = vm.n_v();
    if (prior.n_angles < 2 * nv)
        dict.warnings.push_back("azimuth grid has " + std::to_string(prior.n_angles) +
                                " points, below the supported minimum of 2*N_v = " +
                                std::to_string(2 * nv));
    else if (prior.n_angles < 4 * nv)
        dict.warnings.push_back("azimuth grid below 4*N_v; expect an SINR penalty");

    std::vector<double> dop, spa;
    const auto thetas = azimuth_grid(prior.n_angles);
    for (int i = 0; i < prior.n_angles; ++i) {
        const auto f = clutter_frequencies(thetas[i], s, prior.v_p_measured, prior.psi_measured);
        const auto g = doppler_grid(f.doppler, dict.doppler_bound, prior.m_e);
        dict.degenerate_grid = dict.degenerate_grid || g.degenerate;
        for (double w : g.points) {
            dict.grid.push_back({i, thetas[i], f.spatial, w});
            dop.push_back(w);
            spa.push_back(f.spatial);
        }
    }
    if (dict.degenerate_grid)
        dict.warnings.push_back("m_e = 1 with a nonzero Doppler bound; grid collapsed to the assumed Doppler");

    dict.atoms = rd.g * virtual_steering_matrix(dop, spa, vm);
    for (Eigen::Index c = 0; c < dict.atoms.cols(); ++c) {
        const double nrm = dict.atoms.col(c).norm();
        if (nrm > 0.0) dict.atoms.col(c) /= nrm;
    }
    return dict;
}

void write_dictionary_csv(std::ostream& os, const Dictionary& dict, bool include_atoms) {
    CsvWriter w(os);
    std::vector<std::string> head = {"atom", "angle_index", "azimuth_rad", "spatial_freq", "doppler"};
    if (include_atoms)
        for (Eigen::Index r = 0; r < dict.atoms.rows(); ++r) {
            head.push_back("re_" + std::to_string(r));
            head.push_back("im_" + std::to_string(r));
        }
    w.row(head);
    for (std::size_t c = 0; c < dict.grid.size(); ++c) {
        const auto& g = dict.grid[c];
        std::vector<std::string> f = {std::to_string(c), std::to_string(g.angle_index),
                                      format_double(g.azimuth), format_double(g.spatial),
                                      format_double(g.doppler)};
        if (include_atoms)
            for (Eigen::Index r = 0; r < dict.atoms.rows(); ++r) {
                const cd v = dict.atoms(r, static_cast<Eigen::Index>(c));
                f.push_back(format_double(v.real()));
                f.push_back(format_double(v.imag()));
            }
        w.row(f);
    }
}

}  // namespace cpstap
