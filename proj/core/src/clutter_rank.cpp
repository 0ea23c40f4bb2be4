#include "cpstap/clutter_rank.hpp"

#include <algorithm>
#include <cmath>

#include "cpstap/errors.hpp"

namespace cpstap {

std::vector<double> equivalent_array(double beta, const std::vector<int>& positions, int m_pulses) {
    if (!std::isfinite(beta)) throw ConfigError("ridge slope must be finite");
    std::vector<double> p;
    p.reserve(positions.size() * static_cast<std::size_t>(m_pulses));
    for (int d : positions)
        for (int t = 0; t < m_pulses; ++t) p.push_back(d + beta * t);
    std::sort(p.begin(), p.end());
    std::vector<double> out;
    for (double x : p)
        if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
    return out;
}

std::vector<SubAperture> subdivide_aperture(const std::vector<double>& positions,
                                            double nyquist_spacing) {
    std::vector<SubAperture> runs;
    if (positions.empty()) return runs;
    SubAperture cur{positions.front(), positions.front()};
    for (std::size_t i = 1; i < positions.size(); ++i) {
        if (positions[i] - positions[i - 1] > nyquist_spacing + 1e-9) {
            runs.push_back(cur);
            cur = {positions[i], positions[i]};
        } else {
            cur.end = positions[i];
        }
    }
    runs.push_back(cur);
    return runs;
}

RankEstimate estimate_rank(const std::vector<int>& positions, int m_pulses,
                           const std::vector<RankAngleInput>& angles) {
    RankEstimate est;
    double total = 0.0;
    for (const auto& a : angles) {
        if (a.betas.empty()) throw ConfigError("rank angle without candidate slopes");
        RankAngleReport best{};
        bool have = false;
        for (double beta : a.betas) {
            const auto eq = equivalent_array(beta, positions, m_pulses);
            auto parts = subdivide_aperture(eq);
            double eff = 0.0;
            for (const auto& s : parts) eff += s.length();
            const double span = eq.back() - eq.front();
            // Largest summed sub-aperture wins; full span breaks ties.
            const bool better = !have || eff > best.effective + 1e-12 ||
                                (std::abs(eff - best.effective) <= 1e-12 && span > best.span + 1e-12);
            if (better) {
                best = {a.theta, a.spatial, a.b_s, beta, span, eff, std::move(parts)};
                have = true;
            }
        }
        total += a.b_s * best.effective;
        est.per_angle.push_back(std::move(best));
    }
    est.raw = total + 1.0;
    est.value = std::max(1, static_cast<int>(std::ceil(est.raw - 1e-9)));
    return est;
}

std::vector<RankAngleInput> rank_angle_inputs(const RadarScenario& s, const PriorKnowledge& prior,
                                              int n_angles) {
    if (n_angles < 2) throw ConfigError("rank estimation needs at least two angles");
    const int q_count = n_angles % 2 == 0 ? n_angles : n_angles + 1;
    const double bound = doppler_uncertainty_bound(prior, s);
    const double cell = kPi / q_count;
    std::vector<RankAngleInput> out;
    for (int q = 0; q < q_count; ++q) {
        const double lo = -kPi / 2 + q * cell;
        const double th = lo + 0.5 * cell;
        const auto f = clutter_frequencies(th, s, prior.v_p_measured, prior.psi_measured);
        const double b_s = std::abs(clutter_frequencies(lo + cell, s).spatial -
                                    clutter_frequencies(lo, s).spatial);
        RankAngleInput in{th, f.spatial, b_s, {}};
        for (double w : doppler_grid(f.doppler, bound, prior.m_e).points)
            in.betas.push_back(w / f.spatial);
        out.push_back(std::move(in));
    }
    return out;
}

RankEstimate estimate_rank(const RadarScenario& s, const PriorKnowledge& prior) {
    return estimate_rank(s.geom.positions, s.m_pulses, rank_angle_inputs(s, prior, prior.n_angles));
}

}  // namespace cpstap
