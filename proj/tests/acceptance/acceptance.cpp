// Acceptance runner: one PASS/FAIL line per criterion. Exit status is 0
// unless --strict is given and some criterion failed, so ctest records a
// completed run while the lines carry the verdicts.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "cpstap/cpstap.hpp"

using namespace cpstap;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Verdict()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double row_value(const ResultTable& t, const std::string& series, const std::string& var, double x,
                 const std::string& metric = "sinr_db") {
    for (const auto& r : t.rows)
        if (r.series == series && r.sweep_var == var && r.metric == metric && std::abs(r.sweep_value - x) < 1e-12)
            return r.value;
    throw Error("missing result row " + series + " " + var + "=" + std::to_string(x) + " " + metric);
}

double series_mean(const ResultTable& t, const std::string& series, const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += row_value(t, series, "doppler", x);
    return s / xs.size();
}

// 1. Zero-error rank estimates against the BT and EBT oracles.
Verdict rank_rule() {
    Verdict v{true, ""};
    int checked = 0;
    for (bool coprime : {false, true})
        for (double beta : {0.6, 1.0}) {
            RadarScenario s;
            s.geom = coprime ? coprime_positions(3, 5) : uniform_positions(10);
            s.m_pulses = 10;
            s.set_beta(beta);
            s.psi = 0.0;
            PriorKnowledge p;
            p.v_p_measured = s.v_p;
            p.psi_measured = 0.0;
            p.dv_pm = 0.0;
            p.dpsi_m = 0.0;
            p.n_angles = 5 * difference_coarray(s.geom).n_v();
            const int got = estimate_rank(s, p).value;
            const double ref = coprime ? oracle::ebt(s.geom.positions, 10, beta) : oracle::brennan(10, 10, beta);
            const int want = static_cast<int>(std::ceil(ref - 1e-9));
            ++checked;
            if (got != want) v.pass = false;
            v.detail += std::string(coprime ? "CPA(3,5)" : "ULA(10)") + " beta=" + fmt("%.1f", beta) + ": " +
                        std::to_string(got) + "/" + std::to_string(want) + "; ";
        }
    v.detail += std::to_string(checked) + " cases";
    return v;
}

// 2. Monte Carlo error power against the plug-in trace, N1=2 N2=3 M=8.
Verdict variance_theory() {
    RadarScenario s;
    s.m_pulses = 8;
    const std::vector<int> ls = {10, 50, 200};
    const std::vector<double> cnrs = {10, 30, 50};
    Verdict v{true, ""};
    std::vector<std::vector<double>> emp(cnrs.size());
    double worst_lo = 1e9, worst_hi = 0.0;
    for (std::size_t c = 0; c < cnrs.size(); ++c) {
        s.cnr_db = cnrs[c];
        const auto rows = variance_experiment(s, 3, ls, 500, trial_seed(20240601, 0, c));
        for (const auto& r : rows) {
            const double ratio = r.empirical / r.theoretical;
            worst_lo = std::min(worst_lo, ratio);
            worst_hi = std::max(worst_hi, ratio);
            if (ratio < 0.8 || ratio > 1.25) v.pass = false;
            emp[c].push_back(r.empirical);
        }
    }
    bool ordered = true;
    for (std::size_t li = 0; li < ls.size(); ++li)
        for (std::size_t c = 1; c < cnrs.size(); ++c) ordered = ordered && emp[c][li] > emp[c - 1][li];
    v.pass = v.pass && ordered;
    v.detail = "ratio range [" + fmt("%.3f", worst_lo) + ", " + fmt("%.3f", worst_hi) + "], CNR ordering " +
               (ordered ? "increasing" : "violated") + ", 500 trials";
    return v;
}

std::vector<double> doppler_points(double min_abs) {
    std::vector<double> out;
    for (int k = 0; k < 40; ++k) {
        const double d = -0.5 + k / 40.0;
        if (std::abs(d) >= min_abs - 1e-12) out.push_back(d);
    }
    return out;
}

// 3. m = 3 against the virtual optimum and against m = 1, known R.
Verdict channel_tradeoff() {
    ExperimentConfig c = preset_config("fig9_channels");
    c.seed = 9001;
    c.trials = 10;
    c.channel_grid = {1, 3};
    c.doppler_grid = doppler_points(0.1);
    const auto t = run_experiment(c);
    const double m3 = series_mean(t, "m=3", c.doppler_grid);
    const double m1 = series_mean(t, "m=1", c.doppler_grid);
    const double opt = series_mean(t, "cpa_v_opt", c.doppler_grid);
    Verdict v;
    v.pass = opt - m3 <= 3.0 && m3 - m1 >= 3.0;
    v.detail = "mean over " + std::to_string(c.doppler_grid.size()) + " Doppler points: cpa_v_opt " +
               fmt("%.2f", opt) + " dB, m=3 " + fmt("%.2f", m3) + " dB (loss " + fmt("%.2f", opt - m3) +
               "), m=1 " + fmt("%.2f", m1) + " dB (gap " + fmt("%.2f", m3 - m1) + "), 10 trials";
    return v;
}

// 4. L = 5 against L = 200 and against the PC canceller.
Verdict low_sample() {
    ExperimentConfig c = preset_config("fig11_convergence");
    c.seed = 1105;
    c.trials = 500;
    c.sample_grid = {5, 200};
    const auto t = run_experiment(c);
    const double p5 = row_value(t, "proposed", "samples", 5);
    const double p200 = row_value(t, "proposed", "samples", 200);
    const double pc5 = row_value(t, "pc", "samples", 5);
    Verdict v;
    v.pass = std::abs(p200 - p5) <= 5.0 && p5 - pc5 >= 5.0;
    v.detail = "proposed L=5 " + fmt("%.2f", p5) + " dB, L=200 " + fmt("%.2f", p200) + " dB, PC L=5 " +
               fmt("%.2f", pc5) + " dB, 500 trials";
    return v;
}

// 5. Gaussian spread on the error bounds.
Verdict robustness() {
    ExperimentConfig c = preset_config("fig7_robustness");
    c.seed = 707;
    c.trials = 500;
    c.ratio_grid = {0.0, 0.2, 0.4, 0.6, 1.0};
    const auto t = run_experiment(c);
    const double v0 = row_value(t, "velocity", "ratio", 0.0);
    double worst_v = 0.0;
    for (double r : {0.2, 0.4, 0.6}) worst_v = std::max(worst_v, v0 - row_value(t, "velocity", "ratio", r));
    const double c0 = row_value(t, "crab", "ratio", 0.0);
    const double crab_drop = c0 - row_value(t, "crab", "ratio", 1.0);
    Verdict v;
    v.pass = worst_v <= 1.0 && crab_drop <= 3.0;
    v.detail = "velocity worst drop (ratio<=0.6) " + fmt("%.2f", worst_v) + " dB, crab drop at ratio 1 " +
               fmt("%.2f", crab_drop) + " dB, 500 trials";
    return v;
}

// 6. Dictionary size saturation, known R.
Verdict dictionary_size() {
    ExperimentConfig c = preset_config("fig8_dictsize");
    c.seed = 808;
    c.trials = 10;
    c.dictionary_factors = {2, 4, 5};
    const auto t = run_experiment(c);
    const double d2 = row_value(t, "dictionary_factor=2", "dictionary_factor", 2, "mean_sinr_db");
    const double d4 = row_value(t, "dictionary_factor=4", "dictionary_factor", 4, "mean_sinr_db");
    const double d5 = row_value(t, "dictionary_factor=5", "dictionary_factor", 5, "mean_sinr_db");
    Verdict v;
    v.pass = d5 - d4 < 0.5 && d4 - d2 > 3.0;
    v.detail = "mean SINR 2N_v " + fmt("%.2f", d2) + ", 4N_v " + fmt("%.2f", d4) + ", 5N_v " + fmt("%.2f", d5) +
               " dB (5-4: " + fmt("%.2f", d5 - d4) + ", 4-2: " + fmt("%.2f", d4 - d2) + "), 10 trials";
    return v;
}

// 7. Identity and property checks on the building blocks.
Verdict properties() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const char* name) {
        if (!ok) failed.emplace_back(name);
    };
    std::mt19937_64 rng(77);

    double kron_err = 0.0;
    for (int n : {2, 3, 6})
        for (int m : {2, 4}) {
            const auto j = build_permutation_j(n, m);
            for (int rep = 0; rep < 20; ++rep) {
                const CVector a = oracle::random_cvec(n, rng), b = oracle::random_cvec(m, rng);
                const CVector lhs = oracle::kronv(oracle::kronv(b.conjugate(), a.conjugate()), oracle::kronv(b, a));
                const CVector rhs = oracle::kronv(oracle::kronv(b.conjugate(), b), oracle::kronv(a.conjugate(), a));
                kron_err = std::max(kron_err, (apply_permutation(j, lhs) - rhs).norm() / rhs.norm());
            }
        }
    check(kron_err < 1e-12, "kronecker-permutation");

    const VirtualMaps vm = build_virtual_maps(coprime_positions(2, 3), 18);
    const RVector prow = vm.p * RVector::Ones(vm.p.cols());
    const RVector trow = vm.t * RVector::Ones(vm.t.cols());
    check((prow.array() - 1.0).abs().maxCoeff() < 1e-14, "P row sums");
    check((trow.array() - 1.0).abs().maxCoeff() < 1e-14, "T row sums");
    int wsum = 0;
    for (int w : vm.spatial.weights) wsum += w;
    check(wsum == vm.n() * vm.n(), "coarray weight sum");

    const int nm = vm.n() * vm.m_pulses;
    const CVector noise_img = vm.f.cast<cd>() * oracle::vec(CMatrix::Identity(nm, nm));
    int nonzero = 0;
    for (Eigen::Index i = 0; i < noise_img.size(); ++i) nonzero += std::abs(noise_img[i]) > 1e-15;
    check(nonzero == 1 && std::abs(noise_img[vm.e0_index] - cd(1.0)) < 1e-14, "F noise image");

    const RdVirtualMaps rd = build_rd_maps(vm, 0.1667, 3);
    const CMatrix r = oracle::random_hermitian_psd(nm, rng);
    const CVector za = rd_virtual_snapshot(r, rd.d);
    const CVector zb = rd_virtual_snapshot_blocks(r, vm, rd.centers);
    check((za - zb).norm() <= 1e-12 * za.norm(), "z_r block form");

    CMatrix psi(30, 200);
    for (int c = 0; c < 200; ++c) psi.col(c) = oracle::random_cvec(30, rng).normalized();
    const CVector z3 = 4.0 * psi.col(11) + cd(0, 2.5) * psi.col(90) + 1.5 * psi.col(171);
    const auto est3 = omp_subspace(z3, psi, 3);
    auto idx = est3.indices;
    std::sort(idx.begin(), idx.end());
    check(idx == std::vector<Eigen::Index>{11, 90, 171}, "OMP 3-atom recovery");
    const auto est = omp_subspace(oracle::random_cvec(30, rng), psi, 15);
    check((est.basis.adjoint() * est.basis - CMatrix::Identity(15, 15)).norm() < 1e-12, "OMP orthonormality");
    bool mono = true;
    for (std::size_t i = 1; i < est.residual_norms.size(); ++i)
        mono = mono && est.residual_norms[i] <= est.residual_norms[i - 1] + 1e-12;
    check(mono, "OMP residual monotone");

    const CVector s = oracle::random_cvec(30, rng);
    const auto w1 = filter_weight(est.basis, s);
    const auto w2 = filter_weight(est.basis, w1.w);
    check((w2.w - w1.w).norm() < 1e-12 * w1.w.norm(), "projector idempotence");

    const CMatrix rr = oracle::random_hermitian_psd(30, rng) + CMatrix::Identity(30, 30);
    const double s1 = output_sinr_db(w1.w, s, 1.0, rr);
    const double s2 = output_sinr_db(cd(-3.0, 7.0) * w1.w, s, 1.0, rr);
    check(std::abs(s1 - s2) < 1e-10, "SINR scale invariance");

    RadarScenario sc;
    sc.m_pulses = 6;
    const VirtualMaps vm6 = build_virtual_maps(sc.geom, 6);
    const auto centers = doppler_bin_centers(0.1667, 3, 6);
    const CMatrix r6 = true_covariance(sc);
    const double t1 = error_trace_structured(r6, vm6, centers, 1);
    const double t40 = error_trace_structured(r6, vm6, centers, 40);
    check(std::abs(t1 / t40 - 40.0) < 1e-9 * 40.0, "1/L trace scaling");

    Verdict v;
    v.pass = failed.empty();
    if (failed.empty()) v.detail = "12 checks";
    else
        for (const auto& f : failed) v.detail += f + " failed; ";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) strict = true;
        else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--strict] [--only N]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<Criterion> all = {
        {1, "rank rule reductions", 1.0, rank_rule},
        {2, "variance theory vs Monte Carlo", 300.0, variance_theory},
        {3, "RD channel trade-off", 600.0, channel_tradeoff},
        {4, "low-sample convergence", 900.0, low_sample},
        {5, "robustness sweep", 900.0, robustness},
        {6, "dictionary-size saturation", 600.0, dictionary_size},
        {7, "property suite", 60.0, properties},
    };
    int failures = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("CRITERION %d %s: %s (%s; %.1f s of %.0f s budget%s)\n", c.id, pass ? "PASS" : "FAIL", c.title,
                    v.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return strict && failures ? 1 : 0;
}
