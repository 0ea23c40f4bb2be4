#include "cpstap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "cpstap/analysis.hpp"
#include "cpstap/csv.hpp"
#include "cpstap/errors.hpp"
#include "cpstap/seed.hpp"

namespace cpstap {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, hw);
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lk(err_mu);
                    if (!err) err = std::current_exception();
                    next.store(n);
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

SinrWorkspace::SinrWorkspace(const RadarScenario& s)
    : s_(s),
      vm_(std::make_shared<const VirtualMaps>(build_virtual_maps(s.geom, s.m_pulses))),
      cache_(vm_),
      r_(true_covariance(s)),
      rv_(virtual_covariance(s, *vm_)),
      r_llt_(r_),
      rv_llt_(rv_),
      src_(s) {
    if (r_llt_.info() != Eigen::Success || rv_llt_.info() != Eigen::Success)
        throw NumericalError("clairvoyant covariance is not positive definite");
}

std::shared_ptr<const SinrWorkspace::Point> SinrWorkspace::point(double target_doppler, int m_bins) {
    const auto key = std::make_pair(m_bins, target_doppler);
    {
        std::lock_guard lk(mu_);
        auto it = points_.find(key);
        if (it != points_.end()) return it->second;
    }
    auto p = std::make_shared<Point>();
    p->rd = cache_.get(target_doppler, m_bins);
    p->r_rv = rd_metric_covariance(rv_, *p->rd);
    p->steering = rd_virtual_steering(target_doppler, s_.target.spatial, *vm_, *p->rd);
    std::lock_guard lk(mu_);
    return points_.emplace(key, std::move(p)).first->second;
}

double SinrWorkspace::cpa_v_opt_db(double target_doppler) const {
    const CVector vv = virtual_steering(target_doppler, s_.target.spatial, *vm_);
    return 10.0 * std::log10(std::norm(s_.target.alpha) * vv.dot(rv_llt_.solve(vv)).real());
}

double SinrWorkspace::element_opt_db(double target_doppler) const {
    const CVector v = space_time_steering(target_doppler, s_.target.spatial, s_);
    return 10.0 * std::log10(std::norm(s_.target.alpha) * v.dot(r_llt_.solve(v)).real());
}

SinrWorkspace::Outcome SinrWorkspace::proposed(double target_doppler, int m_bins, const PriorKnowledge& prior,
                                               const CMatrix& r_hat, const PipelineOptions& opt) {
    RadarScenario s = s_;
    s.target.doppler = target_doppler;
    const auto pt = point(target_doppler, m_bins);
    const int k = estimate_rank(s, prior).value;
    const Dictionary dict = build_dictionary(s, prior, *vm_, *pt->rd);
    const auto res = run_pipeline(r_hat, s, *vm_, *pt->rd, dict, k, opt);
    return {output_sinr_db(res.weight.w, pt->steering, s.target.alpha, pt->r_rv), res.k, res.weight.degenerate,
            res.subspace.exhausted};
}

double SinrWorkspace::pc_db(double target_doppler, const CMatrix& r_hat, int k) const {
    const CVector v = space_time_steering(target_doppler, s_.target.spatial, s_);
    return output_sinr_db(pc_weight(r_hat, v, k), v, s_.target.alpha, r_);
}

PriorKnowledge draw_prior(const ExperimentConfig& cfg, const PriorKnowledge& base, const RadarScenario& s,
                          std::mt19937_64& rng) {
    PriorKnowledge p = base;
    switch (cfg.measurement) {
        case Measurement::Exact:
            p.v_p_measured = s.v_p;
            p.psi_measured = s.psi;
            break;
        case Measurement::Uniform: {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            p.v_p_measured = s.v_p + base.dv_pm * u(rng);
            p.psi_measured = s.psi + base.dpsi_m * u(rng);
            break;
        }
        case Measurement::Fixed: break;
    }
    return p;
}

namespace {

double mean_db(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string fmt_label(const char* key, double v) {
    std::ostringstream o;
    o << key << '=' << format_double(v);
    return o.str();
}

struct TrialOut {
    double proposed = 0.0;
    double pc = 0.0;
    int k = 0;
    bool degenerate = false;
    bool exhausted = false;
};

struct TrialRequest {
    double doppler;
    int m_bins;
    PriorKnowledge prior;  // bounds as known to the true measurement process
    bool known;
    int n_samples;
    bool want_pc;
    // Spread of the bounds handed to the algorithm, as a fraction of the bound.
    double velocity_spread = 0.0;
    double crab_spread = 0.0;
};

TrialOut run_trial(SinrWorkspace& ws, const ExperimentConfig& cfg, const TrialRequest& req, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PriorKnowledge prior = draw_prior(cfg, req.prior, ws.scenario(), rng);
    if (req.velocity_spread > 0.0) {
        std::normal_distribution<double> g(req.prior.dv_pm, req.velocity_spread * req.prior.dv_pm);
        prior.dv_pm = std::abs(g(rng));
    }
    if (req.crab_spread > 0.0) {
        std::normal_distribution<double> g(req.prior.dpsi_m, req.crab_spread * req.prior.dpsi_m);
        prior.dpsi_m = std::abs(g(rng));
    }
    PipelineOptions opt;
    opt.m_bins = req.m_bins;
    opt.subtract_noise = cfg.subtract_noise;

    TrialOut out;
    CMatrix r_hat;
    if (req.known) {
        r_hat = ws.covariance();
    } else {
        r_hat = sample_covariance(ws.source().draw(req.n_samples, splitmix64(seed ^ 0x51ed27f1a5c3b9d7ULL)));
    }
    const auto o = ws.proposed(req.doppler, req.m_bins, prior, r_hat, opt);
    out.proposed = o.sinr_db;
    out.k = o.k;
    out.degenerate = o.degenerate;
    out.exhausted = o.exhausted;
    if (req.want_pc) {
        RadarScenario s = ws.scenario();
        s.target.doppler = req.doppler;
        out.pc = ws.pc_db(req.doppler, r_hat, estimate_rank(s, prior).value);
    }
    return out;
}

// Deterministic when the covariance is known and nothing is drawn per trial.
int effective_trials(const ExperimentConfig& cfg, bool known, bool random_bounds) {
    if (cfg.trials <= 0) return 0;
    if (known && cfg.measurement != Measurement::Uniform && !random_bounds) return 1;
    return cfg.trials;
}

struct PointJob {
    TrialRequest req;
    std::string series;
    std::string sweep_var;
    double sweep_value;
};

// Evaluates every job over its trials in parallel and appends mean rows.
void run_point_jobs(SinrWorkspace& ws, const ExperimentConfig& cfg, const std::vector<PointJob>& jobs,
                    ResultTable& table) {
    std::vector<int> n_trials(jobs.size());
    std::vector<std::size_t> offset(jobs.size() + 1, 0);
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const bool random_bounds = jobs[j].req.velocity_spread > 0.0 || jobs[j].req.crab_spread > 0.0;
        n_trials[j] = effective_trials(cfg, jobs[j].req.known, random_bounds);
        offset[j + 1] = offset[j] + static_cast<std::size_t>(n_trials[j]);
    }
    // Warm the per-point caches serially so workers only read.
    for (const auto& job : jobs) ws.point(job.req.doppler, job.req.m_bins);

    std::vector<TrialOut> results(offset.back());
    parallel_for(results.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t j = static_cast<std::size_t>(
            std::upper_bound(offset.begin(), offset.end(), idx) - offset.begin() - 1);
        const std::size_t t = idx - offset[j];
        results[idx] = run_trial(ws, cfg, jobs[j].req, trial_seed(*cfg.seed, t, j));
    });

    std::size_t degenerate = 0, exhausted = 0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (n_trials[j] == 0) continue;
        std::vector<double> prop, pc;
        double k_sum = 0.0;
        for (std::size_t i = offset[j]; i < offset[j + 1]; ++i) {
            prop.push_back(results[i].proposed);
            pc.push_back(results[i].pc);
            k_sum += results[i].k;
            degenerate += results[i].degenerate;
            exhausted += results[i].exhausted;
        }
        const auto& job = jobs[j];
        const int n = n_trials[j];
        table.rows.push_back({job.series, job.sweep_var, job.sweep_value, "sinr_db", mean_db(prop), n});
        table.rows.push_back({job.series, job.sweep_var, job.sweep_value, "mean_rank", k_sum / n, n});
        if (job.req.want_pc)
            table.rows.push_back({"pc", job.sweep_var, job.sweep_value, "sinr_db", mean_db(pc), n});
    }
    if (degenerate)
        table.warnings.push_back(std::to_string(degenerate) + " trial(s) produced a degenerate filter");
    if (exhausted)
        table.warnings.push_back(std::to_string(exhausted) + " trial(s) ran out of dictionary atoms before K");
}

void add_reference_rows(SinrWorkspace& ws, const std::string& sweep_var, const std::vector<double>& sweep_values,
                        const std::vector<double>& dopplers, ResultTable& table) {
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        table.rows.push_back({"cpa_v_opt", sweep_var, sweep_values[i], "sinr_db", ws.cpa_v_opt_db(dopplers[i]), 1});
        table.rows.push_back({"element_opt", sweep_var, sweep_values[i], "sinr_db", ws.element_opt_db(dopplers[i]), 1});
    }
}

std::string array_label(const ArraySpec& a) {
    if (a.coprime) return "CPA(" + std::to_string(a.n1) + "," + std::to_string(a.n2) + ")";
    return "ULA(" + std::to_string(a.n) + ")";
}

int numerical_clutter_rank(const RadarScenario& s, double eps = 0.1) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(true_covariance(s), Eigen::EigenvaluesOnly);
    int r = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        r += es.eigenvalues()[i] > s.sigma_n2 * (1.0 + eps);
    return r;
}

void run_rank_validation(const ExperimentConfig& cfg, ResultTable& table) {
    const auto arrays = cfg.rank_arrays.empty() ? std::vector<ArraySpec>{cfg.array} : cfg.rank_arrays;
    const auto crabs = cfg.crab_grid.empty() ? std::vector<double>{cfg.scenario.psi} : cfg.crab_grid;
    const auto cases = cfg.error_cases.empty()
                           ? std::vector<std::pair<double, double>>{{cfg.prior.dv_pm, cfg.prior.dpsi_m}}
                           : cfg.error_cases;
    struct Case {
        ArraySpec array;
        double beta, psi, dv, dpsi;
    };
    std::vector<Case> all;
    for (const auto& a : arrays)
        for (double b : cfg.beta_grid)
            for (double psi : crabs)
                for (const auto& [dv, dpsi] : cases) all.push_back({a, b, psi, dv, dpsi});

    struct Out {
        RankEstimate est;
        int numerical;
    };
    std::vector<Out> out(all.size());
    parallel_for(all.size(), cfg.threads, [&](std::size_t i) {
        const auto& c = all[i];
        RadarScenario s = cfg.scenario;
        s.geom = c.array.build();
        s.set_beta(c.beta);
        s.psi = c.psi;
        PriorKnowledge p = cfg.resolved_prior(s);
        p.dv_pm = c.dv;
        p.dpsi_m = c.dpsi;
        p.v_p_measured = s.v_p + cfg.rank_offset_fraction * c.dv;
        p.psi_measured = s.psi + cfg.rank_offset_fraction * c.dpsi;
        out[i] = {estimate_rank(s, p), numerical_clutter_rank(s)};
    });
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& c = all[i];
        std::ostringstream label;
        label << array_label(c.array) << " psi_deg=" << format_double(c.psi * 180.0 / kPi)
              << " dv=" << format_double(c.dv) << " dpsi_deg=" << format_double(c.dpsi * 180.0 / kPi);
        const auto& e = out[i].est;
        table.rows.push_back({label.str(), "beta", c.beta, "rank_estimate", double(e.value), 1});
        table.rows.push_back({label.str(), "beta", c.beta, "rank_raw", e.raw, 1});
        table.rows.push_back({label.str(), "beta", c.beta, "numerical_rank", double(out[i].numerical), 1});
        if (cfg.per_angle)
            for (const auto& a : e.per_angle) {
                const std::string l = label.str() + " beta=" + format_double(c.beta);
                table.rows.push_back({l, "theta_rad", a.theta, "b_s", a.b_s, 1});
                table.rows.push_back({l, "theta_rad", a.theta, "chosen_beta", a.beta, 1});
                table.rows.push_back({l, "theta_rad", a.theta, "effective_aperture", a.effective, 1});
                table.rows.push_back({l, "theta_rad", a.theta, "span", a.span, 1});
            }
    }
}

void run_variance(const ExperimentConfig& cfg, ResultTable& table) {
    const RadarScenario base = cfg.resolved_scenario();
    std::vector<std::vector<VarianceRow>> out(cfg.cnr_grid.size());
    parallel_for(cfg.cnr_grid.size(), cfg.threads, [&](std::size_t i) {
        RadarScenario s = base;
        s.cnr_db = cfg.cnr_grid[i];
        out[i] = variance_experiment(s, cfg.m_bins, cfg.sample_grid, cfg.trials, trial_seed(*cfg.seed, 0, i));
    });
    for (const auto& rows : out)
        for (const auto& r : rows) {
            const auto series = fmt_label("cnr_db", r.cnr_db);
            table.rows.push_back({series, "samples", double(r.n_samples), "empirical", r.empirical, cfg.trials});
            table.rows.push_back({series, "samples", double(r.n_samples), "theoretical", r.theoretical, cfg.trials});
            table.rows.push_back(
                {series, "samples", double(r.n_samples), "ratio", r.empirical / r.theoretical, cfg.trials});
        }
}

void append_means(ResultTable& table, const std::string& summary_var,
                  const std::vector<std::pair<std::string, double>>& series_keys) {
    for (const auto& [series, key] : series_keys) {
        double sum = 0.0;
        int n = 0, trials = 0;
        for (const auto& r : table.rows)
            if (r.series == series && r.metric == "sinr_db" && r.sweep_var == "doppler") {
                sum += r.value;
                ++n;
                trials = r.trials;
            }
        if (n) table.rows.push_back({series, summary_var, key, "mean_sinr_db", sum / n, trials});
    }
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultTable table;
    table.experiment = cfg.name;
    table.config_hash = config_hash(cfg);
    if (cfg.trials == 0) {
        table.warnings.push_back("trials = 0: nothing to run, empty table");
        return table;
    }

    if (cfg.kind == ExperimentKind::RankValidation) {
        run_rank_validation(cfg, table);
        return table;
    }
    if (cfg.kind == ExperimentKind::VarianceCurve) {
        run_variance(cfg, table);
        return table;
    }

    const RadarScenario s = cfg.resolved_scenario();
    const PriorKnowledge prior = cfg.resolved_prior(s);
    {
        // Surface dictionary-size warnings once, for the configured grid.
        const auto vm = build_virtual_maps(s.geom, s.m_pulses);
        const int nv = vm.n_v();
        if (prior.n_angles < 4 * nv && cfg.kind != ExperimentKind::DictionarySizeSweep)
            table.warnings.push_back("azimuth grid below 4*N_v; expect an SINR penalty");
    }
    SinrWorkspace ws(s);
    const double wt = s.target.doppler;
    std::vector<PointJob> jobs;

    switch (cfg.kind) {
        case ExperimentKind::SinrVsDoppler: {
            const std::string series = cfg.known_covariance ? "proposed_opt" : "proposed";
            for (double d : cfg.doppler_grid)
                jobs.push_back({{d, cfg.m_bins, prior, cfg.known_covariance, cfg.n_samples, !cfg.known_covariance},
                                series, "doppler", d});
            run_point_jobs(ws, cfg, jobs, table);
            add_reference_rows(ws, "doppler", cfg.doppler_grid, cfg.doppler_grid, table);
            break;
        }
        case ExperimentKind::SinrVsSamples: {
            std::vector<double> ls, ds;
            for (int l : cfg.sample_grid) {
                jobs.push_back({{wt, cfg.m_bins, prior, false, l, true}, "proposed", "samples", double(l)});
                ls.push_back(l);
                ds.push_back(wt);
            }
            run_point_jobs(ws, cfg, jobs, table);
            add_reference_rows(ws, "samples", ls, ds, table);
            break;
        }
        case ExperimentKind::RobustnessSweep: {
            const bool vel = cfg.robust_parameter != RobustParameter::Crab;
            const bool crab = cfg.robust_parameter != RobustParameter::Velocity;
            for (double r : cfg.ratio_grid) {
                if (vel) {
                    TrialRequest q{wt, cfg.m_bins, prior, cfg.known_covariance, cfg.n_samples, false};
                    q.velocity_spread = r;
                    jobs.push_back({q, "velocity", "ratio", r});
                }
                if (crab) {
                    TrialRequest q{wt, cfg.m_bins, prior, cfg.known_covariance, cfg.n_samples, false};
                    q.crab_spread = r;
                    jobs.push_back({q, "crab", "ratio", r});
                }
            }
            run_point_jobs(ws, cfg, jobs, table);
            break;
        }
        case ExperimentKind::DictionarySizeSweep: {
            const int nv = ws.maps().n_v();
            std::vector<std::pair<std::string, double>> keys;
            for (double f : cfg.dictionary_factors) {
                PriorKnowledge p = prior;
                p.n_angles = std::max(1, static_cast<int>(std::lround(f * nv)));
                const auto series = fmt_label("dictionary_factor", f);
                keys.emplace_back(series, f);
                for (double d : cfg.doppler_grid)
                    jobs.push_back({{d, cfg.m_bins, p, cfg.known_covariance, cfg.n_samples, false}, series, "doppler", d});
            }
            run_point_jobs(ws, cfg, jobs, table);
            add_reference_rows(ws, "doppler", cfg.doppler_grid, cfg.doppler_grid, table);
            append_means(table, "dictionary_factor", keys);
            break;
        }
        case ExperimentKind::ChannelsSweep: {
            std::vector<std::pair<std::string, double>> keys;
            for (int m : cfg.channel_grid) {
                const auto series = "m=" + std::to_string(m);
                keys.emplace_back(series, m);
                for (double d : cfg.doppler_grid)
                    jobs.push_back({{d, m, prior, cfg.known_covariance, cfg.n_samples, false}, series, "doppler", d});
            }
            run_point_jobs(ws, cfg, jobs, table);
            add_reference_rows(ws, "doppler", cfg.doppler_grid, cfg.doppler_grid, table);
            append_means(table, "channels", keys);
            break;
        }
        default: break;
    }
    return table;
}

void write_csv(std::ostream& os, const ResultTable& t) {
    CsvWriter w(os);
    w.row({"experiment", "config_hash", "series", "sweep_var", "sweep_value", "metric", "value", "trials"});
    for (const auto& r : t.rows)
        w.row({t.experiment, t.config_hash, r.series, r.sweep_var, format_double(r.sweep_value), r.metric,
               format_double(r.value), std::to_string(r.trials)});
}

}  // namespace cpstap
