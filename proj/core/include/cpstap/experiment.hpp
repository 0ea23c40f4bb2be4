#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cpstap/clutter_rank.hpp"
#include "cpstap/config.hpp"
#include "cpstap/solver.hpp"

namespace cpstap {

struct ResultRow {
    std::string series;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string metric;
    double value = 0.0;
    int trials = 0;
};

struct ResultTable {
    std::string experiment;
    std::string config_hash;
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings;
};

// Runs fn(0..n-1) on `threads` workers. Results must be written to
// per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Shared state for SINR experiments on one array/pulse configuration.
class SinrWorkspace {
public:
    explicit SinrWorkspace(const RadarScenario& s);

    struct Point {
        std::shared_ptr<const RdVirtualMaps> rd;
        CMatrix r_rv;       // G R_v G^H
        CVector steering;   // G v_v at the target
    };

    const RadarScenario& scenario() const { return s_; }
    const VirtualMaps& maps() const { return *vm_; }
    const CMatrix& covariance() const { return r_; }
    const CMatrix& virtual_cov() const { return rv_; }
    const SnapshotSource& source() const { return src_; }

    std::shared_ptr<const Point> point(double target_doppler, int m_bins);
    double cpa_v_opt_db(double target_doppler) const;
    double element_opt_db(double target_doppler) const;

    struct Outcome {
        double sinr_db;
        int k;
        bool degenerate;
        bool exhausted;
    };
    // One run of the pipeline: rank estimate, dictionary, recovery, weight.
    Outcome proposed(double target_doppler, int m_bins, const PriorKnowledge& prior, const CMatrix& r_hat,
                     const PipelineOptions& opt);
    double pc_db(double target_doppler, const CMatrix& r_hat, int k) const;

private:
    RadarScenario s_;
    std::shared_ptr<const VirtualMaps> vm_;
    RdMapCache cache_;
    CMatrix r_;
    CMatrix rv_;
    Eigen::LLT<CMatrix> r_llt_;
    Eigen::LLT<CMatrix> rv_llt_;
    SnapshotSource src_;
    std::mutex mu_;
    std::map<std::pair<int, double>, std::shared_ptr<const Point>> points_;
};

// Measured prior for one trial, per cfg.measurement.
PriorKnowledge draw_prior(const ExperimentConfig& cfg, const PriorKnowledge& base, const RadarScenario& s,
                          std::mt19937_64& rng);

ResultTable run_experiment(const ExperimentConfig& cfg);

// Columns: experiment, config_hash, series, sweep_var, sweep_value, metric, value, trials.
void write_csv(std::ostream& os, const ResultTable& t);

}  // namespace cpstap
