#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cpstap/clutter_rank.hpp"
#include "cpstap/errors.hpp"
#include "cpstap/solver.hpp"
#include "oracles.hpp"

using namespace cpstap;

namespace {

CMatrix random_unit_dictionary(int rows, int cols, std::mt19937_64& rng) {
    CMatrix psi(rows, cols);
    for (int c = 0; c < cols; ++c) psi.col(c) = oracle::random_cvec(rows, rng).normalized();
    return psi;
}

}  // namespace

TEST(Omp, ZeroIterationsGiveEmptyBasis) {
    std::mt19937_64 rng(1);
    const CMatrix psi = random_unit_dictionary(8, 20, rng);
    const auto est = omp_subspace(oracle::random_cvec(8, rng), psi, 0);
    EXPECT_EQ(est.basis.cols(), 0);
    EXPECT_EQ(est.basis.rows(), 8);
    // K = 0 is allowed even for a silent snapshot.
    EXPECT_EQ(omp_subspace(CVector::Zero(8), psi, 0).basis.cols(), 0);
}

TEST(Omp, InputErrors) {
    std::mt19937_64 rng(2);
    const CMatrix psi = random_unit_dictionary(8, 20, rng);
    EXPECT_THROW(omp_subspace(CVector::Zero(8), psi, 2), EmptyInputError);
    EXPECT_THROW(omp_subspace(oracle::random_cvec(8, rng), psi, 9), ConfigError);
    EXPECT_THROW(omp_subspace(oracle::random_cvec(7, rng), psi, 2), ShapeError);
    EXPECT_THROW(omp_subspace(oracle::random_cvec(8, rng), psi, -1), ConfigError);
}

TEST(Omp, SingleAtomFoundExactly) {
    std::mt19937_64 rng(3);
    const CMatrix psi = random_unit_dictionary(16, 50, rng);
    const CVector z = cd(2.0, -1.0) * psi.col(17);
    const auto est = omp_subspace(z, psi, 1);
    ASSERT_EQ(est.indices.size(), 1u);
    EXPECT_EQ(est.indices[0], 17);
    EXPECT_NEAR(est.residual_norms[0], 0.0, 1e-12);
}

TEST(Omp, RecoversSparseSupport) {
    std::mt19937_64 rng(4);
    const CMatrix psi = random_unit_dictionary(30, 200, rng);
    const CVector z = 5.0 * psi.col(3) + cd(0, 3.0) * psi.col(77) + 1.5 * psi.col(150);
    const auto est = omp_subspace(z, psi, 3);
    std::vector<Eigen::Index> got = est.indices;
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<Eigen::Index>{3, 77, 150}));
    CMatrix truth(30, 3);
    truth << psi.col(3), psi.col(77), psi.col(150);
    EXPECT_LT(oracle::max_principal_angle(est.basis, truth), 1e-6);
}

TEST(Omp, OrthonormalBasisAndShrinkingResidual) {
    std::mt19937_64 rng(5);
    const CMatrix psi = random_unit_dictionary(24, 120, rng);
    const auto est = omp_subspace(oracle::random_cvec(24, rng), psi, 12);
    ASSERT_EQ(est.basis.cols(), 12);
    EXPECT_LT((est.basis.adjoint() * est.basis - CMatrix::Identity(12, 12)).norm(), 1e-12);
    for (std::size_t i = 1; i < est.residual_norms.size(); ++i)
        EXPECT_LE(est.residual_norms[i], est.residual_norms[i - 1] + 1e-12);
    std::vector<Eigen::Index> idx = est.indices;
    std::sort(idx.begin(), idx.end());
    EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
}

TEST(Omp, DuplicateAtomsSkippedAndExhaustion) {
    std::mt19937_64 rng(6);
    CMatrix psi(6, 4);
    const CVector a = oracle::random_cvec(6, rng).normalized();
    const CVector b = oracle::random_cvec(6, rng).normalized();
    psi << a, a, b, b;
    const auto est = omp_subspace(3.0 * a + b, psi, 3);
    EXPECT_EQ(est.basis.cols(), 2);
    EXPECT_TRUE(est.exhausted);
    EXPECT_EQ(est.skipped.size(), 2u);
}

TEST(Filter, ProjectionCases) {
    std::mt19937_64 rng(7);
    const CVector s = oracle::random_cvec(10, rng);
    const auto empty = filter_weight(CMatrix(10, 0), s);
    EXPECT_EQ((empty.w - s).norm(), 0.0);
    EXPECT_FALSE(empty.degenerate);

    const CMatrix q = CMatrix(oracle::random_cvec(10, rng).normalized());
    const auto fw = filter_weight(q, s);
    EXPECT_NEAR(std::abs(q.col(0).dot(fw.w)), 0.0, 1e-12);
    const auto twice = filter_weight(q, fw.w);
    EXPECT_LT((twice.w - fw.w).norm(), 1e-12);

    const auto self = filter_weight(CMatrix(s.normalized()), s);
    EXPECT_TRUE(self.degenerate);
    EXPECT_THROW(filter_weight(q, CVector::Ones(9)), ShapeError);
}

TEST(Sinr, ScaleInvarianceAndClosedForms) {
    std::mt19937_64 rng(8);
    const CMatrix r = oracle::random_hermitian_psd(12, rng) + CMatrix::Identity(12, 12);
    const CVector v = oracle::random_cvec(12, rng);
    const CVector w = oracle::random_cvec(12, rng);
    const double base = output_sinr_db(w, v, 1.0, r);
    EXPECT_NEAR(output_sinr_db(cd(3.0, -2.0) * w, v, 1.0, r), base, 1e-10);
    EXPECT_NEAR(output_sinr_db(w, v, cd(0.0, 2.0), r), base + 10 * std::log10(4.0), 1e-10);

    // White noise with matched weight: |v|^2 / sigma^2.
    const CMatrix white = 2.0 * CMatrix::Identity(12, 12);
    EXPECT_NEAR(output_sinr_db(v, v, 1.0, white), 10 * std::log10(v.squaredNorm() / 2.0), 1e-10);
    // Optimum weight reaches v^H R^{-1} v.
    const CVector wopt = r.llt().solve(v);
    EXPECT_NEAR(output_sinr_db(wopt, v, 1.0, r), 10 * std::log10(v.dot(wopt).real()), 1e-9);

    EXPECT_TRUE(std::isinf(output_sinr_db(CVector::Zero(12), v, 1.0, r)));
    EXPECT_THROW(output_sinr_db(w, CVector::Ones(11), 1.0, r), ShapeError);
}

TEST(RegularizedSolve, LoadsSingularSystems) {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    const auto res = regularized_solve(a, CVector::Ones(3));
    EXPECT_TRUE(res.loaded);
    EXPECT_TRUE(res.x.allFinite());
    const auto ok = regularized_solve(CMatrix::Identity(3, 3), CVector::Ones(3));
    EXPECT_FALSE(ok.loaded);
}

class PipelineFixture : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        vm_ = new VirtualMaps(build_virtual_maps(s_.geom, s_.m_pulses));
        rd_ = new RdVirtualMaps(build_rd_maps(*vm_, s_.target.doppler, 3));
        PriorKnowledge p;
        p.v_p_measured = s_.v_p;
        p.psi_measured = s_.psi;
        prior_ = p;
        dict_ = new Dictionary(build_dictionary(s_, prior_, *vm_, *rd_));
    }
    static void TearDownTestSuite() {
        delete dict_;
        delete rd_;
        delete vm_;
    }
    static inline RadarScenario s_{};
    static inline PriorKnowledge prior_{};
    static VirtualMaps* vm_;
    static RdVirtualMaps* rd_;
    static Dictionary* dict_;
};
VirtualMaps* PipelineFixture::vm_ = nullptr;
RdVirtualMaps* PipelineFixture::rd_ = nullptr;
Dictionary* PipelineFixture::dict_ = nullptr;

TEST_F(PipelineFixture, ClairvoyantOrdering) {
    const int k = estimate_rank(s_, prior_).value;
    const auto res = clairvoyant_filters(s_, *vm_, *rd_, *dict_, k);
    EXPECT_LE(res.proposed_opt_db, res.cpa_v_opt_db + 1e-9);
    EXPECT_TRUE(std::isfinite(res.proposed_opt_db));

    // The element-space optimum beats any other weight in element space.
    std::mt19937_64 rng(9);
    const CMatrix r = true_covariance(s_);
    const CVector v = space_time_steering(s_.target.doppler, 0.0, s_);
    for (int i = 0; i < 100; ++i)
        EXPECT_LE(output_sinr_db(oracle::random_cvec(s_.dim(), rng), v, 1.0, r),
                  res.element_opt_db + 1e-9);
}

TEST_F(PipelineFixture, RankIsClamped) {
    EXPECT_EQ(clamp_rank(1000, *rd_, *dict_), 50);
    EXPECT_EQ(clamp_rank(-4, *rd_, *dict_), 0);
    EXPECT_EQ(clamp_rank(20, *rd_, *dict_), 20);
}

TEST_F(PipelineFixture, NoiseOnlyInputStillFilters) {
    const CMatrix r = CMatrix::Identity(s_.dim(), s_.dim());
    const auto res = run_pipeline(r, s_, *vm_, *rd_, *dict_, 5);
    EXPECT_EQ(res.subspace.basis.cols(), 5);
    EXPECT_TRUE(res.weight.w.allFinite());
}

TEST(PcCanceller, RemovesDominantDirections) {
    std::mt19937_64 rng(10);
    const CVector c1 = oracle::random_cvec(8, rng).normalized();
    const CMatrix r = 100.0 * c1 * c1.adjoint();
    const CVector s = oracle::random_cvec(8, rng);
    const CVector w = pc_weight(r, s, 3);  // rank 1 caps the projection
    EXPECT_NEAR(std::abs(c1.dot(w)), 0.0, 1e-10);
    EXPECT_LT((w - (s - c1 * c1.dot(s))).norm(), 1e-10);
    EXPECT_LT((pc_weight(r, s, 0) - s).norm(), 1e-15);
}
