#include "ksv/siegel.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ksv;

namespace {

const double kPi = std::numbers::pi;

Eigen::MatrixXcd iI(Eigen::Index r) { return cplx(0, 1) * Eigen::MatrixXcd::Identity(r, r); }

SymplecticMatrix random_symplectic(Rng& rng, Eigen::Index r) {
    Eigen::MatrixXd S(r, r), A(r, r);
    for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index b = a; b < r; ++b) S(a, b) = S(b, a) = rng.uniform(-1, 1);
    do {
        for (Eigen::Index a = 0; a < r; ++a)
            for (Eigen::Index b = 0; b < r; ++b) A(a, b) = rng.uniform(-1, 1) + (a == b ? 1.5 : 0.0);
    } while (std::abs(A.determinant()) < 0.1);
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r), Z = Eigen::MatrixXd::Zero(r, r);
    Eigen::MatrixXd N(2 * r, 2 * r), D(2 * r, 2 * r);
    N << I, S, Z, I;
    D << A, Z, Z, A.transpose().inverse();
    Eigen::MatrixXd M = N * D;
    if (rng.unit() < 0.5) M = M * standard_symplectic(r);
    return SymplecticMatrix(M);
}

}  // namespace

TEST(SiegelPoint, Validation) {
    Eigen::MatrixXcd bad(2, 2);
    bad << cplx(0, 1), 1, 0, cplx(0, 1);
    EXPECT_THROW(SiegelPoint::single(bad), precondition_error);
    EXPECT_THROW(SiegelPoint::single(-iI(2)), precondition_error);
    EXPECT_NO_THROW(SiegelPoint::single(iI(3)));
    Eigen::MatrixXd notsp = Eigen::MatrixXd::Identity(2, 2) * 2;
    EXPECT_THROW(SymplecticMatrix{notsp}, precondition_error);
}

TEST(SiegelAction, IdentityAndInversionFixedPoint) {
    for (Eigen::Index r = 1; r <= 3; ++r) {
        auto Z = SiegelPoint::single(iI(r));
        auto id = SymplecticMatrix(Eigen::MatrixXd::Identity(2 * r, 2 * r));
        EXPECT_LT((act(id, Z, 0).Z(0) - Z.Z(0)).norm(), 1e-15);
        auto J = SymplecticMatrix(standard_symplectic(r));
        EXPECT_LT((act(J, Z, 0).Z(0) - iI(r)).norm(), 1e-14);
    }
}

TEST(SiegelActionProperty, GroupActionOnSamples) {
    Rng rng(5, "test.action");
    for (int t = 0; t < 50; ++t) {
        Eigen::Index r = 1 + t % 3;
        auto Z = sample_siegel_point(rng, r, 1, 0.5);
        auto g1 = random_symplectic(rng, r), g2 = random_symplectic(rng, r);
        auto lhs = act(g1 * g2, Z, 0).Z(0);
        auto rhs = act(g1, act(g2, Z, 0), 0).Z(0);
        EXPECT_LT((lhs - rhs).norm() / std::max(1.0, lhs.norm()), 1e-10);
    }
}

TEST(RiemannFormSiegel, Examples) {
    EXPECT_EQ(riemann_form_siegel({1, 0}, {0, 1}), -1);
    EXPECT_EQ(riemann_form_siegel({3, -2, 5, 7}, {3, -2, 5, 7}), 0);
    for (Eigen::Index r = 1; r <= 3; ++r) {
        auto G = siegel_gram(r);
        EXPECT_EQ(determinant(G), 1);
        EXPECT_EQ(G.transpose(), Integer(-1) * G);
    }
}

TEST(RiemannAxioms, StandardPointGivesStandardHermitianForm) {
    Rng rng(1, "test.axioms.std");
    auto Z = SiegelPoint::single(iI(2));
    auto rep = riemann_axioms(Z, rng, 20);
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.orientation, -1);
    auto T = siegel_torus(Z, 0);
    for (int t = 0; t < 10; ++t) {
        Eigen::RowVectorXcd x(2), y(2);
        for (int k = 0; k < 2; ++k)
            x(k) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), y(k) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        cplx expect = (x.array() * y.conjugate().array()).sum();
        EXPECT_LT(std::abs(T.H(realify(x), realify(y), rep.orientation) - expect), 1e-14);
    }
}

TEST(RiemannAxiomsProperty, RandomPointsPositive) {
    Rng rng(2, "test.axioms.random");
    for (int t = 0; t < 30; ++t) {
        auto Z = sample_siegel_point(rng, 1 + t % 3, 1 + t % 2);
        auto rep = riemann_axioms(Z, rng, 100);
        EXPECT_TRUE(rep.ok()) << rep.witness;
        EXPECT_LT(rep.compatibility_defect, 1e-10);
        EXPECT_GT(rep.min_margin, 0);
    }
}

TEST(Metrics, FaltingsExamples) {
    EXPECT_NEAR(faltings_norm_sq(SiegelPoint::single(iI(1))), 1 / kPi, 1e-15);
    EXPECT_NEAR(faltings_norm_sq(SiegelPoint::single(iI(2))), 1 / (kPi * kPi), 1e-15);
    EXPECT_NEAR(covolume(RealLattice(period_lattice_basis(SiegelPoint::single(iI(3)), 0))), 1.0, 1e-15);
}

TEST(Metrics, PeterssonExamplesAndHomogeneity) {
    EXPECT_NEAR(petersson_norm_siegel(SiegelPoint::single(iI(1))), 2.0, 1e-15);
    EXPECT_NEAR(petersson_norm_siegel(SiegelPoint::single(iI(2))), 8.0, 1e-14);
    Rng rng(3, "test.petersson");
    for (int t = 0; t < 20; ++t) {
        Eigen::Index r = 1 + t % 3;
        std::size_t g = 1 + t % 2;
        auto Z = sample_siegel_point(rng, r, g);
        double s = rng.uniform(0.5, 3);
        std::vector<Eigen::MatrixXcd> scaled;
        for (std::size_t i = 0; i < g; ++i) {
            Eigen::MatrixXcd z = Z.Z(i);
            z.imag() *= s;
            scaled.push_back(z);
        }
        double ratio = petersson_norm_siegel(SiegelPoint(scaled)) / petersson_norm_siegel(Z);
        EXPECT_NEAR(ratio / std::pow(s, g * r * (r + 1) / 2.0), 1.0, 1e-12);
    }
}

TEST(MetricsProperty, CovolumeCrossCheckOnSamples) {
    Rng rng(4, "test.covolume");
    for (int t = 0; t < 100; ++t) {
        auto Z = sample_siegel_point(rng, 1 + t % 3, 1 + (t / 3) % 2);
        auto f = faltings_norm_sq_detail(Z);
        EXPECT_LT(f.relative_defect, 1e-10);
        for (std::size_t i = 0; i < Z.places(); ++i) EXPECT_NEAR(f.covolumes[i] / f.det_y[i], 1.0, 1e-10);
    }
}

TEST(SiegelMain, StandardPoints) {
    for (Eigen::Index r = 1; r <= 3; ++r) {
        auto res = verify_siegel_main(SiegelPoint::single(iI(r)));
        EXPECT_LT(res.residual, 1e-12);
        EXPECT_NEAR(res.lhs, std::pow(kPi, -r * (r + 1) / 2.0), 1e-14);
    }
    auto two_places = SiegelPoint({iI(1), 2.0 * iI(1)});
    EXPECT_LT(verify_siegel_main(two_places).residual, 1e-10);
}

TEST(SiegelMainProperty, RandomR2) {
    Rng rng(6, "test.main");
    for (int t = 0; t < 100; ++t) EXPECT_LT(verify_siegel_main(sample_siegel_point(rng, 2, 1)).residual, 1e-10);
}
