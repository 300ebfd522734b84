#include "ksv/zlattice.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace ksv;

namespace {

// Determinantal divisors: d_k = gcd of all k x k minors; elementary divisors are d_k / d_{k-1}.
std::vector<Integer> elementary_divisor_oracle(const IntegerMatrix& m) {
    const std::size_t n = std::min(m.rows(), m.cols());
    std::vector<Integer> dk{1};
    for (std::size_t k = 1; k <= n; ++k) {
        Integer g = 0;
        std::vector<std::size_t> rows, cols;
        std::function<void(std::size_t, std::vector<std::size_t>&, std::size_t, std::function<void()>)> choose =
            [&](std::size_t start, std::vector<std::size_t>& acc, std::size_t limit, std::function<void()> leaf) {
                if (acc.size() == k) return leaf();
                for (std::size_t i = start; i < limit; ++i) {
                    acc.push_back(i);
                    choose(i + 1, acc, limit, leaf);
                    acc.pop_back();
                }
            };
        choose(0, rows, m.rows(), [&] {
            choose(0, cols, m.cols(), [&] {
                IntegerMatrix sub(k, k);
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) sub(a, b) = m(rows[a], cols[b]);
                g = boost::multiprecision::gcd(g, determinant(sub));
            });
        });
        if (g == 0) break;
        dk.push_back(g < 0 ? Integer(-g) : g);
    }
    std::vector<Integer> out;
    for (std::size_t k = 1; k < dk.size(); ++k) out.push_back(dk[k] / dk[k - 1]);
    return out;
}

IntegerMatrix diag(std::initializer_list<long> d) {
    IntegerMatrix m(d.size(), d.size());
    std::size_t i = 0;
    for (long x : d) m(i, i) = x, ++i;
    return m;
}

RationalMatrix rat(std::initializer_list<std::initializer_list<Rational>> rows) { return RationalMatrix(rows); }

void expect_hnf_shape(const HermiteForm& hf, const IntegerMatrix& M) {
    EXPECT_EQ(hf.U * M, hf.H);
    Integer du = determinant(hf.U);
    EXPECT_TRUE(du == 1 || du == -1);
    for (std::size_t k = 0; k < hf.rank; ++k) {
        std::size_t c = hf.pivot_cols[k];
        EXPECT_GT(hf.H(k, c), 0);
        for (std::size_t j = c + 1; j < M.cols(); ++j) EXPECT_EQ(hf.H(k, j), 0);
        for (std::size_t later = k + 1; later < hf.rank; ++later) {
            EXPECT_GE(hf.H(later, c), 0);
            EXPECT_LT(hf.H(later, c), hf.H(k, c));
        }
    }
    for (std::size_t r = hf.rank; r < M.rows(); ++r)
        for (std::size_t j = 0; j < M.cols(); ++j) EXPECT_EQ(hf.H(r, j), 0);
}

}  // namespace

TEST(NormalForms, SmithOfDivisorChainIsItself) {
    auto snf = smith_form(diag({2, 6}));
    EXPECT_EQ(snf.divisors(), (std::vector<Integer>{2, 6}));
}

TEST(NormalForms, SmithOfCoprimeDiagonal) {
    auto snf = smith_form(diag({2, 3}));
    EXPECT_EQ(snf.divisors(), (std::vector<Integer>{1, 6}));
    EXPECT_EQ(snf.divisors(), elementary_divisor_oracle(diag({2, 3})));
}

TEST(NormalForms, HermiteOfUnimodularIsIdentity) {
    testkit::Gen gen(11);
    for (int t = 0; t < 20; ++t) {
        auto u = gen.unimodular(4);
        auto hf = hermite_form(u);
        EXPECT_EQ(hf.H, IntegerMatrix::identity(4));
        expect_hnf_shape(hf, u);
    }
}

TEST(NormalForms, SmithMatchesDeterminantalDivisorOracle) {
    testkit::Gen gen(12);
    for (int t = 0; t < 40; ++t) {
        std::size_t r = gen.integer(1, 4), c = gen.integer(1, 4);
        auto m = gen.int_matrix(r, c, 6);
        auto snf = smith_form(m);
        EXPECT_EQ(snf.U * m * snf.V, snf.D);
        auto d = snf.divisors();
        EXPECT_EQ(d, elementary_divisor_oracle(m));
        for (std::size_t i = 1; i < d.size(); ++i) EXPECT_EQ(d[i] % d[i - 1], 0);
    }
}

TEST(NormalForms, HermiteShapeAndUniqueness) {
    testkit::Gen gen(13);
    for (int t = 0; t < 40; ++t) {
        std::size_t r = gen.integer(1, 5), c = gen.integer(1, 4);
        auto m = gen.int_matrix(r, c, 7);
        auto hf = hermite_form(m);
        expect_hnf_shape(hf, m);
        // same row space, different generators -> same HNF
        auto hf2 = hermite_form(gen.unimodular(r) * m);
        EXPECT_EQ(hf.H, hf2.H);
    }
}

TEST(Lattice, CovolumeExamples) {
    EXPECT_EQ(covolume(IntegerLattice(RationalMatrix::identity(2))), 1);
    EXPECT_EQ(covolume(IntegerLattice(rat({{2, 0}, {0, 3}}))), 6);
}

TEST(Lattice, RankDeficientRejected) {
    EXPECT_THROW(IntegerLattice(rat({{1, 2}, {2, 4}})), precondition_error);
    EXPECT_THROW(IntegerLattice::from_generators(rat({{1, 2}, {2, 4}, {3, 6}})), precondition_error);
}

TEST(Lattice, DualExamples) {
    auto Z3 = IntegerLattice(RationalMatrix::identity(3));
    EXPECT_EQ(dual(Z3, PairingForm::dot(3)), Z3);
    auto L = IntegerLattice(rat({{2}}));
    EXPECT_EQ(dual(L, PairingForm::dot(1)).basis()(0, 0), Rational(1, 2));
}

TEST(Lattice, DegeneratePairingRejected) {
    auto Z2 = IntegerLattice(RationalMatrix::identity(2));
    EXPECT_THROW(dual(Z2, PairingForm(rat({{1, 1}, {1, 1}}))), precondition_error);
}

TEST(Lattice, PairingSymmetryDeclaration) {
    EXPECT_EQ(PairingForm(rat({{0, 1}, {-1, 0}})).symmetry(), Symmetry::alternating);
    EXPECT_EQ(PairingForm(rat({{2, 1}, {1, 0}})).symmetry(), Symmetry::symmetric);
    EXPECT_THROW(PairingForm(rat({{0, 1}, {1, 0}}), Symmetry::alternating), precondition_error);
}

TEST(Lattice, IndexExamples) {
    auto Z2 = IntegerLattice(RationalMatrix::identity(2));
    auto twoZ2 = IntegerLattice(rat({{2, 0}, {0, 2}}));
    EXPECT_EQ(index(twoZ2, Z2).index, 4);
    EXPECT_EQ(index(Z2, Z2).index, 1);
    EXPECT_THROW(index(Z2, twoZ2), precondition_error);
    try {
        index(Z2, twoZ2);
    } catch (const precondition_error& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 0)"), std::string::npos);
    }
}

TEST(LatticeProperty, VolumeTimesDualVolumeIsOne) {
    testkit::Gen gen(21);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = gen.integer(1, 5);
        IntegerLattice L(gen.nonsingular_rational(n));
        EXPECT_EQ(covolume(L) * covolume(dual(L, PairingForm::dot(n))), 1);
    }
}

TEST(LatticeProperty, DoubleDualIsIdentity) {
    testkit::Gen gen(22);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = gen.integer(1, 4);
        IntegerLattice L(gen.nonsingular_rational(n));
        // random nondegenerate symmetric or alternating pairing
        RationalMatrix g(n, n);
        bool alt = n % 2 == 0 && gen.integer(0, 1) == 1;
        do {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) {
                    Rational v = gen.rational(4, 3);
                    if (alt) {
                        g(i, j) = i == j ? Rational(0) : v;
                        g(j, i) = -g(i, j);
                    } else {
                        g(i, j) = g(j, i) = v;
                    }
                }
        } while (determinant(g) == 0);
        PairingForm P(g);
        EXPECT_EQ(dual(dual(L, P), P), L);
    }
}

TEST(LatticeProperty, CovolumeInvariantUnderUnimodularChange) {
    testkit::Gen gen(23);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = gen.integer(1, 5);
        auto B = gen.nonsingular_rational(n);
        auto U = to_rational(gen.unimodular(n));
        IntegerLattice L(B), L2(U * B);
        EXPECT_EQ(covolume(L), covolume(L2));
        EXPECT_EQ(L, L2);
    }
}

TEST(LatticeProperty, IndexRatioAgreesWithSmith) {
    testkit::Gen gen(24);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = gen.integer(1, 4);
        auto B = gen.nonsingular_rational(n);
        IntegerMatrix C;
        do C = gen.int_matrix(n, n, 5);
        while (determinant(C) == 0);
        IntegerLattice sup(B), sub(to_rational(C) * B);
        auto r = index(sub, sup);
        Integer dc = determinant(C);
        EXPECT_EQ(r.index, dc < 0 ? Integer(-dc) : dc);
        EXPECT_EQ(r.elementary_divisors, elementary_divisor_oracle(C));
    }
}

TEST(RealLattice, CovolumeAndRank) {
    Eigen::MatrixXd b(2, 2);
    b << 2, 0, 1, 3;
    EXPECT_NEAR(covolume(RealLattice(b)), 6.0, 1e-14);
    Eigen::MatrixXd s(2, 2);
    s << 1, 2, 2, 4;
    EXPECT_THROW(RealLattice{s}, precondition_error);
}
