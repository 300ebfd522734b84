#pragma once

#include "ksv/complex_torus.hpp"
#include "ksv/matrix.hpp"
#include "ksv/random.hpp"
#include "ksv/rational.hpp"
#include "ksv/twisted.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ksv {

/// Exact element of Q(i).
struct GaussianRational {
    Rational re = 0;
    Rational im = 0;

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(int r) : re(r) {}

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n = b.re * b.re + b.im * b.im;
        if (n == 0) throw precondition_error("division by zero in Q(i)");
        return GaussianRational{a.re * b.re + a.im * b.im, a.im * b.re - a.re * b.im} * GaussianRational{1 / n, 0};
    }
    GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
    GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
    GaussianRational& operator/=(const GaussianRational& b) { return *this = *this / b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    GaussianRational conj() const { return {re, -im}; }
    cplx to_complex() const { return {to_double(re), to_double(im)}; }
    std::string str() const { return to_string(re) + (im < 0 ? "-" : "+") + to_string(abs(im)) + "i"; }
};

inline GaussianRational times_i(const GaussianRational& z) { return {-z.im, z.re}; }
inline cplx times_i(const cplx& z) { return z * cplx(0, 1); }
inline GaussianRational half(const GaussianRational& z) { return {z.re / 2, z.im / 2}; }
inline cplx half(const cplx& z) { return 0.5 * z; }

/// Real-linear f: C^n -> C stored by its values on the real basis (e_1, i e_1, e_2, i e_2, ...).
template <typename C>
struct RealLinearFunctional {
    std::vector<C> values;

    std::size_t complex_dim() const { return values.size() / 2; }

    /// f(x) for x in R^{2n} given by real coordinates.
    template <typename R>
    C operator()(const std::vector<R>& x) const {
        C s{};
        for (std::size_t k = 0; k < values.size(); ++k) s += C(x[k]) * values[k];
        return s;
    }

    /// f(i * b_k) for a real basis vector b_k.
    C at_i_basis(std::size_t k) const { return k % 2 == 0 ? values[k + 1] : -values[k - 1]; }

    friend RealLinearFunctional operator+(const RealLinearFunctional& a, const RealLinearFunctional& b) {
        RealLinearFunctional out = a;
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += b.values[k];
        return out;
    }
};

template <typename C>
struct Decomposition {
    RealLinearFunctional<C> linear;
    RealLinearFunctional<C> antilinear;
};

/// f_lin(v) = (f(v) - i f(iv)) / 2 and f_anti(v) = (f(v) + i f(iv)) / 2.
template <typename C>
Decomposition<C> decompose_functional(const RealLinearFunctional<C>& f) {
    Decomposition<C> d{f, f};
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        C fiv = f.at_i_basis(k);
        d.linear.values[k] = half(f.values[k] - times_i(fiv));
        d.antilinear.values[k] = half(f.values[k] + times_i(fiv));
    }
    return d;
}

/// f_lin(i b) = i f_lin(b), f_anti(i b) = -i f_anti(b) and f = f_lin + f_anti on every basis vector.
template <typename C>
bool decomposition_exact(const RealLinearFunctional<C>& f, const Decomposition<C>& d) {
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (!(d.linear.values[k] + d.antilinear.values[k] == f.values[k])) return false;
        if (!(d.linear.at_i_basis(k) == times_i(d.linear.values[k]))) return false;
        if (!(d.antilinear.at_i_basis(k) == -times_i(d.antilinear.values[k]))) return false;
    }
    return true;
}

template <typename C>
double decomposition_defect(const RealLinearFunctional<C>& f, const Decomposition<C>& d) {
    double m = 0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        m = std::max(m, std::abs(d.linear.values[k] + d.antilinear.values[k] - f.values[k]));
        m = std::max(m, std::abs(d.linear.at_i_basis(k) - times_i(d.linear.values[k])));
        m = std::max(m, std::abs(d.antilinear.at_i_basis(k) + times_i(d.antilinear.values[k])));
    }
    return m;
}

struct LemmaAppResult {
    double max_defect = 0;          ///< |f_anti - (-(i/2) H(z, .))| over samples and basis vectors
    double hermitian_defect = 0;    ///< |H(x, y) - conj H(y, x)|
    double min_h_margin = std::numeric_limits<double>::infinity();  ///< min H(x, x) / |x|^2
    double decomposition_defect = 0;
    std::vector<double> per_sample;
};

/// Antilinear part of E(z, .) against -(i/2) H(z, .), with H(x, y) = E(ix, y) + i E(x, y) for the
/// oriented form.
inline LemmaAppResult verify_lemma_app(const ComplexTorus& T, int orientation, Rng& rng, int samples) {
    LemmaAppResult out;
    const Eigen::Index d = 2 * T.complex_dim();
    auto random_vec = [&] {
        Eigen::RowVectorXd x(d);
        for (Eigen::Index k = 0; k < d; ++k) x(k) = rng.uniform(-1, 1);
        return x;
    };
    for (int t = 0; t < samples; ++t) {
        Eigen::RowVectorXd z = random_vec();
        RealLinearFunctional<cplx> f;
        for (Eigen::Index k = 0; k < d; ++k)
            f.values.push_back(cplx(orientation * T.E(z, Eigen::RowVectorXd::Unit(d, k)), 0));
        auto dec = decompose_functional(f);
        out.decomposition_defect = std::max(out.decomposition_defect, decomposition_defect(f, dec));
        double worst = 0;
        double scale = std::max(1.0, z.norm());
        for (Eigen::Index k = 0; k < d; ++k) {
            cplx rhs = cplx(0, -0.5) * T.H(z, Eigen::RowVectorXd::Unit(d, k), orientation);
            worst = std::max(worst, std::abs(dec.antilinear.values[k] - rhs) / scale);
        }
        out.per_sample.push_back(worst);
        out.max_defect = std::max(out.max_defect, worst);

        Eigen::RowVectorXd x = random_vec(), y = random_vec();
        out.hermitian_defect = std::max(out.hermitian_defect,
                                        std::abs(T.H(x, y, orientation) - std::conj(T.H(y, x, orientation))) /
                                            (x.norm() * y.norm()));
        out.min_h_margin = std::min(out.min_h_margin, T.H(x, x, orientation).real() / x.squaredNorm());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Kodaira-Spencer pairing on Siegel space
// ---------------------------------------------------------------------------

using GaussianMatrix = Matrix<GaussianRational>;

/// Rational point of H_r: symmetric, Y positive definite (checked exactly by leading minors).
inline void validate_rational_siegel(const GaussianMatrix& Z) {
    if (!Z.square()) throw precondition_error("Z must be square");
    const std::size_t r = Z.rows();
    RationalMatrix Y(r, r);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            if (Z(a, b) != Z(b, a)) throw precondition_error("Z is not symmetric");
            Y(a, b) = Z(a, b).im;
        }
    for (std::size_t k = 1; k <= r; ++k) {
        RationalMatrix m(k, k);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) m(a, b) = Y(a, b);
        if (determinant(m) <= 0) throw precondition_error("Im Z is not positive definite");
    }
}

/// Symmetric direction E_ik + E_ki (or E_ii).
template <typename T>
Matrix<T> symmetric_direction(std::size_t r, std::size_t i, std::size_t k) {
    Matrix<T> D(r, r, T(0));
    D(i, k) = T(1);
    D(k, i) = T(1);
    return D;
}

/// Period vector of dz_j: (Z_{1j}, ..., Z_{rj}, e_j).
template <typename T>
std::vector<T> period_vector(const Matrix<T>& Z, std::size_t j) {
    const std::size_t r = Z.rows();
    std::vector<T> P(2 * r, T(0));
    for (std::size_t a = 0; a < r; ++a) P[a] = Z(a, j);
    P[r + j] = T(1);
    return P;
}

/// Complex-bilinear extension of E((a, b), (a', b')) = -a.b' + a'.b.
template <typename T>
T riemann_form_complex(const std::vector<T>& u, const std::vector<T>& v) {
    const std::size_t r = u.size() / 2;
    T e(0);
    for (std::size_t k = 0; k < r; ++k) e += -(u[k] * v[r + k]) + v[k] * u[r + k];
    return e;
}

struct KsPairingResult {
    GaussianMatrix B;
    bool symmetric = true;
    bool pattern = true;  ///< B(j, k) = -dZ_{jk}
    std::string offending;
    bool ok() const { return symmetric && pattern; }
};

/// B(j, k) = E_C(dP_j, P_k) along the direction dZ = D; dP_j = (D_{1j}, ..., D_{rj}, 0).
inline KsPairingResult verify_ks_pairing(const GaussianMatrix& Z, std::size_t i, std::size_t k) {
    validate_rational_siegel(Z);
    const std::size_t r = Z.rows();
    if (i >= r || k >= r) throw precondition_error("direction index out of range");
    GaussianMatrix D = symmetric_direction<GaussianRational>(r, i, k);
    KsPairingResult res{GaussianMatrix(r, r), true, true, {}};
    for (std::size_t j = 0; j < r; ++j) {
        std::vector<GaussianRational> dP(2 * r, GaussianRational(0));
        for (std::size_t a = 0; a < r; ++a) dP[a] = D(a, j);
        for (std::size_t l = 0; l < r; ++l) res.B(j, l) = riemann_form_complex(dP, period_vector(Z, l));
    }
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t l = 0; l < r; ++l) {
            std::string at = "(" + std::to_string(j + 1) + "," + std::to_string(l + 1) + ")";
            if (res.B(j, l) != res.B(l, j)) {
                res.symmetric = false;
                if (res.offending.empty()) res.offending = "asymmetric at " + at;
            }
            if (res.B(j, l) != -D(j, l)) {
                res.pattern = false;
                if (res.offending.empty()) res.offending = "B" + at + " != -dZ" + at;
            }
        }
    return res;
}

/// max |(P_j(Z + hD) - P_j(Z)) / h - dP_j| over j.
inline double ks_finite_difference_defect(const GaussianMatrix& Z, std::size_t i, std::size_t k, double h = 1e-6) {
    const std::size_t r = Z.rows();
    Matrix<cplx> Zc(r, r, cplx(0)), Zh(r, r, cplx(0));
    auto D = symmetric_direction<cplx>(r, i, k);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            Zc(a, b) = Z(a, b).to_complex();
            Zh(a, b) = Zc(a, b) + h * D(a, b);
        }
    double m = 0;
    for (std::size_t j = 0; j < r; ++j) {
        auto P0 = period_vector(Zc, j), P1 = period_vector(Zh, j);
        for (std::size_t a = 0; a < 2 * r; ++a) {
            cplx exact = a < r ? D(a, j) : cplx(0);
            m = std::max(m, std::abs((P1[a] - P0[a]) / h - exact));
        }
    }
    return m;
}

/// Y = M M^T + I with small rational M; X rational symmetric.
inline GaussianMatrix sample_rational_siegel(Rng& rng, std::size_t r) {
    auto small = [&] { return Rational(static_cast<long>(rng.next() % 9) - 4, static_cast<long>(rng.next() % 4) + 1); };
    RationalMatrix M(r, r), X(r, r);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) M(a, b) = small();
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = a; b < r; ++b) X(a, b) = X(b, a) = small();
    RationalMatrix Y = M * M.transpose() + RationalMatrix::identity(r);
    GaussianMatrix Z(r, r);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) Z(a, b) = GaussianRational(X(a, b), Y(a, b));
    return Z;
}

// ---------------------------------------------------------------------------
// Twisted Kodaira-Spencer vectors
// ---------------------------------------------------------------------------

struct TwistedKsResult {
    double max_defect = 0;       ///< solved w_j against the closed-form columns of sigma_i(mu)
    double determinant_defect = 0;  ///< det sigma_i(mu) against sigma_i(nrd mu)
    std::vector<Eigen::VectorXcd> solved;
};

/// Solves E(w_j, .) = l_{j, 2i-1} on the lattice and compares with w_{2i-1} = (b_i, d_i),
/// w_{2i} = (-a_i, -c_i) in block i, where sigma_i(mu) = [[a, b], [c, d]].
inline TwistedKsResult verify_twisted_ks(const TwistedEngine& eng, const TwistedPoint& tau) {
    TwistedKsResult out;
    const std::size_t g = eng.degree();
    Eigen::MatrixXd L = eng.lattice_basis(tau);
    Eigen::MatrixXd G(eng.gram().rows(), eng.gram().cols());
    for (Eigen::Index a = 0; a < G.rows(); ++a)
        for (Eigen::Index b = 0; b < G.cols(); ++b) G(a, b) = to_double(eng.gram()(a, b));
    Eigen::MatrixXd Ginv = G.inverse();
    for (std::size_t i = 0; i < g; ++i) {
        const auto& m = eng.mu_split(i);
        std::array<Eigen::VectorXcd, 2> expected{Eigen::VectorXcd::Zero(2 * g), Eigen::VectorXcd::Zero(2 * g)};
        expected[0](2 * i) = m(0, 1);
        expected[0](2 * i + 1) = m(1, 1);
        expected[1](2 * i) = -m(0, 0);
        expected[1](2 * i + 1) = -m(1, 0);
        for (int row = 0; row < 2; ++row) {
            // l_{j, 2i-1}(beta) is the (row, 0) entry of sigma_i(beta)
            Eigen::RowVectorXd l(L.rows());
            for (Eigen::Index s = 0; s < L.rows(); ++s) l(s) = eng.basis_split(s, i)(row, 0);
            Eigen::RowVectorXd w = l * Ginv * L;
            Eigen::VectorXcd wc = complexify(w).transpose();
            out.solved.push_back(wc);
            double scale = std::max(1.0, expected[row].norm());
            out.max_defect = std::max(out.max_defect, (wc - expected[row]).norm() / scale);
        }
        double nrd = embed_double(eng.mu().nrd(), i);
        out.determinant_defect = std::max(out.determinant_defect, relative_residual(m.determinant(), nrd));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cech cocycles on an admissible rectangle cover of C / (Z + tau Z)
// ---------------------------------------------------------------------------

/// Lattice point c = (c1, c2) stands for c1 * 1 + c2 * tau.
using LatticePoint = std::array<long, 2>;

/// N x N grid of open boxes in lattice coordinates (u, v), z = u + v tau, each enlarged by
/// delta / N on every side. Charts are indexed t = a * N + b.
class CechCoverToy {
  public:
    struct Box {
        std::array<Rational, 2> lo, hi;  // open
    };

    CechCoverToy(int N, Rational delta) : N_(N), delta_(std::move(delta)) {
        if (N < 1) throw precondition_error("cover needs at least one chart per axis");
        if (delta_ <= 0) throw precondition_error("overlap delta must be positive");
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                Box B;
                B.lo = {Rational(a) / N - delta_ / N, Rational(b) / N - delta_ / N};
                B.hi = {Rational(a + 1) / N + delta_ / N, Rational(b + 1) / N + delta_ / N};
                if (B.hi[0] - B.lo[0] >= 1) throw precondition_error("inadmissible cover: chart does not inject into the torus");
                boxes_.push_back(B);
            }
        for (std::size_t t = 0; t < boxes_.size(); ++t)
            for (std::size_t s = 0; s < boxes_.size(); ++s) {
                auto pts = lattice_points_in_difference(t, s);
                if (pts.size() > 1)
                    throw precondition_error("inadmissible cover: U_" + std::to_string(t) + " - U_" + std::to_string(s) +
                                             " contains " + std::to_string(pts.size()) + " lattice points");
                if (pts.size() == 1) labels_[{t, s}] = pts.front();
            }
    }

    std::size_t size() const { return boxes_.size(); }
    const Box& chart(std::size_t t) const { return boxes_.at(t); }

    /// c_{t,s}: the unique lattice point with U_t and U_s + c overlapping, if any.
    std::optional<LatticePoint> label(std::size_t t, std::size_t s) const {
        auto it = labels_.find({t, s});
        if (it == labels_.end()) return std::nullopt;
        return it->second;
    }

    /// Triple overlap U_t, U_s + c_{t,s}, U_u + c_{t,s} + c_{s,u} in the universal cover.
    bool triple_overlap(std::size_t t, std::size_t s, std::size_t u) const {
        auto c1 = label(t, s), c2 = label(s, u);
        if (!c1 || !c2) return false;
        const Box &A = boxes_[t], &Bx = boxes_[s], &C = boxes_[u];
        for (int ax = 0; ax < 2; ++ax) {
            Rational off1 = (*c1)[ax], off2 = (*c1)[ax] + (*c2)[ax];
            Rational lo = std::max<Rational>({A.lo[ax], Bx.lo[ax] + off1, C.lo[ax] + off2});
            Rational hi = std::min<Rational>({A.hi[ax], Bx.hi[ax] + off1, C.hi[ax] + off2});
            if (!(lo < hi)) return false;
        }
        return true;
    }

  private:
    std::vector<LatticePoint> lattice_points_in_difference(std::size_t t, std::size_t s) const {
        // U_t - U_s is the open box (lo_t - hi_s, hi_t - lo_s)
        std::array<std::vector<long>, 2> axis;
        for (int ax = 0; ax < 2; ++ax) {
            Rational lo = boxes_[t].lo[ax] - boxes_[s].hi[ax];
            Rational hi = boxes_[t].hi[ax] - boxes_[s].lo[ax];
            for (Integer n = floor(lo) + 1; Rational(n) < hi; ++n) axis[ax].push_back(static_cast<long>(n));
        }
        std::vector<LatticePoint> out;
        for (long x : axis[0])
            for (long y : axis[1]) out.push_back({x, y});
        return out;
    }

    int N_;
    Rational delta_;
    std::vector<Box> boxes_;
    std::map<std::pair<std::size_t, std::size_t>, LatticePoint> labels_;
};

/// Homomorphism Lambda -> C given by its values on 1 and tau.
struct LatticeHom {
    GaussianRational on_one;
    GaussianRational on_tau;
    GaussianRational operator()(const LatticePoint& c) const {
        return GaussianRational(Rational(c[0])) * on_one + GaussianRational(Rational(c[1])) * on_tau;
    }
    friend LatticeHom operator+(const LatticeHom& a, const LatticeHom& b) {
        return {a.on_one + b.on_one, a.on_tau + b.on_tau};
    }
};

/// alpha = E(z0, .) for z0 = u0 + v0 tau, with E((a, b), (a', b')) = -a b' + a' b in the
/// (tau, 1) basis.
inline LatticeHom riemann_hom(const Rational& u0, const Rational& v0) {
    // z0 has tau-coordinate v0 and 1-coordinate u0
    return {GaussianRational(-v0), GaussianRational(u0)};
}

struct CechResult {
    std::size_t pairs = 0;
    std::size_t triples = 0;
    std::size_t violations = 0;
    std::string witness;
    bool ok() const { return violations == 0; }
};

/// delta(alpha)_{t,s} = alpha(c_{t,s}); checks delta_{t,u} = delta_{t,s} + delta_{s,u} on all triple overlaps.
inline CechResult cech_cocycle_check(const CechCoverToy& cover, const LatticeHom& alpha) {
    CechResult res;
    const std::size_t n = cover.size();
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t s = 0; s < n; ++s)
            if (cover.label(t, s)) ++res.pairs;
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t u = 0; u < n; ++u) {
                if (!cover.triple_overlap(t, s, u)) continue;
                ++res.triples;
                auto tu = cover.label(t, u);
                bool good = tu && alpha(*tu) == alpha(*cover.label(t, s)) + alpha(*cover.label(s, u));
                if (!good) {
                    ++res.violations;
                    if (res.witness.empty())
                        res.witness = "(" + std::to_string(t) + "," + std::to_string(s) + "," + std::to_string(u) + ")";
                }
            }
    return res;
}

/// delta(alpha + beta) = delta(alpha) + delta(beta) on every labelled overlap.
inline bool cech_additive(const CechCoverToy& cover, const LatticeHom& a, const LatticeHom& b) {
    for (std::size_t t = 0; t < cover.size(); ++t)
        for (std::size_t s = 0; s < cover.size(); ++s)
            if (auto c = cover.label(t, s))
                if (!((a + b)(*c) == a(*c) + b(*c))) return false;
    return true;
}

}  // namespace ksv
