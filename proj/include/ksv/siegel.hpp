#pragma once

#include "ksv/complex_torus.hpp"
#include "ksv/random.hpp"
#include "ksv/rational.hpp"
#include "ksv/zlattice.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksv {

inline constexpr double kSymmetryTolerance = 1e-12;

/// Point of the product of g copies of the Siegel space H_r.
class SiegelPoint {
  public:
    explicit SiegelPoint(std::vector<Eigen::MatrixXcd> Z) : Z_(std::move(Z)) {
        if (Z_.empty()) throw precondition_error("Siegel point needs at least one place");
        const Eigen::Index r = Z_.front().rows();
        for (std::size_t i = 0; i < Z_.size(); ++i) {
            const auto& z = Z_[i];
            if (z.rows() != r || z.cols() != r) throw precondition_error("Siegel point blocks must all be r x r");
            double scale = std::max(1.0, z.norm());
            if ((z - z.transpose()).norm() > kSymmetryTolerance * scale)
                throw precondition_error("Z at place " + std::to_string(i) + " is not symmetric");
            Eigen::MatrixXd Y = z.imag();
            Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (Y + Y.transpose()));
            if (llt.info() != Eigen::Success)
                throw precondition_error("Im Z at place " + std::to_string(i) + " is not positive definite");
        }
    }

    /// g = 1 convenience.
    static SiegelPoint single(const Eigen::MatrixXcd& Z) { return SiegelPoint(std::vector<Eigen::MatrixXcd>{Z}); }

    std::size_t places() const { return Z_.size(); }
    Eigen::Index r() const { return Z_.front().rows(); }
    const Eigen::MatrixXcd& Z(std::size_t place) const { return Z_.at(place); }
    Eigen::MatrixXd X(std::size_t place) const { return Z_.at(place).real(); }
    Eigen::MatrixXd Y(std::size_t place) const { return Z_.at(place).imag(); }

  private:
    std::vector<Eigen::MatrixXcd> Z_;
};

inline Eigen::MatrixXd standard_symplectic(Eigen::Index r) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    J.topRightCorner(r, r) = Eigen::MatrixXd::Identity(r, r);
    J.bottomLeftCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
    return J;
}

/// M = [[A, B], [C, D]] with M^T J M = J.
class SymplecticMatrix {
  public:
    explicit SymplecticMatrix(Eigen::MatrixXd M, double tol = 1e-10) : M_(std::move(M)) {
        if (M_.rows() != M_.cols() || M_.rows() % 2 != 0) throw precondition_error("symplectic matrix must be 2r x 2r");
        Eigen::MatrixXd J = standard_symplectic(r());
        if ((M_.transpose() * J * M_ - J).norm() > tol * std::max(1.0, M_.squaredNorm()))
            throw precondition_error("matrix is not symplectic");
    }

    Eigen::Index r() const { return M_.rows() / 2; }
    const Eigen::MatrixXd& matrix() const { return M_; }
    Eigen::MatrixXd A() const { return M_.topLeftCorner(r(), r()); }
    Eigen::MatrixXd B() const { return M_.topRightCorner(r(), r()); }
    Eigen::MatrixXd C() const { return M_.bottomLeftCorner(r(), r()); }
    Eigen::MatrixXd D() const { return M_.bottomRightCorner(r(), r()); }

    friend SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b) {
        return SymplecticMatrix(a.M_ * b.M_);
    }

  private:
    Eigen::MatrixXd M_;
};

/// (AZ + B)(CZ + D)^{-1} at one place.
inline SiegelPoint act(const SymplecticMatrix& gamma, const SiegelPoint& Z, std::size_t place) {
    if (gamma.r() != Z.r()) throw precondition_error("symplectic matrix and Siegel point have different r");
    const Eigen::MatrixXcd z = Z.Z(place);
    Eigen::MatrixXcd num = gamma.A().cast<cplx>() * z + gamma.B().cast<cplx>();
    Eigen::MatrixXcd den = gamma.C().cast<cplx>() * z + gamma.D().cast<cplx>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(den);
    if (!lu.isInvertible()) throw precondition_error("CZ + D is singular");
    Eigen::MatrixXcd w = num * lu.inverse();
    w = 0.5 * (w + w.transpose()).eval();
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t i = 0; i < Z.places(); ++i) out.push_back(i == place ? w : Z.Z(i));
    return SiegelPoint(out);
}

/// E((a, b), (a', b')) = -a.b' + a'.b on Z^r x Z^r.
inline Integer riemann_form_siegel(const std::vector<Integer>& u, const std::vector<Integer>& v) {
    if (u.size() != v.size() || u.size() % 2 != 0) throw precondition_error("Siegel lattice vectors must have length 2r");
    const std::size_t r = u.size() / 2;
    Integer e = 0;
    for (std::size_t k = 0; k < r; ++k) e += -u[k] * v[r + k] + v[k] * u[r + k];
    return e;
}

/// Gram matrix of E on the basis (rows of Z, then e_k).
inline IntegerMatrix siegel_gram(Eigen::Index r) {
    const std::size_t n = 2 * static_cast<std::size_t>(r);
    IntegerMatrix G(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            std::vector<Integer> u(n, 0), v(n, 0);
            u[s] = 1;
            v[t] = 1;
            G(s, t) = riemann_form_siegel(u, v);
        }
    return G;
}

/// Real basis of Lambda_Z = Z^r Z + Z^r in C^r = R^{2r}: rows of Z, then standard vectors.
inline Eigen::MatrixXd period_lattice_basis(const SiegelPoint& Z, std::size_t place) {
    const Eigen::Index r = Z.r();
    Eigen::MatrixXd L(2 * r, 2 * r);
    for (Eigen::Index k = 0; k < r; ++k) {
        L.row(k) = realify(Z.Z(place).row(k));
        L.row(r + k) = realify(Eigen::RowVectorXcd::Unit(r, k));
    }
    return L;
}

inline ComplexTorus siegel_torus(const SiegelPoint& Z, std::size_t place) {
    IntegerMatrix G = siegel_gram(Z.r());
    Eigen::MatrixXd g(G.rows(), G.cols());
    for (std::size_t s = 0; s < G.rows(); ++s)
        for (std::size_t t = 0; t < G.cols(); ++t) g(s, t) = static_cast<double>(G(s, t));
    return {period_lattice_basis(Z, place), g};
}

/// Riemann axioms per place; the worst place is reported.
inline AxiomReport riemann_axioms(const SiegelPoint& Z, Rng& rng, int samples) {
    AxiomReport worst;
    for (std::size_t i = 0; i < Z.places(); ++i) {
        AxiomReport r = siegel_torus(Z, i).check_axioms(rng, samples);
        if (i == 0) {
            worst = r;
            continue;
        }
        if (r.orientation != worst.orientation) worst.orientation = 0;
        worst.compatibility_defect = std::max(worst.compatibility_defect, r.compatibility_defect);
        worst.min_eigenvalue = std::min(worst.min_eigenvalue, r.min_eigenvalue);
        if (r.min_margin < worst.min_margin) {
            worst.min_margin = r.min_margin;
            if (worst.witness.empty()) worst.witness = r.witness;
        }
        worst.margins.insert(worst.margins.end(), r.margins.begin(), r.margins.end());
    }
    return worst;
}

inline constexpr double kCovolumeTolerance = 1e-10;

struct FaltingsResult {
    double value;             ///< prod det Y_i / pi^{gr}
    double covolume_route;    ///< prod covol(Lambda_{Z_i}) / pi^{gr}
    double relative_defect;
    std::vector<double> det_y;
    std::vector<double> covolumes;
};

/// ||wedge dz||_Fal^2 with the analytic and the embedded-lattice evaluations.
inline FaltingsResult faltings_norm_sq_detail(const SiegelPoint& Z) {
    FaltingsResult out{1.0, 1.0, 0.0, {}, {}};
    const double pir = std::pow(std::numbers::pi, static_cast<double>(Z.r()));
    for (std::size_t i = 0; i < Z.places(); ++i) {
        double dy = Z.Y(i).determinant();
        double cv = covolume(RealLattice(period_lattice_basis(Z, i)));
        out.det_y.push_back(dy);
        out.covolumes.push_back(cv);
        // (2 pi)^{-r} |int wedge dz_k ^ dzbar_k| = (2 pi)^{-r} 2^r covol
        out.value *= dy / pir;
        out.covolume_route *= std::pow(2 * std::numbers::pi, -double(Z.r())) * std::pow(2.0, double(Z.r())) * cv;
    }
    out.relative_defect = relative_residual(out.covolume_route, out.value);
    return out;
}

inline double faltings_norm_sq(const SiegelPoint& Z) {
    auto r = faltings_norm_sq_detail(Z);
    if (!(r.relative_defect < kCovolumeTolerance))
        throw std::logic_error("Faltings covolume cross-check failed: relative defect " + std::to_string(r.relative_defect));
    return r.value;
}

/// 2^{gr(r+1)/2} prod det(Y_i)^{(r+1)/2}.
inline double petersson_norm_siegel(const SiegelPoint& Z) {
    const double r = static_cast<double>(Z.r());
    double v = std::pow(2.0, Z.places() * r * (r + 1) / 2);
    for (std::size_t i = 0; i < Z.places(); ++i) v *= std::pow(Z.Y(i).determinant(), (r + 1) / 2);
    return v;
}

struct MainResult {
    double lhs;
    double rhs;
    double residual;
};

/// ||(wedge dz)^{r+1}||_Fal against |2 pi i|^{-gr(r+1)/2} ||d tau||_Pet.
inline MainResult verify_siegel_main(const SiegelPoint& Z) {
    const double r = static_cast<double>(Z.r());
    const double g = static_cast<double>(Z.places());
    double lhs = std::pow(faltings_norm_sq(Z), (r + 1) / 2);
    double rhs = std::pow(2 * std::numbers::pi, -g * r * (r + 1) / 2) * petersson_norm_siegel(Z);
    return {lhs, rhs, relative_residual(lhs, rhs)};
}

/// Y = M M^T + eps I with M uniform in [-1, 1]; X symmetric uniform in [-1, 1].
inline SiegelPoint sample_siegel_point(Rng& rng, Eigen::Index r, std::size_t g, double eps = 1e-3) {
    std::vector<Eigen::MatrixXcd> Z;
    for (std::size_t i = 0; i < g; ++i) {
        Eigen::MatrixXd M(r, r), X(r, r);
        for (Eigen::Index a = 0; a < r; ++a)
            for (Eigen::Index b = 0; b < r; ++b) M(a, b) = rng.uniform(-1, 1);
        for (Eigen::Index a = 0; a < r; ++a)
            for (Eigen::Index b = a; b < r; ++b) X(a, b) = X(b, a) = rng.uniform(-1, 1);
        Eigen::MatrixXd Y = M * M.transpose() + eps * Eigen::MatrixXd::Identity(r, r);
        Eigen::MatrixXcd z(r, r);
        z.real() = X;
        z.imag() = Y;
        Z.push_back(z);
    }
    return SiegelPoint(Z);
}

}  // namespace ksv
