#pragma once

#include "ksv/random.hpp"
#include "ksv/rational.hpp"

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace ksv {

using cplx = std::complex<double>;

/// C^n -> R^{2n}, interleaved (Re z_1, Im z_1, Re z_2, ...).
inline Eigen::RowVectorXd realify(const Eigen::RowVectorXcd& z) {
    Eigen::RowVectorXd v(2 * z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        v(2 * k) = z(k).real();
        v(2 * k + 1) = z(k).imag();
    }
    return v;
}

inline Eigen::RowVectorXcd complexify(const Eigen::RowVectorXd& v) {
    Eigen::RowVectorXcd z(v.size() / 2);
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = cplx(v(2 * k), v(2 * k + 1));
    return z;
}

/// Multiplication by i on row vectors of R^{2n}: x * J.
inline Eigen::MatrixXd complex_structure(Eigen::Index n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        J(2 * k, 2 * k + 1) = 1;
        J(2 * k + 1, 2 * k) = -1;
    }
    return J;
}

struct AxiomReport {
    int orientation = 0;                 ///< s in {+1, -1}: s * E is the positive form; 0 if neither
    double compatibility_defect = 0;     ///< max |E(ix, iy) - E(x, y)| on samples, relative to ||E|| |x||y|
    double min_margin = std::numeric_limits<double>::infinity();  ///< min s * E(ix, x) / |x|^2
    double min_eigenvalue = 0;           ///< of the symmetric form s * E(i., .) in lattice coordinates
    std::vector<double> margins;
    std::string witness;                 ///< first offending sample, if any

    bool ok(double tol = 1e-10) const {
        return orientation != 0 && compatibility_defect < tol && min_margin > 0 && min_eigenvalue > 0;
    }
};

/// Complex torus C^n / L with an alternating form E given by its Gram matrix on the lattice basis.
/// E is extended R-bilinearly through lattice coordinates.
class ComplexTorus {
  public:
    ComplexTorus(Eigen::MatrixXd basis, Eigen::MatrixXd gram)
        : L_(std::move(basis)), G_(std::move(gram)), Linv_(L_.inverse()), J_(complex_structure(L_.rows() / 2)) {
        Jc_ = L_ * J_ * Linv_;
    }

    Eigen::Index complex_dim() const { return L_.rows() / 2; }
    const Eigen::MatrixXd& basis() const { return L_; }
    const Eigen::MatrixXd& gram() const { return G_; }

    Eigen::RowVectorXd coords(const Eigen::RowVectorXd& x) const { return x * Linv_; }
    Eigen::RowVectorXd times_i(const Eigen::RowVectorXd& x) const { return x * J_; }

    double E(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) const {
        return (coords(x) * G_ * coords(y).transpose())(0, 0);
    }

    /// H(x, y) = E(ix, y) + i E(x, y) for the oriented form s * E; complex-linear in x.
    cplx H(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y, int orientation) const {
        return double(orientation) * cplx(E(times_i(x), y), E(x, y));
    }

    /// Compatibility and positivity on `samples` random vectors plus an eigenvalue certificate.
    AxiomReport check_axioms(Rng& rng, int samples) const {
        AxiomReport r;
        Eigen::MatrixXd S = Jc_ * G_;
        Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
        Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues();
        if (ev.minCoeff() > 0) r.orientation = 1;
        else if (ev.maxCoeff() < 0) r.orientation = -1;
        r.min_eigenvalue = r.orientation >= 0 ? ev.minCoeff() : -ev.maxCoeff();
        const int s = r.orientation == 0 ? 1 : r.orientation;

        const Eigen::Index d = L_.rows();
        const Eigen::MatrixXd ambient = Linv_ * G_ * Linv_.transpose();
        const double form_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(ambient).singularValues()(0);
        for (int t = 0; t < samples; ++t) {
            Eigen::RowVectorXd x(d), y(d);
            for (Eigen::Index k = 0; k < d; ++k) x(k) = rng.uniform(-1, 1), y(k) = rng.uniform(-1, 1);
            double scale = form_norm * x.norm() * y.norm();
            double defect = std::abs(E(times_i(x), times_i(y)) - E(x, y)) / scale;
            r.compatibility_defect = std::max(r.compatibility_defect, defect);
            double margin = s * E(times_i(x), x) / x.squaredNorm();
            r.margins.push_back(margin);
            if (margin < r.min_margin) r.min_margin = margin;
            if (r.witness.empty() && (margin <= 0 || defect >= 1e-10)) {
                std::string w = "x=(";
                for (Eigen::Index k = 0; k < d; ++k) w += (k ? ", " : "") + std::to_string(x(k));
                r.witness = w + ")";
            }
        }
        if (r.orientation == 0 && r.witness.empty()) r.witness = "indefinite form E(i., .)";
        return r;
    }

  private:
    Eigen::MatrixXd L_, G_, Linv_, J_, Jc_;
};

}  // namespace ksv
