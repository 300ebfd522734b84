#pragma once

#include "ksv/complex_torus.hpp"
#include "ksv/exactnum.hpp"
#include "ksv/quatalg.hpp"
#include "ksv/random.hpp"
#include "ksv/zlattice.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace ksv {

/// Point of H^g.
class TwistedPoint {
  public:
    explicit TwistedPoint(std::vector<cplx> tau) : tau_(std::move(tau)) {
        if (tau_.empty()) throw precondition_error("twisted point needs at least one coordinate");
        for (std::size_t i = 0; i < tau_.size(); ++i)
            if (!(tau_[i].imag() > 0)) throw precondition_error("Im(tau_" + std::to_string(i) + ") must be positive");
    }
    std::size_t size() const { return tau_.size(); }
    const cplx& operator[](std::size_t i) const { return tau_[i]; }
    const std::vector<cplx>& values() const { return tau_; }

    double im_product_sq() const {
        double p = 1;
        for (const auto& t : tau_) p *= t.imag() * t.imag();
        return p;
    }

  private:
    std::vector<cplx> tau_;
};

/// Re uniform in [-1, 1], Im log-uniform in [0.1, 10].
inline TwistedPoint sample_twisted_point(Rng& rng, std::size_t g) {
    std::vector<cplx> tau;
    for (std::size_t i = 0; i < g; ++i) {
        double re = rng.uniform(-1, 1);
        double im = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        tau.emplace_back(re, im);
    }
    return TwistedPoint(tau);
}

struct VolumeResult {
    double covolume;
    double literal_expected;     ///< Nm(d_B) prod Im(tau_i)^2
    double normalized_expected;  ///< covol(sigma(O_B)) prod Im(tau_i)^2 = d_F^2 Nm(d_B) prod Im^2
    double literal_residual;
    double normalized_residual;
};

struct TwistedMainResult {
    double lhs;                  ///< covol / pi^{2g}
    double rhs_literal;          ///< Nm(d_B) / |2 pi i|^{2g} * (2^g prod Im)^2
    double rhs_normalized;       ///< same with Nm(d_B) replaced by d_F^2 Nm(d_B)
    double literal_residual;
    double normalized_residual;
};

/// Twisted abelian varieties C^{2g} / O_B (tau, 1)^t with the Riemann form built from mu.
class TwistedEngine {
  public:
    TwistedEngine(QuatOrder O, QuatElement mu, FieldElement d_B, int digits = kDefaultDigits)
        : O_(std::move(O)), mu_(std::move(mu)), d_B_(std::move(d_B)), digits_(digits) {
        const auto& B = O_.algebra();
        const std::size_t g = B.degree();
        if (!B.totally_indefinite()) throw precondition_error("quaternion algebra is not totally indefinite");
        FieldElement mu2 = validate_mu(mu_);
        if (!O_.contains(mu_)) throw precondition_error("mu is not in the order");
        if (!(FractionalIdeal::principal(mu2) == FractionalIdeal::principal(d_B_)))
            throw precondition_error("(mu^2) differs from (d_B) as ideals");

        basis_ = O_.basis();
        for (const auto& b : basis_) {
            std::vector<Eigen::Matrix2d> per_place;
            for (std::size_t i = 0; i < g; ++i) per_place.push_back(split(b, i, digits_));
            splits_.push_back(per_place);
        }

        set_gram(exact_gram(mu_));
        // E or -E is positive; the sign is constant on H^g, so tau = (i, ..., i) decides it.
        std::vector<cplx> ii(g, cplx(0, 1));
        Rng probe(0, "orientation");
        int s = torus(TwistedPoint(ii)).check_axioms(probe, 0).orientation;
        if (s == 0) throw precondition_error("neither E nor -E is positive: not a Riemann form");
        if (s < 0) {
            flipped_ = true;
            mu_ = -mu_;
            set_gram(exact_gram(mu_));
        }
        for (std::size_t i = 0; i < g; ++i) mu_split_.push_back(split(mu_, i, digits_));

        nm_dB_ = abs(norm(d_B_));
        covol_order_sq_ = order_covolume_sq(O_);
    }

    const QuatOrder& order() const { return O_; }
    /// mu after orientation; E(b, b') = Tr(trd(mu^{-1} b b'^*)) is positive with this sign.
    const QuatElement& mu() const { return mu_; }
    bool flipped() const { return flipped_; }
    std::size_t degree() const { return O_.algebra().degree(); }
    const RationalMatrix& gram() const { return gram_; }
    Rational norm_dB() const { return nm_dB_; }
    Rational order_covolume_squared() const { return covol_order_sq_; }
    const Eigen::Matrix2d& mu_split(std::size_t place) const { return mu_split_.at(place); }
    const std::vector<QuatElement>& basis() const { return basis_; }
    const Eigen::Matrix2d& basis_split(std::size_t k, std::size_t place) const { return splits_.at(k).at(place); }

    /// Exact E on order basis pairs.
    Rational E(const QuatElement& b, const QuatElement& b2) const { return trace((mu_.inverse() * b * b2.conj()).trd()); }

    bool alternating() const {
        for (std::size_t a = 0; a < gram_.rows(); ++a)
            for (std::size_t b = 0; b < gram_.cols(); ++b)
                if (gram_(a, b) != -gram_(b, a)) return false;
        return true;
    }
    bool integral() const { return is_integral(gram_); }

    /// Rows: realified sigma(beta)(tau_1, 1, ..., tau_g, 1)^t for the order basis.
    Eigen::MatrixXd lattice_basis(const TwistedPoint& tau) const {
        const std::size_t g = degree();
        if (tau.size() != g) throw precondition_error("tau has the wrong number of coordinates");
        Eigen::MatrixXd L(4 * g, 4 * g);
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            Eigen::RowVectorXcd z(2 * g);
            for (std::size_t i = 0; i < g; ++i) {
                const auto& m = splits_[k][i];
                z(2 * i) = m(0, 0) * tau[i] + m(0, 1);
                z(2 * i + 1) = m(1, 0) * tau[i] + m(1, 1);
            }
            L.row(k) = realify(z);
        }
        return L;
    }

    RealLattice lattice(const TwistedPoint& tau) const { return RealLattice(lattice_basis(tau)); }
    ComplexTorus torus(const TwistedPoint& tau) const { return {lattice_basis(tau), gram_d_}; }

    AxiomReport riemann_axioms(const TwistedPoint& tau, Rng& rng, int samples) const {
        return torus(tau).check_axioms(rng, samples);
    }

    VolumeResult verify_volume(const TwistedPoint& tau) const {
        VolumeResult v{};
        v.covolume = covolume(lattice(tau));
        double im2 = tau.im_product_sq();
        v.literal_expected = to_double(nm_dB_) * im2;
        v.normalized_expected = std::sqrt(to_double(covol_order_sq_)) * im2;
        v.literal_residual = relative_residual(v.covolume, v.literal_expected);
        v.normalized_residual = relative_residual(v.covolume, v.normalized_expected);
        return v;
    }

    TwistedMainResult verify_main(const TwistedPoint& tau) const {
        const double g = static_cast<double>(degree());
        const double pi = std::numbers::pi;
        double cov = covolume(lattice(tau));
        double pet = std::pow(2.0, g);
        for (const auto& t : tau.values()) pet *= t.imag();
        TwistedMainResult r{};
        r.lhs = cov / std::pow(pi, 2 * g);
        r.rhs_literal = to_double(nm_dB_) / std::pow(2 * pi, 2 * g) * pet * pet;
        r.rhs_normalized = std::sqrt(to_double(covol_order_sq_)) / std::pow(2 * pi, 2 * g) * pet * pet;
        r.literal_residual = relative_residual(r.lhs, r.rhs_literal);
        r.normalized_residual = relative_residual(r.lhs, r.rhs_normalized);
        return r;
    }

    /// prod_i det sigma_i(mu) against the exact Nm(nrd mu) = Nm(d_B) (up to sign).
    double ks_constant_defect() const {
        double p = 1;
        for (const auto& m : mu_split_) p *= m.determinant();
        Rational exact = norm(mu_.nrd());
        if (abs(exact) != nm_dB_) return std::numeric_limits<double>::infinity();
        return relative_residual(p, to_double(exact));
    }

  private:
    void set_gram(RationalMatrix G) {
        gram_ = std::move(G);
        gram_d_ = Eigen::MatrixXd(gram_.rows(), gram_.cols());
        for (std::size_t a = 0; a < gram_.rows(); ++a)
            for (std::size_t b = 0; b < gram_.cols(); ++b) gram_d_(a, b) = to_double(gram_(a, b));
    }

    RationalMatrix exact_gram(const QuatElement& mu) const {
        QuatElement inv = mu.inverse();
        RationalMatrix G(basis_.size(), basis_.size());
        for (std::size_t a = 0; a < basis_.size(); ++a)
            for (std::size_t b = 0; b < basis_.size(); ++b) G(a, b) = trace((inv * basis_[a] * basis_[b].conj()).trd());
        return G;
    }

    QuatOrder O_;
    QuatElement mu_;
    FieldElement d_B_;
    int digits_;
    bool flipped_ = false;
    std::vector<QuatElement> basis_;
    std::vector<std::vector<Eigen::Matrix2d>> splits_;
    std::vector<Eigen::Matrix2d> mu_split_;
    RationalMatrix gram_;
    Eigen::MatrixXd gram_d_;
    Rational nm_dB_;
    Rational covol_order_sq_;
};

}  // namespace ksv
