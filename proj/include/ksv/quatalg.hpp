#pragma once

#include "ksv/exactnum.hpp"
#include "ksv/matrix.hpp"
#include "ksv/zlattice.hpp"

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksv {

class QuatElement;

/// B = (a, b / F): i^2 = a, j^2 = b, ij = -ji = k.
class QuaternionAlgebra {
  public:
    QuaternionAlgebra(const FieldElement& a, const FieldElement& b)
        : data_(std::make_shared<const Data>(Data{a.field(), a, b})) {
        if (!(a.field() == b.field())) throw precondition_error("a and b live in different fields");
        if (a.is_zero() || b.is_zero()) throw precondition_error("quaternion parameters must be nonzero");
    }

    const TotallyRealField& field() const { return data_->F; }
    const FieldElement& a() const { return data_->a; }
    const FieldElement& b() const { return data_->b; }
    std::size_t degree() const { return field().degree(); }
    /// Dimension of B over Q.
    std::size_t rational_dim() const { return 4 * degree(); }

    bool split_at(std::size_t place) const { return embedded_sign(a(), place) > 0 || embedded_sign(b(), place) > 0; }
    bool totally_indefinite() const {
        for (std::size_t i = 0; i < degree(); ++i)
            if (!split_at(i)) return false;
        return true;
    }

    QuatElement element(FieldElement x, FieldElement y, FieldElement z, FieldElement w) const;
    QuatElement scalar(const FieldElement& x) const;
    QuatElement from_rational(const std::vector<Rational>& v) const;
    QuatElement one() const;
    QuatElement zero() const;
    QuatElement i() const;
    QuatElement j() const;
    QuatElement k() const;

    friend bool operator==(const QuaternionAlgebra& l, const QuaternionAlgebra& r) {
        return l.data_ == r.data_ || (l.field() == r.field() && l.a() == r.a() && l.b() == r.b());
    }

  private:
    struct Data {
        TotallyRealField F;
        FieldElement a;
        FieldElement b;
    };
    std::shared_ptr<const Data> data_;
};

class QuatElement {
  public:
    QuatElement(QuaternionAlgebra B, std::array<FieldElement, 4> c) : B_(std::move(B)), c_(std::move(c)) {}

    const QuaternionAlgebra& algebra() const { return B_; }
    const FieldElement& x() const { return c_[0]; }
    const FieldElement& y() const { return c_[1]; }
    const FieldElement& z() const { return c_[2]; }
    const FieldElement& w() const { return c_[3]; }
    const std::array<FieldElement, 4>& coords() const { return c_; }

    /// Rational coordinates [x | y | z | w], each block on the integral basis of F.
    std::vector<Rational> rational_coords() const {
        std::vector<Rational> v;
        for (const auto& f : c_) v.insert(v.end(), f.coords().begin(), f.coords().end());
        return v;
    }

    bool is_zero() const { return x().is_zero() && y().is_zero() && z().is_zero() && w().is_zero(); }
    bool is_scalar() const { return y().is_zero() && z().is_zero() && w().is_zero(); }

    QuatElement conj() const { return {B_, {x(), -y(), -z(), -w()}}; }
    FieldElement trd() const { return Rational(2) * x(); }
    FieldElement nrd() const {
        const auto& a = B_.a();
        const auto& b = B_.b();
        return x() * x() - a * y() * y() - b * z() * z() + a * b * w() * w();
    }
    bool is_pure() const { return x().is_zero(); }

    QuatElement inverse() const {
        FieldElement n = nrd();
        if (n.is_zero()) throw precondition_error("quaternion is not invertible");
        return n.inverse() * conj();
    }

    friend QuatElement operator+(const QuatElement& p, const QuatElement& q) {
        return {p.B_, {p.x() + q.x(), p.y() + q.y(), p.z() + q.z(), p.w() + q.w()}};
    }
    friend QuatElement operator-(const QuatElement& p, const QuatElement& q) {
        return {p.B_, {p.x() - q.x(), p.y() - q.y(), p.z() - q.z(), p.w() - q.w()}};
    }
    friend QuatElement operator-(const QuatElement& p) { return {p.B_, {-p.x(), -p.y(), -p.z(), -p.w()}}; }
    friend QuatElement operator*(const QuatElement& p, const QuatElement& q) {
        const auto& a = p.B_.a();
        const auto& b = p.B_.b();
        const auto &x1 = p.x(), &y1 = p.y(), &z1 = p.z(), &w1 = p.w();
        const auto &x2 = q.x(), &y2 = q.y(), &z2 = q.z(), &w2 = q.w();
        return {p.B_,
                {x1 * x2 + a * y1 * y2 + b * z1 * z2 - a * b * w1 * w2,
                 x1 * y2 + y1 * x2 - b * (z1 * w2 - w1 * z2),
                 x1 * z2 + z1 * x2 + a * (y1 * w2 - w1 * y2),
                 x1 * w2 + w1 * x2 + y1 * z2 - z1 * y2}};
    }
    friend QuatElement operator*(const FieldElement& s, const QuatElement& q) {
        return {q.B_, {s * q.x(), s * q.y(), s * q.z(), s * q.w()}};
    }
    friend QuatElement operator*(const Rational& s, const QuatElement& q) {
        return {q.B_, {s * q.x(), s * q.y(), s * q.z(), s * q.w()}};
    }
    friend bool operator==(const QuatElement& p, const QuatElement& q) { return p.c_ == q.c_; }

    std::string str() const {
        return "(" + x().str() + ", " + y().str() + ", " + z().str() + ", " + w().str() + ")";
    }

  private:
    QuaternionAlgebra B_;
    std::array<FieldElement, 4> c_;
};

inline QuatElement QuaternionAlgebra::element(FieldElement x, FieldElement y, FieldElement z, FieldElement w) const {
    return {*this, {std::move(x), std::move(y), std::move(z), std::move(w)}};
}
inline QuatElement QuaternionAlgebra::scalar(const FieldElement& x) const {
    auto o = field().zero();
    return element(x, o, o, o);
}
inline QuatElement QuaternionAlgebra::from_rational(const std::vector<Rational>& v) const {
    const std::size_t g = degree();
    if (v.size() != 4 * g) throw precondition_error("quaternion needs " + std::to_string(4 * g) + " rational coordinates");
    std::array<FieldElement, 4> c{field().zero(), field().zero(), field().zero(), field().zero()};
    for (std::size_t t = 0; t < 4; ++t) c[t] = field().element(std::vector<Rational>(v.begin() + t * g, v.begin() + (t + 1) * g));
    return {*this, std::move(c)};
}
inline QuatElement QuaternionAlgebra::one() const { return scalar(field().one()); }
inline QuatElement QuaternionAlgebra::zero() const { return scalar(field().zero()); }
inline QuatElement QuaternionAlgebra::i() const {
    auto o = field().zero();
    return element(o, field().one(), o, o);
}
inline QuatElement QuaternionAlgebra::j() const {
    auto o = field().zero();
    return element(o, o, field().one(), o);
}
inline QuatElement QuaternionAlgebra::k() const {
    auto o = field().zero();
    return element(o, o, o, field().one());
}

struct ConjTrdNrd {
    QuatElement conj;
    FieldElement trd;
    FieldElement nrd;
};

inline ConjTrdNrd conj_trd_nrd(const QuatElement& beta) {
    ConjTrdNrd r{beta.conj(), beta.trd(), beta.nrd()};
    if (!(beta * r.conj == beta.algebra().scalar(r.nrd)))
        throw std::logic_error("beta * conj(beta) differs from nrd(beta)");
    return r;
}

/// sigma_place(beta) in M_2(R). Pinned formula: i -> diag(s, -s), j -> [[0, b], [1, 0]] with s = sqrt(a)
/// when sigma(a) > 0, otherwise the same with the roles of (i, a) and (j, b) exchanged.
inline Eigen::Matrix2d split(const QuatElement& beta, std::size_t place, int digits = kDefaultDigits) {
    const auto& B = beta.algebra();
    Real x = embed(beta.x(), place, digits), y = embed(beta.y(), place, digits);
    Real z = embed(beta.z(), place, digits), w = embed(beta.w(), place, digits);
    Real a = embed(B.a(), place, digits), b = embed(B.b(), place, digits);
    Eigen::Matrix2d m;
    if (embedded_sign(B.a(), place) > 0) {
        Real s = boost::multiprecision::sqrt(a);
        m << static_cast<double>(x + y * s), static_cast<double>(b * (z + w * s)),  //
            static_cast<double>(z - w * s), static_cast<double>(x - y * s);
    } else if (embedded_sign(B.b(), place) > 0) {
        // x + y i + z j + w k = x + z i' + y j' - w k' with i' = j, j' = i
        Real s = boost::multiprecision::sqrt(b);
        m << static_cast<double>(x + z * s), static_cast<double>(a * (y - w * s)),  //
            static_cast<double>(y + w * s), static_cast<double>(x - z * s);
    } else {
        throw precondition_error("algebra not split at place " + std::to_string(place));
    }
    return m;
}

/// Validates mu for the twisted involution: invertible, mu^2 central and totally negative.
inline FieldElement validate_mu(const QuatElement& mu) {
    QuatElement sq = mu * mu;
    if (!sq.is_scalar()) throw precondition_error("mu^2 is not in F");
    if (sq.x().is_zero()) throw precondition_error("mu is not invertible");
    if (!totally_negative(sq.x())) throw precondition_error("mu^2 is not totally negative");
    return sq.x();
}

/// mu^{-1} beta^* mu.
inline QuatElement mu_involution(const QuatElement& beta, const QuatElement& mu) {
    validate_mu(mu);
    return mu.inverse() * beta.conj() * mu;
}

/// Z-order in B given by 4g rational basis vectors.
class QuatOrder {
  public:
    QuatOrder(QuaternionAlgebra B, const RationalMatrix& zbasis) : B_(std::move(B)), lattice_(check_shape(zbasis)) {
        if (!contains(B_.one())) throw precondition_error("order does not contain 1");
        for (const auto& u : basis())
            for (const auto& v : basis())
                if (!contains(u * v))
                    throw precondition_error("order basis is not closed under multiplication: " + u.str() + " * " + v.str());
    }

    const QuaternionAlgebra& algebra() const { return B_; }
    const IntegerLattice& lattice() const { return lattice_; }
    std::size_t rank() const { return lattice_.dim(); }

    std::vector<QuatElement> basis() const {
        std::vector<QuatElement> out;
        for (std::size_t r = 0; r < lattice_.dim(); ++r) out.push_back(B_.from_rational(lattice_.basis().row(r)));
        return out;
    }

    bool contains(const QuatElement& q) const { return lattice_.contains(q.rational_coords()); }

  private:
    RationalMatrix check_shape(const RationalMatrix& m) const {
        const std::size_t n = B_.rational_dim();
        if (m.rows() != n || m.cols() != n)
            throw precondition_error("order basis must consist of " + std::to_string(n) + " vectors of length " +
                                     std::to_string(n));
        return m;
    }

    QuaternionAlgebra B_;
    IntegerLattice lattice_;
};

/// Gram matrix of (u, v) -> Tr_{F/Q}(trd(f(u, v))) on the standard rational coordinates of B.
template <typename Product>
RationalMatrix ambient_trace_gram(const QuaternionAlgebra& B, Product f) {
    const std::size_t n = B.rational_dim();
    std::vector<QuatElement> e;
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<Rational> v(n, Rational(0));
        v[t] = 1;
        e.push_back(B.from_rational(v));
    }
    RationalMatrix g(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) g(s, t) = trace(f(e[s], e[t]).trd());
    return g;
}

/// Standard pairing (x, y) -> Tr(trd(x y^*)).
inline PairingForm standard_pairing(const QuaternionAlgebra& B) {
    return PairingForm(ambient_trace_gram(B, [](const QuatElement& u, const QuatElement& v) { return u * v.conj(); }));
}

struct DiscriminantResult {
    Integer norm;          ///< Nm_{F/Q}(d_B); equals d_B over Q
    Rational gram_det;     ///< det Tr(trd(b_i b_j))
    Integer field_disc;    ///< d_F
    std::string normalization;
};

/// |det Tr(trd(b_i b_j))| = d_F^4 Nm(d_B)^2 for a maximal order; Nm(d_B) is recovered exactly.
inline DiscriminantResult reduced_discriminant(const QuatOrder& O) {
    auto basis = O.basis();
    const std::size_t n = basis.size();
    RationalMatrix g(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) g(s, t) = trace((basis[s] * basis[t]).trd());
    Rational det = determinant(g);
    Integer dF = O.algebra().field().discriminant();
    Rational dF4 = Rational(dF * dF * dF * dF);
    Rational q = abs(det) / dF4;
    if (!is_integral(q) || !is_perfect_square(q)) throw precondition_error("order data inconsistent");
    return {num(exact_sqrt(q)), det, dF, "Nm(d_B) = sqrt(|det Tr trd(b_i b_j)|) / d_F^2"};
}

/// |det Tr(trd(b_k b_l^*))|, the square of the covolume of sigma(O) in M_2(R)^g.
inline Rational order_covolume_sq(const QuatOrder& O) {
    return abs(determinant(standard_pairing(O.algebra()).restricted(O.lattice())));
}

/// [O^# : O] under the standard pairing.
inline IndexResult dual_index(const QuatOrder& O) {
    IntegerLattice D = dual(O.lattice(), standard_pairing(O.algebra()));
    return index(O.lattice(), D);
}

struct ScaledLattice {
    IntegerLattice lattice;   ///< O_B with the rescaled pairing
    PairingForm pairing;      ///< Tr(lambda trd(a u v^*))
    FractionalIdeal ell;      ///< ideal generated by trd(a u v^*) on basis pairs
    FieldElement lambda;      ///< generator of ell^{-1} codifferent
    IntegerLattice scaled;    ///< ell^{-1} D_F^{-1} O_B
    PairingForm raw_pairing;  ///< Tr(trd(a u v^*))
};

/// Unimodular symplectic structure on O_B built from a pure quaternion a.
/// For F = Q the generator lambda is found automatically; otherwise it must be supplied.
inline ScaledLattice scaled_unimodular_lattice(const QuatOrder& O, const QuatElement& a,
                                               std::optional<FieldElement> lambda = std::nullopt) {
    if (!a.is_pure()) throw precondition_error("a is not a pure quaternion (trd(a) != 0)");
    if (!O.contains(a)) throw precondition_error("a is not in the order");
    const auto& B = O.algebra();
    const auto& F = B.field();
    auto basis = O.basis();

    std::vector<FieldElement> values;
    for (const auto& u : basis)
        for (const auto& v : basis) values.push_back((a * u * v.conj()).trd());
    FractionalIdeal ell = FractionalIdeal::generated_by(F, values);
    FractionalIdeal target = ell.inverse() * codifferent(F);

    if (!lambda) {
        if (F.degree() != 1) throw precondition_error("scaling generator lambda must be supplied for degree > 1");
        lambda = F.from_rational(target.zbasis()[0].rational_value());
    }
    if (!(FractionalIdeal::principal(*lambda) == target))
        throw precondition_error("lambda does not generate ell^-1 D_F^-1");

    const FieldElement lam = *lambda;
    RationalMatrix raw = ambient_trace_gram(B, [&](const QuatElement& u, const QuatElement& v) { return a * u * v.conj(); });
    RationalMatrix scaled_gram =
        ambient_trace_gram(B, [&](const QuatElement& u, const QuatElement& v) { return lam * (a * u * v.conj()); });

    std::vector<std::vector<Rational>> gens;
    for (const auto& c : target.zbasis())
        for (const auto& b : basis) gens.push_back((c * b).rational_coords());
    IntegerLattice scaled = IntegerLattice::from_generators(RationalMatrix::from_rows(gens));

    return {O.lattice(),
            PairingForm(scaled_gram, Symmetry::alternating),
            ell,
            lam,
            scaled,
            PairingForm(raw, Symmetry::alternating)};
}

}  // namespace ksv
