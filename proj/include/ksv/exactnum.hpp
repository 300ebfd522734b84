#pragma once

#include "ksv/matrix.hpp"
#include "ksv/rational.hpp"
#include "ksv/zlattice.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ksv {

namespace detail {

using Poly = std::vector<Rational>;  // ascending coefficients

inline void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Rational eval(const Poly& p, const Rational& x) {
    Rational acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long>(i)));
    trim(d);
    return d;
}

/// Remainder of a by b (b nonzero).
inline Poly poly_rem(Poly a, const Poly& b) {
    trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Rational f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

inline int sign(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

class SturmChain {
  public:
    explicit SturmChain(const Poly& p) {
        chain_.push_back(p);
        chain_.push_back(derivative(p));
        while (!chain_.back().empty()) {
            Poly r = poly_rem(chain_[chain_.size() - 2], chain_.back());
            for (auto& c : r) c = -c;
            if (r.empty()) break;
            chain_.push_back(r);
        }
        if (chain_.back().empty()) chain_.pop_back();
    }

    int variations(const Rational& x) const {
        int count = 0, last = 0;
        for (const auto& q : chain_) {
            int s = sign(eval(q, x));
            if (s == 0) continue;
            if (last != 0 && s != last) ++count;
            last = s;
        }
        return count;
    }

    /// Distinct roots in (a, b], valid when a is not a root.
    int roots_in(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }

  private:
    std::vector<Poly> chain_;
};

struct FieldData {
    std::vector<Integer> min_poly;
    Poly poly;
    RationalMatrix integral_basis;
    RationalMatrix integral_basis_inv;
    std::vector<Real> roots;
    RationalMatrix trace_gram;
};

inline std::vector<Real> isolate_real_roots(const Poly& p, std::size_t degree) {
    SturmChain sturm(p);
    Rational bound = 1;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) bound = std::max(bound, Rational(1) + abs(p[i] / p.back()));
    Rational lo = -bound, hi = bound;
    if (eval(p, lo) == 0) lo -= 1;
    const int total = sturm.roots_in(lo, hi);
    if (total != static_cast<int>(degree))
        throw precondition_error("minimal polynomial must have " + std::to_string(degree) +
                                 " distinct real roots (found " + std::to_string(total) + ")");

    std::vector<std::pair<Rational, Rational>> intervals;
    std::vector<std::pair<Rational, Rational>> work{{lo, hi}};
    while (!work.empty()) {
        auto [a, b] = work.back();
        work.pop_back();
        int n = sturm.roots_in(a, b);
        if (n == 0) continue;
        if (n == 1) {
            intervals.emplace_back(a, b);
            continue;
        }
        Rational m = (a + b) / 2;
        while (eval(p, m) == 0) m = (m + b) / 2;
        work.emplace_back(a, m);
        work.emplace_back(m, b);
    }

    const Rational width = Rational(Integer(1), boost::multiprecision::pow(Integer(10), kMaxDigits + 12));
    std::vector<Real> roots;
    for (auto [a, b] : intervals) {
        Rational root;
        bool exact = false;
        if (eval(p, b) == 0) {
            root = b;
            exact = true;
        }
        int sa = sign(eval(p, a));
        while (!exact && b - a > width) {
            Rational m = (a + b) / 2;
            int sm = sign(eval(p, m));
            if (sm == 0) {
                root = m;
                exact = true;
            } else if (sm == sa) {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push_back(exact ? to_real(root) : to_real((a + b) / 2));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace detail

class FieldElement;

/// Totally real number field Q[x]/(min_poly) with a fixture-supplied integral basis.
class TotallyRealField {
  public:
    /// min_poly is monic with ascending coefficients; integral_basis rows give O_F in power-basis coordinates.
    TotallyRealField(std::vector<Integer> min_poly, RationalMatrix integral_basis) {
        if (min_poly.size() < 2) throw precondition_error("minimal polynomial must have degree >= 1");
        if (min_poly.back() != 1) throw precondition_error("minimal polynomial must be monic");
        const std::size_t g = min_poly.size() - 1;
        if (integral_basis.rows() != g || integral_basis.cols() != g)
            throw precondition_error("integral basis must be a " + std::to_string(g) + "x" + std::to_string(g) + " matrix");
        if (determinant(integral_basis) == 0) throw precondition_error("integral basis matrix is singular");

        auto d = std::make_shared<detail::FieldData>();
        d->min_poly = std::move(min_poly);
        for (const auto& c : d->min_poly) d->poly.push_back(Rational(c));
        d->integral_basis = std::move(integral_basis);
        d->integral_basis_inv = inverse(d->integral_basis);
        d->roots = detail::isolate_real_roots(d->poly, g);
        data_ = d;
        d->trace_gram = compute_trace_gram();
    }

    /// The rational field Q = Q[x]/(x).
    static TotallyRealField rationals() { return TotallyRealField({0, 1}, RationalMatrix::identity(1)); }

    std::size_t degree() const { return data_->min_poly.size() - 1; }
    const std::vector<Integer>& min_poly() const { return data_->min_poly; }
    const RationalMatrix& integral_basis() const { return data_->integral_basis; }
    /// Real roots of min_poly, ascending: place i is the embedding theta -> roots()[i].
    const std::vector<Real>& roots() const { return data_->roots; }

    /// Tr(w_k w_l) for the integral basis.
    const RationalMatrix& trace_gram() const { return data_->trace_gram; }
    Integer discriminant() const { return num(abs(determinant(trace_gram()))); }

    FieldElement element(std::vector<Rational> coords) const;
    FieldElement from_rational(const Rational& q) const;
    FieldElement from_power_basis(const std::vector<Rational>& p) const;
    FieldElement basis_element(std::size_t k) const;
    FieldElement zero() const;
    FieldElement one() const;

    friend bool operator==(const TotallyRealField& a, const TotallyRealField& b) {
        return a.data_ == b.data_ ||
               (a.data_->min_poly == b.data_->min_poly && a.data_->integral_basis == b.data_->integral_basis);
    }

    const detail::FieldData& data() const { return *data_; }

  private:
    RationalMatrix compute_trace_gram() const;

    std::shared_ptr<const detail::FieldData> data_;
};

/// Element of F stored by rational coordinates on the integral basis.
class FieldElement {
  public:
    FieldElement(TotallyRealField field, std::vector<Rational> coords)
        : field_(std::move(field)), coords_(std::move(coords)) {
        if (coords_.size() != field_.degree()) throw precondition_error("field element has the wrong number of coordinates");
    }

    const TotallyRealField& field() const { return field_; }
    const std::vector<Rational>& coords() const { return coords_; }

    std::vector<Rational> power_coords() const { return field_.integral_basis().left_apply(coords_); }

    bool is_zero() const {
        for (const auto& c : coords_)
            if (c != 0) return false;
        return true;
    }
    bool is_rational() const {
        auto p = power_coords();
        for (std::size_t i = 1; i < p.size(); ++i)
            if (p[i] != 0) return false;
        return true;
    }
    Rational rational_value() const {
        if (!is_rational()) throw precondition_error("field element is not rational");
        return power_coords()[0];
    }
    bool is_integral() const {
        for (const auto& c : coords_)
            if (!ksv::is_integral(c)) return false;
        return true;
    }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        std::vector<Rational> c(a.coords_);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.coords_[i];
        return {a.field_, std::move(c)};
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        std::vector<Rational> c(a.coords_);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.coords_[i];
        return {a.field_, std::move(c)};
    }
    friend FieldElement operator-(const FieldElement& a) {
        std::vector<Rational> c(a.coords_);
        for (auto& x : c) x = -x;
        return {a.field_, std::move(c)};
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        const auto& d = a.field_.data();
        auto pa = a.power_coords();
        auto pb = b.power_coords();
        detail::Poly prod(pa.size() + pb.size() - 1, Rational(0));
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (pa[i] == 0) continue;
            for (std::size_t j = 0; j < pb.size(); ++j) prod[i + j] += pa[i] * pb[j];
        }
        auto rem = detail::poly_rem(prod, d.poly);
        rem.resize(a.field_.degree(), Rational(0));
        return a.field_.from_power_basis(rem);
    }
    friend FieldElement operator*(const Rational& s, const FieldElement& a) {
        std::vector<Rational> c(a.coords_);
        for (auto& x : c) x *= s;
        return {a.field_, std::move(c)};
    }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inverse(); }
    friend bool operator==(const FieldElement& a, const FieldElement& b) { return a.coords_ == b.coords_; }

    /// Rows: coordinates of x * w_k, so coords(x * y) = coords(y) * M.
    RationalMatrix multiplication_matrix() const {
        const std::size_t g = field_.degree();
        RationalMatrix m(g, g);
        for (std::size_t k = 0; k < g; ++k) m.set_row(k, (*this * field_.basis_element(k)).coords());
        return m;
    }

    FieldElement inverse() const {
        if (is_zero()) throw precondition_error("inverse of zero field element");
        auto inv = ksv::inverse(multiplication_matrix());
        return {field_, inv.left_apply(field_.one().coords())};
    }

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < coords_.size(); ++i) s += (i ? ", " : "") + to_string(coords_[i]);
        return s + "]";
    }

  private:
    TotallyRealField field_;
    std::vector<Rational> coords_;
};

inline FieldElement TotallyRealField::element(std::vector<Rational> coords) const { return {*this, std::move(coords)}; }

inline FieldElement TotallyRealField::from_power_basis(const std::vector<Rational>& p) const {
    return {*this, data_->integral_basis_inv.left_apply(p)};
}

inline FieldElement TotallyRealField::from_rational(const Rational& q) const {
    std::vector<Rational> p(degree(), Rational(0));
    p[0] = q;
    return from_power_basis(p);
}

inline FieldElement TotallyRealField::basis_element(std::size_t k) const {
    std::vector<Rational> c(degree(), Rational(0));
    c.at(k) = 1;
    return {*this, std::move(c)};
}

inline FieldElement TotallyRealField::zero() const { return {*this, std::vector<Rational>(degree(), Rational(0))}; }
inline FieldElement TotallyRealField::one() const { return from_rational(1); }

inline RationalMatrix TotallyRealField::compute_trace_gram() const {
    const std::size_t g = degree();
    RationalMatrix t(g, g);
    for (std::size_t k = 0; k < g; ++k)
        for (std::size_t l = 0; l < g; ++l) {
            auto m = (basis_element(k) * basis_element(l)).multiplication_matrix();
            Rational tr = 0;
            for (std::size_t i = 0; i < g; ++i) tr += m(i, i);
            t(k, l) = tr;
        }
    return t;
}

/// (Tr_{F/Q}(x), Nm_{F/Q}(x)) from the multiplication matrix.
inline std::pair<Rational, Rational> trace_norm(const FieldElement& x) {
    auto m = x.multiplication_matrix();
    Rational tr = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) tr += m(i, i);
    return {tr, determinant(m)};
}

inline Rational trace(const FieldElement& x) { return trace_norm(x).first; }
inline Rational norm(const FieldElement& x) { return trace_norm(x).second; }

/// sigma_place(x) with absolute error below 10^-digits; places are 0-based, ascending roots.
inline Real embed(const FieldElement& x, std::size_t place, int digits = kDefaultDigits) {
    const auto& F = x.field();
    if (place >= F.degree())
        throw precondition_error("place " + std::to_string(place) + " out of range for a degree " +
                                 std::to_string(F.degree()) + " field");
    if (digits > kMaxDigits || digits < 1)
        throw precondition_error("precision request of " + std::to_string(digits) + " digits exceeds the maximum of " +
                                 std::to_string(kMaxDigits));
    auto p = x.power_coords();
    const Real& root = F.roots()[place];
    Real acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * root + to_real(p[i]);
    return acc;
}

inline double embed_double(const FieldElement& x, std::size_t place) {
    return static_cast<double>(embed(x, place, kDefaultDigits));
}

/// Sign of sigma_place(x), decided at full internal precision.
inline int embedded_sign(const FieldElement& x, std::size_t place) {
    if (x.is_zero()) return 0;
    Real v = embed(x, place, kMaxDigits);
    const Real eps = boost::multiprecision::pow(Real(10), -kMaxDigits + 5);
    if (boost::multiprecision::abs(v) < eps) throw precondition_error("embedding too close to zero to decide its sign");
    return v > 0 ? 1 : -1;
}

inline bool totally_positive(const FieldElement& x) {
    for (std::size_t i = 0; i < x.field().degree(); ++i)
        if (embedded_sign(x, i) <= 0) return false;
    return true;
}

inline bool totally_negative(const FieldElement& x) { return totally_positive(-x); }

/// Full-rank O_F-submodule of F, stored as a Z-basis (rows in integral-basis coordinates).
class FractionalIdeal {
  public:
    FractionalIdeal(TotallyRealField field, const RationalMatrix& generators)
        : field_(std::move(field)), lattice_(IntegerLattice::from_generators(generators)) {
        if (lattice_.dim() != field_.degree()) throw precondition_error("ideal basis has the wrong dimension");
        for (std::size_t i = 0; i < lattice_.dim(); ++i) {
            FieldElement b = field_.element(lattice_.basis().row(i));
            for (std::size_t k = 0; k < field_.degree(); ++k)
                if (!contains(b * field_.basis_element(k)))
                    throw precondition_error("Z-lattice is not stable under multiplication by O_F");
        }
    }

    static FractionalIdeal unit(const TotallyRealField& F) { return {F, RationalMatrix::identity(F.degree())}; }

    /// O_F-ideal generated by the given elements.
    static FractionalIdeal generated_by(const TotallyRealField& F, const std::vector<FieldElement>& gens) {
        std::vector<std::vector<Rational>> rows;
        for (const auto& x : gens) {
            if (x.is_zero()) continue;
            for (std::size_t k = 0; k < F.degree(); ++k) rows.push_back((x * F.basis_element(k)).coords());
        }
        if (rows.empty()) throw precondition_error("the zero ideal is not a fractional ideal");
        return {F, RationalMatrix::from_rows(rows)};
    }

    static FractionalIdeal principal(const FieldElement& x) { return generated_by(x.field(), {x}); }

    const TotallyRealField& field() const { return field_; }
    const IntegerLattice& lattice() const { return lattice_; }
    RationalMatrix hnf() const { return lattice_.hnf(); }

    std::vector<FieldElement> zbasis() const {
        std::vector<FieldElement> out;
        for (std::size_t i = 0; i < lattice_.dim(); ++i) out.push_back(field_.element(lattice_.basis().row(i)));
        return out;
    }

    bool contains(const FieldElement& x) const { return lattice_.contains(x.coords()); }

    /// Absolute norm [O_F : I] (or its inverse for denominators).
    Rational norm() const { return covolume(lattice_); }

    friend FractionalIdeal operator*(const FractionalIdeal& a, const FractionalIdeal& b) {
        std::vector<std::vector<Rational>> rows;
        for (const auto& x : a.zbasis())
            for (const auto& y : b.zbasis()) rows.push_back((x * y).coords());
        return {a.field_, RationalMatrix::from_rows(rows)};
    }

    /// {x : x I in O_F}, solved as an exact membership problem.
    FractionalIdeal inverse() const {
        const std::size_t g = field_.degree();
        // x * b_k has coordinates coords(x) * M_{b_k}; stack the columns of all M_{b_k}.
        std::vector<std::vector<Rational>> cols;
        for (const auto& b : zbasis()) {
            auto m = b.multiplication_matrix();
            for (std::size_t j = 0; j < g; ++j) {
                std::vector<Rational> c(g);
                for (std::size_t i = 0; i < g; ++i) c[i] = m(i, j);
                cols.push_back(std::move(c));
            }
        }
        IntegerLattice column_lattice = IntegerLattice::from_generators(RationalMatrix::from_rows(cols));
        return {field_, dual(column_lattice, PairingForm::dot(g)).basis()};
    }

    friend bool operator==(const FractionalIdeal& a, const FractionalIdeal& b) { return a.hnf() == b.hnf(); }

  private:
    TotallyRealField field_;
    IntegerLattice lattice_;
};

/// Dual of O_F under the trace form.
inline FractionalIdeal codifferent(const TotallyRealField& F) {
    IntegerLattice OF(RationalMatrix::identity(F.degree()));
    return {F, dual(OF, PairingForm(F.trace_gram())).basis()};
}

}  // namespace ksv
