#pragma once

#include "ksv/matrix.hpp"
#include "ksv/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ksv {

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

/// Row-style Hermite normal form: U * M = H with U unimodular.
///
/// The first `rank` rows of H are the nonzero rows, ordered by pivot column
/// ascending. A row whose pivot sits in column c is zero right of c, the pivot
/// is positive, and entries of later rows in column c lie in [0, pivot). For a
/// full-rank square lattice basis this is the unique lower-triangular form.
struct HermiteForm {
    IntegerMatrix H;
    IntegerMatrix U;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;
};

/// U * M * V = D, D diagonal with d_1 | d_2 | ... and nonnegative entries.
struct SmithForm {
    IntegerMatrix D;
    IntegerMatrix U;
    IntegerMatrix V;

    std::vector<Integer> divisors() const {
        std::vector<Integer> d;
        for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i)
            if (D(i, i) != 0) d.push_back(D(i, i));
        return d;
    }
};

namespace detail {

inline void row_axpy(IntegerMatrix& m, std::size_t dst, const Integer& q, std::size_t src) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) -= q * m(src, j);
}

inline void col_axpy(IntegerMatrix& m, std::size_t dst, const Integer& q, std::size_t src) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) -= q * m(i, src);
}

inline void negate_row(IntegerMatrix& m, std::size_t r) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = -m(r, j);
}

inline Integer iabs(const Integer& x) { return x < 0 ? Integer(-x) : x; }

}  // namespace detail

inline HermiteForm hermite_form(const IntegerMatrix& M) {
    const std::size_t m = M.rows(), n = M.cols();
    IntegerMatrix A = M;
    IntegerMatrix U = IntegerMatrix::identity(m);
    std::vector<std::size_t> active(m);
    for (std::size_t i = 0; i < m; ++i) active[i] = i;
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (column, row)

    for (std::size_t cc = n; cc-- > 0;) {
        std::optional<std::size_t> pivot;
        while (true) {
            std::optional<std::size_t> best;
            std::size_t nonzero = 0;
            for (std::size_t r : active) {
                if (A(r, cc) == 0) continue;
                ++nonzero;
                if (!best || detail::iabs(A(r, cc)) < detail::iabs(A(*best, cc))) best = r;
            }
            if (!best) break;
            if (nonzero == 1) {
                pivot = best;
                break;
            }
            for (std::size_t r : active) {
                if (r == *best || A(r, cc) == 0) continue;
                Integer q = A(r, cc) / A(*best, cc);
                detail::row_axpy(A, r, q, *best);
                detail::row_axpy(U, r, q, *best);
            }
        }
        if (!pivot) continue;
        if (A(*pivot, cc) < 0) {
            detail::negate_row(A, *pivot);
            detail::negate_row(U, *pivot);
        }
        active.erase(std::find(active.begin(), active.end(), *pivot));
        pivots.emplace_back(cc, *pivot);
    }
    std::sort(pivots.begin(), pivots.end());

    for (std::size_t a = 1; a < pivots.size(); ++a) {
        const std::size_t ra = pivots[a].second;
        for (std::size_t b = a; b-- > 0;) {
            const auto [cb, rb] = pivots[b];
            Integer q = floor_div(A(ra, cb), A(rb, cb));
            if (q == 0) continue;
            detail::row_axpy(A, ra, q, rb);
            detail::row_axpy(U, ra, q, rb);
        }
    }

    HermiteForm out;
    out.rank = pivots.size();
    out.H = IntegerMatrix(m, n);
    out.U = IntegerMatrix(m, m);
    std::size_t k = 0;
    for (const auto& [c, r] : pivots) {
        out.pivot_cols.push_back(c);
        out.H.set_row(k, A.row(r));
        out.U.set_row(k, U.row(r));
        ++k;
    }
    for (std::size_t r : active) {
        out.H.set_row(k, A.row(r));
        out.U.set_row(k, U.row(r));
        ++k;
    }
    return out;
}

inline SmithForm smith_form(const IntegerMatrix& M) {
    const std::size_t m = M.rows(), n = M.cols();
    IntegerMatrix A = M;
    IntegerMatrix U = IntegerMatrix::identity(m);
    IntegerMatrix V = IntegerMatrix::identity(n);

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        // smallest nonzero entry of the trailing block goes to (t, t)
        std::optional<std::pair<std::size_t, std::size_t>> best;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (A(i, j) != 0 && (!best || detail::iabs(A(i, j)) < detail::iabs(A(best->first, best->second))))
                    best = std::make_pair(i, j);
        if (!best) break;
        A.swap_rows(t, best->first);
        U.swap_rows(t, best->first);
        A.swap_cols(t, best->second);
        V.swap_cols(t, best->second);

        while (true) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (A(i, t) == 0) continue;
                Integer q = A(i, t) / A(t, t);
                detail::row_axpy(A, i, q, t);
                detail::row_axpy(U, i, q, t);
                if (A(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (A(t, j) == 0) continue;
                Integer q = A(t, j) / A(t, t);
                detail::col_axpy(A, j, q, t);
                detail::col_axpy(V, j, q, t);
                if (A(t, j) != 0) clean = false;
            }
            if (!clean) {
                // a nonzero remainder is smaller than the pivot; bring it in
                std::size_t bi = t, bj = t;
                for (std::size_t i = t + 1; i < m; ++i)
                    if (A(i, t) != 0 && detail::iabs(A(i, t)) < detail::iabs(A(bi, bj))) bi = i, bj = t;
                for (std::size_t j = t + 1; j < n; ++j)
                    if (A(t, j) != 0 && detail::iabs(A(t, j)) < detail::iabs(A(bi, bj))) bi = t, bj = j;
                A.swap_rows(t, bi);
                U.swap_rows(t, bi);
                A.swap_cols(t, bj);
                V.swap_cols(t, bj);
                continue;
            }
            std::optional<std::size_t> offender;
            for (std::size_t i = t + 1; i < m && !offender; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (A(i, j) % A(t, t) != 0) {
                        offender = i;
                        break;
                    }
            if (!offender) break;
            detail::row_axpy(A, t, Integer(-1), *offender);
            detail::row_axpy(U, t, Integer(-1), *offender);
        }
        if (A(t, t) < 0) {
            detail::negate_row(A, t);
            detail::negate_row(U, t);
        }
    }
    return {A, U, V};
}

// ---------------------------------------------------------------------------
// Exact lattices
// ---------------------------------------------------------------------------

/// Full-rank Z-lattice in Q^n; rows of `basis` are the basis vectors.
class IntegerLattice {
  public:
    explicit IntegerLattice(RationalMatrix basis) : basis_(std::move(basis)) {
        if (!basis_.square() || basis_.rows() == 0) throw precondition_error("lattice basis must be square and nonempty");
        if (determinant(basis_) == 0) throw precondition_error("lattice basis is rank-deficient");
    }

    /// Z-span of an arbitrary generating set of full rank.
    static IntegerLattice from_generators(const RationalMatrix& gens) {
        Integer d = common_denominator(gens);
        IntegerMatrix scaled(gens.rows(), gens.cols());
        for (std::size_t i = 0; i < gens.rows(); ++i)
            for (std::size_t j = 0; j < gens.cols(); ++j) scaled(i, j) = num(gens(i, j) * d);
        HermiteForm hf = hermite_form(scaled);
        if (hf.rank != gens.cols()) throw precondition_error("generators do not span a full-rank lattice");
        RationalMatrix b(gens.cols(), gens.cols());
        for (std::size_t i = 0; i < gens.cols(); ++i)
            for (std::size_t j = 0; j < gens.cols(); ++j) b(i, j) = Rational(hf.H(i, j), d);
        return IntegerLattice(std::move(b));
    }

    const RationalMatrix& basis() const { return basis_; }
    std::size_t dim() const { return basis_.rows(); }

    /// Canonical rational HNF (lower-triangular rows).
    RationalMatrix hnf() const { return from_generators(basis_).basis_; }

    /// Coordinates c with c * basis = v.
    std::vector<Rational> coordinates(const std::vector<Rational>& v) const {
        return inverse_basis().left_apply(v);
    }

    bool contains(const std::vector<Rational>& v) const {
        for (const auto& c : coordinates(v))
            if (!is_integral(c)) return false;
        return true;
    }

    friend bool operator==(const IntegerLattice& a, const IntegerLattice& b) { return a.hnf() == b.hnf(); }

  private:
    const RationalMatrix& inverse_basis() const {
        if (!inverse_) inverse_ = inverse(basis_);
        return *inverse_;
    }

    RationalMatrix basis_;
    mutable std::optional<RationalMatrix> inverse_;
};

enum class Symmetry { symmetric, alternating, general };

/// Bilinear form P(x, y) = x * gram * y^T on the ambient space.
class PairingForm {
  public:
    explicit PairingForm(RationalMatrix gram) : gram_(std::move(gram)) {
        if (!gram_.square()) throw precondition_error("pairing Gram matrix must be square");
        symmetry_ = detect(gram_);
    }
    PairingForm(RationalMatrix gram, Symmetry declared) : PairingForm(std::move(gram)) {
        if (declared != Symmetry::general && declared != symmetry_)
            throw precondition_error("pairing does not have the declared symmetry type");
    }

    static PairingForm dot(std::size_t n) { return PairingForm(RationalMatrix::identity(n)); }

    const RationalMatrix& gram() const { return gram_; }
    Symmetry symmetry() const { return symmetry_; }
    bool nondegenerate() const { return determinant(gram_) != 0; }

    Rational operator()(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
        auto xg = gram_.left_apply(x);
        Rational s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += xg[i] * y[i];
        return s;
    }

    /// Gram matrix of the form restricted to a lattice basis.
    RationalMatrix restricted(const IntegerLattice& L) const { return L.basis() * gram_ * L.basis().transpose(); }

  private:
    static Symmetry detect(const RationalMatrix& g) {
        bool sym = true, alt = true;
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) {
                if (g(i, j) != g(j, i)) sym = false;
                if (g(i, j) != -g(j, i)) alt = false;
            }
        if (alt) return Symmetry::alternating;
        if (sym) return Symmetry::symmetric;
        return Symmetry::general;
    }

    RationalMatrix gram_;
    Symmetry symmetry_;
};

inline Rational covolume(const IntegerLattice& L) { return abs(determinant(L.basis())); }

/// {x : P(x, l) in Z for all l in L}, with basis (gram * basis^T)^{-1}.
inline IntegerLattice dual(const IntegerLattice& L, const PairingForm& P) {
    if (P.gram().rows() != L.dim()) throw precondition_error("pairing and lattice dimensions differ");
    if (!P.nondegenerate()) throw precondition_error("degenerate pairing has no dual lattice");
    return IntegerLattice(inverse(P.gram() * L.basis().transpose()));
}

struct IndexResult {
    Integer index;
    std::vector<Integer> elementary_divisors;
};

/// [sup : sub], computed by determinant ratio and cross-checked by Smith normal form.
inline IndexResult index(const IntegerLattice& sub, const IntegerLattice& sup) {
    if (sub.dim() != sup.dim()) throw precondition_error("lattices live in different dimensions");
    RationalMatrix change = sub.basis() * inverse(sup.basis());
    for (std::size_t i = 0; i < change.rows(); ++i)
        for (std::size_t j = 0; j < change.cols(); ++j)
            if (!is_integral(change(i, j))) {
                std::string v;
                for (const auto& x : sub.basis().row(i)) v += (v.empty() ? "" : ", ") + to_string(x);
                throw precondition_error("sublattice vector (" + v + ") is not in the superlattice");
            }
    IntegerMatrix c = to_integer(change);
    Rational ratio = covolume(sub) / covolume(sup);
    SmithForm snf = smith_form(c);
    Integer product = 1;
    for (const auto& d : snf.divisors()) product *= d;
    if (snf.divisors().size() != c.rows() || Rational(product) != ratio)
        throw std::logic_error("index mismatch between determinant ratio and Smith normal form");
    return {product, snf.divisors()};
}

// ---------------------------------------------------------------------------
// Real lattices (embedded period lattices)
// ---------------------------------------------------------------------------

inline constexpr double kDefaultRelativeTolerance = 1e-10;

/// Full-rank lattice in R^n with double basis rows; comparisons are tolerance-based.
class RealLattice {
  public:
    explicit RealLattice(Eigen::MatrixXd basis, double rel_tol = kDefaultRelativeTolerance)
        : basis_(std::move(basis)), rel_tol_(rel_tol) {
        if (basis_.rows() != basis_.cols() || basis_.rows() == 0)
            throw precondition_error("real lattice basis must be square and nonempty");
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_);
        lu.setThreshold(1e-13);
        if (lu.rank() < basis_.rows()) throw precondition_error("real lattice basis is numerically rank-deficient");
    }

    const Eigen::MatrixXd& basis() const { return basis_; }
    double tolerance() const { return rel_tol_; }
    Eigen::Index dim() const { return basis_.rows(); }

    /// c with c * basis = v.
    Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const {
        return basis_.transpose().fullPivLu().solve(v);
    }

  private:
    Eigen::MatrixXd basis_;
    double rel_tol_;
};

inline double covolume(const RealLattice& L) { return std::abs(L.basis().fullPivLu().determinant()); }

inline double relative_residual(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

}  // namespace ksv
