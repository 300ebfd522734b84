#pragma once

#include "ksv/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ksv {

/// Z/p^k (degree 1) or W = (Z/p^k)[u]/(u^2 - c) with c a non-residue mod p (degree 2).
/// Both are chain rings with uniformizer p.
class LocalRing {
  public:
    static LocalRing integers(std::int64_t p, int k) { return LocalRing(p, k, 1); }
    static LocalRing unramified(std::int64_t p, int k) { return LocalRing(p, k, 2); }

    std::int64_t p() const { return p_; }
    int k() const { return k_; }
    int degree() const { return degree_; }
    std::int64_t modulus() const { return mod_; }
    /// u^2 = c; 0 for Z/p^k.
    std::int64_t c() const { return c_; }
    /// Size of the residue field.
    std::int64_t residue_size() const { return degree_ == 1 ? p_ : p_ * p_; }

    friend bool operator==(const LocalRing& a, const LocalRing& b) {
        return a.p_ == b.p_ && a.k_ == b.k_ && a.degree_ == b.degree_;
    }

    std::int64_t reduce(std::int64_t v) const {
        v %= mod_;
        return v < 0 ? v + mod_ : v;
    }
    std::int64_t mulmod(std::int64_t a, std::int64_t b) const { return reduce(a * b); }

  private:
    LocalRing(std::int64_t p, int k, int degree) : p_(p), k_(k), degree_(degree) {
        if (p < 3) throw precondition_error("p must be an odd prime");
        for (std::int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) throw precondition_error(std::to_string(p) + " is not prime");
        if (k < 1) throw precondition_error("truncation level k must be >= 1");
        mod_ = 1;
        for (int t = 0; t < k; ++t) {
            if (mod_ > (std::int64_t(1) << 28) / p) throw precondition_error("p^k too large for exact int64 arithmetic");
            mod_ *= p;
        }
        if (degree == 2) {
            for (std::int64_t c = 2; c < p; ++c)
                if (!is_square_mod_p(c)) {
                    c_ = c;
                    break;
                }
            // u^2 - c irreducible mod p: no root in F_p
            for (std::int64_t r = 0; r < p; ++r)
                if ((r * r - c_) % p == 0) throw std::logic_error("u^2 - c has a root mod p");
        }
    }

    bool is_square_mod_p(std::int64_t c) const {
        for (std::int64_t r = 0; r < p_; ++r)
            if ((r * r) % p_ == c % p_) return true;
        return false;
    }

    std::int64_t p_;
    int k_;
    int degree_;
    std::int64_t mod_ = 1;
    std::int64_t c_ = 0;
};

/// a0 + a1 u.
class LocalElement {
  public:
    LocalElement(const LocalRing& R, std::int64_t a0 = 0, std::int64_t a1 = 0)
        : R_(std::make_shared<const LocalRing>(R)), a0_(R.reduce(a0)), a1_(R.degree() == 2 ? R.reduce(a1) : 0) {
        if (R.degree() == 1 && R.reduce(a1) != 0) throw precondition_error("Z/p^k has no u coordinate");
    }

    const LocalRing& ring() const { return *R_; }
    std::int64_t a0() const { return a0_; }
    std::int64_t a1() const { return a1_; }
    bool is_zero() const { return a0_ == 0 && a1_ == 0; }

    /// p-adic valuation; k for zero.
    int valuation() const {
        const auto p = R_->p();
        int v = 0;
        std::int64_t x = a0_, y = a1_;
        while (v < R_->k() && x % p == 0 && y % p == 0) {
            x /= p;
            y /= p;
            ++v;
        }
        return v;
    }
    bool is_unit() const { return valuation() == 0; }

    LocalElement conj() const { return {*R_, a0_, -a1_}; }
    /// x conj(x) in Z/p^k.
    std::int64_t norm() const { return R_->reduce(R_->mulmod(a0_, a0_) - R_->mulmod(R_->c(), R_->mulmod(a1_, a1_))); }

    LocalElement inverse() const {
        if (!is_unit()) throw precondition_error("element is not a unit");
        std::int64_t n = norm();
        std::int64_t ninv = inverse_mod(n, R_->modulus());
        return {*R_, R_->mulmod(a0_, ninv), R_->mulmod(-a1_, ninv)};
    }

    /// x / p^v; requires valuation >= v.
    LocalElement shift_down(int v) const {
        if (valuation() < v) throw precondition_error("not divisible by the requested power of p");
        std::int64_t d = 1;
        for (int t = 0; t < v; ++t) d *= R_->p();
        return {*R_, a0_ / d, a1_ / d};
    }

    friend LocalElement operator+(const LocalElement& a, const LocalElement& b) {
        return {a.ring(), a.a0_ + b.a0_, a.a1_ + b.a1_};
    }
    friend LocalElement operator-(const LocalElement& a, const LocalElement& b) {
        return {a.ring(), a.a0_ - b.a0_, a.a1_ - b.a1_};
    }
    friend LocalElement operator-(const LocalElement& a) { return {a.ring(), -a.a0_, -a.a1_}; }
    friend LocalElement operator*(const LocalElement& a, const LocalElement& b) {
        const auto& R = a.ring();
        return {R, R.mulmod(a.a0_, b.a0_) + R.mulmod(R.c(), R.mulmod(a.a1_, b.a1_)),
                R.mulmod(a.a0_, b.a1_) + R.mulmod(a.a1_, b.a0_)};
    }
    friend bool operator==(const LocalElement& a, const LocalElement& b) { return a.a0_ == b.a0_ && a.a1_ == b.a1_; }
    friend bool operator!=(const LocalElement& a, const LocalElement& b) { return !(a == b); }

    std::string str() const {
        if (R_->degree() == 1) return std::to_string(a0_);
        return std::to_string(a0_) + "+" + std::to_string(a1_) + "u";
    }

  private:
    static std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
        std::int64_t g = m, x = 0, x1 = 1, a1 = a;
        while (a1 != 0) {
            std::int64_t q = g / a1;
            std::tie(g, a1) = std::make_pair(a1, g - q * a1);
            std::tie(x, x1) = std::make_pair(x1, x - q * x1);
        }
        if (g != 1) throw precondition_error("not invertible mod p^k");
        return ((x % m) + m) % m;
    }

    std::shared_ptr<const LocalRing> R_;
    std::int64_t a0_, a1_;
};

using LocalVector = std::vector<LocalElement>;
using LocalMatrix = std::vector<LocalVector>;

inline LocalElement uniformizer(const LocalRing& R) { return {R, R.p()}; }

inline LocalMatrix local_zero(const LocalRing& R, std::size_t m, std::size_t n) {
    return LocalMatrix(m, LocalVector(n, LocalElement(R)));
}

inline LocalMatrix local_identity(const LocalRing& R, std::size_t n) {
    auto I = local_zero(R, n, n);
    for (std::size_t i = 0; i < n; ++i) I[i][i] = LocalElement(R, 1);
    return I;
}

inline LocalMatrix local_mul(const LocalMatrix& A, const LocalMatrix& B) {
    const LocalRing& R = A.front().front().ring();
    auto C = local_zero(R, A.size(), B.front().size());
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t t = 0; t < B.size(); ++t)
            for (std::size_t j = 0; j < B.front().size(); ++j) C[i][j] = C[i][j] + A[i][t] * B[t][j];
    return C;
}

inline LocalMatrix diag2(const LocalElement& a, const LocalElement& b) {
    auto D = local_zero(a.ring(), 2, 2);
    D[0][0] = a;
    D[1][1] = b;
    return D;
}

/// U A V = D over a chain ring: D diagonal with entries p^v (or 0), valuations nondecreasing.
struct LocalSmith {
    LocalMatrix U, V, D;
    std::vector<int> valuations;  ///< one per diagonal slot, k for zero
};

inline LocalSmith local_smith(LocalMatrix A) {
    if (A.empty() || A.front().empty()) throw precondition_error("empty matrix");
    const LocalRing& R = A.front().front().ring();
    const std::size_t m = A.size(), n = A.front().size();
    LocalSmith s{local_identity(R, m), local_identity(R, n), {}, {}};
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        int best = R.k();
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (int v = A[i][j].valuation(); v < best) best = v, bi = i, bj = j;
        if (best == R.k()) {
            for (std::size_t r = t; r < std::min(m, n); ++r) s.valuations.push_back(R.k());
            break;
        }
        std::swap(A[t], A[bi]);
        std::swap(s.U[t], s.U[bi]);
        for (std::size_t i = 0; i < m; ++i) std::swap(A[i][t], A[i][bj]);
        for (std::size_t i = 0; i < n; ++i) std::swap(s.V[i][t], s.V[i][bj]);
        LocalElement unit_inv = A[t][t].shift_down(best).inverse();
        for (auto& x : A[t]) x = x * unit_inv;
        for (auto& x : s.U[t]) x = x * unit_inv;
        for (std::size_t i = t + 1; i < m; ++i) {
            LocalElement f = A[i][t].shift_down(best);
            for (std::size_t j = 0; j < n; ++j) A[i][j] = A[i][j] - f * A[t][j];
            for (std::size_t j = 0; j < m; ++j) s.U[i][j] = s.U[i][j] - f * s.U[t][j];
        }
        for (std::size_t j = t + 1; j < n; ++j) {
            LocalElement f = A[t][j].shift_down(best);
            for (std::size_t i = 0; i < m; ++i) A[i][j] = A[i][j] - f * A[i][t];
            for (std::size_t i = 0; i < n; ++i) s.V[i][j] = s.V[i][j] - f * s.V[i][t];
        }
        s.valuations.push_back(best);
    }
    s.D = std::move(A);
    return s;
}

struct KernelGenerator {
    LocalVector vector;
    int order_valuation;  ///< k for a free generator, otherwise the generator is killed by p^this
};

/// Generators of {x : A x = 0}.
inline std::vector<KernelGenerator> local_kernel(const LocalMatrix& A) {
    const LocalRing& R = A.front().front().ring();
    const std::size_t n = A.front().size();
    auto s = local_smith(A);
    std::vector<KernelGenerator> out;
    for (std::size_t i = 0; i < n; ++i) {
        int v = i < s.valuations.size() ? s.valuations[i] : R.k();
        if (v == 0) continue;
        // y_i in p^{k - v} W
        LocalElement scale(R, 1);
        for (int t = 0; t < R.k() - v; ++t) scale = scale * uniformizer(R);
        LocalVector x(n, LocalElement(R));
        for (std::size_t r = 0; r < n; ++r) x[r] = s.V[r][i] * scale;
        out.push_back({x, v});
    }
    return out;
}

/// v in the row span of `gens`.
inline bool local_span_contains(const LocalMatrix& gens, const LocalVector& v) {
    const LocalRing& R = v.front().ring();
    if (gens.empty()) return std::all_of(v.begin(), v.end(), [](const LocalElement& x) { return x.is_zero(); });
    auto s = local_smith(gens);
    // y D = v V
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        LocalElement w(R);
        for (std::size_t r = 0; r < n; ++r) w = w + v[r] * s.V[r][i];
        int need = i < s.valuations.size() ? s.valuations[i] : R.k();
        if (w.valuation() < need) return false;
    }
    return true;
}

inline bool local_span_equal(const LocalMatrix& A, const LocalMatrix& B) {
    for (const auto& r : A)
        if (!local_span_contains(B, r)) return false;
    for (const auto& r : B)
        if (!local_span_contains(A, r)) return false;
    return true;
}

/// Minimal valuation of the maximal minors of a set of row vectors in W^2 (k if all vanish).
inline int det_ideal_valuation(const LocalMatrix& rows) {
    const LocalRing& R = rows.front().front().ring();
    int v = R.k();
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b)
            v = std::min(v, (rows[a][0] * rows[b][1] - rows[a][1] * rows[b][0]).valuation());
    return v;
}

/// Rank-2 free W-module with basis (x, y): e_1, e_2 project to Wx, Wy; scalars s act as diag(s, conj s);
/// j x = a y, j y = b x.
struct LocalDModule {
    std::string name;
    LocalElement a, b;

    /// Matrices act on coordinate columns.
    LocalMatrix e1() const { return diag2(LocalElement(a.ring(), 1), LocalElement(a.ring())); }
    LocalMatrix e2() const { return diag2(LocalElement(a.ring()), LocalElement(a.ring(), 1)); }
    LocalMatrix j() const {
        auto J = local_zero(a.ring(), 2, 2);
        J[1][0] = a;
        J[0][1] = b;
        return J;
    }
    LocalMatrix scalar(const LocalElement& s) const { return diag2(s, s.conj()); }

    /// Generators of the O_D action: e_1, e_2, the scalar u and j.
    std::vector<LocalMatrix> generators() const {
        return {e1(), e2(), scalar(LocalElement(a.ring(), 0, 1)), j()};
    }

    /// ab = p with exactly one of a, b a unit.
    void validate() const {
        if (a * b != uniformizer(a.ring())) throw precondition_error(name + ": ab != p");
        if (a.is_unit() == b.is_unit()) throw precondition_error(name + ": exactly one of a, b must be a unit");
    }
};

/// Generators of Hom(M', M) equivariant for paired generator lists; unknowns are F = [[f00, f01], [f10, f11]].
inline std::vector<KernelGenerator> equivariant_maps(const std::vector<LocalMatrix>& gens_src,
                                                    const std::vector<LocalMatrix>& gens_dst) {
    if (gens_src.size() != gens_dst.size()) throw precondition_error("generator lists differ in length");
    const LocalRing& R = gens_src.front().front().front().ring();
    LocalMatrix eq;
    for (std::size_t g = 0; g < gens_src.size(); ++g) {
        // F A' - A F = 0, one equation per entry
        std::vector<LocalMatrix> cols;
        for (std::size_t q = 0; q < 4; ++q) {
            auto E = local_zero(R, 2, 2);
            E[q / 2][q % 2] = LocalElement(R, 1);
            auto lhs = local_mul(E, gens_src[g]), rhs = local_mul(gens_dst[g], E);
            for (auto r = 0; r < 2; ++r)
                for (auto c = 0; c < 2; ++c) lhs[r][c] = lhs[r][c] - rhs[r][c];
            cols.push_back(lhs);
        }
        for (std::size_t e = 0; e < 4; ++e) {
            LocalVector row;
            for (std::size_t q = 0; q < 4; ++q) row.push_back(cols[q][e / 2][e % 2]);
            eq.push_back(row);
        }
    }
    return local_kernel(eq);
}

inline LocalMatrix as_map(const KernelGenerator& g) { return {{g.vector[0], g.vector[1]}, {g.vector[2], g.vector[3]}}; }

struct HomResult {
    std::vector<LocalMatrix> generators;
    std::size_t free_rank = 0;
    std::size_t torsion_generators = 0;
};

inline HomResult hom_module(const LocalDModule& src, const LocalDModule& dst) {
    src.validate();
    dst.validate();
    if (!(src.a.ring() == dst.a.ring())) throw precondition_error("modules live over different rings");
    HomResult h;
    for (const auto& g : equivariant_maps(src.generators(), dst.generators())) {
        h.generators.push_back(as_map(g));
        if (g.order_valuation == src.a.ring().k()) ++h.free_rank;
        else ++h.torsion_generators;
    }
    return h;
}

/// Matrix model of O_D (x) W: [[W, W], [pW, W]] with j = [[0, 1], [p, 0]].
struct LocalOrderModel {
    LocalRing W;
    LocalMatrix j() const {
        auto J = local_zero(W, 2, 2);
        J[0][1] = LocalElement(W, 1);
        J[1][0] = uniformizer(W);
        return J;
    }
    LocalMatrix scalar(const LocalElement& s) const { return diag2(s, s.conj()); }
    /// [[a, b], [c, d]] -> [[d, -b], [-c, a]].
    static LocalMatrix involution(const LocalMatrix& M) {
        return {{M[1][1], -M[0][1]}, {-M[1][0], M[0][0]}};
    }
};

struct ClassificationResult {
    LocalDModule T, Tprime;
    std::size_t rank_T = 0, rank_Tprime = 0;  ///< rank mod p of j: e_1 M -> e_2 M
    std::size_t invertible_maps = 0;          ///< invertible equivariant maps T -> T' mod p (must be 0)
    std::size_t invertible_self_maps = 0;     ///< same for T -> T (sanity, nonzero)
    bool relations = true;                    ///< j^2 = p, j^* = -j, j s = conj(s) j, determinant condition
    std::vector<std::string> failures;
    bool ok() const {
        return failures.empty() && relations && rank_T == 0 && rank_Tprime == 1 && invertible_maps == 0 &&
               invertible_self_maps > 0;
    }
};

/// Counts diag(alpha, beta) over the residue field commuting with j, and how many are invertible.
inline std::size_t count_invertible_equivariant_mod_p(const LocalDModule& src, const LocalDModule& dst) {
    const LocalRing& W = src.a.ring();
    const std::int64_t p = W.p();
    const std::int64_t q1 = W.degree() == 2 ? p : 1;
    auto red = [&](const LocalElement& x) { return std::make_pair(((x.a0() % p) + p) % p, ((x.a1() % p) + p) % p); };
    auto sa = red(src.a), sb = red(src.b), da = red(dst.a), db = red(dst.b);
    auto mul = [&](std::pair<std::int64_t, std::int64_t> x, std::pair<std::int64_t, std::int64_t> y) {
        return std::make_pair((x.first * y.first + W.c() * x.second % p * y.second) % p,
                              (x.first * y.second + x.second * y.first) % p);
    };
    std::size_t count = 0;
    for (std::int64_t a0 = 0; a0 < p; ++a0)
        for (std::int64_t a1 = 0; a1 < q1; ++a1)
            for (std::int64_t b0 = 0; b0 < p; ++b0)
                for (std::int64_t b1 = 0; b1 < q1; ++b1) {
                    std::pair<std::int64_t, std::int64_t> al{a0, a1}, be{b0, b1};
                    // F j_src = j_dst F on x: beta * a_src = a_dst * alpha; on y: alpha * b_src = b_dst * beta
                    if (mul(be, sa) != mul(da, al) || mul(al, sb) != mul(db, be)) continue;
                    bool inv = (a0 || a1) && (b0 || b1);
                    if (inv) ++count;
                }
    return count;
}

inline ClassificationResult classify_modules(std::int64_t p, int k) {
    const LocalRing W = LocalRing::unramified(p, k);
    const LocalElement one(W, 1), pi = uniformizer(W);
    ClassificationResult r{{"T", pi, one}, {"T'", one, pi}};
    r.T.validate();
    r.Tprime.validate();

    auto residue_rank = [](const LocalElement& a) -> std::size_t { return a.is_unit() ? 1 : 0; };
    r.rank_T = residue_rank(r.T.a);
    r.rank_Tprime = residue_rank(r.Tprime.a);

    // structured maps must commute with e_1, e_2: the solver confirms off-diagonal entries vanish
    for (const auto& g : equivariant_maps(r.T.generators(), r.Tprime.generators()))
        if (!g.vector[1].is_zero() || !g.vector[2].is_zero()) r.failures.push_back("non-diagonal equivariant map");
    r.invertible_maps = count_invertible_equivariant_mod_p(r.T, r.Tprime) +
                        count_invertible_equivariant_mod_p(r.Tprime, r.T);
    r.invertible_self_maps = count_invertible_equivariant_mod_p(r.T, r.T);

    LocalOrderModel O{W};
    auto J = O.j();
    auto J2 = local_mul(J, J);
    if (!(J2 == diag2(pi, pi))) r.relations = false, r.failures.push_back("j^2 != p in the order model");
    auto Jstar = LocalOrderModel::involution(J);
    if (!(Jstar == LocalMatrix{{-J[0][0], -J[0][1]}, {-J[1][0], -J[1][1]}}))
        r.relations = false, r.failures.push_back("j^* != -j");
    for (const LocalElement& s : {LocalElement(W, 0, 1), LocalElement(W, 1, 1), LocalElement(W, 2, 3)}) {
        if (!(local_mul(J, O.scalar(s)) == local_mul(O.scalar(s.conj()), J)))
            r.relations = false, r.failures.push_back("j s != conj(s) j for s = " + s.str());
        if (!(s * s.conj() == LocalElement(W, s.norm()))) r.relations = false, r.failures.push_back("Nm mismatch");
        for (const auto* M : {&r.T, &r.Tprime}) {
            auto S = M->scalar(s);
            if (!(S[0][0] * S[1][1] - S[0][1] * S[1][0] == s * s.conj()))
                r.relations = false, r.failures.push_back(M->name + ": det(s) != Nm(s)");
        }
    }
    for (const auto* M : {&r.T, &r.Tprime}) {
        auto Jm = M->j();
        if (!(local_mul(Jm, Jm) == diag2(pi, pi))) r.relations = false, r.failures.push_back(M->name + ": j^2 != p");
        if (!(local_mul(Jm, M->e1()) == local_mul(M->e2(), Jm))) r.relations = false, r.failures.push_back(M->name + ": j e1 != e2 j");
        // nrd(j) = -p
        if (!(Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0] == -pi)) r.relations = false, r.failures.push_back(M->name + ": det(j) != -p");
    }
    return r;
}

struct BadPrimeResult {
    std::int64_t p = 0;
    int k = 0;
    LocalMatrix hom_generators;  ///< Hom(T', T)
    std::size_t hom_free_rank = 0;
    bool hom_matches = false;         ///< Hom(T', T) = W (x' -> x, y' -> p y)
    LocalMatrix image;                ///< evaluation image, rows in (x, y) coordinates
    bool image_matches = false;       ///< image = Wx + pWy
    int det_valuation = -1;           ///< image on top exterior powers is p^this det(T)
    bool self_image_full = false;     ///< Hom(T, T) (x) T -> T is onto
    std::vector<std::string> certificates;
    bool ok() const { return hom_matches && image_matches && det_valuation == 1 && self_image_full; }
};

inline LocalMatrix evaluation_image(const HomResult& h) {
    LocalMatrix rows;
    for (const auto& F : h.generators)
        for (int c = 0; c < 2; ++c) rows.push_back({F[0][c], F[1][c]});
    return rows;
}

inline BadPrimeResult verify_bad_prime(std::int64_t p, int k) {
    if (k < 2) throw precondition_error("bad-prime check needs k >= 2");
    auto cls = classify_modules(p, k);
    const LocalRing& W = cls.T.a.ring();
    const LocalElement one(W, 1), zero(W), pi = uniformizer(W);
    BadPrimeResult r;
    r.p = p;
    r.k = k;

    auto hom = hom_module(cls.Tprime, cls.T);
    r.hom_free_rank = hom.free_rank;
    for (const auto& F : hom.generators) r.hom_generators.push_back({F[0][0], F[0][1], F[1][0], F[1][1]});
    LocalMatrix expected_hom{{one, zero, zero, pi}};
    r.hom_matches = hom.free_rank == 1 && hom.torsion_generators == 0 && local_span_equal(r.hom_generators, expected_hom);

    r.image = evaluation_image(hom);
    LocalMatrix expected{{one, zero}, {zero, pi}};
    r.image_matches = local_span_equal(r.image, expected);
    r.det_valuation = det_ideal_valuation(r.image);

    r.self_image_full = local_span_equal(evaluation_image(hom_module(cls.T, cls.T)), {{one, zero}, {zero, one}});

    for (const auto& row : r.image) r.certificates.push_back("(" + row[0].str() + ", " + row[1].str() + ")");
    return r;
}

struct GoodPrimeResult {
    std::int64_t p = 0;
    int k = 0;
    std::size_t hom_free_rank = 0;
    bool hom_is_scalars = false;   ///< Hom_O(T', T) = R * identity
    bool epsilon_swaps = false;    ///< eps e_1 eps^{-1} = e_2 and eps(e_1 T) = e_2 T
    int index_valuation = -1;      ///< N (x) N (x) det T' -> det T has index p^this
    std::int64_t index = 0;
    bool ok() const { return hom_free_rank == 1 && hom_is_scalars && epsilon_swaps && index_valuation == 0 && index == 1; }
};

/// O = M_2(Z/p^k) acting on T = T' = R^2.
inline GoodPrimeResult verify_good_prime(std::int64_t p, int k) {
    const LocalRing R = LocalRing::integers(p, k);
    const LocalElement one(R, 1), zero(R);
    GoodPrimeResult r;
    r.p = p;
    r.k = k;
    LocalMatrix e1 = diag2(one, zero), e2 = diag2(zero, one), eps{{zero, one}, {one, zero}};
    std::vector<LocalMatrix> gens{e1, e2, eps};
    auto kernel = equivariant_maps(gens, gens);
    LocalMatrix hom_rows;
    for (const auto& g : kernel) {
        hom_rows.push_back(g.vector);
        if (g.order_valuation == k) ++r.hom_free_rank;
    }
    r.hom_is_scalars = r.hom_free_rank == kernel.size() && local_span_equal(hom_rows, {{one, zero, zero, one}});

    r.epsilon_swaps = local_mul(local_mul(eps, e1), eps) == e2 && local_mul(eps, e1) == local_mul(e2, eps);

    // phi (x) psi -> (phi on e_1T') (psi on e_2T'); the target is free of rank 1
    int v = k;
    for (const auto& a : kernel)
        for (const auto& b : kernel) v = std::min(v, (a.vector[0] * b.vector[3]).valuation());
    r.index_valuation = v;
    r.index = 1;
    for (int t = 0; t < v; ++t) r.index *= p;
    return r;
}

}  // namespace ksv
