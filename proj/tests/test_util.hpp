#pragma once

#include "ksv/matrix.hpp"
#include "ksv/rational.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ksv::testkit {

class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

    Rational rational(long bound = 9, long max_den = 6) {
        return Rational(Integer(integer(-bound, bound)), Integer(integer(1, max_den)));
    }

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    IntegerMatrix int_matrix(std::size_t r, std::size_t c, long bound = 9) {
        IntegerMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) m(i, j) = integer(-bound, bound);
        return m;
    }

    RationalMatrix nonsingular_rational(std::size_t n) {
        while (true) {
            RationalMatrix m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = rational();
            if (determinant(m) != 0) return m;
        }
    }

    /// Product of elementary row operations: determinant +-1.
    IntegerMatrix unimodular(std::size_t n, int steps = 12) {
        IntegerMatrix u = IntegerMatrix::identity(n);
        if (n < 2) return u;
        for (int s = 0; s < steps; ++s) {
            std::size_t a = integer(0, n - 1), b = integer(0, n - 1);
            if (a == b) continue;
            Integer q = integer(-3, 3);
            for (std::size_t j = 0; j < n; ++j) u(a, j) += q * u(b, j);
            if (integer(0, 4) == 0) u.swap_rows(a, b);
        }
        return u;
    }

    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
};

}  // namespace ksv::testkit
