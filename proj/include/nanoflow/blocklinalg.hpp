#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nanoflow/errors.hpp"

namespace nanoflow::blocktri {

inline constexpr std::size_t block_size = 5;

// Row-major 5x5 block.
using Block = std::array<double, block_size * block_size>;
using Vec = std::array<double, block_size>;

// Correction system with diagonal blocks D_j, sub-diagonal E_j, super-diagonal F_j.
struct BlockTridiagonalSystem {
    std::vector<Block> diag;
    std::vector<Block> sub;
    std::vector<Block> super;
    std::vector<Vec> rhs;

    std::size_t block_count() const { return diag.size(); }
};

inline void validate_system(const BlockTridiagonalSystem& sys) {
    const std::size_t j = sys.block_count();
    if (j == 0)
        throw std::invalid_argument("validate_system: empty system");
    if (sys.sub.size() + 1 != j || sys.super.size() + 1 != j || sys.rhs.size() != j)
        throw std::invalid_argument("validate_system: block counts are inconsistent");
    auto finite_blocks = [](const std::vector<Block>& blocks) {
        for (const Block& b : blocks)
            for (double v : b)
                if (!std::isfinite(v)) return false;
        return true;
    };
    if (!finite_blocks(sys.diag) || !finite_blocks(sys.sub) || !finite_blocks(sys.super))
        throw std::invalid_argument("validate_system: non-finite block entry");
    for (const Vec& v : sys.rhs)
        for (double x : v)
            if (!std::isfinite(x))
                throw std::invalid_argument("validate_system: non-finite rhs entry");
}

namespace detail {

inline double max_abs(const Block& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

// In-place LU with partial pivoting; returns false on a numerically zero pivot.
// scale is the pre-factorization magnitude of the block.
inline bool lu_factor(Block& a, std::array<int, block_size>& piv, double scale) {
    const double tol = 1e-13 * std::max(scale, 1e-300);
    for (std::size_t k = 0; k < block_size; ++k) {
        std::size_t p = k;
        double best = std::abs(a[k * block_size + k]);
        for (std::size_t r = k + 1; r < block_size; ++r) {
            const double cand = std::abs(a[r * block_size + k]);
            if (cand > best) { best = cand; p = r; }
        }
        if (!(best > tol)) return false;
        piv[k] = static_cast<int>(p);
        if (p != k)
            for (std::size_t c = 0; c < block_size; ++c)
                std::swap(a[k * block_size + c], a[p * block_size + c]);
        const double inv = 1.0 / a[k * block_size + k];
        for (std::size_t r = k + 1; r < block_size; ++r) {
            const double l = a[r * block_size + k] * inv;
            a[r * block_size + k] = l;
            for (std::size_t c = k + 1; c < block_size; ++c)
                a[r * block_size + c] -= l * a[k * block_size + c];
        }
    }
    return true;
}

inline void lu_solve_vec(const Block& lu, const std::array<int, block_size>& piv, Vec& x) {
    // The factorization swaps whole rows, L entries included, so the full
    // permutation applies to the right-hand side before substitution.
    for (std::size_t k = 0; k < block_size; ++k) {
        const std::size_t p = static_cast<std::size_t>(piv[k]);
        if (p != k) std::swap(x[k], x[p]);
    }
    for (std::size_t k = 0; k < block_size; ++k)
        for (std::size_t r = k + 1; r < block_size; ++r)
            x[r] -= lu[r * block_size + k] * x[k];
    for (std::size_t k = block_size; k-- > 0;) {
        for (std::size_t c = k + 1; c < block_size; ++c)
            x[k] -= lu[k * block_size + c] * x[c];
        x[k] /= lu[k * block_size + k];
    }
}

// Solves LU X = B column by column, writing X over B.
inline void lu_solve_mat(const Block& lu, const std::array<int, block_size>& piv, Block& b) {
    for (std::size_t c = 0; c < block_size; ++c) {
        Vec col;
        for (std::size_t r = 0; r < block_size; ++r) col[r] = b[r * block_size + c];
        lu_solve_vec(lu, piv, col);
        for (std::size_t r = 0; r < block_size; ++r) b[r * block_size + c] = col[r];
    }
}

// c -= a * b
inline void subtract_product(Block& c, const Block& a, const Block& b) {
    for (std::size_t r = 0; r < block_size; ++r)
        for (std::size_t k = 0; k < block_size; ++k) {
            const double arx = a[r * block_size + k];
            if (arx == 0.0) continue;
            for (std::size_t col = 0; col < block_size; ++col)
                c[r * block_size + col] -= arx * b[k * block_size + col];
        }
}

// y -= a * x
inline void subtract_matvec(Vec& y, const Block& a, const Vec& x) {
    for (std::size_t r = 0; r < block_size; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < block_size; ++c)
            acc += a[r * block_size + c] * x[c];
        y[r] -= acc;
    }
}

} // namespace detail

// LU data for the block-tridiagonal elimination: factored pivot blocks alpha_j,
// fill blocks gamma_j with alpha_j gamma_j = F_j, and the sub-diagonal copies
// needed by the forward sweep.
struct BlockLuFactorization {
    std::vector<Block> alpha;
    std::vector<std::array<int, block_size>> pivots;
    std::vector<Block> gamma;
    std::vector<Block> sub;

    std::size_t block_count() const { return alpha.size(); }
};

inline BlockLuFactorization factorize(const BlockTridiagonalSystem& sys) {
    validate_system(sys);
    const std::size_t j_count = sys.block_count();

    BlockLuFactorization fact;
    fact.alpha.resize(j_count);
    fact.pivots.resize(j_count);
    fact.gamma.resize(j_count > 0 ? j_count - 1 : 0);
    fact.sub = sys.sub;

    for (std::size_t j = 0; j < j_count; ++j) {
        Block a = sys.diag[j];
        if (j > 0) detail::subtract_product(a, sys.sub[j - 1], fact.gamma[j - 1]);
        const double scale = detail::max_abs(a);
        if (!detail::lu_factor(a, fact.pivots[j], scale))
            throw singular_block_error(j, "factorize: singular pivot block at index " +
                                              std::to_string(j));
        fact.alpha[j] = a;
        if (j + 1 < j_count) {
            Block g = sys.super[j];
            detail::lu_solve_mat(a, fact.pivots[j], g);
            fact.gamma[j] = g;
        }
    }
    return fact;
}

inline std::vector<Vec> solve(const BlockLuFactorization& fact, const std::vector<Vec>& rhs) {
    const std::size_t j_count = fact.block_count();
    if (rhs.size() != j_count)
        throw std::invalid_argument("solve: rhs length does not match factorization");

    std::vector<Vec> g(j_count);
    for (std::size_t j = 0; j < j_count; ++j) {
        Vec t = rhs[j];
        if (j > 0) detail::subtract_matvec(t, fact.sub[j - 1], g[j - 1]);
        detail::lu_solve_vec(fact.alpha[j], fact.pivots[j], t);
        g[j] = t;
    }
    for (std::size_t j = j_count - 1; j-- > 0;) {
        Vec d = g[j];
        for (std::size_t r = 0; r < block_size; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < block_size; ++c)
                acc += fact.gamma[j][r * block_size + c] * g[j + 1][c];
            d[r] -= acc;
        }
        g[j] = d;
    }
    return g;
}

inline std::vector<Vec> solve(const BlockTridiagonalSystem& sys) {
    return solve(factorize(sys), sys.rhs);
}

} // namespace nanoflow::blocktri
