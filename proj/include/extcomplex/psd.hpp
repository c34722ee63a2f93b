#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "extcomplex/rational.hpp"

namespace extcomplex {

/// P·A·Pᵀ = L·D·Lᵀ with symmetric pivoting on the largest remaining diagonal
/// entry. Factorization stops at the first pivot that is not positive (or
/// that falls under rel_cutoff times the first pivot); whatever is left is
/// reported through `residual`.
struct PivotedLdl {
    std::vector<size_t> order;  // order[s] = original index eliminated at step s
    RMatrix lower;              // unit lower triangular, in pivot order
    RVector pivots;             // length k, zero past `rank`
    size_t rank = 0;
    bool psd = true;            // exact verdict when rel_cutoff == 0
    double residual = 0.0;      // max |entry| of the unfactored Schur complement
};

inline PivotedLdl pivoted_ldlt(const RMatrix& a, double rel_cutoff = 0.0) {
    if (a.rows() != a.cols()) throw DimensionMismatch("LDL of a non-square matrix");
    const size_t k = a.rows();
    RMatrix s = a;  // Schur complement, kept in original indexing
    PivotedLdl out;
    out.lower = RMatrix::identity(k);
    out.pivots.assign(k, Rational(0));
    std::vector<size_t> remaining(k);
    for (size_t i = 0; i < k; ++i) remaining[i] = i;
    std::vector<RVector> cols;  // multipliers by original index, per step
    Rational first_pivot = 0;
    Rational cutoff = 0;

    for (size_t step = 0; step < k; ++step) {
        size_t best = remaining.front();
        for (size_t i : remaining)
            if (s(i, i) > s(best, best)) best = i;
        const Rational piv = s(best, best);
        bool stop = sgn(piv) <= 0;
        if (!stop && rel_cutoff > 0 && step > 0 && piv <= cutoff) stop = true;
        if (stop) {
            if (rel_cutoff == 0.0) {
                if (sgn(piv) < 0) {
                    out.psd = false;
                } else {
                    for (size_t i : remaining)
                        for (size_t j : remaining)
                            if (sgn(s(i, j)) != 0) out.psd = false;
                }
            } else if (sgn(piv) < 0 && -piv > cutoff) {
                out.psd = false;
            }
            for (size_t i : remaining)
                for (size_t j : remaining) out.residual = std::max(out.residual, std::abs(s(i, j).get_d()));
            break;
        }
        if (step == 0) {
            first_pivot = piv;
            cutoff = first_pivot * Rational(rel_cutoff);
        }
        out.order.push_back(best);
        out.pivots[step] = piv;
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
        RVector mult(k);
        for (size_t i : remaining) mult[i] = s(i, best) / piv;
        for (size_t i : remaining) {
            if (sgn(mult[i]) == 0) continue;
            for (size_t j : remaining)
                if (sgn(s(best, j)) != 0) s(i, j) -= mult[i] * s(best, j);
        }
        cols.push_back(std::move(mult));
        ++out.rank;
    }
    for (size_t i : remaining) out.order.push_back(i);
    // lower(r, c) = multiplier of row order[r] at step c
    for (size_t c = 0; c < out.rank; ++c)
        for (size_t r = c + 1; r < k; ++r) out.lower(r, c) = cols[c][out.order[r]];
    return out;
}

/// Exact positive-semidefiniteness test.
inline bool is_psd(const RMatrix& a) { return pivoted_ldlt(a).psd; }

}  // namespace extcomplex
