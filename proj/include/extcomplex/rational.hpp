#pragma once

// Exact rational scalars, vectors and dense matrices, plus the handful of
// elimination routines (rank, kernel, particular solutions) the polyhedral
// code is built from.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "extcomplex/error.hpp"

namespace extcomplex {

using Rational = mpq_class;
using Integer = mpz_class;
using RVector = std::vector<Rational>;

/// Parses "p", "p/q", "-p/q" or a plain decimal such as "0.125" or "-1.5e-3".
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty()) throw ParseError("empty rational literal");

    auto valid_int = [](const std::string& t) {
        size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i >= t.size()) return false;
        return std::all_of(t.begin() + static_cast<std::ptrdiff_t>(i), t.end(),
                           [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
    };
    auto strip_plus = [](std::string t) { return (!t.empty() && t[0] == '+') ? t.substr(1) : t; };

    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
            throw ParseError("malformed rational literal '" + s + "'");
        Integer n(strip_plus(num), 10), d(den, 10);
        if (d == 0) throw ParseError("zero denominator in '" + s + "'");
        Rational r(n, d);
        r.canonicalize();
        return r;
    }
    if (valid_int(s)) return Rational(Integer(strip_plus(s), 10));

    // decimal with optional exponent
    std::string mant = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mant = s.substr(0, e);
        std::string ex = s.substr(e + 1);
        if (!valid_int(ex)) throw ParseError("malformed exponent in '" + s + "'");
        exponent = std::stol(ex);
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        neg = mant[0] == '-';
        mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        exponent -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }))
        throw ParseError("malformed number '" + s + "'");
    Integer n(digits, 10);
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational r = exponent >= 0 ? Rational(n * p) : Rational(n, p);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

inline std::string format_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Exact value of a finite double.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw InvalidInput("non-finite floating value");
    return Rational(x);
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot product of vectors of different length");
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
    return s;
}

inline Rational norm_sq(std::span<const Rational> a) { return dot(a, a); }

inline RVector operator-(const RVector& a, const RVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector difference of different lengths");
    RVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline RVector operator+(const RVector& a, const RVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector sum of different lengths");
    RVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline RVector scaled(const RVector& a, const Rational& f) {
    RVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * f;
    return r;
}

inline bool is_zero(std::span<const Rational> a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& x) { return sgn(x) == 0; });
}

/// Dense row-major rational matrix.
class RMatrix {
public:
    RMatrix() = default;
    RMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RMatrix identity(size_t n) {
        RMatrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static RMatrix from_rows(const std::vector<RVector>& rows, size_t cols) {
        RMatrix m(rows.size(), cols);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) throw DimensionMismatch("ragged matrix rows");
            for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    Rational& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Rational> row(size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<Rational> row(size_t i) { return {data_.data() + i * cols_, cols_}; }
    RVector row_vector(size_t i) const { return RVector(row(i).begin(), row(i).end()); }
    RVector col_vector(size_t j) const {
        RVector c(rows_);
        for (size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    RVector apply(std::span<const Rational> x) const {
        if (x.size() != cols_) throw DimensionMismatch("matrix-vector product: width " + std::to_string(cols_) +
                                                       " vs vector " + std::to_string(x.size()));
        RVector y(rows_);
        for (size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
        return y;
    }

    RMatrix transpose() const {
        RMatrix t(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend RMatrix operator*(const RMatrix& a, const RMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shape mismatch");
        RMatrix c(a.rows_, b.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t k = 0; k < a.cols_; ++k) {
                if (sgn(a(i, k)) == 0) continue;
                for (size_t j = 0; j < b.cols_; ++j)
                    if (sgn(b(k, j)) != 0) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    friend bool operator==(const RMatrix&, const RMatrix&) = default;

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

/// Reduced row echelon form together with its pivot columns.
struct Echelon {
    RMatrix reduced;
    std::vector<size_t> pivots;
    size_t rank() const { return pivots.size(); }
};

inline Echelon reduced_row_echelon(RMatrix m) {
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        size_t p = r;
        while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        Rational inv = 1 / m(r, c);
        for (size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == r || sgn(m(i, c)) == 0) continue;
            Rational f = m(i, c);
            for (size_t j = c; j < m.cols(); ++j)
                if (sgn(m(r, j)) != 0) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    RMatrix top(r, m.cols());
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < m.cols(); ++j) top(i, j) = m(i, j);
    return {std::move(top), std::move(pivots)};
}

inline size_t rank(const RMatrix& m) { return reduced_row_echelon(m).rank(); }

/// Basis of {x : m x = 0}, one basis vector per column of the result.
/// The basis is the standard one read off the reduced echelon form.
inline RMatrix kernel(const RMatrix& m) {
    Echelon e = reduced_row_echelon(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t p : e.pivots) is_pivot[p] = true;
    std::vector<size_t> free;
    for (size_t j = 0; j < m.cols(); ++j)
        if (!is_pivot[j]) free.push_back(j);
    RMatrix basis(m.cols(), free.size());
    for (size_t k = 0; k < free.size(); ++k) {
        basis(free[k], k) = 1;
        for (size_t i = 0; i < e.pivots.size(); ++i) basis(e.pivots[i], k) = -e.reduced(i, free[k]);
    }
    return basis;
}

/// Some x with m x = rhs, or nullopt when the system is inconsistent.
inline std::optional<RVector> particular_solution(const RMatrix& m, std::span<const Rational> rhs) {
    if (rhs.size() != m.rows()) throw DimensionMismatch("right-hand side length");
    RMatrix aug(m.rows(), m.cols() + 1);
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = rhs[i];
    }
    Echelon e = reduced_row_echelon(aug);
    if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
    RVector x(m.cols());
    for (size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = e.reduced(i, m.cols());
    return x;
}

/// Inverse of a square matrix, nullopt if singular.
inline std::optional<RMatrix> inverse(const RMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("inverse of non-square matrix");
    size_t n = m.rows();
    RMatrix aug(n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    Echelon e = reduced_row_echelon(aug);
    if (e.rank() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
    RMatrix inv(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
    return inv;
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray. Returns the positive factor used.
inline Rational make_primitive(RVector& v) {
    Integer l = 1;
    for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    Integer g = 0;
    for (const auto& x : v) {
        Integer num = x.get_num() * (l / x.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    }
    if (g == 0) return 1;
    Rational factor(l, g);
    factor.canonicalize();
    for (auto& x : v) x *= factor;
    return factor;
}

inline bool lex_less(const RVector& a, const RVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace extcomplex
