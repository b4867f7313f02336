#pragma once

// Exact linear algebra over the small prime fields GF(2), GF(3) and GF(7).
// Everything is plain modular integer arithmetic on uint8 entries; there is
// no extension-field multiplication here because the codes in this library
// only ever touch GF(p^m) elements through their m-tuple coordinates.

#include <cstdint>
#include <cstddef>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace FFMA {

inline bool is_supported_prime(int p) { return p == 2 || p == 3 || p == 7; }

inline void require_supported_prime(int p) {
    if (!is_supported_prime(p))
        throw std::invalid_argument("field modulus must be one of {2, 3, 7}, got " + std::to_string(p));
}

inline std::uint8_t ff_reduce(long long v, int p) {
    long long r = v % p;
    if (r < 0) r += p;
    return static_cast<std::uint8_t>(r);
}

// Multiplicative inverse in GF(p); fields are tiny so a scan is fine.
inline std::uint8_t ff_inverse(std::uint8_t a, int p) {
    if (a == 0) throw std::invalid_argument("zero has no multiplicative inverse");
    for (int x = 1; x < p; ++x)
        if ((a * x) % p == 1) return static_cast<std::uint8_t>(x);
    throw std::logic_error("no inverse found; modulus not prime?");
}

class FfVector {
public:
    FfVector(int p, std::size_t n) : p_(p), e_(n, 0) { require_supported_prime(p); }

    FfVector(int p, std::vector<std::uint8_t> elems) : p_(p), e_(std::move(elems)) {
        require_supported_prime(p);
        for (auto v : e_)
            if (v >= p_) throw std::invalid_argument("vector element out of range for GF(" + std::to_string(p_) + ")");
    }

    FfVector(int p, std::initializer_list<int> elems) : p_(p) {
        require_supported_prime(p);
        e_.reserve(elems.size());
        for (int v : elems) {
            if (v < 0 || v >= p) throw std::invalid_argument("vector element out of range");
            e_.push_back(static_cast<std::uint8_t>(v));
        }
    }

    // Parses a contiguous digit string such as "1021".
    static FfVector from_digits(int p, std::string_view digits) {
        FfVector v(p, digits.size());
        for (std::size_t i = 0; i < digits.size(); ++i) {
            char c = digits[i];
            if (c < '0' || c >= '0' + p) throw std::invalid_argument(std::string("bad digit '") + c + "' for GF(" + std::to_string(p) + ")");
            v.e_[i] = static_cast<std::uint8_t>(c - '0');
        }
        return v;
    }

    int p() const { return p_; }
    std::size_t size() const { return e_.size(); }
    std::uint8_t operator[](std::size_t i) const { return e_[i]; }
    void set(std::size_t i, int v) { e_[i] = ff_reduce(v, p_); }
    const std::vector<std::uint8_t>& elems() const { return e_; }

    bool is_zero() const {
        for (auto v : e_)
            if (v != 0) return false;
        return true;
    }

    FfVector subvector(std::size_t start, std::size_t len) const {
        if (start + len > e_.size()) throw std::invalid_argument("subvector out of range");
        return FfVector(p_, std::vector<std::uint8_t>(e_.begin() + start, e_.begin() + start + len));
    }

    std::string digits() const {
        std::string s(e_.size(), '0');
        for (std::size_t i = 0; i < e_.size(); ++i) s[i] = static_cast<char>('0' + e_[i]);
        return s;
    }

    friend bool operator==(const FfVector& a, const FfVector& b) { return a.p_ == b.p_ && a.e_ == b.e_; }
    friend bool operator!=(const FfVector& a, const FfVector& b) { return !(a == b); }

private:
    int p_;
    std::vector<std::uint8_t> e_;
};

class FfMatrix {
public:
    FfMatrix(int p, std::size_t rows, std::size_t cols) : p_(p), rows_(rows), cols_(cols), a_(rows * cols, 0) {
        require_supported_prime(p);
        if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
    }

    static FfMatrix identity(int p, std::size_t n) {
        FfMatrix m(p, n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    static FfMatrix from_rows(const std::vector<FfVector>& rows) {
        if (rows.empty()) throw std::invalid_argument("from_rows: no rows");
        FfMatrix m(rows[0].p(), rows.size(), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].p() != m.p_ || rows[r].size() != m.cols_) throw std::invalid_argument("from_rows: ragged input");
            for (std::size_t c = 0; c < m.cols_; ++c) m.set(r, c, rows[r][c]);
        }
        return m;
    }

    static FfMatrix from_digit_rows(int p, const std::vector<std::string>& rows) {
        std::vector<FfVector> v;
        v.reserve(rows.size());
        for (const auto& s : rows) v.push_back(FfVector::from_digits(p, s));
        return from_rows(v);
    }

    int p() const { return p_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint8_t at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, int v) { a_[r * cols_ + c] = ff_reduce(v, p_); }

    FfVector row(std::size_t r) const {
        FfVector v(p_, cols_);
        for (std::size_t c = 0; c < cols_; ++c) v.set(c, at(r, c));
        return v;
    }

    FfMatrix transpose() const {
        FfMatrix t(p_, cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t.set(c, r, at(r, c));
        return t;
    }

    bool is_zero() const {
        for (auto v : a_)
            if (v != 0) return false;
        return true;
    }

    friend bool operator==(const FfMatrix& a, const FfMatrix& b) {
        return a.p_ == b.p_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }
    friend bool operator!=(const FfMatrix& a, const FfMatrix& b) { return !(a == b); }

private:
    int p_;
    std::size_t rows_, cols_;
    std::vector<std::uint8_t> a_;
};

inline FfMatrix mat_mul(const FfMatrix& a, const FfMatrix& b) {
    if (a.p() != b.p()) throw std::invalid_argument("mat_mul: modulus mismatch");
    if (a.cols() != b.rows())
        throw std::invalid_argument("mat_mul: dimension mismatch (" + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
    FfMatrix c(a.p(), a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long long s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a.at(i, k) * b.at(k, j);
            c.set(i, j, ff_reduce(s, a.p()));
        }
    return c;
}

inline FfMatrix operator*(const FfMatrix& a, const FfMatrix& b) { return mat_mul(a, b); }

// v interpreted as a 1 x n row vector: returns v * m.
inline FfVector row_times(const FfVector& v, const FfMatrix& m) {
    if (v.p() != m.p()) throw std::invalid_argument("row_times: modulus mismatch");
    if (v.size() != m.rows()) throw std::invalid_argument("row_times: length mismatch");
    FfVector out(v.p(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        long long s = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) s += v[r] * m.at(r, c);
        out.set(c, ff_reduce(s, v.p()));
    }
    return out;
}

inline std::uint8_t dot(const FfVector& u, const FfVector& v) {
    if (u.p() != v.p()) throw std::invalid_argument("dot: modulus mismatch");
    if (u.size() != v.size()) throw std::invalid_argument("dot: length mismatch");
    long long s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return ff_reduce(s, u.p());
}

inline FfVector operator+(const FfVector& a, const FfVector& b) {
    if (a.p() != b.p() || a.size() != b.size()) throw std::invalid_argument("vector add: shape mismatch");
    FfVector c(a.p(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c.set(i, a[i] + b[i]);
    return c;
}

inline FfVector operator-(const FfVector& a) {
    FfVector c(a.p(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c.set(i, (a.p() - a[i]) % a.p());
    return c;
}

inline FfVector operator-(const FfVector& a, const FfVector& b) { return a + (-b); }

inline FfVector scale(int c, const FfVector& a) {
    FfVector out(a.p(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, c * a[i]);
    return out;
}

inline FfMatrix operator+(const FfMatrix& a, const FfMatrix& b) {
    if (a.p() != b.p() || a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix add: shape mismatch");
    FfMatrix c(a.p(), a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t j = 0; j < a.cols(); ++j) c.set(r, j, a.at(r, j) + b.at(r, j));
    return c;
}

inline FfMatrix operator-(const FfMatrix& a) {
    FfMatrix c(a.p(), a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t j = 0; j < a.cols(); ++j) c.set(r, j, (a.p() - a.at(r, j)) % a.p());
    return c;
}

inline FfMatrix operator-(const FfMatrix& a, const FfMatrix& b) { return a + (-b); }

inline FfMatrix scale(int c, const FfMatrix& a) {
    FfMatrix out(a.p(), a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t j = 0; j < a.cols(); ++j) out.set(r, j, c * a.at(r, j));
    return out;
}

// Row rank by Gaussian elimination; exact, first nonzero pivot.
inline std::size_t rank(FfMatrix m) {
    const int p = m.p();
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t pivot = r;
        while (pivot < m.rows() && m.at(pivot, c) == 0) ++pivot;
        if (pivot == m.rows()) continue;
        if (pivot != r)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                int t = m.at(r, j);
                m.set(r, j, m.at(pivot, j));
                m.set(pivot, j, t);
            }
        std::uint8_t inv = ff_inverse(m.at(r, c), p);
        for (std::size_t j = 0; j < m.cols(); ++j) m.set(r, j, inv * m.at(r, j));
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            int f = m.at(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j) m.set(i, j, m.at(i, j) + (p - f) * m.at(r, j));
        }
        ++r;
    }
    return r;
}

inline FfMatrix kronecker(const FfMatrix& a, const FfMatrix& b) {
    if (a.p() != b.p()) throw std::invalid_argument("kronecker: modulus mismatch");
    FfMatrix c(a.p(), a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac)
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    c.set(ar * b.rows() + br, ac * b.cols() + bc, a.at(ar, ac) * b.at(br, bc));
    return c;
}

// Plain-text matrix format: first line "p rows cols", then row-major entries
// separated by whitespace.
inline std::string to_text(const FfMatrix& m) {
    std::ostringstream os;
    os << m.p() << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << static_cast<int>(m.at(r, c));
        }
        os << '\n';
    }
    return os.str();
}

inline FfMatrix matrix_from_stream(std::istream& in) {
    int p = 0;
    std::size_t rows = 0, cols = 0;
    if (!(in >> p >> rows >> cols)) throw std::invalid_argument("matrix text: bad header, expected 'p rows cols'");
    require_supported_prime(p);
    if (rows == 0 || cols == 0) throw std::invalid_argument("matrix text: dimensions must be positive");
    FfMatrix m(p, rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            int v = 0;
            if (!(in >> v)) throw std::invalid_argument("matrix text: expected " + std::to_string(rows * cols) + " entries");
            if (v < 0 || v >= p) throw std::invalid_argument("matrix text: entry out of range for GF(" + std::to_string(p) + ")");
            m.set(r, c, v);
        }
    return m;
}

inline FfMatrix matrix_from_text(const std::string& text) {
    std::istringstream is(text);
    return matrix_from_stream(is);
}

inline std::ostream& operator<<(std::ostream& os, const FfVector& v) { return os << v.digits(); }

} // namespace FFMA
