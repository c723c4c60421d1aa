#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace spencerkit {

using Rational = mpq_class;
using Vec = std::vector<Rational>;

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Canonical p/q; mpq_class(p, q) alone does not reduce.
Rational frac(long p, long q);

/// "p/q" or "p"; parsing accepts the same forms.
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);

bool is_zero(const Vec& v);
Vec zero_vec(std::size_t n);
Vec unit_vec(std::size_t n, std::size_t i);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Rational& c, const Vec& a);
void axpy(Vec& y, const Rational& c, const Vec& x);
Rational dot(const Vec& a, const Vec& b);

/// Dense row-major matrix over Q.
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(std::size_t rows, std::size_t cols);
    ExactMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

    static ExactMatrix identity(std::size_t n);
    static ExactMatrix from_rows(const std::vector<Vec>& rows, std::size_t cols);
    static ExactMatrix from_cols(const std::vector<Vec>& cols, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vec row(std::size_t i) const;
    Vec col(std::size_t j) const;
    std::vector<Vec> row_vectors() const;
    void set_row(std::size_t i, const Vec& v);
    void append_row(const Vec& v);
    void append_rows(const ExactMatrix& m);

    ExactMatrix transpose() const;
    bool is_zero() const;
    Vec apply(const Vec& x) const;
    Vec apply_transpose(const Vec& y) const;

    ExactMatrix operator+(const ExactMatrix& o) const;
    ExactMatrix operator-(const ExactMatrix& o) const;
    ExactMatrix operator*(const ExactMatrix& o) const;
    ExactMatrix operator*(const Rational& c) const;
    ExactMatrix operator-() const;
    bool operator==(const ExactMatrix& o) const;
    bool operator!=(const ExactMatrix& o) const { return !(*this == o); }

    std::size_t nonzeros() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

ExactMatrix commutator(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix block_diag(const std::vector<ExactMatrix>& blocks);
Rational trace(const ExactMatrix& m);
/// Row-major flattening of a square matrix, and its inverse.
Vec flatten(const ExactMatrix& m);
ExactMatrix unflatten(const Vec& v, std::size_t rows, std::size_t cols);

struct Echelon {
    ExactMatrix rref;                  // rank x cols, reduced, pivots equal to 1
    std::vector<std::size_t> pivots;   // pivot column of each row
    std::size_t rank() const { return pivots.size(); }
};

/// Fraction-free elimination on primitive integer rows, normalised at the end.
Echelon rref(const ExactMatrix& m);
std::size_t rank(const ExactMatrix& m);
/// Rows form the canonical (RREF) basis of the null space {x : m x = 0}.
ExactMatrix kernel(const ExactMatrix& m);
/// Inverse of a square matrix; throws DimensionMismatch if singular.
ExactMatrix inverse(const ExactMatrix& m);

struct ParticularSolution {
    Vec x;
};
struct NoSolution {
    Vec certificate;  // y with y^T A = 0 and y^T b != 0
};
using AffineResult = std::variant<ParticularSolution, NoSolution>;

/// Solve A x = b. The particular solution has every free variable set to zero.
AffineResult solve_affine(const ExactMatrix& a, const Vec& b);
std::optional<Vec> solve(const ExactMatrix& a, const Vec& b);

/// Subspace of Q^n held by its canonical RREF basis.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::size_t ambient);
    static Subspace span(const ExactMatrix& generators);
    static Subspace span(const std::vector<Vec>& generators, std::size_t ambient);
    static Subspace full(std::size_t ambient);
    static Subspace kernel_of(const ExactMatrix& m);

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return basis_.rows(); }
    const ExactMatrix& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    Vec vector(std::size_t i) const { return basis_.row(i); }

    bool contains(const Vec& v) const;
    bool contains(const Subspace& other) const;
    /// Coordinates with respect to the canonical basis, if v lies in the span.
    std::optional<Vec> coordinates(const Vec& v) const;
    Vec combine(const Vec& coeffs) const;
    /// Rows span the annihilator {w : w . v = 0 for all v in the subspace}.
    ExactMatrix annihilator() const;

    Subspace sum(const Subspace& other) const;
    Subspace intersect(const Subspace& other) const;

    bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

private:
    std::size_t ambient_ = 0;
    ExactMatrix basis_;
    std::vector<std::size_t> pivots_;
};

/// Coordinates against an arbitrary (independent) list of vectors.
class Frame {
public:
    Frame() = default;
    explicit Frame(const ExactMatrix& vectors);

    std::size_t size() const { return vectors_.rows(); }
    std::size_t ambient() const { return vectors_.cols(); }
    const ExactMatrix& vectors() const { return vectors_; }
    std::optional<Vec> coordinates(const Vec& v) const;
    /// Throws std::domain_error if v is outside the span.
    Vec coords(const Vec& v) const;
    Vec combine(const Vec& coeffs) const;

private:
    ExactMatrix vectors_;
    std::vector<std::size_t> pivots_;
    ExactMatrix solver_;
};

enum class TensorKind { Sym2, Wedge2, Sym3, Full2, Mixed };

/// Enumeration of multi-indices in the canonical lexicographic order.
struct IndexTable {
    std::vector<std::vector<std::size_t>> tuples;
    std::map<std::vector<std::size_t>, std::size_t> index;
    std::size_t size() const { return tuples.size(); }
    std::optional<std::size_t> find(const std::vector<std::size_t>& t) const;
};

/// For Mixed the table enumerates pairs (i, j) with i < n and j < m.
IndexTable tensor_index_maps(std::size_t n, TensorKind kind, std::size_t m = 0);
/// Strictly increasing k-tuples (wedge) or weakly increasing (sym) from range n.
std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t n, std::size_t k, bool strict);

}  // namespace spencerkit
