#include "spencerkit/exactla.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace spencerkit {

Rational frac(long p, long q)
{
    if (q == 0)
        throw std::invalid_argument("zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& s)
{
    if (s.empty())
        throw std::invalid_argument("empty rational literal");
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("malformed rational literal: " + s);
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

bool is_zero(const Vec& v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& q) { return sgn(q) == 0; });
}

Vec zero_vec(std::size_t n) { return Vec(n); }

Vec unit_vec(std::size_t n, std::size_t i)
{
    Vec v(n);
    v[i] = 1;
    return v;
}

Vec add(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("vector add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("vector sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

Vec scale(const Rational& c, const Vec& a)
{
    Vec r(a.size());
    if (sgn(c) == 0)
        return r;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0)
            r[i] = c * a[i];
    return r;
}

void axpy(Vec& y, const Rational& c, const Vec& x)
{
    if (y.size() != x.size())
        throw DimensionMismatch("axpy");
    if (sgn(c) == 0)
        return;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (sgn(x[i]) != 0)
            y[i] += c * x[i];
}

Rational dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("dot");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0)
            s += a[i] * b[i];
    return s;
}

// ---------------------------------------------------------------------------
// ExactMatrix

ExactMatrix::ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

ExactMatrix::ExactMatrix(std::initializer_list<std::initializer_list<Rational>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw DimensionMismatch("ragged initializer");
        for (const auto& q : r)
            data_.push_back(q);
    }
}

ExactMatrix ExactMatrix::identity(std::size_t n)
{
    ExactMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

ExactMatrix ExactMatrix::from_rows(const std::vector<Vec>& rows, std::size_t cols)
{
    ExactMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        m.set_row(i, rows[i]);
    return m;
}

ExactMatrix ExactMatrix::from_cols(const std::vector<Vec>& cols, std::size_t rows)
{
    ExactMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows)
            throw DimensionMismatch("from_cols");
        for (std::size_t i = 0; i < rows; ++i)
            m(i, j) = cols[j][i];
    }
    return m;
}

Vec ExactMatrix::row(std::size_t i) const
{
    return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
               data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vec ExactMatrix::col(std::size_t j) const
{
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, j);
    return v;
}

std::vector<Vec> ExactMatrix::row_vectors() const
{
    std::vector<Vec> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        out.push_back(row(i));
    return out;
}

void ExactMatrix::set_row(std::size_t i, const Vec& v)
{
    if (v.size() != cols_)
        throw DimensionMismatch("set_row");
    std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
}

void ExactMatrix::append_row(const Vec& v)
{
    if (rows_ == 0 && cols_ == 0)
        cols_ = v.size();
    if (v.size() != cols_)
        throw DimensionMismatch("append_row");
    data_.insert(data_.end(), v.begin(), v.end());
    ++rows_;
}

void ExactMatrix::append_rows(const ExactMatrix& m)
{
    if (m.rows() == 0)
        return;
    if (rows_ == 0 && cols_ == 0)
        cols_ = m.cols();
    if (m.cols() != cols_)
        throw DimensionMismatch("append_rows");
    data_.insert(data_.end(), m.data_.begin(), m.data_.end());
    rows_ += m.rows();
}

ExactMatrix ExactMatrix::transpose() const
{
    ExactMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (sgn((*this)(i, j)) != 0)
                t(j, i) = (*this)(i, j);
    return t;
}

bool ExactMatrix::is_zero() const { return spencerkit::is_zero(data_); }

Vec ExactMatrix::apply(const Vec& x) const
{
    if (x.size() != cols_)
        throw DimensionMismatch("apply");
    Vec y(rows_);
    for (std::size_t j = 0; j < cols_; ++j) {
        if (sgn(x[j]) == 0)
            continue;
        for (std::size_t i = 0; i < rows_; ++i)
            if (sgn((*this)(i, j)) != 0)
                y[i] += (*this)(i, j) * x[j];
    }
    return y;
}

Vec ExactMatrix::apply_transpose(const Vec& y) const
{
    if (y.size() != rows_)
        throw DimensionMismatch("apply_transpose");
    Vec x(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (sgn(y[i]) == 0)
            continue;
        for (std::size_t j = 0; j < cols_; ++j)
            if (sgn((*this)(i, j)) != 0)
                x[j] += (*this)(i, j) * y[i];
    }
    return x;
}

ExactMatrix ExactMatrix::operator+(const ExactMatrix& o) const
{
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionMismatch("matrix add");
    ExactMatrix r(*this);
    for (std::size_t k = 0; k < data_.size(); ++k)
        if (sgn(o.data_[k]) != 0)
            r.data_[k] += o.data_[k];
    return r;
}

ExactMatrix ExactMatrix::operator-(const ExactMatrix& o) const
{
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionMismatch("matrix sub");
    ExactMatrix r(*this);
    for (std::size_t k = 0; k < data_.size(); ++k)
        if (sgn(o.data_[k]) != 0)
            r.data_[k] -= o.data_[k];
    return r;
}

ExactMatrix ExactMatrix::operator*(const ExactMatrix& o) const
{
    if (cols_ != o.rows_)
        throw DimensionMismatch("matrix product");
    std::vector<std::vector<std::size_t>> nz(o.rows_);
    for (std::size_t k = 0; k < o.rows_; ++k)
        for (std::size_t j = 0; j < o.cols_; ++j)
            if (sgn(o(k, j)) != 0)
                nz[k].push_back(j);
    ExactMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(i, k);
            if (sgn(a) == 0)
                continue;
            for (std::size_t j : nz[k])
                r(i, j) += a * o(k, j);
        }
    return r;
}

ExactMatrix ExactMatrix::operator*(const Rational& c) const
{
    ExactMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k)
        if (sgn(data_[k]) != 0)
            r.data_[k] = data_[k] * c;
    return r;
}

ExactMatrix ExactMatrix::operator-() const { return (*this) * Rational(-1); }

bool ExactMatrix::operator==(const ExactMatrix& o) const
{
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

std::size_t ExactMatrix::nonzeros() const
{
    return static_cast<std::size_t>(
        std::count_if(data_.begin(), data_.end(), [](const Rational& q) { return sgn(q) != 0; }));
}

ExactMatrix commutator(const ExactMatrix& a, const ExactMatrix& b) { return a * b - b * a; }

ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b)
{
    ExactMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (sgn(a(i, j)) == 0)
                continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    if (sgn(b(k, l)) != 0)
                        r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

ExactMatrix block_diag(const std::vector<ExactMatrix>& blocks)
{
    std::size_t r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    ExactMatrix m(r, c);
    std::size_t ro = 0, co = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                m(ro + i, co + j) = b(i, j);
        ro += b.rows();
        co += b.cols();
    }
    return m;
}

Rational trace(const ExactMatrix& m)
{
    if (m.rows() != m.cols())
        throw DimensionMismatch("trace of non-square matrix");
    Rational t = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        t += m(i, i);
    return t;
}

Vec flatten(const ExactMatrix& m)
{
    Vec v;
    v.reserve(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            v.push_back(m(i, j));
    return v;
}

ExactMatrix unflatten(const Vec& v, std::size_t rows, std::size_t cols)
{
    if (v.size() != rows * cols)
        throw DimensionMismatch("unflatten");
    ExactMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = v[i * cols + j];
    return m;
}

// ---------------------------------------------------------------------------
// Elimination on sparse primitive integer rows.

namespace {

using Entry = std::pair<std::uint32_t, mpz_class>;
using IntRow = std::vector<Entry>;

void make_primitive(IntRow& r)
{
    if (r.empty())
        return;
    mpz_class g = 0;
    for (const auto& e : r) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
        if (g == 1)
            break;
    }
    if (r.front().second < 0)
        g = -g;
    if (g != 1)
        for (auto& e : r)
            mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
}

IntRow to_int_row(const ExactMatrix& m, std::size_t i)
{
    IntRow r;
    mpz_class l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const Rational& q = m(i, j);
        if (sgn(q) != 0)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const Rational& q = m(i, j);
        if (sgn(q) != 0) {
            mpz_class v = l / q.get_den();
            v *= q.get_num();
            r.emplace_back(static_cast<std::uint32_t>(j), std::move(v));
        }
    }
    make_primitive(r);
    return r;
}

mpz_class coeff_at(const IntRow& r, std::uint32_t c)
{
    auto it = std::lower_bound(r.begin(), r.end(), c, [](const Entry& e, std::uint32_t v) { return e.first < v; });
    if (it != r.end() && it->first == c)
        return it->second;
    return 0;
}

// r <- a*r - b*p, with (a, b) chosen so that column c cancels.
void eliminate(IntRow& r, const IntRow& p, std::uint32_t c)
{
    mpz_class a = coeff_at(p, c);
    mpz_class b = coeff_at(r, c);
    if (b == 0)
        return;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    a /= g;
    b /= g;
    IntRow out;
    out.reserve(r.size() + p.size());
    std::size_t i = 0, j = 0;
    while (i < r.size() || j < p.size()) {
        if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
            out.emplace_back(r[i].first, a * r[i].second);
            ++i;
        } else if (i == r.size() || p[j].first < r[i].first) {
            out.emplace_back(p[j].first, -b * p[j].second);
            ++j;
        } else {
            mpz_class v = a * r[i].second - b * p[j].second;
            if (v != 0)
                out.emplace_back(r[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    r = std::move(out);
    make_primitive(r);
}

struct IntEchelon {
    std::vector<IntRow> rows;              // sorted by pivot column
    std::vector<std::uint32_t> pivot_cols;
};

IntEchelon echelon(const ExactMatrix& m, bool reduce)
{
    std::vector<IntRow> pivots;
    std::vector<long> pivot_of(m.cols(), -1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        IntRow r = to_int_row(m, i);
        while (!r.empty()) {
            std::uint32_t c = r.front().first;
            if (pivot_of[c] < 0) {
                pivot_of[c] = static_cast<long>(pivots.size());
                pivots.push_back(std::move(r));
                break;
            }
            eliminate(r, pivots[static_cast<std::size_t>(pivot_of[c])], c);
        }
    }
    IntEchelon e;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (pivot_of[c] >= 0) {
            e.pivot_cols.push_back(static_cast<std::uint32_t>(c));
            e.rows.push_back(std::move(pivots[static_cast<std::size_t>(pivot_of[c])]));
        }
    if (!reduce)
        return e;
    std::vector<long> slot(m.cols(), -1);
    for (std::size_t k = 0; k < e.pivot_cols.size(); ++k)
        slot[e.pivot_cols[k]] = static_cast<long>(k);
    for (std::size_t k = e.rows.size(); k-- > 0;) {
        IntRow& r = e.rows[k];
        for (;;) {
            std::uint32_t target = 0;
            bool found = false;
            for (std::size_t t = 1; t < r.size(); ++t)
                if (slot[r[t].first] >= 0) {
                    target = r[t].first;
                    found = true;
                    break;
                }
            if (!found)
                break;
            eliminate(r, e.rows[static_cast<std::size_t>(slot[target])], target);
        }
    }
    return e;
}

}  // namespace

Echelon rref(const ExactMatrix& m)
{
    IntEchelon e = echelon(m, true);
    Echelon out;
    out.rref = ExactMatrix(e.rows.size(), m.cols());
    for (std::size_t k = 0; k < e.rows.size(); ++k) {
        const IntRow& r = e.rows[k];
        const mpz_class& lead = r.front().second;
        for (const auto& [c, v] : r) {
            Rational q(v, lead);
            q.canonicalize();
            out.rref(k, c) = q;
        }
        out.pivots.push_back(e.pivot_cols[k]);
    }
    return out;
}

std::size_t rank(const ExactMatrix& m) { return echelon(m, false).rows.size(); }

ExactMatrix kernel(const ExactMatrix& m)
{
    Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots)
        is_pivot[p] = true;
    std::vector<Vec> gens;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        Vec x(m.cols());
        x[f] = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            if (sgn(e.rref(r, f)) != 0)
                x[e.pivots[r]] = -e.rref(r, f);
        gens.push_back(std::move(x));
    }
    return Subspace::span(gens, m.cols()).basis();
}

ExactMatrix inverse(const ExactMatrix& m)
{
    const std::size_t n = m.rows();
    if (m.cols() != n)
        throw DimensionMismatch("inverse of non-square matrix");
    ExactMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    Echelon e = rref(aug);
    if (e.rank() < n || e.pivots[n - 1] != n - 1)
        throw DimensionMismatch("singular matrix");
    ExactMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv(i, j) = e.rref(i, n + j);
    return inv;
}

AffineResult solve_affine(const ExactMatrix& a, const Vec& b)
{
    if (b.size() != a.rows())
        throw DimensionMismatch("solve_affine: rhs length");
    const std::size_t n = a.cols();
    ExactMatrix aug(a.rows(), n + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = a(i, j);
        aug(i, n) = b[i];
    }
    Echelon e = rref(aug);
    if (!e.pivots.empty() && e.pivots.back() == n) {
        ExactMatrix left = kernel(a.transpose());
        for (std::size_t k = 0; k < left.rows(); ++k) {
            Vec y = left.row(k);
            if (sgn(dot(y, b)) != 0)
                return NoSolution{y};
        }
        throw std::logic_error("solve_affine: inconsistent system without certificate");
    }
    Vec x(n);
    for (std::size_t r = 0; r < e.pivots.size(); ++r)
        x[e.pivots[r]] = e.rref(r, n);
    return ParticularSolution{x};
}

std::optional<Vec> solve(const ExactMatrix& a, const Vec& b)
{
    auto r = solve_affine(a, b);
    if (auto* p = std::get_if<ParticularSolution>(&r))
        return p->x;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Subspace

Subspace::Subspace(std::size_t ambient) : ambient_(ambient), basis_(0, ambient) {}

Subspace Subspace::span(const ExactMatrix& generators)
{
    Subspace s(generators.cols());
    Echelon e = rref(generators);
    s.basis_ = std::move(e.rref);
    s.pivots_ = std::move(e.pivots);
    return s;
}

Subspace Subspace::span(const std::vector<Vec>& generators, std::size_t ambient)
{
    return span(ExactMatrix::from_rows(generators, ambient));
}

Subspace Subspace::full(std::size_t ambient) { return span(ExactMatrix::identity(ambient)); }

Subspace Subspace::kernel_of(const ExactMatrix& m)
{
    Subspace s(m.cols());
    s.basis_ = kernel(m);
    for (std::size_t r = 0; r < s.basis_.rows(); ++r)
        for (std::size_t c = 0; c < s.ambient_; ++c)
            if (sgn(s.basis_(r, c)) != 0) {
                s.pivots_.push_back(c);
                break;
            }
    return s;
}

std::optional<Vec> Subspace::coordinates(const Vec& v) const
{
    if (v.size() != ambient_)
        throw DimensionMismatch("Subspace::coordinates");
    Vec c(dim());
    for (std::size_t r = 0; r < dim(); ++r)
        c[r] = v[pivots_[r]];
    if (combine(c) != v)
        return std::nullopt;
    return c;
}

bool Subspace::contains(const Vec& v) const { return coordinates(v).has_value(); }

bool Subspace::contains(const Subspace& other) const
{
    for (std::size_t r = 0; r < other.dim(); ++r)
        if (!contains(other.vector(r)))
            return false;
    return true;
}

Vec Subspace::combine(const Vec& coeffs) const
{
    if (coeffs.size() != dim())
        throw DimensionMismatch("Subspace::combine");
    return basis_.apply_transpose(coeffs);
}

ExactMatrix Subspace::annihilator() const
{
    if (dim() == 0)
        return ExactMatrix::identity(ambient_);
    return kernel(basis_);
}

Subspace Subspace::sum(const Subspace& other) const
{
    if (other.ambient_ != ambient_)
        throw DimensionMismatch("Subspace::sum");
    ExactMatrix g = basis_;
    if (g.rows() == 0)
        g = ExactMatrix(0, ambient_);
    g.append_rows(other.basis_);
    return span(g);
}

Subspace Subspace::intersect(const Subspace& other) const
{
    if (other.ambient_ != ambient_)
        throw DimensionMismatch("Subspace::intersect");
    ExactMatrix a = annihilator();
    a.append_rows(other.annihilator());
    if (a.rows() == 0)
        return full(ambient_);
    return kernel_of(a);
}

// ---------------------------------------------------------------------------
// Frame

Frame::Frame(const ExactMatrix& vectors) : vectors_(vectors)
{
    Echelon e = rref(vectors);
    if (e.rank() != vectors.rows())
        throw DimensionMismatch("Frame: vectors are linearly dependent");
    pivots_ = e.pivots;
    const std::size_t k = vectors.rows();
    ExactMatrix sq(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            sq(i, j) = vectors(i, pivots_[j]);
    solver_ = k ? inverse(sq) : ExactMatrix(0, 0);
}

std::optional<Vec> Frame::coordinates(const Vec& v) const
{
    if (v.size() != ambient())
        throw DimensionMismatch("Frame::coordinates");
    const std::size_t k = size();
    Vec xp(k);
    for (std::size_t j = 0; j < k; ++j)
        xp[j] = v[pivots_[j]];
    Vec c = solver_.apply_transpose(xp);
    if (combine(c) != v)
        return std::nullopt;
    return c;
}

Vec Frame::coords(const Vec& v) const
{
    auto c = coordinates(v);
    if (!c)
        throw std::domain_error("vector outside the span of the frame");
    return *c;
}

Vec Frame::combine(const Vec& coeffs) const
{
    if (coeffs.size() != size())
        throw DimensionMismatch("Frame::combine");
    if (size() == 0)
        return Vec(ambient());
    return vectors_.apply_transpose(coeffs);
}

// ---------------------------------------------------------------------------
// Index tables

std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t n, std::size_t k, bool strict)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, strict ? i + 1 : i);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

std::optional<std::size_t> IndexTable::find(const std::vector<std::size_t>& t) const
{
    auto it = index.find(t);
    if (it == index.end())
        return std::nullopt;
    return it->second;
}

IndexTable tensor_index_maps(std::size_t n, TensorKind kind, std::size_t m)
{
    IndexTable t;
    switch (kind) {
    case TensorKind::Sym2: t.tuples = increasing_tuples(n, 2, false); break;
    case TensorKind::Wedge2: t.tuples = increasing_tuples(n, 2, true); break;
    case TensorKind::Sym3: t.tuples = increasing_tuples(n, 3, false); break;
    case TensorKind::Full2:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                t.tuples.push_back({i, j});
        break;
    case TensorKind::Mixed:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                t.tuples.push_back({i, j});
        break;
    }
    for (std::size_t k = 0; k < t.tuples.size(); ++k)
        t.index.emplace(t.tuples[k], k);
    return t;
}

}  // namespace spencerkit
