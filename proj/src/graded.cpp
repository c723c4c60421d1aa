#include "spencerkit/graded.hpp"

#include <stdexcept>

namespace spencerkit {

GradedAlgebra::GradedAlgebra(std::vector<Block> blocks) : blocks_(std::move(blocks))
{
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        offsets_.push_back(n_);
        for (std::size_t k = 0; k < blocks_[b].dim; ++k)
            block_of_.push_back(b);
        n_ += blocks_[b].dim;
    }
    brackets_.assign(n_ * n_, Vec(n_));
}

std::size_t GradedAlgebra::block_index(const std::string& name) const
{
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (blocks_[b].name == name)
            return b;
    throw std::out_of_range("no block named " + name);
}

void GradedAlgebra::set_bracket(std::size_t i, std::size_t j, const Vec& value)
{
    set_bracket_raw(i, j, value);
    if (i != j)
        set_bracket_raw(j, i, scale(Rational(-koszul(parity(i), parity(j))), value));
}

void GradedAlgebra::set_bracket_raw(std::size_t i, std::size_t j, const Vec& value)
{
    if (value.size() != n_)
        throw DimensionMismatch("bracket value has wrong length");
    brackets_[i * n_ + j] = value;
}

Vec GradedAlgebra::bracket(const Vec& x, const Vec& y) const
{
    if (x.size() != n_ || y.size() != n_)
        throw DimensionMismatch("bracket arguments");
    Vec out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (sgn(x[i]) == 0)
            continue;
        for (std::size_t j = 0; j < n_; ++j)
            if (sgn(y[j]) != 0)
                axpy(out, x[i] * y[j], bracket(i, j));
    }
    return out;
}

ExactMatrix GradedAlgebra::ad(const Vec& x) const
{
    ExactMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (sgn(x[i]) == 0)
            continue;
        for (std::size_t j = 0; j < n_; ++j) {
            const Vec& b = bracket(i, j);
            for (std::size_t k = 0; k < n_; ++k)
                if (sgn(b[k]) != 0)
                    m(k, j) += x[i] * b[k];
        }
    }
    return m;
}

ExactMatrix GradedAlgebra::ad(std::size_t i) const { return ad(unit_vec(n_, i)); }

Vec GradedAlgebra::block_part(const Vec& x, std::size_t b) const
{
    return Vec(x.begin() + static_cast<std::ptrdiff_t>(offsets_[b]),
               x.begin() + static_cast<std::ptrdiff_t>(offsets_[b] + blocks_[b].dim));
}

Vec GradedAlgebra::embed(std::size_t b, const Vec& part) const
{
    if (part.size() != blocks_[b].dim)
        throw DimensionMismatch("embed: block length");
    Vec x(n_);
    for (std::size_t k = 0; k < part.size(); ++k)
        x[offsets_[b] + k] = part[k];
    return x;
}

bool GradedAlgebra::operator==(const GradedAlgebra& o) const
{
    if (blocks_.size() != o.blocks_.size())
        return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (blocks_[b].name != o.blocks_[b].name || blocks_[b].degree != o.blocks_[b].degree ||
            blocks_[b].dim != o.blocks_[b].dim)
            return false;
    return brackets_ == o.brackets_;
}

}  // namespace spencerkit
