#pragma once

#include "spencerkit/exactla.hpp"

#include <string>
#include <vector>

namespace spencerkit {

/// A homogeneous summand of a graded vector space. Parity is degree mod 2.
struct Block {
    std::string name;
    int degree = 0;
    std::size_t dim = 0;
};

/// Finite-dimensional Z-graded Lie superalgebra given by structure constants
/// on a block-ordered basis. Brackets are stored for every ordered pair.
class GradedAlgebra {
public:
    GradedAlgebra() = default;
    explicit GradedAlgebra(std::vector<Block> blocks);

    std::size_t dim() const { return n_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t block_index(const std::string& name) const;
    std::size_t offset(std::size_t b) const { return offsets_[b]; }
    std::size_t block_dim(std::size_t b) const { return blocks_[b].dim; }
    std::size_t block_of(std::size_t i) const { return block_of_[i]; }
    int degree(std::size_t i) const { return blocks_[block_of_[i]].degree; }
    int parity(std::size_t i) const { return degree(i) & 1; }

    /// Sets [e_i, e_j] and the super-antisymmetric partner [e_j, e_i].
    void set_bracket(std::size_t i, std::size_t j, const Vec& value);
    /// Sets [e_i, e_j] alone, leaving [e_j, e_i] untouched.
    void set_bracket_raw(std::size_t i, std::size_t j, const Vec& value);
    const Vec& bracket(std::size_t i, std::size_t j) const { return brackets_[i * n_ + j]; }
    Vec bracket(const Vec& x, const Vec& y) const;
    /// Matrix of ad(x): column j is [x, e_j].
    ExactMatrix ad(const Vec& x) const;
    ExactMatrix ad(std::size_t i) const;

    Vec block_part(const Vec& x, std::size_t b) const;
    Vec embed(std::size_t b, const Vec& part) const;

    bool operator==(const GradedAlgebra& o) const;

private:
    std::vector<Block> blocks_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> block_of_;
    std::size_t n_ = 0;
    std::vector<Vec> brackets_;
};

/// Super sign (-1)^{|x||y|} for parities.
inline int koszul(int px, int py) { return (px & py) ? -1 : 1; }

}  // namespace spencerkit
