#pragma once

#include "spencerkit/cliffspin.hpp"
#include "spencerkit/graded.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spencerkit {

class NotClosed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NotCompactForm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class JacobiViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Subalgebra of End(S) with a canonical basis and structure constants.
struct EndoSubalgebra {
    std::size_t n = 0;
    std::vector<ExactMatrix> basis;
    Subspace span;  // inside Q^{n*n}, row-major flattening
    std::size_t dim() const { return basis.size(); }
    std::optional<Vec> coordinates(const ExactMatrix& m) const;
    ExactMatrix element(const Vec& coeffs) const;
};

EndoSubalgebra compute_schur_algebra(const std::vector<ExactMatrix>& spin_gens, std::size_t n);
/// Elements of the Schur algebra that preserve kappa.
EndoSubalgebra compute_r_symmetry_algebra(const EndoSubalgebra& schur, const DiracCurrent& kappa);
EndoSubalgebra endo_subalgebra_from(const std::vector<ExactMatrix>& gens, std::size_t n);

/// V + S + so(V) + r with blocks "V" (-2), "S" (-1), "A" (0), "R" (0).
struct FlatModel {
    Signature sig;
    std::size_t copies = 1;
    CliffordRep rep;   // already extended to all copies
    DiracCurrent kappa;
    std::vector<ExactMatrix> so;    // E_ij on V
    std::vector<ExactMatrix> spin;  // sigma_ij on S
    EndoSubalgebra schur;
    EndoSubalgebra r;
    GradedAlgebra alg;

    static constexpr std::size_t V = 0, S = 1, A = 2, R = 3;
    std::size_t dim_v() const { return alg.block_dim(V); }
    std::size_t dim_s() const { return alg.block_dim(S); }
    std::size_t dim_so() const { return alg.block_dim(A); }
    std::size_t dim_r() const { return alg.block_dim(R); }

    ExactMatrix so_on_v(const Vec& coeffs) const;
    ExactMatrix so_on_s(const Vec& coeffs) const;
    ExactMatrix r_on_s(const Vec& coeffs) const;
    /// Coordinates of an antisymmetric endomorphism of V in the E_ij basis.
    Vec so_coords(const ExactMatrix& e) const;
    Vec r_coords(const ExactMatrix& a) const;
};

struct FlatModelOptions {
    PairingChoice pairing;
    std::optional<std::vector<ExactMatrix>> explicit_kappa;  // acts on all copies
};

/// Rejects a symmetric bilinear kappa that is not so(V)-equivariant.
FlatModel build_flat_model(const Signature& sig, std::size_t copies, const FlatModelOptions& opts = {});

struct JacobiCertificate {
    bool pass = true;
    std::string failure;  // "antisymmetry", "degree", "filtration" or "jacobi"
    std::size_t i = 0, j = 0, k = 0;
    Vec witness;
    std::size_t triples_checked = 0;
};
struct JacobiOptions {
    bool filtered = false;  // degree condition becomes an inequality
};
JacobiCertificate graded_jacobi_check(const GradedAlgebra& alg, const JacobiOptions& opts = {});

/// Block "V" (-2), "S" (-1), "A" (0, inside so(V)), "R" (0, inside r).
struct GradedSubalgebra {
    std::shared_ptr<const FlatModel> model;
    Subspace vp, sp, h, rp;  // in V, S, so(V) and r coordinates
    GradedAlgebra alg;
    ExactMatrix inclusion;   // columns are the basis of the subalgebra inside the flat model
    bool highly_susy = false;
    bool transitive = false;
    std::size_t kappa_rank = 0;          // rank of kappa on sym^2 S'
    std::size_t so_annihilator_dim = 0;  // so(V) elements killing S'

    std::size_t dim_v() const { return vp.dim(); }
    std::size_t dim_s() const { return sp.dim(); }
    std::size_t dim_h() const { return h.dim(); }
    std::size_t dim_rp() const { return rp.dim(); }
    bool homogeneous() const { return kappa_rank == model->dim_v(); }
};

GradedSubalgebra make_graded_subalgebra(std::shared_ptr<const FlatModel> model, const Subspace& vp,
                                        const Subspace& sp, const Subspace& h, const Subspace& rp);
GradedSubalgebra maximal_subalgebra(std::shared_ptr<const FlatModel> model);
/// V' = V, the full stabilisers of S' in so(V), and the part of r acting faithfully on S'.
GradedSubalgebra stabiliser_subalgebra(std::shared_ptr<const FlatModel> model, const Subspace& sp);

Subspace so_stabiliser(const FlatModel& m, const Subspace& vp, const Subspace& sp);
Subspace r_stabiliser(const FlatModel& m, const Subspace& sp);
/// Elements of so(V) acting as zero on S'.
Subspace so_annihilator(const FlatModel& m, const Subspace& sp);
/// Rank of kappa restricted to sym^2 S'.
std::size_t kappa_rank_on(const DiracCurrent& kappa, const Subspace& sp);
/// Kernel of kappa on sym^2 S', as coefficient vectors over pairs i <= j of the basis of S'.
ExactMatrix dirac_kernel(const DiracCurrent& kappa, const Subspace& sp);

struct FaithfulSplit {
    Subspace ann;  // acts trivially on S'
    Subspace rpp;  // trace-form complement, acts faithfully
};
/// Throws NotCompactForm if -tr(ab) is not positive-definite on rp, NotClosed if rp does not preserve S'.
FaithfulSplit faithful_split(const FlatModel& m, const Subspace& sp, const Subspace& rp);
/// Positive-definiteness through exact LDL^T pivots.
bool positive_definite(const ExactMatrix& gram);

/// Subspace of the given dimension spanned by pseudo-random small integer vectors.
Subspace random_subspace(std::size_t ambient, std::size_t dim, std::uint64_t seed);

}  // namespace spencerkit
