#pragma once

#include "spencerkit/flatmodel.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spencerkit {

class NotACocycle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class OracleMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class KappaZero : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class NotHighlySusy : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data for cochains on the negative part of `source` with values in `target`,
/// where source acts on target through `inclusion`.
struct ComplexContext {
    GradedAlgebra source;
    GradedAlgebra target;
    ExactMatrix inclusion;           // target.dim() x source.dim()
    std::vector<std::size_t> legs;   // source indices of negative degree, in basis order
    std::vector<int> leg_parity;
    std::vector<int> leg_degree;
    std::vector<Vec> leg_bracket;            // [x_i, x_j] in leg coordinates, index i * legs + j
    std::vector<ExactMatrix> leg_action;     // ad of iota(x_i) on target

    std::size_t n_legs() const { return legs.size(); }
    /// Leg coordinates of the negative part of a source element.
    Vec to_legs(const Vec& source_vec) const;
};

ComplexContext make_context(const GradedAlgebra& source, const GradedAlgebra& target, const ExactMatrix& inclusion);

/// Super-alternating cochains of fixed degree d and homological degree p.
/// Coordinates are the values on sorted leg tuples: even legs strictly
/// increasing, odd legs weakly increasing, even before odd.
struct CochainSpace {
    struct Component {
        std::size_t n_even = 0, n_odd = 0;
        std::size_t target_block = 0;
        std::size_t target_offset = 0, target_dim = 0;
        std::vector<std::vector<std::size_t>> tuples;
        std::map<std::vector<std::size_t>, std::size_t> index;
        std::size_t offset = 0;
        std::size_t size() const { return tuples.size() * target_dim; }
    };
    struct Coord {
        std::size_t index;
        int sign;
    };

    int d = 0;
    std::size_t p = 0;
    std::vector<int> leg_parity;
    std::vector<int> target_block_of;   // per target basis index
    std::vector<Component> comps;
    std::size_t dim = 0;

    /// Coordinate of phi(x_1..x_p)_m up to sign, or nothing if the value vanishes identically.
    std::optional<Coord> locate(std::vector<std::size_t> tuple, std::size_t m) const;
    const Component* component(std::size_t n_even, std::size_t target_block) const;
    /// (tuple, target index) of a coordinate.
    std::pair<std::vector<std::size_t>, std::size_t> label(std::size_t coord) const;
};

CochainSpace make_cochain_space(const ComplexContext& ctx, int d, std::size_t p);
ExactMatrix differential(const ComplexContext& ctx, const CochainSpace& from, const CochainSpace& to);
/// Matrix of x . phi = [x, phi(...)] - sum_i phi(.., [x, x_i], ..) for an even degree-0 source element x.
ExactMatrix cochain_action(const ComplexContext& ctx, const CochainSpace& space, const Vec& x);
/// phi(args...) for arguments in leg coordinates.
Vec evaluate(const CochainSpace& space, const Vec& phi, const std::vector<Vec>& args);
/// phi -> T o phi o (L x ... x L) between cochain spaces with the same p.
ExactMatrix transfer(const CochainSpace& from, const CochainSpace& to, const ExactMatrix& leg_map,
                     const ExactMatrix& target_map);
/// Cochain vector built from a function on (tuple, target index).
template <class F>
Vec cochain_from(const CochainSpace& space, F&& f)
{
    Vec v(space.dim);
    for (std::size_t c = 0; c < space.dim; ++c) {
        auto [t, m] = space.label(c);
        v[c] = f(t, m);
    }
    return v;
}

struct SpencerComplex {
    ComplexContext ctx;
    int d = 0;
    std::vector<CochainSpace> spaces;   // p = 0 .. top
    std::vector<ExactMatrix> diffs;     // diffs[p] : C^{d,p} -> C^{d,p+1}
    std::size_t top() const { return spaces.size() - 1; }
};

SpencerComplex build_complex(ComplexContext ctx, int d, std::size_t top);
/// C(a_-; a) for a graded subalgebra, homological degrees 0..top.
SpencerComplex build_spencer_complex(const GradedSubalgebra& a, int d, std::size_t top);
/// C(a_-; s) with values in the whole flat model.
SpencerComplex build_mixed_complex(const GradedSubalgebra& a, int d, std::size_t top);
/// C(s_-; s) for the flat model.
SpencerComplex build_flat_complex(const FlatModel& m, int d, std::size_t top);

struct CohomologyResult {
    int d = 0;
    std::size_t p = 0;
    std::size_t dim_z = 0, dim_b = 0, dim_h = 0;
    Subspace z, b;
    ExactMatrix representatives;          // rows complement B inside Z
    std::vector<ExactMatrix> action;      // per degree-0 source basis element, on representative coordinates
};

CohomologyResult compute_cohomology(const SpencerComplex& cx, std::size_t p, bool with_action = false);
/// Block of the differential C^{d,p} -> C^{d,p+1} between two components.
ExactMatrix differential_block(const SpencerComplex& cx, std::size_t p, const CochainSpace::Component& from,
                               const CochainSpace::Component& to);

/// Equivariant section of kappa : sym^2 S -> V.
struct SpinorSquareSplitting {
    ExactMatrix sigma;       // dim sym^2 S x dim V, columns in pair coordinates
    bool so_equivariant = false;
    bool r_equivariant = false;
};
SpinorSquareSplitting compute_splitting(const FlatModel& m);
/// Matrix of an endomorphism of S acting on sym^2 S in pair coordinates (i <= j).
ExactMatrix sym2_action(const ExactMatrix& t);
ExactMatrix kappa_matrix(const DiracCurrent& kappa);
/// I - Sigma kappa on sym^2 S, the projector onto ker kappa along the image of Sigma.
ExactMatrix kernel_projector(const FlatModel& m, const SpinorSquareSplitting& split);

/// Block indices of the flat model targets.
struct FlatComponents {
    const CochainSpace::Component* alpha;
    const CochainSpace::Component* beta;
    const CochainSpace::Component* gamma;
    const CochainSpace::Component* rho;
};
FlatComponents flat_components(const CochainSpace& c22);

/// Cocycles with alpha = 0 and rho(Sigma(v)) = 0.
struct NormalisedSpace {
    Subspace space;            // inside C^{2,2}(s_-; s)
    SpinorSquareSplitting splitting;
};
NormalisedSpace normalised_space(const SpencerComplex& flat, const SpinorSquareSplitting& split);

struct Normalisation {
    Vec hat;      // normalised cocycle in C^{2,2}(s_-; s)
    Vec lambda;   // in C^{2,1}(s_-; s) = Hom(V, so(V) + r)
};
/// z = hat + d lambda with lambda_1 fixed by alpha and lambda_2 = -rho o Sigma.
Normalisation normalise_cocycle(const SpencerComplex& flat, const SpinorSquareSplitting& split, const Vec& z);

/// Elements of `space` annihilated by every given degree-0 flat-model element
/// on the beta and rho components; the full cochain is checked to vanish too.
Subspace invariant_normalised_cocycles(const SpencerComplex& flat, const Subspace& space,
                                       const std::vector<Vec>& degree_zero);
/// Degree-0 part of a subalgebra as flat-model vectors.
std::vector<Vec> degree_zero_basis(const GradedSubalgebra& a);

/// i^* : C^{2,p}(s_-; s) -> C^{2,p}(a_-; s) and i_* : C^{2,p}(a_-; a) -> C^{2,p}(a_-; s).
ExactMatrix restriction_map(const SpencerComplex& flat, const SpencerComplex& mixed, const GradedSubalgebra& a,
                            std::size_t p);
ExactMatrix pushforward_map(const SpencerComplex& own, const SpencerComplex& mixed, const GradedSubalgebra& a,
                            std::size_t p);

/// Normalised cocycles whose beta restricts to zero on V x S' and rho to zero on sym^2 S'.
Subspace compute_K22(const SpencerComplex& flat, const SpencerComplex& mixed, const GradedSubalgebra& a,
                     const Subspace& space);
/// Kernel of hat -> [i^* hat] in H^{2,2}(a_-; s), for comparison with compute_K22.
Subspace restriction_kernel_in_cohomology(const SpencerComplex& flat, const SpencerComplex& mixed,
                                          const GradedSubalgebra& a, const Subspace& space);

}  // namespace spencerkit
