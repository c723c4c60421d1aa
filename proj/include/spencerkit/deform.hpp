#pragma once

#include "spencerkit/spencer.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spencerkit {

class NotTransitive : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class FiltrationViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat-model data shared by every subalgebra of one model.
struct FlatData {
    std::shared_ptr<const FlatModel> model;
    SpencerComplex complex;   // C(s_-; s) in degree 2, p = 0..3
    SpinorSquareSplitting splitting;
    Subspace normalised;      // normalised cocycles inside C^{2,2}(s_-; s)
};
std::shared_ptr<const FlatData> make_flat_data(std::shared_ptr<const FlatModel> model);

struct DeformContext {
    std::shared_ptr<const FlatData> flat;
    GradedSubalgebra sub;
    SpencerComplex own;       // C(a_-; a), p = 0..3
    SpencerComplex mixed;     // C(a_-; s), p = 0..2
    ExactMatrix restriction;  // i^* on C^{2,2}
    ExactMatrix pushforward;  // i_* on C^{2,2}
    Subspace invariant;       // a_0-invariant normalised cocycles
    Subspace k22;             // the part of `invariant` restricting to a coboundary
    Frame sub_frame;          // coordinates in a of flat-model vectors

    const FlatModel& model() const { return *flat->model; }
    const GradedAlgebra& s() const { return flat->model->alg; }
    /// Flat-model image of the k-th basis element of a.
    Vec embed(std::size_t k) const { return sub.inclusion.col(k); }
    bool in_sub(const Vec& x) const { return sub_frame.coordinates(x).has_value(); }
    /// Basis indices of a in degree 0.
    std::vector<std::size_t> degree_zero() const;
};

/// Throws NotTransitive unless a is highly supersymmetric and transitive.
DeformContext make_deform_context(std::shared_ptr<const FlatData> flat, const GradedSubalgebra& a);

/// Replaces r' by the part acting faithfully on S'; `replaced` records whether it changed.
struct TransitiveRouting {
    GradedSubalgebra sub;
    bool replaced = false;
};
TransitiveRouting route_transitive(const GradedSubalgebra& a);

struct AdmissibleDatum {
    Vec mu;          // C^{2,2}(a_-; a)
    Vec hat;         // invariant normalised cocycle in C^{2,2}(s_-; s)
    Vec hat_coords;  // coordinates in the basis of ctx.invariant
    Vec lambda;      // C^{2,1}(a_-; s) = Hom(V, so(V) + r)
};

/// Evaluation of a datum on flat-model vectors.
class DatumMaps {
public:
    DatumMaps(const DeformContext& ctx, const AdmissibleDatum& datum);

    /// hat(x, y) for x, y in s_-; beta-hat on (V, S), gamma-hat + rho-hat on (S, S).
    Vec hat(const Vec& x, const Vec& y) const;
    /// lambda_1(v) + lambda_2(v) for v in V.
    Vec lambda(const Vec& v) const;
    /// mu evaluated on a_- and mapped into the flat model.
    Vec mu(const Vec& x, const Vec& y) const;
    Vec br(const Vec& x, const Vec& y) const { return ctx_.s().bracket(x, y); }
    Vec v(std::size_t i) const;   // basis vector of V
    Vec sp(std::size_t i) const;  // basis vector of S'
    std::size_t dim_v() const;
    std::size_t dim_sp() const;

private:
    const DeformContext& ctx_;
    const AdmissibleDatum& datum_;
    std::vector<Vec> lambda_;
};

struct AdmissibilityResult {
    bool admissible = false;
    std::optional<AdmissibleDatum> datum;
    Vec certificate;  // from the infeasible system when not admissible
};
/// Solves i_* mu = i^* hat + d lambda with hat invariant normalised. Throws NotACocycle.
AdmissibilityResult check_admissibility(const DeformContext& ctx, const Vec& mu);
/// Some mu in Z^{2,2}(a_-; a) admissible with the given hat, if any.
std::optional<AdmissibleDatum> datum_from_hat(const DeformContext& ctx, const Vec& hat);
/// Re-checks the defining equations and the memberships in a; throws OracleMismatch.
void verify_admissible(const DeformContext& ctx, const AdmissibleDatum& datum);

/// delta(X, v) for X in a_0 and v in V, as flat-model vectors.
struct DeltaMap {
    std::vector<std::vector<Vec>> value;  // [degree-0 basis index of a][v]
    bool operator==(const DeltaMap& o) const { return value == o.value; }
};
struct DeltaResult {
    DeltaMap delta;
    bool delta3_zero = false;
    bool cocycle = false;  // delta is a 1-cocycle of a_0 and satisfies X . mu = d(i_X delta)
};
DeltaMap delta_closed_form(const DeformContext& ctx, const AdmissibleDatum& datum);
/// From d chi_X = X . mu in C(a_-; a).
DeltaMap delta_generic(const DeformContext& ctx, const AdmissibleDatum& datum);
/// Both routes; throws OracleMismatch when they differ.
DeltaResult solve_delta(const DeformContext& ctx, const AdmissibleDatum& datum);

struct ThetaData {
    std::vector<std::vector<std::vector<Vec>>> big_theta;  // [v][i][j] over the basis of S', symmetric in i, j
    bool annihilated = false;                              // Theta kills the Dirac kernel
    std::vector<std::vector<Vec>> tilde;                   // [v][w]; empty unless annihilated
    bool alternating = false;
    Vec tilde_at(const Vec& v, const Vec& w) const;
};
/// Throws OracleMismatch on internal inconsistencies.
ThetaData compute_theta(const DeformContext& ctx, const AdmissibleDatum& datum);

struct NamedCheck {
    std::string name;
    bool pass = true;
    std::vector<std::size_t> witness;  // basis indices of the first failure
};
struct IntegrabilityReport {
    bool integrable = false;
    std::vector<NamedCheck> checks;
    const NamedCheck* find(const std::string& name) const;
};
/// The decisive conditions are "dirac-kernel" and "act-s"; the rest are implied
/// by them, and a failure there when both hold throws OracleMismatch.
IntegrabilityReport check_integrability(const DeformContext& ctx, const AdmissibleDatum& datum,
                                        const ThetaData& theta);

struct FilteredDeformation {
    GradedAlgebra alg;  // on the basis of a
    JacobiCertificate jacobi;
    bool filtration = false;
    bool associated_graded = false;
    bool defining_sequence = false;
};
/// Throws JacobiViolation or FiltrationViolation when the output is not a filtered deformation.
FilteredDeformation build_filtered_deformation(const DeformContext& ctx, const AdmissibleDatum& datum,
                                               const ThetaData& theta);
/// Phi[x, y]_1 = [Phi x, Phi y]_2 on all basis pairs.
bool is_homomorphism(const GradedAlgebra& g1, const GradedAlgebra& g2, const ExactMatrix& phi);
/// Phi(v) = v + lambda(v) - lambda'(v) between deformations of two data in one class.
ExactMatrix gauge_isomorphism(const DeformContext& ctx, const AdmissibleDatum& d1, const AdmissibleDatum& d2);

struct Realisability {
    bool realisable = false;
    bool theta2_zero = false;
    bool lambda2_removable = false;
    Vec hat_shift;     // coordinates in the basis of ctx.k22
    Vec lambda_shift;  // element of C^{2,1}(a_-; s) with values in a_0
    Vec certificate;
};
Realisability check_geometric_realisability(const DeformContext& ctx, const AdmissibleDatum& datum,
                                            const ThetaData& theta);

struct EnvelopeCandidate {
    Subspace span;  // in flat-model coordinates
    bool subalgebra = false;
    bool preserves_spinors = false;
    bool preserves_hat = false;
};
struct Envelope {
    EnvelopeCandidate joint;  // (gamma-hat + rho-hat)(D)
    EnvelopeCandidate split;  // gamma-hat(D) + rho-hat(D)
    bool splits = false;      // joint == split
};
Envelope compute_envelope(const DeformContext& ctx, const AdmissibleDatum& datum);

/// Invariant normalised cocycles hat for which some mu is admissible with hat.
Subspace admissible_hats(const DeformContext& ctx);
/// One datum per canonical basis element of admissible_hats.
std::vector<AdmissibleDatum> instances_from_basis(const DeformContext& ctx);

}  // namespace spencerkit
