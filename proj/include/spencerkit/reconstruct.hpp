#pragma once

#include "spencerkit/deform.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace spencerkit {

class EquivarianceViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class TorsionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class CurvatureMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Phi(v + A + a) = (A + lambda_1(v), a + lambda_2(v)) on the even part of the deformation.
struct NomizuMap {
    std::vector<std::size_t> domain;  // even basis indices of the deformation (V, h, r')
    ExactMatrix phi;                  // (dim so(V) + dim r) x domain.size()
    std::vector<std::string> unchecked_hypotheses;
};

/// Verifies the restriction to a_0, a_0-equivariance and torsion-freeness before returning.
NomizuMap build_nomizu_map(const DeformContext& ctx, const AdmissibleDatum& datum, const FilteredDeformation& def);

struct CurvatureAtOrigin {
    std::vector<std::vector<Vec>> r0;  // [v][w] in so(V) coordinates
    std::vector<std::vector<Vec>> f0;  // [v][w] in r coordinates
    bool bianchi = false;
    bool flat_r = false;  // f0 vanishes
};

/// [Phi v, Phi w] - Phi [v, w], checked against -theta-tilde; throws CurvatureMismatch.
CurvatureAtOrigin curvature_at_origin(const DeformContext& ctx, const FilteredDeformation& def,
                                      const NomizuMap& nomizu, const ThetaData& theta);

}  // namespace spencerkit
