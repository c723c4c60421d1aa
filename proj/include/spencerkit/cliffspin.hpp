#pragma once

#include "spencerkit/exactla.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spencerkit {

class NoRealForm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NoInvariantPairing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NotEquivariant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// t timelike directions (eta = -1) first, then s spacelike ones (eta = +1).
struct Signature {
    int s = 0;
    int t = 1;
    std::size_t dim() const { return static_cast<std::size_t>(s + t); }
    bool lorentzian() const { return t == 1; }
    bool operator==(const Signature&) const = default;
};

ExactMatrix metric(const Signature& sig);

/// Rational real Clifford module: gamma_i gamma_j + gamma_j gamma_i = 2 eta_ij.
struct CliffordRep {
    Signature sig;
    std::vector<ExactMatrix> gammas;
    std::size_t spinor_dim = 0;
};

/// Irreducible real module of the Clifford algebra of the signature. Throws
/// NoRealForm when that algebra is not a (sum of) real matrix algebra(s).
CliffordRep build_clifford_rep(const Signature& sig);
bool check_clifford_relation(const CliffordRep& rep);
/// Block diagonal sum of n copies.
CliffordRep extend(const CliffordRep& rep, std::size_t n);

/// Index pairs (i, j), i < j, labelling the so(V) basis.
std::vector<std::pair<std::size_t, std::size_t>> so_index_pairs(std::size_t d);
/// E_ij v = eta(e_j, v) e_i - eta(e_i, v) e_j.
std::vector<ExactMatrix> so_basis(const Signature& sig);
/// sigma_ij = [gamma_i, gamma_j] / 4, the image of E_ij in End(S).
std::vector<ExactMatrix> spin_generators(const CliffordRep& rep);

/// kappa(x, y)^a = x^T K[a] y.
struct DiracCurrent {
    std::size_t dim_v = 0;
    std::size_t dim_s = 0;
    std::vector<ExactMatrix> components;
    std::optional<ExactMatrix> pairing;  // C with K[a] = C gamma^a, when known
    bool symmetric = true;
    bool degenerate = false;

    Vec operator()(const Vec& x, const Vec& y) const;
    Vec square(const Vec& s) const { return (*this)(s, s); }
};

struct PairingChoice {
    enum class Kind { Solve, Bilinear } kind = Kind::Solve;
    ExactMatrix bilinear;  // used with Kind::Bilinear, acts on one copy of S
};

/// Space of bilinears C on S with sigma^T C + C sigma = 0 and C gamma_a symmetric.
ExactMatrix invariant_pairings(const CliffordRep& rep);
/// Builds kappa on n copies of the spinor module, summed over copies.
DiracCurrent build_dirac_current(const CliffordRep& rep, std::size_t copies,
                                 const PairingChoice& choice = {});
DiracCurrent dirac_current_from_tensor(std::vector<ExactMatrix> components);

struct EquivarianceCertificate {
    bool pass = true;
    std::size_t generator = 0, i = 0, j = 0;  // first violation
};
/// Checks kappa(sigma x, y) + kappa(x, sigma y) = E kappa(x, y) on all basis data.
EquivarianceCertificate check_equivariance(const DiracCurrent& kappa, const std::vector<ExactMatrix>& so_gens,
                                           const std::vector<ExactMatrix>& spin_gens);

struct CausalityResult {
    bool causal = true;
    std::size_t samples = 0;
    std::optional<Vec> counterexample;
};
/// Samples pseudo-random integer spinors s and tests eta(kappa_s, kappa_s) <= 0.
CausalityResult causality_probe(const DiracCurrent& kappa, const Signature& sig, std::uint64_t seed,
                                std::size_t samples);

Rational eta_norm(const Signature& sig, const Vec& v);

}  // namespace spencerkit
