#include "spencerkit/cliffspin.hpp"

#include <gtest/gtest.h>

using namespace spencerkit;

namespace {

// Irreducible real module dimension for the real-type cases of Cl(p, q).
std::size_t expected_spinor_dim(int p, int q)
{
    int n = p + q;
    int r = (((p - q) % 8) + 8) % 8;
    return std::size_t{1} << (r == 1 ? (n - 1) / 2 : n / 2);
}

}  // namespace

TEST(CliffSpin, ThreeDimensionalGammas)
{
    CliffordRep rep = build_clifford_rep({2, 1});
    ASSERT_EQ(rep.spinor_dim, 2u);
    EXPECT_EQ(rep.gammas[0], (ExactMatrix{{0, 1}, {-1, 0}}));
    EXPECT_EQ(rep.gammas[1], (ExactMatrix{{1, 0}, {0, -1}}));
    EXPECT_EQ(rep.gammas[2], (ExactMatrix{{0, 1}, {1, 0}}));
    EXPECT_TRUE(check_clifford_relation(rep));
}

TEST(CliffSpin, FourDimensionalMajorana)
{
    CliffordRep rep = build_clifford_rep({3, 1});
    EXPECT_EQ(rep.spinor_dim, 4u);
    EXPECT_TRUE(check_clifford_relation(rep));
}

TEST(CliffSpin, RealTypeSignaturesSatisfyCliffordRelation)
{
    for (int s = 0; s <= 9; ++s)
        for (int t = 0; t <= 9 - s; ++t) {
            if (s + t == 0)
                continue;
            int r = (((s - t) % 8) + 8) % 8;
            if (r > 2) {
                EXPECT_THROW(build_clifford_rep({s, t}), NoRealForm) << s << "," << t;
                continue;
            }
            CliffordRep rep = build_clifford_rep({s, t});
            EXPECT_EQ(rep.spinor_dim, expected_spinor_dim(s, t)) << s << "," << t;
            EXPECT_TRUE(check_clifford_relation(rep)) << s << "," << t;
        }
}

TEST(CliffSpin, ElevenDimensions)
{
    CliffordRep rep = build_clifford_rep({10, 1});
    EXPECT_EQ(rep.spinor_dim, 32u);
    EXPECT_TRUE(check_clifford_relation(rep));
}

TEST(CliffSpin, SpinGeneratorsRotateGammas)
{
    for (Signature sig : {Signature{2, 1}, Signature{3, 1}, Signature{2, 2}}) {
        CliffordRep rep = build_clifford_rep(sig);
        auto so = so_basis(sig);
        auto spin = spin_generators(rep);
        ExactMatrix eta = metric(sig);
        for (std::size_t g = 0; g < so.size(); ++g) {
            // eta-skewness of E and [sigma, gamma(v)] = gamma(E v)
            EXPECT_EQ(so[g].transpose() * eta + eta * so[g], ExactMatrix(sig.dim(), sig.dim()));
            for (std::size_t k = 0; k < sig.dim(); ++k) {
                ExactMatrix rhs(rep.spinor_dim, rep.spinor_dim);
                for (std::size_t m = 0; m < sig.dim(); ++m)
                    rhs = rhs + rep.gammas[m] * so[g](m, k);
                EXPECT_EQ(commutator(spin[g], rep.gammas[k]), rhs);
            }
        }
    }
}

TEST(CliffSpin, StandardCurrentIsEquivariantAndCausal)
{
    for (Signature sig : {Signature{2, 1}, Signature{3, 1}}) {
        CliffordRep rep = build_clifford_rep(sig);
        for (std::size_t n : {1u, 2u}) {
            DiracCurrent k = build_dirac_current(rep, n);
            CliffordRep ext = extend(rep, n);
            EXPECT_TRUE(k.symmetric);
            EXPECT_FALSE(k.degenerate);
            EXPECT_TRUE(check_equivariance(k, so_basis(sig), spin_generators(ext)).pass);
            auto c = causality_probe(k, sig, 99, 200);
            EXPECT_TRUE(c.causal);
            EXPECT_EQ(c.samples, 200u);
        }
    }
}

TEST(CliffSpin, CurrentHasFullRankInThreeDimensions)
{
    CliffordRep rep = build_clifford_rep({2, 1});
    DiracCurrent k = build_dirac_current(rep, 1);
    ExactMatrix m(3, 3);
    auto pairs = increasing_tuples(2, 2, false);
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        Vec v = k(unit_vec(2, pairs[c][0]), unit_vec(2, pairs[c][1]));
        for (std::size_t a = 0; a < 3; ++a)
            m(a, c) = v[a];
    }
    EXPECT_EQ(rank(m), 3u);
}

TEST(CliffSpin, ExchangingTimeAndSpaceComponentsBreaksCausality)
{
    Signature sig{2, 1};
    DiracCurrent k = build_dirac_current(build_clifford_rep(sig), 1);
    auto comps = k.components;
    std::swap(comps[0], comps[1]);
    DiracCurrent bad = dirac_current_from_tensor(comps);
    auto c = causality_probe(bad, sig, 3, 100);
    ASSERT_FALSE(c.causal);
    EXPECT_GT(eta_norm(sig, bad.square(*c.counterexample)), 0);
    EXPECT_FALSE(check_equivariance(bad, so_basis(sig), spin_generators(build_clifford_rep(sig))).pass);
}

TEST(CliffSpin, FlippedComponentFailsEquivariance)
{
    Signature sig{3, 1};
    CliffordRep rep = build_clifford_rep(sig);
    DiracCurrent k = build_dirac_current(rep, 1);
    auto comps = k.components;
    comps[2] = -comps[2];
    auto cert = check_equivariance(dirac_current_from_tensor(comps), so_basis(sig), spin_generators(rep));
    EXPECT_FALSE(cert.pass);
}

TEST(CliffSpin, ZeroCurrentIsDegenerate)
{
    std::vector<ExactMatrix> zero(3, ExactMatrix(2, 2));
    DiracCurrent k = dirac_current_from_tensor(zero);
    EXPECT_TRUE(k.degenerate);
    Signature sig{2, 1};
    EXPECT_TRUE(check_equivariance(k, so_basis(sig), spin_generators(build_clifford_rep(sig))).pass);
}

TEST(CliffSpin, ExplicitPairingMustMatchSpinorDimension)
{
    CliffordRep rep = build_clifford_rep({2, 1});
    PairingChoice pc;
    pc.kind = PairingChoice::Kind::Bilinear;
    pc.bilinear = ExactMatrix::identity(3);
    EXPECT_THROW(build_dirac_current(rep, 1, pc), DimensionMismatch);
}
