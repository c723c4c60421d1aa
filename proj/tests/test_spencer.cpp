#include "spencerkit/spencer.hpp"

#include <gtest/gtest.h>

#include <map>
#include <memory>
#include <random>

using namespace spencerkit;

namespace {

std::shared_ptr<const FlatModel> model(int s, std::size_t n)
{
    static std::map<std::pair<int, std::size_t>, std::shared_ptr<const FlatModel>> cache;
    auto& m = cache[{s, n}];
    if (!m)
        m = std::make_shared<const FlatModel>(build_flat_model({s, 1}, n));
    return m;
}

const SpencerComplex& flat_complex(int s, std::size_t n)
{
    static std::map<std::pair<int, std::size_t>, SpencerComplex> cache;
    auto it = cache.find({s, n});
    if (it == cache.end())
        it = cache.emplace(std::pair{s, n}, build_flat_complex(*model(s, n), 2, 3)).first;
    return it->second;
}

std::size_t binom(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

// dim Hom(wedge^a V' (x) sym^b S', target of degree d - 2a - b), counted from block dimensions.
std::size_t closed_form_dim(const GradedAlgebra& g, std::size_t dv, std::size_t ds, int d, std::size_t p)
{
    std::size_t total = 0;
    for (std::size_t a = 0; a <= p; ++a) {
        std::size_t b = p - a;
        int t = d - 2 * static_cast<int>(a) - static_cast<int>(b);
        std::size_t target = 0;
        for (const auto& blk : g.blocks())
            if (blk.degree == t)
                target += blk.dim;
        total += binom(dv, a) * binom(ds + b - 1, b) * target;
    }
    return total;
}

Vec random_vec(std::mt19937_64& rng, std::size_t n)
{
    Vec v(n);
    for (auto& x : v)
        x = static_cast<long>(rng() % 7) - 3;
    return v;
}

std::vector<GradedSubalgebra> sample_subalgebras(int s, std::size_t n, std::size_t count, std::uint64_t seed)
{
    auto m = model(s, n);
    std::vector<GradedSubalgebra> out;
    std::size_t ds = m->dim_s();
    for (std::uint64_t k = 0; out.size() < count; ++k) {
        std::size_t dim = ds / 2 + 1 + (seed + k) % (ds - ds / 2);
        out.push_back(stabiliser_subalgebra(m, random_subspace(ds, dim, seed * 1000 + k)));
    }
    return out;
}

}  // namespace

TEST(Spencer, FlatCochainDimensionsThreeDimensions)
{
    const auto& cx = flat_complex(2, 1);
    const CochainSpace& c22 = cx.spaces[2];
    EXPECT_EQ(c22.dim, 30u);
    auto fc = flat_components(c22);
    ASSERT_TRUE(fc.alpha && fc.beta && fc.gamma);
    EXPECT_EQ(fc.alpha->size(), 9u);
    EXPECT_EQ(fc.beta->size(), 12u);
    EXPECT_EQ(fc.gamma->size(), 9u);
    EXPECT_EQ(fc.rho, nullptr);
    // alpha, beta, gamma, rho order
    EXPECT_LT(fc.alpha->offset, fc.beta->offset);
    EXPECT_LT(fc.beta->offset, fc.gamma->offset);
}

TEST(Spencer, CochainDimensionsMatchClosedForm)
{
    for (auto [s, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        auto m = model(s, n);
        for (int d : {2, 4}) {
            auto cx = build_flat_complex(*m, d, 3);
            for (std::size_t p = 0; p <= 3; ++p)
                EXPECT_EQ(cx.spaces[p].dim, closed_form_dim(m->alg, m->dim_v(), m->dim_s(), d, p))
                    << s << " " << n << " " << d << " " << p;
        }
    }
}

TEST(Spencer, DifferentialSquaresToZeroOnFlatModels)
{
    for (auto [s, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        auto m = model(s, n);
        auto c2 = build_flat_complex(*m, 2, 4);
        for (std::size_t p = 0; p + 1 < c2.diffs.size(); ++p)
            EXPECT_TRUE((c2.diffs[p + 1] * c2.diffs[p]).is_zero()) << s << " " << n << " p=" << p;
        auto c4 = build_flat_complex(*m, 4, 3);
        for (std::size_t p = 0; p + 1 < c4.diffs.size(); ++p)
            EXPECT_TRUE((c4.diffs[p + 1] * c4.diffs[p]).is_zero()) << s << " " << n << " p=" << p;
    }
}

TEST(Spencer, DifferentialSquaresToZeroOnSubalgebras)
{
    std::size_t tested = 0;
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}})
        for (const auto& a : sample_subalgebras(s, n, 4, 17)) {
            auto c2 = build_spencer_complex(a, 2, 3);
            for (std::size_t p = 0; p + 1 < c2.diffs.size(); ++p)
                EXPECT_TRUE((c2.diffs[p + 1] * c2.diffs[p]).is_zero());
            auto mixed = build_mixed_complex(a, 2, 3);
            for (std::size_t p = 0; p + 1 < mixed.diffs.size(); ++p)
                EXPECT_TRUE((mixed.diffs[p + 1] * mixed.diffs[p]).is_zero());
            ++tested;
        }
    EXPECT_EQ(tested, 12u);
}

TEST(Spencer, NoSpinorsLeavesOnlyAlpha)
{
    auto m = model(3, 1);
    auto a = make_graded_subalgebra(m, Subspace::full(4), Subspace(4), Subspace::full(6), Subspace::full(1));
    auto cx = build_spencer_complex(a, 2, 3);
    const CochainSpace& c22 = cx.spaces[2];
    ASSERT_EQ(c22.comps.size(), 1u);
    EXPECT_EQ(c22.comps[0].n_even, 2u);
    EXPECT_EQ(c22.dim, 6u * 4u);
    EXPECT_EQ(cx.spaces[3].dim, 0u);
    EXPECT_TRUE(cx.diffs[2].is_zero());
}

TEST(Spencer, ZeroDifferentialsGiveFullCohomology)
{
    // C^{2,0} and C^{2,3} vanish for the abelian part with no spinors
    auto m = model(2, 1);
    auto a = make_graded_subalgebra(m, Subspace::full(3), Subspace(2), Subspace(3), Subspace(0));
    auto cx = build_spencer_complex(a, 2, 3);
    auto h = compute_cohomology(cx, 2);
    EXPECT_EQ(h.dim_h, cx.spaces[2].dim);
}

TEST(Spencer, LowDegreeCohomologyVanishesForHighlySupersymmetric)
{
    for (auto [s, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        std::vector<GradedSubalgebra> subs{maximal_subalgebra(model(s, n))};
        if (model(s, n)->dim_s() > 2)
            for (auto& a : sample_subalgebras(s, n, 3, 5))
                subs.push_back(std::move(a));
        for (const auto& a : subs) {
            ASSERT_TRUE(a.highly_susy);
            ASSERT_TRUE(a.transitive);
            auto c2 = build_spencer_complex(a, 2, 2);
            auto h21 = compute_cohomology(c2, 1);
            EXPECT_EQ(h21.dim_z, 0u);
            EXPECT_EQ(h21.dim_h, 0u);
            auto c4 = build_spencer_complex(a, 4, 3);
            EXPECT_EQ(compute_cohomology(c4, 2).dim_h, 0u) << s << " " << n;
        }
    }
}

TEST(Spencer, ProjectedDifferentialsAreInjective)
{
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        std::vector<GradedSubalgebra> subs{maximal_subalgebra(model(s, n))};
        for (auto& a : sample_subalgebras(s, n, 3, 9))
            subs.push_back(std::move(a));
        for (const auto& a : subs) {
            auto cx = build_spencer_complex(a, 2, 2);
            const CochainSpace& c21 = cx.spaces[1];
            const CochainSpace& c22 = cx.spaces[2];
            const auto* vh = c21.component(1, FlatModel::A);
            const auto* vr = c21.component(1, FlatModel::R);
            const auto* alpha = c22.component(2, FlatModel::V);
            const auto* beta = c22.component(1, FlatModel::S);
            const auto* gamma = c22.component(0, FlatModel::A);
            const auto* rho = c22.component(0, FlatModel::R);
            if (vh) {
                auto b1 = differential_block(cx, 1, *vh, *alpha);
                EXPECT_EQ(rank(b1), vh->size());
                if (a.dim_h() == model(s, n)->dim_so())
                    EXPECT_EQ(b1.rows(), b1.cols());
                EXPECT_EQ(rank(differential_block(cx, 1, *vh, *gamma)), vh->size());
            }
            if (vr) {
                EXPECT_EQ(rank(differential_block(cx, 1, *vr, *beta)), vr->size());
                EXPECT_EQ(rank(differential_block(cx, 1, *vr, *rho)), vr->size());
            }
        }
    }
}

TEST(Spencer, SplittingThreeDimensionsInvertsKappa)
{
    auto m = model(2, 1);
    auto split = compute_splitting(*m);
    ExactMatrix k = kappa_matrix(m->kappa);
    ASSERT_EQ(k.rows(), k.cols());
    EXPECT_EQ(split.sigma, inverse(k));
    EXPECT_TRUE(kernel_projector(*m, split).is_zero());
}

TEST(Spencer, SplittingProperties)
{
    for (auto [s, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        auto m = model(s, n);
        auto split = compute_splitting(*m);
        ExactMatrix k = kappa_matrix(m->kappa);
        EXPECT_EQ(k * split.sigma, ExactMatrix::identity(m->dim_v()));
        ExactMatrix pr = kernel_projector(*m, split);
        EXPECT_EQ(pr * pr, pr);
        EXPECT_EQ(rank(pr), k.cols() - m->dim_v());
        EXPECT_TRUE((k * pr).is_zero());
        EXPECT_TRUE(split.so_equivariant);
        for (std::size_t g = 0; g < m->so.size(); ++g)
            EXPECT_EQ(split.sigma * m->so[g], sym2_action(m->spin[g]) * split.sigma);
        if (split.r_equivariant)
            for (const auto& a : m->r.basis)
                EXPECT_TRUE((sym2_action(a) * split.sigma).is_zero());
    }
    EXPECT_EQ(rank(kernel_projector(*model(3, 1), compute_splitting(*model(3, 1)))), 6u);
}

TEST(Spencer, Sym2ActionIsARepresentation)
{
    auto m = model(3, 1);
    for (std::size_t i = 0; i < m->spin.size(); ++i)
        for (std::size_t j = 0; j < m->spin.size(); ++j)
            EXPECT_EQ(commutator(sym2_action(m->spin[i]), sym2_action(m->spin[j])),
                      sym2_action(commutator(m->spin[i], m->spin[j])));
}

TEST(Spencer, ZeroKappaIsRejected)
{
    FlatModelOptions opts;
    opts.explicit_kappa = std::vector<ExactMatrix>(3, ExactMatrix(2, 2));
    auto m = build_flat_model({2, 1}, 1, opts);
    EXPECT_THROW(compute_splitting(m), KappaZero);
}

TEST(Spencer, NormalisedDimensionEqualsCohomology)
{
    for (auto [s, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        const auto& cx = flat_complex(s, n);
        auto ns = normalised_space(cx, compute_splitting(*model(s, n)));
        auto h = compute_cohomology(cx, 2);
        EXPECT_EQ(ns.space.dim(), h.dim_h) << s << " " << n;
        EXPECT_EQ(ns.space.dim() + h.dim_b, h.dim_z);
        EXPECT_EQ(ns.space.intersect(h.b).dim(), 0u);
        EXPECT_TRUE(h.z.contains(ns.space));
    }
}

TEST(Spencer, NormalisedCocyclesSatisfyCocycleConditions)
{
    std::mt19937_64 rng(3);
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        auto m = model(s, n);
        const auto& cx = flat_complex(s, n);
        const CochainSpace& c22 = cx.spaces[2];
        auto h = compute_cohomology(cx, 2);
        const GradedAlgebra& g = m->alg;
        std::size_t dv = m->dim_v(), nl = cx.ctx.n_legs();
        for (int trial = 0; trial < 4; ++trial) {
            Vec z = h.z.combine(random_vec(rng, h.z.dim()));
            for (int t = 0; t < 3; ++t) {
                Vec sv = g.embed(FlatModel::S, random_vec(rng, m->dim_s()));
                Vec ks = g.bracket(sv, sv);
                Vec s_leg(sv.begin(), sv.begin() + static_cast<std::ptrdiff_t>(nl));
                Vec ks_leg(ks.begin(), ks.begin() + static_cast<std::ptrdiff_t>(nl));
                Vec gs = evaluate(c22, z, {s_leg, s_leg});
                for (std::size_t v = 0; v < dv; ++v) {
                    Vec e = unit_vec(nl, v);
                    Vec ve = unit_vec(g.dim(), v);
                    // alpha(k_s, v) + 2 kappa(s, beta(v, s)) + gamma(s, s) v = 0
                    Vec lhs = evaluate(c22, z, {ks_leg, e});
                    axpy(lhs, 2, g.bracket(sv, evaluate(c22, z, {e, s_leg})));
                    axpy(lhs, 1, g.bracket(gs, ve));
                    EXPECT_TRUE(is_zero(lhs));
                }
                // beta(k_s, s) + (gamma + rho)(s, s) s = 0
                Vec lhs = evaluate(c22, z, {ks_leg, s_leg});
                axpy(lhs, 1, g.bracket(gs, sv));
                EXPECT_TRUE(is_zero(lhs));
            }
        }
    }
}

TEST(Spencer, NormaliseRecoversCoboundaryWitness)
{
    std::mt19937_64 rng(8);
    for (auto [s, n] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}}) {
        const auto& cx = flat_complex(s, n);
        auto split = compute_splitting(*model(s, n));
        for (int trial = 0; trial < 3; ++trial) {
            Vec lambda = random_vec(rng, cx.spaces[1].dim);
            auto res = normalise_cocycle(cx, split, cx.diffs[1].apply(lambda));
            EXPECT_TRUE(is_zero(res.hat));
            EXPECT_EQ(res.lambda, lambda);
        }
    }
}

TEST(Spencer, NormaliseIsAProjection)
{
    std::mt19937_64 rng(21);
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        const auto& cx = flat_complex(s, n);
        auto split = compute_splitting(*model(s, n));
        auto ns = normalised_space(cx, split);
        auto h = compute_cohomology(cx, 2);
        for (int trial = 0; trial < 3; ++trial) {
            Vec z = h.z.combine(random_vec(rng, h.z.dim()));
            auto once = normalise_cocycle(cx, split, z);
            EXPECT_TRUE(ns.space.contains(once.hat));
            EXPECT_EQ(add(once.hat, cx.diffs[1].apply(once.lambda)), z);
            auto twice = normalise_cocycle(cx, split, once.hat);
            EXPECT_EQ(twice.hat, once.hat);
            EXPECT_TRUE(is_zero(twice.lambda));
        }
    }
}

TEST(Spencer, NormaliseRejectsNonCocycles)
{
    const auto& cx = flat_complex(3, 1);
    auto split = compute_splitting(*model(3, 1));
    auto h = compute_cohomology(cx, 2);
    for (std::size_t c = 0; c < cx.spaces[2].dim; ++c) {
        Vec e = unit_vec(cx.spaces[2].dim, c);
        if (!h.z.contains(e)) {
            EXPECT_THROW(normalise_cocycle(cx, split, e), NotACocycle);
            return;
        }
    }
    FAIL() << "every unit cochain is a cocycle";
}

TEST(Spencer, InvariantCocyclesMatchBruteForce)
{
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        auto m = model(s, n);
        const auto& cx = flat_complex(s, n);
        auto ns = normalised_space(cx, compute_splitting(*m));
        EXPECT_EQ(invariant_normalised_cocycles(cx, ns.space, {}), ns.space);
        auto full = maximal_subalgebra(m);
        auto x0 = degree_zero_basis(full);
        EXPECT_EQ(x0.size(), m->dim_so() + m->dim_r());
        Subspace inv = invariant_normalised_cocycles(cx, ns.space, x0);
        // all coordinates, every generator
        ExactMatrix eqs = ns.space.annihilator();
        for (const auto& x : x0)
            eqs.append_rows(cochain_action(cx.ctx, cx.spaces[2], x));
        EXPECT_EQ(inv, Subspace::kernel_of(eqs)) << s << " " << n;
    }
}

TEST(Spencer, CohomologyActionIsARepresentation)
{
    const auto& cx = flat_complex(3, 1);
    auto h = compute_cohomology(cx, 2, true);
    std::vector<std::size_t> zero_deg;
    for (std::size_t i = 0; i < cx.ctx.source.dim(); ++i)
        if (cx.ctx.source.degree(i) == 0)
            zero_deg.push_back(i);
    ASSERT_EQ(h.action.size(), zero_deg.size());
    for (std::size_t a = 0; a < zero_deg.size(); ++a)
        for (std::size_t b = 0; b < zero_deg.size(); ++b) {
            Vec br = cx.ctx.source.bracket(zero_deg[a], zero_deg[b]);
            ExactMatrix expect(h.dim_h, h.dim_h);
            for (std::size_t c = 0; c < zero_deg.size(); ++c)
                expect = expect + h.action[c] * br[zero_deg[c]];
            EXPECT_EQ(commutator(h.action[a], h.action[b]), expect);
        }
}

TEST(Spencer, K22VanishesForFullSpinors)
{
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}}) {
        auto m = model(s, n);
        const auto& cx = flat_complex(s, n);
        auto ns = normalised_space(cx, compute_splitting(*m));
        auto a = maximal_subalgebra(m);
        auto mixed = build_mixed_complex(a, 2, 2);
        EXPECT_EQ(compute_K22(cx, mixed, a, ns.space).dim(), 0u);
        EXPECT_EQ(compute_K22(cx, mixed, a, Subspace(ns.space.ambient())).dim(), 0u);
    }
}

TEST(Spencer, K22AgreesWithRestrictionKernel)
{
    auto m = model(3, 1);
    const auto& cx = flat_complex(3, 1);
    auto ns = normalised_space(cx, compute_splitting(*m));
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto a = stabiliser_subalgebra(m, random_subspace(4, 3, seed));
        auto mixed = build_mixed_complex(a, 2, 2);
        Subspace k = compute_K22(cx, mixed, a, ns.space);
        Subspace ker = restriction_kernel_in_cohomology(cx, mixed, a, ns.space);
        EXPECT_EQ(k, ker) << seed;
        EXPECT_TRUE(ns.space.contains(k));
    }
}

TEST(Spencer, K22RequiresHighSupersymmetry)
{
    auto m = model(3, 1);
    const auto& cx = flat_complex(3, 1);
    auto ns = normalised_space(cx, compute_splitting(*m));
    auto a = make_graded_subalgebra(m, Subspace::full(4), random_subspace(4, 2, 4), Subspace(6), Subspace(1));
    auto mixed = build_mixed_complex(a, 2, 2);
    EXPECT_THROW(compute_K22(cx, mixed, a, ns.space), NotHighlySusy);
}

TEST(Spencer, PushforwardIsInjectiveInCohomology)
{
    for (auto [s, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        std::vector<GradedSubalgebra> subs{maximal_subalgebra(model(s, n))};
        for (auto& a : sample_subalgebras(s, n, 2, 13))
            subs.push_back(std::move(a));
        for (const auto& a : subs) {
            auto own = build_spencer_complex(a, 2, 3);
            auto mixed = build_mixed_complex(a, 2, 3);
            auto h = compute_cohomology(own, 2);
            ExactMatrix push = pushforward_map(own, mixed, a, 2);
            // cocycles map to cocycles
            EXPECT_TRUE((mixed.diffs[2] * push * h.z.basis().transpose()).is_zero());
            // [z] -> [i_* z] has trivial kernel: no representative lands in B(a_-; s)
            Subspace bm = Subspace::span(mixed.diffs[1].transpose());
            std::vector<Vec> imgs;
            for (std::size_t k = 0; k < h.representatives.rows(); ++k)
                imgs.push_back(push.apply(h.representatives.row(k)));
            Subspace img = Subspace::span(imgs, mixed.spaces[2].dim);
            EXPECT_EQ(img.dim(), h.dim_h);
            EXPECT_EQ(img.intersect(bm).dim(), 0u);
        }
    }
}

TEST(Spencer, EvaluateIsSuperAlternating)
{
    std::mt19937_64 rng(2);
    const auto& cx = flat_complex(3, 1);
    const CochainSpace& c22 = cx.spaces[2];
    std::size_t nl = cx.ctx.n_legs();
    Vec phi = random_vec(rng, c22.dim);
    for (int t = 0; t < 5; ++t) {
        Vec v(nl), w(nl), s(nl), r(nl);
        for (std::size_t i = 0; i < 4; ++i) {
            v[i] = static_cast<long>(rng() % 5) - 2;
            w[i] = static_cast<long>(rng() % 5) - 2;
            s[4 + i] = static_cast<long>(rng() % 5) - 2;
            r[4 + i] = static_cast<long>(rng() % 5) - 2;
        }
        EXPECT_EQ(evaluate(c22, phi, {v, w}), scale(-1, evaluate(c22, phi, {w, v})));
        EXPECT_TRUE(is_zero(evaluate(c22, phi, {v, v})));
        EXPECT_EQ(evaluate(c22, phi, {s, r}), evaluate(c22, phi, {r, s}));
        EXPECT_EQ(evaluate(c22, phi, {v, s}), scale(-1, evaluate(c22, phi, {s, v})));
    }
}
