#include "spencerkit/reconstruct.hpp"

#include <gtest/gtest.h>

#include <map>
#include <memory>

using namespace spencerkit;

namespace {

using M = FlatModel;

const DeformContext& context(int s, std::size_t n, std::size_t dim, std::uint64_t seed)
{
    static std::map<std::pair<int, std::size_t>, std::shared_ptr<const FlatData>> flats;
    static std::map<std::tuple<int, std::size_t, std::size_t, std::uint64_t>, std::unique_ptr<DeformContext>> cache;
    auto& slot = cache[{s, n, dim, seed}];
    if (!slot) {
        auto& fd = flats[{s, n}];
        if (!fd)
            fd = make_flat_data(std::make_shared<const FlatModel>(build_flat_model({s, 1}, n)));
        GradedSubalgebra a = dim ? stabiliser_subalgebra(fd->model, random_subspace(fd->model->dim_s(), dim, seed))
                                 : maximal_subalgebra(fd->model);
        slot = std::make_unique<DeformContext>(make_deform_context(fd, a));
    }
    return *slot;
}

std::vector<std::pair<const DeformContext*, AdmissibleDatum>> instances()
{
    std::vector<std::pair<const DeformContext*, AdmissibleDatum>> out;
    for (const auto* ctx : {&context(2, 1, 0, 0), &context(2, 2, 0, 0), &context(3, 1, 3, 0), &context(3, 1, 3, 1)})
        for (auto& d : instances_from_basis(*ctx))
            out.emplace_back(ctx, d);
    return out;
}

}  // namespace

TEST(Reconstruct, ZeroDatumIsFlat)
{
    for (auto [s, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
        const auto& ctx = context(s, n, 0, 0);
        auto d = *check_admissibility(ctx, zero_vec(ctx.own.spaces[2].dim)).datum;
        auto th = compute_theta(ctx, d);
        auto def = build_filtered_deformation(ctx, d, th);
        auto nm = build_nomizu_map(ctx, d, def);
        // zero on V, the inclusion on a_0
        for (std::size_t c = 0; c < nm.domain.size(); ++c)
            if (def.alg.degree(nm.domain[c]) == -2)
                EXPECT_TRUE(is_zero(nm.phi.col(c)));
        auto curv = curvature_at_origin(ctx, def, nm, th);
        for (const auto& row : curv.r0)
            for (const auto& x : row)
                EXPECT_TRUE(is_zero(x));
        EXPECT_TRUE(curv.flat_r);
        EXPECT_TRUE(curv.bianchi);
        EXPECT_EQ(nm.unchecked_hypotheses.size(), 3u);
    }
}

TEST(Reconstruct, CurvatureIsMinusThetaTilde)
{
    auto inst = instances();
    ASSERT_FALSE(inst.empty());
    for (const auto& [ctx, d] : inst) {
        auto th = compute_theta(*ctx, d);
        auto def = build_filtered_deformation(*ctx, d, th);
        auto nm = build_nomizu_map(*ctx, d, def);
        auto curv = curvature_at_origin(*ctx, def, nm, th);
        EXPECT_TRUE(curv.bianchi);
        const GradedAlgebra& g = ctx->s();
        bool nonzero = false;
        for (std::size_t i = 0; i < curv.r0.size(); ++i)
            for (std::size_t j = 0; j < curv.r0.size(); ++j) {
                Vec t = th.tilde_at(unit_vec(g.dim(), i), unit_vec(g.dim(), j));
                EXPECT_EQ(curv.r0[i][j], scale(-1, g.block_part(t, M::A)));
                EXPECT_EQ(curv.f0[i][j], scale(-1, g.block_part(t, M::R)));
                nonzero = nonzero || !is_zero(curv.r0[i][j]);
            }
        EXPECT_TRUE(nonzero);
        if (check_geometric_realisability(*ctx, d, th).realisable)
            EXPECT_TRUE(curv.flat_r);
    }
}

TEST(Reconstruct, NomizuMapRestrictsToInclusion)
{
    for (const auto& [ctx, d] : instances()) {
        auto th = compute_theta(*ctx, d);
        auto def = build_filtered_deformation(*ctx, d, th);
        auto nm = build_nomizu_map(*ctx, d, def);
        std::size_t zero_cols = 0;
        for (std::size_t c = 0; c < nm.domain.size(); ++c) {
            if (def.alg.degree(nm.domain[c]) != 0)
                continue;
            ++zero_cols;
            Vec x = ctx->embed(nm.domain[c]);
            Vec expect = ctx->s().block_part(x, M::A);
            Vec r = ctx->s().block_part(x, M::R);
            expect.insert(expect.end(), r.begin(), r.end());
            EXPECT_EQ(nm.phi.col(c), expect);
        }
        EXPECT_EQ(zero_cols, ctx->degree_zero().size());
    }
}

TEST(Reconstruct, MismatchedGaugeIsRejected)
{
    auto inst = instances();
    const auto& [ctx, d] = inst.back();
    auto th = compute_theta(*ctx, d);
    auto def = build_filtered_deformation(*ctx, d, th);
    AdmissibleDatum other = d;
    other.lambda = scale(2, d.lambda);
    ASSERT_FALSE(is_zero(d.lambda));
    EXPECT_ANY_THROW(build_nomizu_map(*ctx, other, def));
}

TEST(Reconstruct, WrongThetaIsCaught)
{
    auto inst = instances();
    const auto& [ctx, d] = inst.front();
    auto th = compute_theta(*ctx, d);
    auto def = build_filtered_deformation(*ctx, d, th);
    auto nm = build_nomizu_map(*ctx, d, def);
    ThetaData wrong = th;
    const GradedAlgebra& g = ctx->s();
    Vec bump = g.embed(M::A, unit_vec(g.block_dim(M::A), 0));
    wrong.tilde[0][1] = add(wrong.tilde[0][1], bump);
    wrong.tilde[1][0] = sub(wrong.tilde[1][0], bump);
    EXPECT_THROW(curvature_at_origin(*ctx, def, nm, wrong), CurvatureMismatch);
}
