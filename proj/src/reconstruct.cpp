#include "spencerkit/reconstruct.hpp"

namespace spencerkit {

namespace {

using M = FlatModel;

/// so(V) + r coordinates of a degree-0 flat-model vector, and back.
Vec to_zero(const GradedAlgebra& g, const Vec& x)
{
    Vec out = g.block_part(x, M::A);
    Vec r = g.block_part(x, M::R);
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

Vec from_zero(const GradedAlgebra& g, const Vec& z)
{
    const std::size_t na = g.block_dim(M::A);
    Vec a(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(na));
    Vec r(z.begin() + static_cast<std::ptrdiff_t>(na), z.end());
    return add(g.embed(M::A, a), g.embed(M::R, r));
}

/// Phi applied to an element of the deformation, given in its basis.
Vec apply_phi(const NomizuMap& nm, const Vec& x)
{
    Vec out(nm.phi.rows());
    for (std::size_t c = 0; c < nm.domain.size(); ++c)
        if (sgn(x[nm.domain[c]]) != 0)
            axpy(out, x[nm.domain[c]], nm.phi.col(c));
    return out;
}

}  // namespace

NomizuMap build_nomizu_map(const DeformContext& ctx, const AdmissibleDatum& datum, const FilteredDeformation& def)
{
    const GradedAlgebra& g = ctx.s();
    const GradedAlgebra& a = def.alg;
    DatumMaps dm(ctx, datum);
    NomizuMap nm;
    nm.unchecked_hypotheses = {"G0 simply connected", "K closed", "R' closed"};
    std::vector<Vec> cols;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        if (a.degree(k) == -1)
            continue;
        nm.domain.push_back(k);
        Vec x = ctx.embed(k);
        Vec val = a.degree(k) == 0 ? x : dm.lambda(x);
        cols.push_back(to_zero(g, val));
    }
    nm.phi = ExactMatrix::from_cols(cols, g.block_dim(M::A) + g.block_dim(M::R));

    for (std::size_t c = 0; c < nm.domain.size(); ++c) {
        const std::size_t k = nm.domain[c];
        if (a.degree(k) == 0 && from_zero(g, nm.phi.col(c)) != ctx.embed(k))
            throw EquivarianceViolation("Nomizu map does not restrict to the inclusion of a_0");
    }
    const std::size_t n = a.dim();
    for (std::size_t x : ctx.degree_zero())
        for (std::size_t y : nm.domain) {
            Vec lhs = apply_phi(nm, a.bracket(x, y));
            Vec rhs = to_zero(g, g.bracket(ctx.embed(x), from_zero(g, apply_phi(nm, unit_vec(n, y)))));
            if (lhs != rhs)
                throw EquivarianceViolation("Nomizu map is not a_0-equivariant");
        }
    auto v_part = [&](const Vec& x) { return g.embed(M::V, g.block_part(ctx.sub.inclusion.apply(x), M::V)); };
    for (std::size_t x : nm.domain)
        for (std::size_t y : nm.domain) {
            Vec ex = unit_vec(n, x), ey = unit_vec(n, y);
            Vec px = g.embed(M::A, g.block_part(from_zero(g, apply_phi(nm, ex)), M::A));
            Vec py = g.embed(M::A, g.block_part(from_zero(g, apply_phi(nm, ey)), M::A));
            Vec t = sub(g.bracket(px, v_part(ey)), g.bracket(py, v_part(ex)));
            if (t != v_part(a.bracket(x, y)))
                throw TorsionViolation("Nomizu map has torsion");
        }
    return nm;
}

CurvatureAtOrigin curvature_at_origin(const DeformContext& ctx, const FilteredDeformation& def,
                                      const NomizuMap& nomizu, const ThetaData& theta)
{
    const GradedAlgebra& g = ctx.s();
    const GradedAlgebra& a = def.alg;
    const std::size_t n = a.dim();
    std::vector<std::size_t> vs;
    for (std::size_t k = 0; k < n; ++k)
        if (a.degree(k) == -2)
            vs.push_back(k);
    CurvatureAtOrigin c;
    c.r0.assign(vs.size(), std::vector<Vec>(vs.size()));
    c.f0 = c.r0;
    c.flat_r = true;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) {
            Vec pv = from_zero(g, apply_phi(nomizu, unit_vec(n, vs[i])));
            Vec pw = from_zero(g, apply_phi(nomizu, unit_vec(n, vs[j])));
            Vec curv = sub(g.bracket(pv, pw), from_zero(g, apply_phi(nomizu, a.bracket(vs[i], vs[j]))));
            Vec expect = scale(-1, theta.tilde_at(ctx.embed(vs[i]), ctx.embed(vs[j])));
            if (curv != expect)
                throw CurvatureMismatch("curvature differs from -theta-tilde");
            c.r0[i][j] = g.block_part(curv, M::A);
            c.f0[i][j] = g.block_part(curv, M::R);
            if (!is_zero(c.f0[i][j]))
                c.flat_r = false;
        }
    c.bianchi = true;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j)
            for (std::size_t k = 0; k < vs.size(); ++k) {
                auto act = [&](std::size_t p, std::size_t q, std::size_t r) {
                    return g.bracket(g.embed(M::A, c.r0[p][q]), ctx.embed(vs[r]));
                };
                if (!is_zero(add(add(act(i, j, k), act(j, k, i)), act(k, i, j))))
                    c.bianchi = false;
            }
    return c;
}

}  // namespace spencerkit
