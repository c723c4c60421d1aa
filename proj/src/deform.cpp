#include "spencerkit/deform.hpp"

#include <string>
#include <utility>

namespace spencerkit {

namespace {

using M = FlatModel;

Vec part(const GradedAlgebra& g, const Vec& x, std::size_t b)
{
    return g.embed(b, g.block_part(x, b));
}

Vec sum_scaled(const std::vector<Vec>& basis, const Vec& coeffs, std::size_t n)
{
    Vec out(n);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (sgn(coeffs[i]) != 0)
            axpy(out, coeffs[i], basis[i]);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> sym_pairs(std::size_t n)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& t : increasing_tuples(n, 2, false))
        out.emplace_back(t[0], t[1]);
    return out;
}

/// Columns are the first vectors of `a` followed by those of `b`.
ExactMatrix hcat(const ExactMatrix& a, const ExactMatrix& b)
{
    ExactMatrix m(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j)
            m(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j)
            m(i, a.cols() + j) = b(i, j);
    }
    return m;
}

Vec slice(const Vec& x, std::size_t from, std::size_t n)
{
    return Vec(x.begin() + static_cast<std::ptrdiff_t>(from), x.begin() + static_cast<std::ptrdiff_t>(from + n));
}

/// Kernel of kappa on sym^2 S' through the flat-model bracket, rows over pairs i <= j.
ExactMatrix bracket_dirac_kernel(const DatumMaps& dm)
{
    const auto pairs = sym_pairs(dm.dim_sp());
    std::vector<Vec> cols;
    for (auto [i, j] : pairs)
        cols.push_back(dm.br(dm.sp(i), dm.sp(j)));
    if (cols.empty())
        return ExactMatrix(0, 0);
    return kernel(ExactMatrix::from_cols(cols, cols.front().size()));
}

}  // namespace

std::shared_ptr<const FlatData> make_flat_data(std::shared_ptr<const FlatModel> model)
{
    auto fd = std::make_shared<FlatData>();
    fd->model = model;
    fd->complex = build_flat_complex(*model, 2, 3);
    fd->splitting = compute_splitting(*model);
    fd->normalised = normalised_space(fd->complex, fd->splitting).space;
    return fd;
}

std::vector<std::size_t> DeformContext::degree_zero() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < sub.alg.dim(); ++k)
        if (sub.alg.degree(k) == 0)
            out.push_back(k);
    return out;
}

DeformContext make_deform_context(std::shared_ptr<const FlatData> flat, const GradedSubalgebra& a)
{
    if (!a.highly_susy)
        throw NotHighlySusy("deformations need a highly supersymmetric subalgebra");
    if (!a.transitive)
        throw NotTransitive("r' does not act faithfully on S'");
    DeformContext ctx;
    ctx.flat = std::move(flat);
    ctx.sub = a;
    ctx.own = build_spencer_complex(a, 2, 3);
    ctx.mixed = build_mixed_complex(a, 2, 2);
    const SpencerComplex& fc = ctx.flat->complex;
    ctx.restriction = restriction_map(fc, ctx.mixed, a, 2);
    ctx.pushforward = pushforward_map(ctx.own, ctx.mixed, a, 2);
    ctx.invariant = invariant_normalised_cocycles(fc, ctx.flat->normalised, degree_zero_basis(a));
    ctx.k22 = compute_K22(fc, ctx.mixed, a, ctx.invariant);
    ctx.sub_frame = Frame(a.inclusion.transpose());
    return ctx;
}

TransitiveRouting route_transitive(const GradedSubalgebra& a)
{
    TransitiveRouting out{a, false};
    if (a.rp.dim() == 0)
        return out;
    auto split = faithful_split(*a.model, a.sp, a.rp);
    if (split.rpp != a.rp) {
        out.sub = make_graded_subalgebra(a.model, a.vp, a.sp, a.h, split.rpp);
        out.replaced = true;
    }
    return out;
}

DatumMaps::DatumMaps(const DeformContext& ctx, const AdmissibleDatum& datum) : ctx_(ctx), datum_(datum)
{
    for (std::size_t i = 0; i < dim_v(); ++i) {
        Vec legs = ctx_.mixed.ctx.to_legs(ctx_.sub_frame.coords(v(i)));
        lambda_.push_back(evaluate(ctx_.mixed.spaces[1], datum_.lambda, {legs}));
    }
}

std::size_t DatumMaps::dim_v() const { return ctx_.model().dim_v(); }
std::size_t DatumMaps::dim_sp() const { return ctx_.sub.sp.dim(); }
Vec DatumMaps::v(std::size_t i) const { return unit_vec(ctx_.s().dim(), i); }
Vec DatumMaps::sp(std::size_t i) const { return ctx_.s().embed(M::S, ctx_.sub.sp.vector(i)); }

Vec DatumMaps::hat(const Vec& x, const Vec& y) const
{
    const SpencerComplex& fc = ctx_.flat->complex;
    return evaluate(fc.spaces[2], datum_.hat, {fc.ctx.to_legs(x), fc.ctx.to_legs(y)});
}

Vec DatumMaps::lambda(const Vec& v) const
{
    return sum_scaled(lambda_, slice(v, 0, dim_v()), ctx_.s().dim());
}

Vec DatumMaps::mu(const Vec& x, const Vec& y) const
{
    const ComplexContext& oc = ctx_.own.ctx;
    Vec val = evaluate(ctx_.own.spaces[2], datum_.mu,
                       {oc.to_legs(ctx_.sub_frame.coords(x)), oc.to_legs(ctx_.sub_frame.coords(y))});
    return ctx_.sub.inclusion.apply(val);
}

AdmissibilityResult check_admissibility(const DeformContext& ctx, const Vec& mu)
{
    if (!is_zero(ctx.own.diffs[2].apply(mu)))
        throw NotACocycle("mu is not a Spencer cocycle of a");
    const std::size_t k = ctx.invariant.dim();
    ExactMatrix rh(ctx.restriction.rows(), k);
    for (std::size_t j = 0; j < k; ++j) {
        Vec img = ctx.restriction.apply(ctx.invariant.vector(j));
        for (std::size_t i = 0; i < img.size(); ++i)
            rh(i, j) = img[i];
    }
    auto res = solve_affine(hcat(rh, ctx.mixed.diffs[1]), ctx.pushforward.apply(mu));
    AdmissibilityResult out;
    if (auto* no = std::get_if<NoSolution>(&res)) {
        out.certificate = no->certificate;
        return out;
    }
    const Vec& x = std::get<ParticularSolution>(res).x;
    AdmissibleDatum d;
    d.mu = mu;
    d.hat_coords = slice(x, 0, k);
    d.hat = k ? ctx.invariant.combine(d.hat_coords) : zero_vec(ctx.flat->complex.spaces[2].dim);
    d.lambda = slice(x, k, ctx.mixed.spaces[1].dim);
    verify_admissible(ctx, d);
    out.admissible = true;
    out.datum = std::move(d);
    return out;
}

std::optional<AdmissibleDatum> datum_from_hat(const DeformContext& ctx, const Vec& hat)
{
    auto coords = ctx.invariant.coordinates(hat);
    if (!coords)
        throw std::invalid_argument("hat is not an invariant normalised cocycle");
    auto res = solve_affine(hcat(ctx.pushforward, -ctx.mixed.diffs[1]), ctx.restriction.apply(hat));
    if (std::holds_alternative<NoSolution>(res))
        return std::nullopt;
    const Vec& x = std::get<ParticularSolution>(res).x;
    AdmissibleDatum d;
    d.mu = slice(x, 0, ctx.pushforward.cols());
    d.lambda = slice(x, ctx.pushforward.cols(), ctx.mixed.spaces[1].dim);
    d.hat = hat;
    d.hat_coords = *coords;
    if (!is_zero(ctx.own.diffs[2].apply(d.mu)))
        throw OracleMismatch("pushforward of a cocycle failed to be closed");
    verify_admissible(ctx, d);
    return d;
}

void verify_admissible(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    const GradedAlgebra& g = ctx.s();
    DatumMaps dm(ctx, datum);
    auto fail = [](const std::string& what) { throw OracleMismatch("admissible datum: " + what); };
    const std::size_t nv = dm.dim_v(), ns = dm.dim_sp();
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            Vec v = dm.v(i), w = dm.v(j);
            if (dm.mu(v, w) != sub(dm.br(dm.lambda(v), w), dm.br(dm.lambda(w), v)))
                fail("alpha");
        }
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t a = 0; a < ns; ++a) {
            Vec v = dm.v(i), s = dm.sp(a);
            Vec beta = add(dm.hat(v, s), dm.br(dm.lambda(v), s));
            if (!ctx.in_sub(beta))
                fail("beta leaves S'");
            if (dm.mu(v, s) != beta)
                fail("beta");
        }
    for (auto [a, b] : sym_pairs(ns)) {
        Vec s = dm.sp(a), t = dm.sp(b);
        Vec val = sub(dm.hat(s, t), dm.lambda(dm.br(s, t)));
        if (!ctx.in_sub(part(g, val, M::A)) || !ctx.in_sub(part(g, val, M::R)))
            fail("gamma or rho leaves a_0");
        if (dm.mu(s, t) != val)
            fail("gamma + rho");
    }
    for (std::size_t k : ctx.degree_zero()) {
        Vec x = ctx.embed(k);
        const bool so_part = ctx.sub.alg.block_of(k) == M::A;
        for (std::size_t i = 0; i < nv; ++i) {
            Vec v = dm.v(i);
            Vec l = dm.lambda(v);
            if (so_part) {
                Vec lx = dm.lambda(dm.br(x, v));
                if (!ctx.in_sub(sub(dm.br(x, part(g, l, M::A)), part(g, lx, M::A))) ||
                    !ctx.in_sub(part(g, lx, M::R)))
                    fail("h-equivariance of lambda");
            } else if (!ctx.in_sub(dm.br(x, part(g, l, M::R)))) {
                fail("r'-equivariance of lambda");
            }
        }
    }
}

DeltaMap delta_closed_form(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    const GradedAlgebra& g = ctx.s();
    DatumMaps dm(ctx, datum);
    DeltaMap out;
    for (std::size_t k : ctx.degree_zero()) {
        Vec x = ctx.embed(k);
        std::vector<Vec> row;
        for (std::size_t i = 0; i < dm.dim_v(); ++i) {
            Vec v = dm.v(i);
            Vec l = dm.lambda(v);
            if (ctx.sub.alg.block_of(k) == M::A) {
                Vec lxv = dm.lambda(dm.br(x, v));
                Vec d1 = sub(dm.br(x, part(g, l, M::A)), part(g, lxv, M::A));
                Vec d2 = scale(-1, part(g, lxv, M::R));
                row.push_back(add(d1, d2));
            } else {
                // the so(V) component vanishes identically for r'
                row.push_back(dm.br(x, part(g, l, M::R)));
            }
        }
        out.value.push_back(std::move(row));
    }
    return out;
}

namespace {

std::vector<Vec> generic_chis(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    std::vector<Vec> chis;
    for (std::size_t k : ctx.degree_zero()) {
        Vec act = cochain_action(ctx.own.ctx, ctx.own.spaces[2], unit_vec(ctx.sub.alg.dim(), k)).apply(datum.mu);
        auto chi = solve(ctx.own.diffs[1], act);
        if (!chi)
            throw OracleMismatch("no one-cochain with differential X . mu");
        chis.push_back(std::move(*chi));
    }
    return chis;
}

}  // namespace

DeltaMap delta_generic(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    DatumMaps dm(ctx, datum);
    DeltaMap out;
    for (const Vec& chi : generic_chis(ctx, datum)) {
        std::vector<Vec> row;
        for (std::size_t i = 0; i < dm.dim_v(); ++i) {
            Vec legs = ctx.own.ctx.to_legs(ctx.sub_frame.coords(dm.v(i)));
            row.push_back(ctx.sub.inclusion.apply(evaluate(ctx.own.spaces[1], chi, {legs})));
        }
        out.value.push_back(std::move(row));
    }
    return out;
}

DeltaResult solve_delta(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    DeltaResult r;
    r.delta = delta_closed_form(ctx, datum);
    if (!(delta_generic(ctx, datum) == r.delta))
        throw OracleMismatch("closed-form delta differs from the generic solve");
    const GradedAlgebra& g = ctx.s();
    const auto zero = ctx.degree_zero();
    r.delta3_zero = true;
    for (std::size_t p = 0; p < zero.size(); ++p)
        if (ctx.sub.alg.block_of(zero[p]) == M::R)
            for (const Vec& val : r.delta.value[p])
                if (!is_zero(g.block_part(val, M::A)))
                    r.delta3_zero = false;

    // X . chi_Y - Y . chi_X - chi_[X,Y] = 0 and X . mu = d chi_X
    auto chis = generic_chis(ctx, datum);
    const CochainSpace& c21 = ctx.own.spaces[1];
    std::vector<ExactMatrix> acts;
    for (std::size_t k : zero)
        acts.push_back(cochain_action(ctx.own.ctx, c21, unit_vec(ctx.sub.alg.dim(), k)));
    r.cocycle = true;
    for (std::size_t p = 0; p < zero.size(); ++p)
        for (std::size_t q = 0; q < zero.size(); ++q) {
            Vec lhs = sub(acts[p].apply(chis[q]), acts[q].apply(chis[p]));
            const Vec& xy = ctx.sub.alg.bracket(zero[p], zero[q]);
            for (std::size_t t = 0; t < zero.size(); ++t)
                if (sgn(xy[zero[t]]) != 0)
                    axpy(lhs, -xy[zero[t]], chis[t]);
            if (!is_zero(lhs))
                r.cocycle = false;
        }
    return r;
}

Vec ThetaData::tilde_at(const Vec& v, const Vec& w) const
{
    const std::size_t n = tilde.size();
    Vec out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (sgn(v[i]) == 0 || sgn(w[j]) == 0)
                continue;
            if (out.empty())
                out = zero_vec(tilde[i][j].size());
            axpy(out, v[i] * w[j], tilde[i][j]);
        }
    if (out.empty() && n)
        out = zero_vec(tilde[0][0].size());
    return out;
}

ThetaData compute_theta(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    DatumMaps dm(ctx, datum);
    const std::size_t nv = dm.dim_v(), ns = dm.dim_sp(), n = ctx.s().dim();
    ThetaData t;
    t.big_theta.assign(nv, std::vector<std::vector<Vec>>(ns, std::vector<Vec>(ns)));
    for (std::size_t i = 0; i < nv; ++i) {
        Vec v = dm.v(i);
        Vec l = dm.lambda(v);
        for (std::size_t a = 0; a < ns; ++a)
            for (std::size_t b = a; b < ns; ++b) {
                Vec s1 = dm.sp(a), s2 = dm.sp(b);
                Vec val = add(dm.hat(s1, dm.hat(v, s2)), dm.hat(s2, dm.hat(v, s1)));
                val = sub(val, dm.br(l, dm.hat(s1, s2)));
                val = add(val, dm.hat(dm.br(l, s1), s2));
                val = add(val, dm.hat(s1, dm.br(l, s2)));
                t.big_theta[i][a][b] = val;
                t.big_theta[i][b][a] = val;
            }
    }
    const auto pairs = sym_pairs(ns);
    ExactMatrix dk = bracket_dirac_kernel(dm);
    t.annihilated = true;
    for (std::size_t r = 0; r < dk.rows() && t.annihilated; ++r)
        for (std::size_t i = 0; i < nv && t.annihilated; ++i) {
            Vec acc(n);
            for (std::size_t q = 0; q < pairs.size(); ++q)
                if (sgn(dk(r, q)) != 0)
                    axpy(acc, dk(r, q), t.big_theta[i][pairs[q].first][pairs[q].second]);
            t.annihilated = is_zero(acc);
        }
    if (!t.annihilated)
        return t;

    // tilde(v, kappa(s_a, s_b)) = Theta(v, s_a, s_b) through a right inverse of kappa
    std::vector<Vec> kcols;
    for (auto [a, b] : pairs)
        kcols.push_back(slice(dm.br(dm.sp(a), dm.sp(b)), 0, nv));
    ExactMatrix k = ExactMatrix::from_cols(kcols, nv);
    ExactMatrix right = inverse(k * k.transpose());
    ExactMatrix gsolve = right * k;  // nv x pairs
    t.tilde.assign(nv, std::vector<Vec>(nv));
    for (std::size_t i = 0; i < nv; ++i) {
        ExactMatrix rhs(pairs.size(), n);
        for (std::size_t q = 0; q < pairs.size(); ++q)
            rhs.set_row(q, t.big_theta[i][pairs[q].first][pairs[q].second]);
        ExactMatrix x = gsolve * rhs;
        if (k.transpose() * x != rhs)
            throw OracleMismatch("Theta kills the Dirac kernel but does not factor through kappa");
        for (std::size_t j = 0; j < nv; ++j)
            t.tilde[i][j] = x.row(j);
    }
    t.alternating = true;
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            if (add(t.tilde[i][j], t.tilde[j][i]) != zero_vec(n))
                t.alternating = false;
    for (std::size_t a = 0; a < ns; ++a) {
        Vec ks = dm.br(dm.sp(a), dm.sp(a));
        if (!is_zero(ctx.s().block_part(t.tilde_at(ks, ks), M::R)))
            t.alternating = false;
    }
    return t;
}

const NamedCheck* IntegrabilityReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

IntegrabilityReport check_integrability(const DeformContext& ctx, const AdmissibleDatum& datum,
                                        const ThetaData& theta)
{
    IntegrabilityReport rep;
    rep.checks.push_back({"dirac-kernel", theta.annihilated, {}});
    if (!theta.annihilated)
        return rep;
    const GradedAlgebra& g = ctx.s();
    DatumMaps dm(ctx, datum);
    const std::size_t nv = dm.dim_v(), ns = dm.dim_sp();
    auto tl = [&](const Vec& v, const Vec& w) { return theta.tilde_at(v, w); };
    // (X . beta-hat)(w, s)
    auto act_beta = [&](const Vec& x, const Vec& w, const Vec& s) {
        Vec out = dm.br(x, dm.hat(w, s));
        out = sub(out, dm.hat(dm.br(x, w), s));
        return sub(out, dm.hat(w, dm.br(x, s)));
    };
    // (X . tilde)(v, w)
    auto act_tilde = [&](const Vec& x, const Vec& v, const Vec& w) {
        Vec out = dm.br(x, tl(v, w));
        out = sub(out, tl(dm.br(x, v), w));
        return sub(out, tl(v, dm.br(x, w)));
    };
    auto record = [&](NamedCheck& c, std::vector<std::size_t> w) {
        if (c.pass) {
            c.pass = false;
            c.witness = std::move(w);
        }
    };

    NamedCheck acts{"act-s", true, {}};
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            for (std::size_t a = 0; a < ns; ++a) {
                Vec v = dm.v(i), w = dm.v(j), s = dm.sp(a);
                Vec lhs = dm.br(tl(v, w), s);
                Vec rhs = sub(dm.hat(v, dm.hat(w, s)), dm.hat(w, dm.hat(v, s)));
                rhs = add(rhs, act_beta(dm.lambda(v), w, s));
                rhs = sub(rhs, act_beta(dm.lambda(w), v, s));
                if (lhs != rhs)
                    record(acts, {i, j, a});
            }
    rep.checks.push_back(acts);

    NamedCheck defining{"theta-defining", true, {}};
    for (std::size_t i = 0; i < nv; ++i)
        for (auto [a, b] : sym_pairs(ns))
            if (tl(dm.v(i), dm.br(dm.sp(a), dm.sp(b))) != theta.big_theta[i][a][b])
                record(defining, {i, a, b});
    rep.checks.push_back(defining);

    NamedCheck inv_h{"invariance-h", true, {}}, inv_r{"invariance-r", true, {}};
    for (std::size_t k : ctx.degree_zero()) {
        NamedCheck& c = ctx.sub.alg.block_of(k) == M::A ? inv_h : inv_r;
        for (std::size_t i = 0; i < nv; ++i)
            for (std::size_t j = 0; j < nv; ++j)
                if (!is_zero(act_tilde(ctx.embed(k), dm.v(i), dm.v(j))))
                    record(c, {k, i, j});
    }
    rep.checks.push_back(inv_h);
    rep.checks.push_back(inv_r);

    NamedCheck bianchi{"bianchi", true, {}}, lbianchi{"lambda-bianchi", true, {}};
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            for (std::size_t k = 0; k < nv; ++k) {
                Vec u = dm.v(i), v = dm.v(j), w = dm.v(k);
                Vec b = add(add(dm.br(tl(u, v), w), dm.br(tl(v, w), u)), dm.br(tl(w, u), v));
                if (!is_zero(b))
                    record(bianchi, {i, j, k});
                Vec lb = add(add(act_tilde(dm.lambda(u), v, w), act_tilde(dm.lambda(v), w, u)),
                             act_tilde(dm.lambda(w), u, v));
                if (!is_zero(lb))
                    record(lbianchi, {i, j, k});
            }
    rep.checks.push_back(bianchi);
    rep.checks.push_back(lbianchi);

    // tilde_1(v, w) kappa_s = Theta_1(v, s, s) w - Theta_1(w, s, s) v
    NamedCheck second{"second-definition", true, {}};
    for (std::size_t a = 0; a < ns; ++a) {
        Vec ks = dm.br(dm.sp(a), dm.sp(a));
        for (std::size_t i = 0; i < nv; ++i)
            for (std::size_t j = 0; j < nv; ++j) {
                Vec v = dm.v(i), w = dm.v(j);
                Vec lhs = dm.br(part(g, tl(v, w), M::A), ks);
                Vec rhs = sub(dm.br(part(g, theta.big_theta[i][a][a], M::A), w),
                              dm.br(part(g, theta.big_theta[j][a][a], M::A), v));
                if (lhs != rhs)
                    record(second, {i, j, a});
            }
    }
    rep.checks.push_back(second);

    NamedCheck in_a0{"theta-in-a0", true, {}};
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            Vec v = dm.v(i), w = dm.v(j);
            Vec lv = dm.lambda(v), lw = dm.lambda(w);
            Vec alpha = sub(dm.br(lv, w), dm.br(lw, v));
            Vec th = add(sub(tl(v, w), dm.lambda(alpha)), dm.br(lv, lw));
            if (!ctx.in_sub(part(g, th, M::A)) || !ctx.in_sub(part(g, th, M::R)))
                record(in_a0, {i, j});
        }
    rep.checks.push_back(in_a0);

    rep.integrable = acts.pass;
    if (rep.integrable)
        for (const auto& c : rep.checks)
            if (!c.pass)
                throw OracleMismatch("integrable datum fails the implied identity " + c.name);
    return rep;
}

FilteredDeformation build_filtered_deformation(const DeformContext& ctx, const AdmissibleDatum& datum,
                                               const ThetaData& theta)
{
    if (!theta.annihilated)
        throw std::invalid_argument("theta-tilde is undefined for this datum");
    const GradedAlgebra& a = ctx.sub.alg;
    DatumMaps dm(ctx, datum);
    const DeltaMap delta = delta_closed_form(ctx, datum);
    const auto zero = ctx.degree_zero();
    std::vector<std::size_t> zero_pos(a.dim(), 0);
    for (std::size_t p = 0; p < zero.size(); ++p)
        zero_pos[zero[p]] = p;
    const std::size_t n = a.dim();
    auto delta_at = [&](std::size_t k, const Vec& v) {
        return sum_scaled(delta.value[zero_pos[k]], slice(v, 0, dm.dim_v()), ctx.s().dim());
    };
    auto theta_at = [&](const Vec& v, const Vec& w) {
        Vec lv = dm.lambda(v), lw = dm.lambda(w);
        Vec alpha = sub(dm.br(lv, w), dm.br(lw, v));
        return add(sub(theta.tilde_at(v, w), dm.lambda(alpha)), dm.br(lv, lw));
    };

    FilteredDeformation out;
    out.alg = GradedAlgebra(a.blocks());
    std::vector<Vec> mu_part(n * n), theta_part(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const int di = a.degree(i), dj = a.degree(j);
            Vec x = ctx.embed(i), y = ctx.embed(j);
            Vec graded = dm.br(x, y);
            Vec mu_val(graded.size()), th_val(graded.size());
            if (di == 0 && dj == -2)
                mu_val = delta_at(i, y);
            else if (di == -2 && dj == 0)
                mu_val = scale(-1, delta_at(j, x));
            else if (di == -1 && dj == -1)
                mu_val = sub(dm.hat(x, y), dm.lambda(graded));
            else if (di == -2 && dj == -1)
                mu_val = add(dm.hat(x, y), dm.br(dm.lambda(x), y));
            else if (di == -1 && dj == -2)
                mu_val = scale(-1, add(dm.hat(y, x), dm.br(dm.lambda(y), x)));
            else if (di == -2 && dj == -2) {
                mu_val = sub(dm.br(dm.lambda(x), y), dm.br(dm.lambda(y), x));
                th_val = theta_at(x, y);
            }
            auto coords = ctx.sub_frame.coordinates(add(add(graded, mu_val), th_val));
            if (!coords)
                throw OracleMismatch("deformed bracket leaves a");
            out.alg.set_bracket_raw(i, j, *coords);
            mu_part[i * n + j] = mu_val;
            theta_part[i * n + j] = th_val;
        }

    out.jacobi = graded_jacobi_check(out.alg, {true});
    if (!out.jacobi.pass) {
        if (out.jacobi.failure == "degree" || out.jacobi.failure == "filtration")
            throw FiltrationViolation("deformed bracket breaks the filtration");
        throw JacobiViolation("deformed bracket fails " + out.jacobi.failure);
    }

    out.filtration = out.associated_graded = out.defining_sequence = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const int base = a.degree(i) + a.degree(j);
            const Vec& b = out.alg.bracket(i, j);
            Vec gr(n), shift2(n), shift4(n);
            for (std::size_t m = 0; m < n; ++m) {
                if (sgn(b[m]) == 0)
                    continue;
                const int dm_ = a.degree(m);
                if (dm_ < base)
                    out.filtration = false;
                else if (dm_ == base)
                    gr[m] = b[m];
                else if (dm_ == base + 2)
                    shift2[m] = b[m];
                else if (dm_ == base + 4)
                    shift4[m] = b[m];
                else
                    out.defining_sequence = false;
            }
            if (gr != a.bracket(i, j))
                out.associated_graded = false;
            Vec expect_mu;
            if (a.degree(i) < 0 && a.degree(j) < 0)
                expect_mu = dm.mu(ctx.embed(i), ctx.embed(j));
            else
                expect_mu = mu_part[i * n + j];
            if (shift2 != ctx.sub_frame.coords(expect_mu) || shift4 != ctx.sub_frame.coords(theta_part[i * n + j]))
                out.defining_sequence = false;
        }
    if (!out.filtration)
        throw FiltrationViolation("deformed bracket breaks the filtration");
    if (!out.associated_graded || !out.defining_sequence)
        throw OracleMismatch("deformed bracket does not have the expected graded pieces");
    return out;
}

bool is_homomorphism(const GradedAlgebra& g1, const GradedAlgebra& g2, const ExactMatrix& phi)
{
    for (std::size_t i = 0; i < g1.dim(); ++i)
        for (std::size_t j = 0; j < g1.dim(); ++j)
            if (phi.apply(g1.bracket(i, j)) != g2.bracket(phi.col(i), phi.col(j)))
                return false;
    return true;
}

ExactMatrix gauge_isomorphism(const DeformContext& ctx, const AdmissibleDatum& d1, const AdmissibleDatum& d2)
{
    DatumMaps m1(ctx, d1), m2(ctx, d2);
    const std::size_t n = ctx.sub.alg.dim();
    ExactMatrix phi = ExactMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (ctx.sub.alg.degree(k) != -2)
            continue;
        Vec x = ctx.embed(k);
        auto c = ctx.sub_frame.coordinates(sub(m1.lambda(x), m2.lambda(x)));
        if (!c)
            throw OracleMismatch("gauge maps differ outside a_0");
        for (std::size_t m = 0; m < n; ++m)
            phi(m, k) += (*c)[m];
    }
    return phi;
}

Realisability check_geometric_realisability(const DeformContext& ctx, const AdmissibleDatum& datum,
                                            const ThetaData& theta)
{
    Realisability r;
    if (!theta.annihilated)
        throw std::invalid_argument("theta-tilde is undefined for this datum");
    const GradedAlgebra& g = ctx.s();
    r.theta2_zero = true;
    for (const auto& row : theta.tilde)
        for (const Vec& val : row)
            if (!is_zero(g.block_part(val, M::R)))
                r.theta2_zero = false;

    // lambda - sum c_k eta_k + i_* nu has no r component, with i^* k_k = d eta_k
    const SpencerComplex& mx = ctx.mixed;
    const std::size_t nk = ctx.k22.dim();
    std::vector<Vec> etas;
    for (std::size_t k = 0; k < nk; ++k) {
        auto eta = solve(mx.diffs[1], ctx.restriction.apply(ctx.k22.vector(k)));
        if (!eta)
            throw OracleMismatch("K22 element does not restrict to a coboundary");
        etas.push_back(std::move(*eta));
    }
    ExactMatrix push1 = pushforward_map(ctx.own, mx, ctx.sub, 1);
    const std::size_t nnu = push1.cols();
    const auto* rc = mx.spaces[1].component(1, M::R);
    ExactMatrix eqs(0, nk + nnu);
    Vec rhs;
    if (rc)
        for (std::size_t c = rc->offset; c < rc->offset + rc->size(); ++c) {
            Vec row(nk + nnu);
            for (std::size_t k = 0; k < nk; ++k)
                row[k] = -etas[k][c];
            for (std::size_t j = 0; j < nnu; ++j)
                row[nk + j] = push1(c, j);
            eqs.append_row(row);
            rhs.push_back(-datum.lambda[c]);
        }
    Vec x(nk + nnu);
    if (eqs.rows()) {
        auto res = solve_affine(eqs, rhs);
        if (auto* no = std::get_if<NoSolution>(&res)) {
            r.certificate = no->certificate;
            r.realisable = false;
            return r;
        }
        x = std::get<ParticularSolution>(res).x;
    }
    r.lambda2_removable = true;
    r.hat_shift = slice(x, 0, nk);
    r.lambda_shift = push1.apply(slice(x, nk, nnu));
    for (std::size_t k = 0; k < nk; ++k)
        axpy(r.lambda_shift, -x[k], etas[k]);
    r.realisable = r.theta2_zero;
    return r;
}

Envelope compute_envelope(const DeformContext& ctx, const AdmissibleDatum& datum)
{
    const GradedAlgebra& g = ctx.s();
    DatumMaps dm(ctx, datum);
    const std::size_t n = g.dim();
    const auto pairs = sym_pairs(dm.dim_sp());
    ExactMatrix dk = bracket_dirac_kernel(dm);
    std::vector<Vec> joint, split;
    for (std::size_t r = 0; r < dk.rows(); ++r) {
        Vec acc(n);
        for (std::size_t q = 0; q < pairs.size(); ++q)
            if (sgn(dk(r, q)) != 0)
                axpy(acc, dk(r, q), dm.hat(dm.sp(pairs[q].first), dm.sp(pairs[q].second)));
        joint.push_back(acc);
        split.push_back(part(g, acc, M::A));
        split.push_back(part(g, acc, M::R));
    }
    auto assess = [&](const std::vector<Vec>& gens) {
        EnvelopeCandidate c;
        c.span = Subspace::span(gens, n);
        c.subalgebra = c.preserves_spinors = c.preserves_hat = true;
        const SpencerComplex& fc = ctx.flat->complex;
        for (std::size_t i = 0; i < c.span.dim(); ++i) {
            Vec x = c.span.vector(i);
            for (std::size_t j = 0; j < c.span.dim(); ++j)
                if (!c.span.contains(dm.br(x, c.span.vector(j))))
                    c.subalgebra = false;
            for (std::size_t a = 0; a < dm.dim_sp(); ++a)
                if (!ctx.in_sub(dm.br(x, dm.sp(a))))
                    c.preserves_spinors = false;
            if (!is_zero(cochain_action(fc.ctx, fc.spaces[2], x).apply(datum.hat)))
                c.preserves_hat = false;
        }
        return c;
    };
    Envelope e;
    e.joint = assess(joint);
    e.split = assess(split);
    e.splits = e.joint.span == e.split.span;
    return e;
}

Subspace admissible_hats(const DeformContext& ctx)
{
    const std::size_t k = ctx.invariant.dim();
    const std::size_t n = ctx.invariant.ambient();
    if (k == 0)
        return Subspace(n);
    ExactMatrix rh(ctx.restriction.rows(), k);
    for (std::size_t j = 0; j < k; ++j) {
        Vec img = ctx.restriction.apply(ctx.invariant.vector(j));
        for (std::size_t i = 0; i < img.size(); ++i)
            rh(i, j) = img[i];
    }
    ExactMatrix ker = kernel(hcat(hcat(rh, -ctx.pushforward), ctx.mixed.diffs[1]));
    std::vector<Vec> gens;
    for (std::size_t r = 0; r < ker.rows(); ++r)
        gens.push_back(ctx.invariant.combine(slice(ker.row(r), 0, k)));
    return Subspace::span(gens, n);
}

std::vector<AdmissibleDatum> instances_from_basis(const DeformContext& ctx)
{
    std::vector<AdmissibleDatum> out;
    Subspace hats = admissible_hats(ctx);
    for (std::size_t k = 0; k < hats.dim(); ++k) {
        auto d = datum_from_hat(ctx, hats.vector(k));
        if (!d)
            throw OracleMismatch("admissible hat without a datum");
        out.push_back(std::move(*d));
    }
    return out;
}

}  // namespace spencerkit
