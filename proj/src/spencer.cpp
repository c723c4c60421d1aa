#include "spencerkit/spencer.hpp"

#include <algorithm>

namespace spencerkit {

namespace {

// Sorts a leg tuple into canonical order and returns the Koszul sign of the
// permutation, or 0 when a repeated even leg makes the value vanish.
int canonicalise(std::vector<std::size_t>& t, const std::vector<int>& parity)
{
    int sign = 1;
    for (std::size_t i = 1; i < t.size(); ++i)
        for (std::size_t j = i; j > 0 && t[j - 1] > t[j]; --j) {
            sign *= -koszul(parity[t[j - 1]], parity[t[j]]);
            std::swap(t[j - 1], t[j]);
        }
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (t[i] == t[i + 1] && parity[t[i]] == 0)
            return 0;
    return sign;
}

std::size_t count_even(const std::vector<std::size_t>& t, const std::vector<int>& parity)
{
    return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [&](std::size_t x) { return parity[x] == 0; }));
}

using SparseRows = std::vector<std::vector<std::pair<std::size_t, Rational>>>;

SparseRows sparse_rows(const ExactMatrix& m)
{
    SparseRows out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (sgn(m(i, j)) != 0)
                out[i].emplace_back(j, m(i, j));
    return out;
}

void add_entry(std::map<std::size_t, Rational>& row, std::size_t col, const Rational& v)
{
    if (sgn(v) == 0)
        return;
    auto [it, inserted] = row.emplace(col, v);
    if (!inserted) {
        it->second += v;
        if (sgn(it->second) == 0)
            row.erase(it);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Context and cochain spaces

Vec ComplexContext::to_legs(const Vec& x) const
{
    Vec out(legs.size());
    for (std::size_t i = 0; i < legs.size(); ++i)
        out[i] = x[legs[i]];
    return out;
}

ComplexContext make_context(const GradedAlgebra& source, const GradedAlgebra& target, const ExactMatrix& inclusion)
{
    if (inclusion.rows() != target.dim() || inclusion.cols() != source.dim())
        throw DimensionMismatch("inclusion has the wrong shape");
    ComplexContext ctx;
    ctx.source = source;
    ctx.target = target;
    ctx.inclusion = inclusion;
    bool seen_odd = false;
    for (std::size_t i = 0; i < source.dim(); ++i) {
        int deg = source.degree(i);
        if (deg >= 0)
            continue;
        if (deg != -1 && deg != -2)
            throw std::invalid_argument("negative part must live in degrees -2 and -1");
        if (deg == -1)
            seen_odd = true;
        else if (seen_odd)
            throw std::invalid_argument("degree -2 basis must precede degree -1 basis");
        ctx.legs.push_back(i);
        ctx.leg_parity.push_back(source.parity(i));
        ctx.leg_degree.push_back(deg);
    }
    const std::size_t nl = ctx.legs.size();
    std::vector<long> leg_slot(source.dim(), -1);
    for (std::size_t i = 0; i < nl; ++i)
        leg_slot[ctx.legs[i]] = static_cast<long>(i);
    ctx.leg_bracket.assign(nl * nl, Vec(nl));
    for (std::size_t i = 0; i < nl; ++i)
        for (std::size_t j = 0; j < nl; ++j) {
            const Vec& b = source.bracket(ctx.legs[i], ctx.legs[j]);
            for (std::size_t k = 0; k < b.size(); ++k) {
                if (sgn(b[k]) == 0)
                    continue;
                if (leg_slot[k] < 0)
                    throw std::invalid_argument("negative part is not a subalgebra");
                ctx.leg_bracket[i * nl + j][static_cast<std::size_t>(leg_slot[k])] = b[k];
            }
        }
    for (std::size_t i = 0; i < nl; ++i)
        ctx.leg_action.push_back(target.ad(inclusion.col(ctx.legs[i])));
    return ctx;
}

std::optional<CochainSpace::Coord> CochainSpace::locate(std::vector<std::size_t> tuple, std::size_t m) const
{
    int sign = canonicalise(tuple, leg_parity);
    if (sign == 0)
        return std::nullopt;
    const Component* c = component(count_even(tuple, leg_parity), static_cast<std::size_t>(target_block_of[m]));
    if (!c)
        return std::nullopt;
    auto it = c->index.find(tuple);
    if (it == c->index.end())
        return std::nullopt;
    return Coord{c->offset + it->second * c->target_dim + (m - c->target_offset), sign};
}

const CochainSpace::Component* CochainSpace::component(std::size_t n_even, std::size_t target_block) const
{
    for (const auto& c : comps)
        if (c.n_even == n_even && c.target_block == target_block)
            return &c;
    return nullptr;
}

std::pair<std::vector<std::size_t>, std::size_t> CochainSpace::label(std::size_t coord) const
{
    for (const auto& c : comps)
        if (coord >= c.offset && coord < c.offset + c.size()) {
            std::size_t r = coord - c.offset;
            return {c.tuples[r / c.target_dim], c.target_offset + r % c.target_dim};
        }
    throw std::out_of_range("cochain coordinate out of range");
}

CochainSpace make_cochain_space(const ComplexContext& ctx, int d, std::size_t p)
{
    CochainSpace sp;
    sp.d = d;
    sp.p = p;
    sp.leg_parity = ctx.leg_parity;
    for (std::size_t i = 0; i < ctx.target.dim(); ++i)
        sp.target_block_of.push_back(static_cast<int>(ctx.target.block_of(i)));
    std::size_t n_even = 0;
    for (int par : ctx.leg_parity)
        n_even += par == 0 ? 1 : 0;
    const std::size_t n_odd = ctx.n_legs() - n_even;
    for (std::size_t a = p + 1; a-- > 0;) {
        const std::size_t b = p - a;
        auto ev = increasing_tuples(n_even, a, true);
        auto od = increasing_tuples(n_odd, b, false);
        if (ev.empty() || od.empty())
            continue;
        const int t = d - 2 * static_cast<int>(a) - static_cast<int>(b);
        for (std::size_t blk = 0; blk < ctx.target.blocks().size(); ++blk) {
            const Block& B = ctx.target.blocks()[blk];
            if (B.degree != t || B.dim == 0)
                continue;
            CochainSpace::Component c;
            c.n_even = a;
            c.n_odd = b;
            c.target_block = blk;
            c.target_offset = ctx.target.offset(blk);
            c.target_dim = B.dim;
            for (const auto& e : ev)
                for (const auto& o : od) {
                    std::vector<std::size_t> tup = e;
                    for (auto x : o)
                        tup.push_back(x + n_even);
                    c.index.emplace(tup, c.tuples.size());
                    c.tuples.push_back(std::move(tup));
                }
            c.offset = sp.dim;
            sp.dim += c.size();
            sp.comps.push_back(std::move(c));
        }
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Differential and actions

ExactMatrix differential(const ComplexContext& ctx, const CochainSpace& from, const CochainSpace& to)
{
    if (to.p != from.p + 1 || to.d != from.d)
        throw DimensionMismatch("differential between incompatible cochain spaces");
    const std::size_t nl = ctx.n_legs();
    std::vector<SparseRows> act;
    for (const auto& a : ctx.leg_action)
        act.push_back(sparse_rows(a));
    const auto& par = ctx.leg_parity;
    ExactMatrix out(to.dim, from.dim);
    for (const auto& comp : to.comps)
        for (std::size_t ti = 0; ti < comp.tuples.size(); ++ti) {
            const auto& x = comp.tuples[ti];
            const std::size_t q = x.size();
            for (std::size_t mm = 0; mm < comp.target_dim; ++mm) {
                const std::size_t m = comp.target_offset + mm;
                std::map<std::size_t, Rational> row;
                int prefix = 0;
                for (std::size_t i = 0; i < q; ++i) {
                    int e = static_cast<int>(i) + par[x[i]] * prefix;
                    int s = (e & 1) ? -1 : 1;
                    std::vector<std::size_t> rest;
                    for (std::size_t k = 0; k < q; ++k)
                        if (k != i)
                            rest.push_back(x[k]);
                    for (const auto& [k, v] : act[x[i]][m]) {
                        auto loc = from.locate(rest, k);
                        if (loc)
                            add_entry(row, loc->index, v * (s * loc->sign));
                    }
                    prefix += par[x[i]];
                }
                for (std::size_t i = 0; i < q; ++i)
                    for (std::size_t j = i + 1; j < q; ++j) {
                        const Vec& br = ctx.leg_bracket[x[i] * nl + x[j]];
                        if (is_zero(br))
                            continue;
                        int pre_i = 0, pre_j = 0;
                        for (std::size_t k = 0; k < i; ++k)
                            pre_i += par[x[k]];
                        for (std::size_t k = 0; k < j; ++k)
                            pre_j += par[x[k]];
                        int e = static_cast<int>(i + j) + par[x[i]] * pre_i + par[x[j]] * pre_j + par[x[i]] * par[x[j]];
                        int s = (e & 1) ? -1 : 1;
                        for (std::size_t l = 0; l < nl; ++l) {
                            if (sgn(br[l]) == 0)
                                continue;
                            std::vector<std::size_t> t{l};
                            for (std::size_t k = 0; k < q; ++k)
                                if (k != i && k != j)
                                    t.push_back(x[k]);
                            auto loc = from.locate(t, m);
                            if (loc)
                                add_entry(row, loc->index, br[l] * (s * loc->sign));
                        }
                    }
                const std::size_t r = comp.offset + ti * comp.target_dim + mm;
                for (auto& [c, v] : row)
                    out(r, c) = v;
            }
        }
    return out;
}

ExactMatrix cochain_action(const ComplexContext& ctx, const CochainSpace& space, const Vec& x)
{
    const std::size_t nl = ctx.n_legs();
    ExactMatrix full = ctx.source.ad(x);
    ExactMatrix legs(nl, nl);
    for (std::size_t u = 0; u < nl; ++u)
        for (std::size_t l = 0; l < ctx.source.dim(); ++l) {
            const Rational& v = full(l, ctx.legs[u]);
            if (sgn(v) == 0)
                continue;
            auto it = std::find(ctx.legs.begin(), ctx.legs.end(), l);
            if (it == ctx.legs.end())
                throw std::invalid_argument("action does not preserve the negative part");
            legs(static_cast<std::size_t>(it - ctx.legs.begin()), u) = v;
        }
    SparseRows tgt = sparse_rows(ctx.target.ad(ctx.inclusion.apply(x)));
    ExactMatrix out(space.dim, space.dim);
    for (const auto& comp : space.comps)
        for (std::size_t ti = 0; ti < comp.tuples.size(); ++ti) {
            const auto& t = comp.tuples[ti];
            for (std::size_t mm = 0; mm < comp.target_dim; ++mm) {
                const std::size_t m = comp.target_offset + mm;
                std::map<std::size_t, Rational> row;
                for (const auto& [k, v] : tgt[m]) {
                    auto loc = space.locate(t, k);
                    if (loc)
                        add_entry(row, loc->index, v * loc->sign);
                }
                for (std::size_t i = 0; i < t.size(); ++i)
                    for (std::size_t l = 0; l < nl; ++l) {
                        const Rational& v = legs(l, t[i]);
                        if (sgn(v) == 0)
                            continue;
                        std::vector<std::size_t> u = t;
                        u[i] = l;
                        auto loc = space.locate(u, m);
                        if (loc)
                            add_entry(row, loc->index, -v * loc->sign);
                    }
                const std::size_t r = comp.offset + ti * comp.target_dim + mm;
                for (auto& [c, v] : row)
                    out(r, c) = v;
            }
        }
    return out;
}

Vec evaluate(const CochainSpace& space, const Vec& phi, const std::vector<Vec>& args)
{
    if (args.size() != space.p)
        throw DimensionMismatch("evaluate: wrong number of arguments");
    Vec out(space.target_block_of.size());
    std::vector<std::size_t> tuple(args.size());
    auto rec = [&](auto&& self, std::size_t pos, const Rational& c) -> void {
        if (pos == args.size()) {
            std::vector<std::size_t> t = tuple;
            int sign = canonicalise(t, space.leg_parity);
            if (sign == 0)
                return;
            std::size_t ne = count_even(t, space.leg_parity);
            for (const auto& comp : space.comps) {
                if (comp.n_even != ne)
                    continue;
                auto it = comp.index.find(t);
                if (it == comp.index.end())
                    continue;
                std::size_t base = comp.offset + it->second * comp.target_dim;
                for (std::size_t mm = 0; mm < comp.target_dim; ++mm)
                    if (sgn(phi[base + mm]) != 0)
                        out[comp.target_offset + mm] += c * sign * phi[base + mm];
            }
            return;
        }
        for (std::size_t l = 0; l < args[pos].size(); ++l) {
            if (sgn(args[pos][l]) == 0)
                continue;
            tuple[pos] = l;
            self(self, pos + 1, c * args[pos][l]);
        }
    };
    rec(rec, 0, Rational(1));
    return out;
}

ExactMatrix transfer(const CochainSpace& from, const CochainSpace& to, const ExactMatrix& leg_map,
                     const ExactMatrix& target_map)
{
    if (from.p != to.p)
        throw DimensionMismatch("transfer between different homological degrees");
    SparseRows trows = sparse_rows(target_map);
    std::vector<std::vector<std::pair<std::size_t, Rational>>> lcols(leg_map.cols());
    for (std::size_t u = 0; u < leg_map.cols(); ++u)
        for (std::size_t i = 0; i < leg_map.rows(); ++i)
            if (sgn(leg_map(i, u)) != 0)
                lcols[u].emplace_back(i, leg_map(i, u));
    ExactMatrix out(to.dim, from.dim);
    for (const auto& comp : to.comps)
        for (std::size_t ti = 0; ti < comp.tuples.size(); ++ti) {
            const auto& u = comp.tuples[ti];
            for (std::size_t mm = 0; mm < comp.target_dim; ++mm) {
                const std::size_t m = comp.target_offset + mm;
                if (trows[m].empty())
                    continue;
                std::map<std::size_t, Rational> row;
                std::vector<std::size_t> t(u.size());
                auto rec = [&](auto&& self, std::size_t pos, const Rational& c) -> void {
                    if (pos == u.size()) {
                        for (const auto& [k, tv] : trows[m]) {
                            auto loc = from.locate(t, k);
                            if (loc)
                                add_entry(row, loc->index, c * tv * loc->sign);
                        }
                        return;
                    }
                    for (const auto& [i, lv] : lcols[u[pos]]) {
                        t[pos] = i;
                        self(self, pos + 1, c * lv);
                    }
                };
                rec(rec, 0, Rational(1));
                const std::size_t r = comp.offset + ti * comp.target_dim + mm;
                for (auto& [c, v] : row)
                    out(r, c) = v;
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Complexes and cohomology

SpencerComplex build_complex(ComplexContext ctx, int d, std::size_t top)
{
    SpencerComplex cx;
    cx.ctx = std::move(ctx);
    cx.d = d;
    for (std::size_t p = 0; p <= top; ++p)
        cx.spaces.push_back(make_cochain_space(cx.ctx, d, p));
    for (std::size_t p = 0; p < top; ++p)
        cx.diffs.push_back(differential(cx.ctx, cx.spaces[p], cx.spaces[p + 1]));
    return cx;
}

SpencerComplex build_spencer_complex(const GradedSubalgebra& a, int d, std::size_t top)
{
    return build_complex(make_context(a.alg, a.alg, ExactMatrix::identity(a.alg.dim())), d, top);
}

SpencerComplex build_mixed_complex(const GradedSubalgebra& a, int d, std::size_t top)
{
    return build_complex(make_context(a.alg, a.model->alg, a.inclusion), d, top);
}

SpencerComplex build_flat_complex(const FlatModel& m, int d, std::size_t top)
{
    return build_complex(make_context(m.alg, m.alg, ExactMatrix::identity(m.alg.dim())), d, top);
}

CohomologyResult compute_cohomology(const SpencerComplex& cx, std::size_t p, bool with_action)
{
    if (p >= cx.top())
        throw std::out_of_range("cohomology needs the outgoing differential");
    CohomologyResult r;
    r.d = cx.d;
    r.p = p;
    const std::size_t n = cx.spaces[p].dim;
    r.z = cx.diffs[p].rows() ? Subspace::kernel_of(cx.diffs[p]) : Subspace::full(n);
    r.b = (p > 0 && cx.diffs[p - 1].cols() > 0) ? Subspace::span(cx.diffs[p - 1].transpose()) : Subspace(n);
    r.dim_z = r.z.dim();
    r.dim_b = r.b.dim();
    r.dim_h = r.dim_z - r.dim_b;
    r.representatives = ExactMatrix(0, n);
    Subspace cur = r.b;
    for (std::size_t k = 0; k < r.z.dim() && r.representatives.rows() < r.dim_h; ++k) {
        Vec z = r.z.vector(k);
        if (cur.contains(z))
            continue;
        r.representatives.append_row(z);
        cur = cur.sum(Subspace::span({z}, n));
    }
    if (with_action && r.dim_h > 0) {
        ExactMatrix frame_vecs = r.b.basis();
        if (frame_vecs.rows() == 0)
            frame_vecs = ExactMatrix(0, n);
        frame_vecs.append_rows(r.representatives);
        Frame fr(frame_vecs);
        for (std::size_t i = 0; i < cx.ctx.source.dim(); ++i) {
            if (cx.ctx.source.degree(i) != 0)
                continue;
            ExactMatrix act = cochain_action(cx.ctx, cx.spaces[p], unit_vec(cx.ctx.source.dim(), i));
            ExactMatrix h(r.dim_h, r.dim_h);
            for (std::size_t k = 0; k < r.dim_h; ++k) {
                Vec c = fr.coords(act.apply(r.representatives.row(k)));
                for (std::size_t l = 0; l < r.dim_h; ++l)
                    h(l, k) = c[r.dim_b + l];
            }
            r.action.push_back(std::move(h));
        }
    }
    return r;
}

ExactMatrix differential_block(const SpencerComplex& cx, std::size_t p, const CochainSpace::Component& from,
                               const CochainSpace::Component& to)
{
    const ExactMatrix& dm = cx.diffs.at(p);
    ExactMatrix out(to.size(), from.size());
    for (std::size_t i = 0; i < to.size(); ++i)
        for (std::size_t j = 0; j < from.size(); ++j)
            out(i, j) = dm(to.offset + i, from.offset + j);
    return out;
}

// ---------------------------------------------------------------------------
// Splitting of sym^2 S

ExactMatrix sym2_action(const ExactMatrix& t)
{
    const std::size_t n = t.rows();
    IndexTable pairs = tensor_index_maps(n, TensorKind::Sym2);
    ExactMatrix out(pairs.size(), pairs.size());
    auto pidx = [&](std::size_t a, std::size_t b) { return *pairs.find({std::min(a, b), std::max(a, b)}); };
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        std::size_t i = pairs.tuples[c][0], j = pairs.tuples[c][1];
        for (std::size_t k = 0; k < n; ++k) {
            if (sgn(t(k, i)) != 0)
                out(pidx(k, j), c) += t(k, i);
            if (sgn(t(k, j)) != 0)
                out(pidx(i, k), c) += t(k, j);
        }
    }
    return out;
}

ExactMatrix kappa_matrix(const DiracCurrent& kappa)
{
    auto pairs = increasing_tuples(kappa.dim_s, 2, false);
    std::vector<Vec> cols;
    for (const auto& p : pairs)
        cols.push_back(kappa(unit_vec(kappa.dim_s, p[0]), unit_vec(kappa.dim_s, p[1])));
    return ExactMatrix::from_cols(cols, kappa.dim_v);
}

ExactMatrix kernel_projector(const FlatModel& m, const SpinorSquareSplitting& split)
{
    ExactMatrix k = kappa_matrix(m.kappa);
    return ExactMatrix::identity(k.cols()) - split.sigma * k;
}

SpinorSquareSplitting compute_splitting(const FlatModel& m)
{
    if (m.kappa.degenerate)
        throw KappaZero("kappa vanishes identically");
    const std::size_t dv = m.dim_v();
    ExactMatrix k = kappa_matrix(m.kappa);
    const std::size_t np = k.cols();
    auto var = [&](std::size_t q, std::size_t v) { return q * dv + v; };

    ExactMatrix base(0, np * dv);
    Vec rhs;
    for (std::size_t a = 0; a < dv; ++a)
        for (std::size_t v = 0; v < dv; ++v) {
            Vec row(np * dv);
            for (std::size_t q = 0; q < np; ++q)
                row[var(q, v)] = k(a, q);
            base.append_row(row);
            rhs.push_back(a == v ? 1 : 0);
        }
    auto intertwining = [&](const ExactMatrix& on_v, const ExactMatrix& on_sym, ExactMatrix& eqs, Vec& b) {
        // Sigma on_v - on_sym Sigma = 0
        for (std::size_t q = 0; q < np; ++q)
            for (std::size_t v = 0; v < dv; ++v) {
                Vec row(np * dv);
                for (std::size_t w = 0; w < dv; ++w)
                    if (sgn(on_v(w, v)) != 0)
                        row[var(q, w)] += on_v(w, v);
                for (std::size_t q2 = 0; q2 < np; ++q2)
                    if (sgn(on_sym(q, q2)) != 0)
                        row[var(q2, v)] -= on_sym(q, q2);
                if (!is_zero(row)) {
                    eqs.append_row(row);
                    b.push_back(0);
                }
            }
    };
    ExactMatrix so_eqs = base;
    Vec so_rhs = rhs;
    for (std::size_t g = 0; g < m.so.size(); ++g)
        intertwining(m.so[g], sym2_action(m.spin[g]), so_eqs, so_rhs);
    ExactMatrix all_eqs = so_eqs;
    Vec all_rhs = so_rhs;
    for (const auto& a : m.r.basis)
        intertwining(ExactMatrix(dv, dv), sym2_action(a), all_eqs, all_rhs);

    SpinorSquareSplitting out;
    std::optional<Vec> sol = solve(all_eqs, all_rhs);
    if (sol) {
        out.so_equivariant = out.r_equivariant = true;
    } else if ((sol = solve(so_eqs, so_rhs))) {
        out.so_equivariant = true;
    } else {
        sol = solve(base, rhs);
    }
    if (!sol)
        throw std::logic_error("kappa is not surjective onto V");
    out.sigma = ExactMatrix(np, dv);
    for (std::size_t q = 0; q < np; ++q)
        for (std::size_t v = 0; v < dv; ++v)
            out.sigma(q, v) = (*sol)[var(q, v)];
    return out;
}

// ---------------------------------------------------------------------------
// Normalised cocycles

FlatComponents flat_components(const CochainSpace& c22)
{
    return {c22.component(2, FlatModel::V), c22.component(1, FlatModel::S), c22.component(0, FlatModel::A),
            c22.component(0, FlatModel::R)};
}

namespace {

// Rows c -> rho(Sigma(v))_c for every v and R-index c, as functionals on C^{2,2}.
ExactMatrix rho_sigma_rows(const SpencerComplex& flat, const SpinorSquareSplitting& split)
{
    const CochainSpace& c22 = flat.spaces[2];
    const GradedAlgebra& g = flat.ctx.target;
    const std::size_t dv = g.block_dim(FlatModel::V), ds = g.block_dim(FlatModel::S), dr = g.block_dim(FlatModel::R);
    auto pairs = increasing_tuples(ds, 2, false);
    ExactMatrix rows(0, c22.dim);
    for (std::size_t v = 0; v < dv; ++v)
        for (std::size_t c = 0; c < dr; ++c) {
            Vec row(c22.dim);
            for (std::size_t q = 0; q < pairs.size(); ++q) {
                if (sgn(split.sigma(q, v)) == 0)
                    continue;
                auto loc = c22.locate({dv + pairs[q][0], dv + pairs[q][1]}, g.offset(FlatModel::R) + c);
                row[loc->index] += split.sigma(q, v) * loc->sign;
            }
            rows.append_row(row);
        }
    return rows;
}

}  // namespace

NormalisedSpace normalised_space(const SpencerComplex& flat, const SpinorSquareSplitting& split)
{
    const CochainSpace& c22 = flat.spaces[2];
    ExactMatrix eqs = flat.diffs.at(2);
    auto fc = flat_components(c22);
    if (fc.alpha)
        for (std::size_t k = 0; k < fc.alpha->size(); ++k)
            eqs.append_row(unit_vec(c22.dim, fc.alpha->offset + k));
    eqs.append_rows(rho_sigma_rows(flat, split));
    return {Subspace::kernel_of(eqs), split};
}

Normalisation normalise_cocycle(const SpencerComplex& flat, const SpinorSquareSplitting& split, const Vec& z)
{
    const CochainSpace& c21 = flat.spaces[1];
    const CochainSpace& c22 = flat.spaces[2];
    if (z.size() != c22.dim)
        throw DimensionMismatch("cocycle length");
    if (!is_zero(flat.diffs.at(2).apply(z)))
        throw NotACocycle("input is not a (2,2) cocycle");
    auto fc = flat_components(c22);
    const GradedAlgebra& g = flat.ctx.target;
    const std::size_t dv = g.block_dim(FlatModel::V);
    Vec lambda(c21.dim);

    const auto* l1 = c21.component(1, FlatModel::A);
    if (l1 && fc.alpha) {
        ExactMatrix blk = differential_block(flat, 1, *l1, *fc.alpha);
        Vec alpha(z.begin() + static_cast<std::ptrdiff_t>(fc.alpha->offset),
                  z.begin() + static_cast<std::ptrdiff_t>(fc.alpha->offset + fc.alpha->size()));
        auto sol = solve(blk, alpha);
        if (!sol)
            throw std::logic_error("alpha component is not a coboundary");
        for (std::size_t k = 0; k < l1->size(); ++k)
            lambda[l1->offset + k] = (*sol)[k];
    }
    const auto* l2 = c21.component(1, FlatModel::R);
    if (l2) {
        ExactMatrix rs = rho_sigma_rows(flat, split);
        const std::size_t dr = g.block_dim(FlatModel::R);
        for (std::size_t v = 0; v < dv; ++v)
            for (std::size_t c = 0; c < dr; ++c) {
                auto loc = c21.locate({v}, g.offset(FlatModel::R) + c);
                lambda[loc->index] = -dot(rs.row(v * dr + c), z) * loc->sign;
            }
    }
    Normalisation out;
    out.lambda = lambda;
    out.hat = sub(z, flat.diffs.at(1).apply(lambda));
    if (fc.alpha)
        for (std::size_t k = 0; k < fc.alpha->size(); ++k)
            if (sgn(out.hat[fc.alpha->offset + k]) != 0)
                throw std::logic_error("normalisation left an alpha component");
    if (!is_zero(rho_sigma_rows(flat, split).apply(out.hat)))
        throw std::logic_error("normalisation left a rho_V component");
    return out;
}

std::vector<Vec> degree_zero_basis(const GradedSubalgebra& a)
{
    std::vector<Vec> out;
    for (std::size_t i = 0; i < a.alg.dim(); ++i)
        if (a.alg.degree(i) == 0)
            out.push_back(a.inclusion.col(i));
    return out;
}

Subspace invariant_normalised_cocycles(const SpencerComplex& flat, const Subspace& space,
                                       const std::vector<Vec>& degree_zero)
{
    if (degree_zero.empty() || space.dim() == 0)
        return space;
    const CochainSpace& c22 = flat.spaces[2];
    auto fc = flat_components(c22);
    std::vector<ExactMatrix> acts;
    for (const auto& x : degree_zero)
        acts.push_back(cochain_action(flat.ctx, c22, x));
    ExactMatrix eqs(0, space.dim());
    for (const auto& act : acts) {
        std::vector<Vec> images;
        for (std::size_t k = 0; k < space.dim(); ++k)
            images.push_back(act.apply(space.vector(k)));
        for (const auto* comp : {fc.beta, fc.rho}) {
            if (!comp)
                continue;
            for (std::size_t c = comp->offset; c < comp->offset + comp->size(); ++c) {
                Vec row(space.dim());
                for (std::size_t k = 0; k < space.dim(); ++k)
                    row[k] = images[k][c];
                if (!is_zero(row))
                    eqs.append_row(row);
            }
        }
    }
    std::vector<Vec> gens;
    if (eqs.rows() == 0) {
        return space;
    }
    ExactMatrix ker = kernel(eqs);
    for (std::size_t k = 0; k < ker.rows(); ++k)
        gens.push_back(space.combine(ker.row(k)));
    Subspace inv = Subspace::span(gens, c22.dim);
    for (std::size_t k = 0; k < inv.dim(); ++k)
        for (const auto& act : acts)
            if (!is_zero(act.apply(inv.vector(k))))
                throw OracleMismatch("beta and rho invariance did not imply invariance of the cocycle");
    return inv;
}

// ---------------------------------------------------------------------------
// Restriction and push-forward

ExactMatrix restriction_map(const SpencerComplex& flat, const SpencerComplex& mixed, const GradedSubalgebra& a,
                            std::size_t p)
{
    ExactMatrix legs(flat.ctx.n_legs(), mixed.ctx.n_legs());
    for (std::size_t u = 0; u < mixed.ctx.n_legs(); ++u) {
        Vec v = flat.ctx.to_legs(a.inclusion.col(mixed.ctx.legs[u]));
        for (std::size_t i = 0; i < v.size(); ++i)
            legs(i, u) = v[i];
    }
    return transfer(flat.spaces.at(p), mixed.spaces.at(p), legs, ExactMatrix::identity(flat.ctx.target.dim()));
}

ExactMatrix pushforward_map(const SpencerComplex& own, const SpencerComplex& mixed, const GradedSubalgebra& a,
                            std::size_t p)
{
    return transfer(own.spaces.at(p), mixed.spaces.at(p), ExactMatrix::identity(own.ctx.n_legs()), a.inclusion);
}

Subspace compute_K22(const SpencerComplex& flat, const SpencerComplex& mixed, const GradedSubalgebra& a,
                     const Subspace& space)
{
    if (!a.highly_susy)
        throw NotHighlySusy("K22 needs a highly supersymmetric subalgebra");
    if (space.dim() == 0)
        return space;
    ExactMatrix r = restriction_map(flat, mixed, a, 2);
    const CochainSpace& m22 = mixed.spaces[2];
    std::vector<Vec> images;
    for (std::size_t k = 0; k < space.dim(); ++k)
        images.push_back(r.apply(space.vector(k)));
    ExactMatrix eqs(0, space.dim());
    for (const auto* comp : {m22.component(1, FlatModel::S), m22.component(0, FlatModel::R)}) {
        if (!comp)
            continue;
        for (std::size_t c = comp->offset; c < comp->offset + comp->size(); ++c) {
            Vec row(space.dim());
            for (std::size_t k = 0; k < space.dim(); ++k)
                row[k] = images[k][c];
            if (!is_zero(row))
                eqs.append_row(row);
        }
    }
    if (eqs.rows() == 0)
        return space;
    ExactMatrix ker = kernel(eqs);
    std::vector<Vec> gens;
    for (std::size_t k = 0; k < ker.rows(); ++k)
        gens.push_back(space.combine(ker.row(k)));
    return Subspace::span(gens, space.ambient());
}

Subspace restriction_kernel_in_cohomology(const SpencerComplex& flat, const SpencerComplex& mixed,
                                          const GradedSubalgebra& a, const Subspace& space)
{
    if (space.dim() == 0)
        return space;
    ExactMatrix r = restriction_map(flat, mixed, a, 2);
    const ExactMatrix& d = mixed.diffs.at(1);
    const std::size_t k = space.dim();
    ExactMatrix m(d.rows(), k + d.cols());
    for (std::size_t j = 0; j < k; ++j) {
        Vec img = r.apply(space.vector(j));
        for (std::size_t i = 0; i < d.rows(); ++i)
            m(i, j) = img[i];
    }
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            m(i, k + j) = d(i, j);
    ExactMatrix ker = kernel(m);
    std::vector<Vec> gens;
    for (std::size_t t = 0; t < ker.rows(); ++t) {
        Vec row = ker.row(t);
        Vec c(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k));
        gens.push_back(space.combine(c));
    }
    return Subspace::span(gens, space.ambient());
}

}  // namespace spencerkit
