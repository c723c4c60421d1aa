#include "spencerkit/flatmodel.hpp"

#include <random>

namespace spencerkit {

std::optional<Vec> EndoSubalgebra::coordinates(const ExactMatrix& m) const { return span.coordinates(flatten(m)); }

ExactMatrix EndoSubalgebra::element(const Vec& coeffs) const
{
    if (coeffs.size() != dim())
        throw DimensionMismatch("EndoSubalgebra::element");
    ExactMatrix m(n, n);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        if (sgn(coeffs[k]) != 0)
            m = m + basis[k] * coeffs[k];
    return m;
}

EndoSubalgebra endo_subalgebra_from(const std::vector<ExactMatrix>& gens, std::size_t n)
{
    std::vector<Vec> flat;
    for (const auto& g : gens)
        flat.push_back(flatten(g));
    EndoSubalgebra a;
    a.n = n;
    a.span = Subspace::span(flat, n * n);
    for (std::size_t k = 0; k < a.span.dim(); ++k)
        a.basis.push_back(unflatten(a.span.vector(k), n, n));
    return a;
}

EndoSubalgebra compute_schur_algebra(const std::vector<ExactMatrix>& spin_gens, std::size_t n)
{
    ExactMatrix eqs(0, n * n);
    for (const auto& s : spin_gens)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                // (a s - s a)_{ij}
                Vec row(n * n);
                for (std::size_t k = 0; k < n; ++k) {
                    row[i * n + k] += s(k, j);
                    row[k * n + j] -= s(i, k);
                }
                if (!is_zero(row))
                    eqs.append_row(row);
            }
    ExactMatrix sol = eqs.rows() ? kernel(eqs) : ExactMatrix::identity(n * n);
    std::vector<ExactMatrix> gens;
    for (std::size_t k = 0; k < sol.rows(); ++k)
        gens.push_back(unflatten(sol.row(k), n, n));
    return endo_subalgebra_from(gens, n);
}

EndoSubalgebra compute_r_symmetry_algebra(const EndoSubalgebra& schur, const DiracCurrent& kappa)
{
    const std::size_t n = schur.n;
    const std::size_t m = schur.dim();
    ExactMatrix eqs(0, m);
    for (const auto& k : kappa.components) {
        std::vector<ExactMatrix> terms;
        for (const auto& b : schur.basis)
            terms.push_back(b.transpose() * k + k * b);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Vec row(m);
                for (std::size_t c = 0; c < m; ++c)
                    row[c] = terms[c](i, j);
                if (!is_zero(row))
                    eqs.append_row(row);
            }
    }
    ExactMatrix sol = eqs.rows() ? kernel(eqs) : ExactMatrix::identity(m);
    std::vector<ExactMatrix> gens;
    for (std::size_t k = 0; k < sol.rows(); ++k)
        gens.push_back(schur.element(sol.row(k)));
    return endo_subalgebra_from(gens, n);
}

ExactMatrix FlatModel::so_on_v(const Vec& c) const
{
    ExactMatrix m(dim_v(), dim_v());
    for (std::size_t k = 0; k < c.size(); ++k)
        if (sgn(c[k]) != 0)
            m = m + so[k] * c[k];
    return m;
}

ExactMatrix FlatModel::so_on_s(const Vec& c) const
{
    ExactMatrix m(dim_s(), dim_s());
    for (std::size_t k = 0; k < c.size(); ++k)
        if (sgn(c[k]) != 0)
            m = m + spin[k] * c[k];
    return m;
}

ExactMatrix FlatModel::r_on_s(const Vec& c) const { return r.element(c); }

Vec FlatModel::so_coords(const ExactMatrix& e) const
{
    // E_ij has entry eta_jj at (i, j), so the coefficient is read off there.
    Vec c(so.size());
    auto pairs = so_index_pairs(dim_v());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        c[k] = e(pairs[k].first, pairs[k].second) / so[k](pairs[k].first, pairs[k].second);
    if (so_on_v(c) != e)
        throw std::domain_error("endomorphism is not in so(V)");
    return c;
}

Vec FlatModel::r_coords(const ExactMatrix& a) const
{
    auto c = r.coordinates(a);
    if (!c)
        throw std::domain_error("endomorphism is not in the R-symmetry algebra");
    return *c;
}

FlatModel build_flat_model(const Signature& sig, std::size_t copies, const FlatModelOptions& opts)
{
    if (copies == 0)
        throw std::invalid_argument("number of spinor copies must be positive");
    FlatModel fm;
    fm.sig = sig;
    fm.copies = copies;
    CliffordRep rep0 = build_clifford_rep(sig);
    fm.rep = extend(rep0, copies);
    fm.so = so_basis(sig);
    fm.spin = spin_generators(fm.rep);
    if (opts.explicit_kappa)
        fm.kappa = dirac_current_from_tensor(*opts.explicit_kappa);
    else
        fm.kappa = build_dirac_current(rep0, copies, opts.pairing);
    if (fm.kappa.dim_v != sig.dim() || fm.kappa.dim_s != fm.rep.spinor_dim)
        throw DimensionMismatch("kappa does not match V and S");
    if (!fm.kappa.symmetric)
        throw std::invalid_argument("the flat model needs a symmetric kappa");
    auto eq = check_equivariance(fm.kappa, fm.so, fm.spin);
    if (!eq.pass)
        throw NotEquivariant("kappa fails equivariance at generator " + std::to_string(eq.generator));

    fm.schur = compute_schur_algebra(fm.spin, fm.rep.spinor_dim);
    fm.r = compute_r_symmetry_algebra(fm.schur, fm.kappa);

    const std::size_t dv = sig.dim(), ds = fm.rep.spinor_dim, da = fm.so.size(), dr = fm.r.dim();
    fm.alg = GradedAlgebra({{"V", -2, dv}, {"S", -1, ds}, {"A", 0, da}, {"R", 0, dr}});
    GradedAlgebra& g = fm.alg;
    const std::size_t ov = g.offset(FlatModel::V), os = g.offset(FlatModel::S), oa = g.offset(FlatModel::A),
                      orr = g.offset(FlatModel::R);
    for (std::size_t a = 0; a < da; ++a) {
        for (std::size_t b = a + 1; b < da; ++b)
            g.set_bracket(oa + a, oa + b, g.embed(FlatModel::A, fm.so_coords(commutator(fm.so[a], fm.so[b]))));
        for (std::size_t k = 0; k < dv; ++k)
            g.set_bracket(oa + a, ov + k, g.embed(FlatModel::V, fm.so[a].col(k)));
        for (std::size_t k = 0; k < ds; ++k)
            g.set_bracket(oa + a, os + k, g.embed(FlatModel::S, fm.spin[a].col(k)));
    }
    for (std::size_t i = 0; i < ds; ++i)
        for (std::size_t j = i; j < ds; ++j)
            g.set_bracket(os + i, os + j, g.embed(FlatModel::V, fm.kappa(unit_vec(ds, i), unit_vec(ds, j))));
    for (std::size_t a = 0; a < dr; ++a) {
        for (std::size_t b = a + 1; b < dr; ++b)
            g.set_bracket(orr + a, orr + b, g.embed(FlatModel::R, fm.r_coords(commutator(fm.r.basis[a], fm.r.basis[b]))));
        for (std::size_t k = 0; k < ds; ++k)
            g.set_bracket(orr + a, os + k, g.embed(FlatModel::S, fm.r.basis[a].col(k)));
    }
    return fm;
}

namespace {

Vec bracket_left(const GradedAlgebra& g, std::size_t i, const Vec& y)
{
    Vec out(g.dim());
    for (std::size_t l = 0; l < g.dim(); ++l)
        if (sgn(y[l]) != 0)
            axpy(out, y[l], g.bracket(i, l));
    return out;
}

Vec bracket_right(const GradedAlgebra& g, const Vec& x, std::size_t k)
{
    Vec out(g.dim());
    for (std::size_t l = 0; l < g.dim(); ++l)
        if (sgn(x[l]) != 0)
            axpy(out, x[l], g.bracket(l, k));
    return out;
}

}  // namespace

JacobiCertificate graded_jacobi_check(const GradedAlgebra& g, const JacobiOptions& opts)
{
    JacobiCertificate cert;
    const std::size_t n = g.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Vec& b = g.bracket(i, j);
            Vec expect = scale(Rational(-koszul(g.parity(i), g.parity(j))), g.bracket(j, i));
            if (b != expect) {
                cert = {false, "antisymmetry", i, j, 0, sub(b, expect), 0};
                return cert;
            }
            for (std::size_t k = 0; k < n; ++k) {
                if (sgn(b[k]) == 0)
                    continue;
                int want = g.degree(i) + g.degree(j);
                bool ok = opts.filtered ? g.degree(k) >= want : g.degree(k) == want;
                if (!ok) {
                    cert = {false, opts.filtered ? "filtration" : "degree", i, j, k, b, 0};
                    return cert;
                }
            }
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            for (std::size_t k = j; k < n; ++k) {
                ++cert.triples_checked;
                Vec lhs = bracket_left(g, i, g.bracket(j, k));
                Vec r1 = bracket_right(g, g.bracket(i, j), k);
                Vec r2 = bracket_left(g, j, g.bracket(i, k));
                Vec jac = sub(sub(lhs, r1), scale(Rational(koszul(g.parity(i), g.parity(j))), r2));
                if (!is_zero(jac)) {
                    cert.pass = false;
                    cert.failure = "jacobi";
                    cert.i = i;
                    cert.j = j;
                    cert.k = k;
                    cert.witness = jac;
                    return cert;
                }
            }
    return cert;
}

// ---------------------------------------------------------------------------
// Subalgebras

namespace {

Vec embed_block(const GradedAlgebra& g, std::size_t b, const Subspace& sub, std::size_t k)
{
    return g.embed(b, sub.vector(k));
}

}  // namespace

GradedSubalgebra make_graded_subalgebra(std::shared_ptr<const FlatModel> model, const Subspace& vp,
                                        const Subspace& sp, const Subspace& h, const Subspace& rp)
{
    const FlatModel& m = *model;
    if (vp.ambient() != m.dim_v() || sp.ambient() != m.dim_s() || h.ambient() != m.dim_so() ||
        rp.ambient() != m.dim_r())
        throw DimensionMismatch("subalgebra data has the wrong ambient dimensions");
    GradedSubalgebra a;
    a.model = model;
    a.vp = vp;
    a.sp = sp;
    a.h = h;
    a.rp = rp;
    const Subspace* parts[4] = {&a.vp, &a.sp, &a.h, &a.rp};
    a.alg = GradedAlgebra({{"V", -2, vp.dim()}, {"S", -1, sp.dim()}, {"A", 0, h.dim()}, {"R", 0, rp.dim()}});
    const std::size_t n = a.alg.dim();
    std::vector<Vec> cols;
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t k = 0; k < parts[b]->dim(); ++k)
            cols.push_back(embed_block(m.alg, b, *parts[b], k));
    a.inclusion = ExactMatrix::from_cols(cols, m.alg.dim());
    static const char* names[4] = {"V'", "S'", "h", "r'"};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Vec br = m.alg.bracket(cols[i], cols[j]);
            Vec coords;
            for (std::size_t b = 0; b < 4; ++b) {
                auto c = parts[b]->coordinates(m.alg.block_part(br, b));
                if (!c)
                    throw NotClosed(std::string("bracket of basis elements ") + std::to_string(i) + ", " +
                                    std::to_string(j) + " leaves " + names[b]);
                coords.insert(coords.end(), c->begin(), c->end());
            }
            a.alg.set_bracket(i, j, coords);
        }
    a.so_annihilator_dim = so_annihilator(m, sp).dim();
    a.kappa_rank = kappa_rank_on(m.kappa, sp);
    a.highly_susy = vp.dim() == m.dim_v() && 2 * sp.dim() > m.dim_s();
    bool faithful = true;
    if (rp.dim() > 0) {
        // r' acts faithfully on S' when no nonzero combination kills S'.
        ExactMatrix eqs(0, rp.dim());
        for (std::size_t u = 0; u < sp.dim(); ++u)
            for (std::size_t i = 0; i < m.dim_s(); ++i) {
                Vec row(rp.dim());
                for (std::size_t k = 0; k < rp.dim(); ++k)
                    row[k] = m.r_on_s(rp.vector(k)).apply(sp.vector(u))[i];
                eqs.append_row(row);
            }
        faithful = eqs.rows() > 0 && kernel(eqs).rows() == 0;
    }
    a.transitive = a.highly_susy && faithful;
    return a;
}

GradedSubalgebra maximal_subalgebra(std::shared_ptr<const FlatModel> model)
{
    const FlatModel& m = *model;
    return make_graded_subalgebra(model, Subspace::full(m.dim_v()), Subspace::full(m.dim_s()),
                                  Subspace::full(m.dim_so()), Subspace::full(m.dim_r()));
}

namespace {

// Coefficient vectors c with sum_k c_k act[k] u in target for all u in sp.
Subspace stabiliser_of(const std::vector<ExactMatrix>& acts, const Subspace& sp, const ExactMatrix& ann)
{
    ExactMatrix eqs(0, acts.size());
    for (std::size_t u = 0; u < sp.dim(); ++u) {
        std::vector<Vec> images;
        for (const auto& a : acts)
            images.push_back(a.apply(sp.vector(u)));
        for (std::size_t w = 0; w < ann.rows(); ++w) {
            Vec row(acts.size());
            Vec wv = ann.row(w);
            for (std::size_t k = 0; k < acts.size(); ++k)
                row[k] = dot(wv, images[k]);
            if (!is_zero(row))
                eqs.append_row(row);
        }
    }
    if (eqs.rows() == 0)
        return Subspace::full(acts.size());
    return Subspace::kernel_of(eqs);
}

}  // namespace

Subspace so_stabiliser(const FlatModel& m, const Subspace& vp, const Subspace& sp)
{
    Subspace onS = stabiliser_of(m.spin, sp, sp.annihilator());
    Subspace onV = stabiliser_of(m.so, vp, vp.annihilator());
    return onS.intersect(onV);
}

Subspace r_stabiliser(const FlatModel& m, const Subspace& sp)
{
    return stabiliser_of(m.r.basis, sp, sp.annihilator());
}

Subspace so_annihilator(const FlatModel& m, const Subspace& sp)
{
    return stabiliser_of(m.spin, sp, ExactMatrix::identity(m.dim_s()));
}

namespace {

ExactMatrix kappa_on_pairs(const DiracCurrent& kappa, const Subspace& sp)
{
    auto pairs = increasing_tuples(sp.dim(), 2, false);
    std::vector<Vec> cols;
    for (const auto& p : pairs)
        cols.push_back(kappa(sp.vector(p[0]), sp.vector(p[1])));
    return ExactMatrix::from_cols(cols, kappa.dim_v);
}

}  // namespace

std::size_t kappa_rank_on(const DiracCurrent& kappa, const Subspace& sp)
{
    if (sp.dim() == 0)
        return 0;
    return rank(kappa_on_pairs(kappa, sp));
}

ExactMatrix dirac_kernel(const DiracCurrent& kappa, const Subspace& sp)
{
    if (sp.dim() == 0)
        return ExactMatrix(0, 0);
    return kernel(kappa_on_pairs(kappa, sp));
}

bool positive_definite(const ExactMatrix& gram)
{
    ExactMatrix a = gram;
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(a(k, k)) <= 0)
            return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(a(i, k)) == 0)
                continue;
            Rational l = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j)
                a(i, j) -= l * a(k, j);
        }
    }
    return true;
}

FaithfulSplit faithful_split(const FlatModel& m, const Subspace& sp, const Subspace& rp)
{
    const std::size_t k = rp.dim();
    std::vector<ExactMatrix> mats;
    for (std::size_t i = 0; i < k; ++i)
        mats.push_back(m.r_on_s(rp.vector(i)));
    ExactMatrix gram(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            gram(i, j) = -trace(mats[i] * mats[j]);
    if (!positive_definite(gram))
        throw NotCompactForm("trace form on r' is not positive-definite");
    if (stabiliser_of(mats, sp, sp.annihilator()).dim() != k)
        throw NotClosed("r' does not preserve S'");

    Subspace ann_c = stabiliser_of(mats, sp, ExactMatrix::identity(m.dim_s()));
    ExactMatrix orth(0, k);
    for (std::size_t i = 0; i < ann_c.dim(); ++i)
        orth.append_row(gram.apply_transpose(ann_c.vector(i)));
    Subspace rpp_c = orth.rows() ? Subspace::kernel_of(orth) : Subspace::full(k);

    auto to_r = [&](const Subspace& c) {
        std::vector<Vec> v;
        for (std::size_t i = 0; i < c.dim(); ++i)
            v.push_back(rp.combine(c.vector(i)));
        return Subspace::span(v, m.dim_r());
    };
    FaithfulSplit out{to_r(ann_c), to_r(rpp_c)};
    for (std::size_t i = 0; i < out.ann.dim(); ++i)
        for (std::size_t j = 0; j < out.rpp.dim(); ++j)
            if (!commutator(m.r_on_s(out.ann.vector(i)), m.r_on_s(out.rpp.vector(j))).is_zero())
                throw NotClosed("annihilator and its complement do not commute");
    return out;
}

Subspace random_subspace(std::size_t ambient, std::size_t dim, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    for (;;) {
        ExactMatrix g(dim, ambient);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < ambient; ++j)
                g(i, j) = static_cast<long>(rng() % 7) - 3;
        Subspace s = Subspace::span(g);
        if (s.dim() == dim)
            return s;
    }
}


GradedSubalgebra stabiliser_subalgebra(std::shared_ptr<const FlatModel> model, const Subspace& sp)
{
    const FlatModel& m = *model;
    Subspace vp = Subspace::full(m.dim_v());
    Subspace h = so_stabiliser(m, vp, sp);
    Subspace rp = faithful_split(m, sp, r_stabiliser(m, sp)).rpp;
    return make_graded_subalgebra(std::move(model), vp, sp, h, rp);
}

}  // namespace spencerkit
