#include "spencerkit/cliffspin.hpp"

#include <random>
#include <string>

namespace spencerkit {

namespace {

struct Gen {
    ExactMatrix m;
    int sign;  // square is sign * 1
};

struct Module {
    std::size_t dim = 1;
    std::vector<Gen> gens;
};

const ExactMatrix kA{{1, 0}, {0, -1}};
const ExactMatrix kB{{0, 1}, {1, 0}};
const ExactMatrix kJ{{0, 1}, {-1, 0}};

// Product of four generators, used to trade four +1 squares for -1 squares.
ExactMatrix omega(const std::vector<Gen>& g, const std::vector<std::size_t>& idx)
{
    return g[idx[0]].m * g[idx[1]].m * g[idx[2]].m * g[idx[3]].m;
}

Module build(int p, int q)
{
    if (p >= 1 && q >= 1) {
        Module sub = build(p - 1, q - 1);
        Module out;
        out.dim = sub.dim * 2;
        ExactMatrix id = ExactMatrix::identity(sub.dim);
        for (const auto& g : sub.gens)
            out.gens.push_back({kron(g.m, kA), g.sign});
        out.gens.push_back({kron(id, kB), 1});
        out.gens.push_back({kron(id, kJ), -1});
        return out;
    }
    if (q == 0 && p <= 2) {
        Module out;
        if (p == 1)
            out.gens.push_back({ExactMatrix{{1}}, 1});
        if (p == 2) {
            out.dim = 2;
            out.gens.push_back({kB, 1});
            out.gens.push_back({kA, 1});
        }
        return out;
    }
    if (q == 0) {
        // Cl(p-4, 4) -> Cl(p, 0) via g -> g w for the four negative generators.
        Module sub = build(p - 4, 4);
        std::vector<std::size_t> neg;
        for (std::size_t k = 0; k < sub.gens.size(); ++k)
            if (sub.gens[k].sign < 0)
                neg.push_back(k);
        ExactMatrix w = omega(sub.gens, neg);
        Module out;
        out.dim = sub.dim;
        for (std::size_t k = 0; k < sub.gens.size(); ++k)
            out.gens.push_back(sub.gens[k].sign > 0 ? sub.gens[k] : Gen{sub.gens[k].m * w, 1});
        return out;
    }
    // p == 0: Cl(4, q-4) -> Cl(0, q) via f -> f w for the four positive generators.
    Module sub = build(4, q - 4);
    std::vector<std::size_t> pos;
    for (std::size_t k = 0; k < sub.gens.size() && pos.size() < 4; ++k)
        if (sub.gens[k].sign > 0)
            pos.push_back(k);
    ExactMatrix w = omega(sub.gens, pos);
    Module out;
    out.dim = sub.dim;
    for (std::size_t k = 0; k < sub.gens.size(); ++k)
        out.gens.push_back(sub.gens[k].sign < 0 ? sub.gens[k] : Gen{sub.gens[k].m * w, -1});
    return out;
}

int mod8(int x) { return ((x % 8) + 8) % 8; }

}  // namespace

ExactMatrix metric(const Signature& sig)
{
    ExactMatrix eta(sig.dim(), sig.dim());
    for (std::size_t i = 0; i < sig.dim(); ++i)
        eta(i, i) = static_cast<int>(i) < sig.t ? -1 : 1;
    return eta;
}

Rational eta_norm(const Signature& sig, const Vec& v)
{
    Rational n = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        n += (static_cast<int>(i) < sig.t ? -1 : 1) * v[i] * v[i];
    return n;
}

CliffordRep build_clifford_rep(const Signature& sig)
{
    if (sig.s < 0 || sig.t < 0 || sig.dim() == 0)
        throw NoRealForm("signature must have non-negative entries and positive dimension");
    int r = mod8(sig.s - sig.t);
    if (r > 2)
        throw NoRealForm("no real irreducible Clifford module of real type for signature (" +
                         std::to_string(sig.s) + "," + std::to_string(sig.t) + ")");
    Module m = build(sig.s, sig.t);
    CliffordRep rep;
    rep.sig = sig;
    rep.spinor_dim = m.dim;
    for (int want : {-1, 1})
        for (const auto& g : m.gens)
            if (g.sign == want)
                rep.gammas.push_back(g.m);
    return rep;
}

bool check_clifford_relation(const CliffordRep& rep)
{
    ExactMatrix eta = metric(rep.sig);
    if (rep.gammas.size() != rep.sig.dim())
        return false;
    ExactMatrix id = ExactMatrix::identity(rep.spinor_dim);
    for (std::size_t i = 0; i < rep.gammas.size(); ++i)
        for (std::size_t j = i; j < rep.gammas.size(); ++j) {
            ExactMatrix ac = rep.gammas[i] * rep.gammas[j] + rep.gammas[j] * rep.gammas[i];
            if (ac != id * (2 * eta(i, j)))
                return false;
        }
    return true;
}

CliffordRep extend(const CliffordRep& rep, std::size_t n)
{
    CliffordRep out = rep;
    out.spinor_dim = rep.spinor_dim * n;
    ExactMatrix id = ExactMatrix::identity(n);
    for (auto& g : out.gammas)
        g = kron(id, g);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> so_index_pairs(std::size_t d)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            out.emplace_back(i, j);
    return out;
}

std::vector<ExactMatrix> so_basis(const Signature& sig)
{
    ExactMatrix eta = metric(sig);
    std::vector<ExactMatrix> out;
    for (auto [i, j] : so_index_pairs(sig.dim())) {
        ExactMatrix e(sig.dim(), sig.dim());
        e(i, j) = eta(j, j);
        e(j, i) = -eta(i, i);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ExactMatrix> spin_generators(const CliffordRep& rep)
{
    std::vector<ExactMatrix> out;
    for (auto [i, j] : so_index_pairs(rep.sig.dim()))
        out.push_back(commutator(rep.gammas[i], rep.gammas[j]) * Rational(1, 4));
    return out;
}

Vec DiracCurrent::operator()(const Vec& x, const Vec& y) const
{
    if (x.size() != dim_s || y.size() != dim_s)
        throw DimensionMismatch("kappa arguments");
    Vec out(dim_v);
    for (std::size_t a = 0; a < dim_v; ++a)
        out[a] = dot(x, components[a].apply(y));
    return out;
}

ExactMatrix invariant_pairings(const CliffordRep& rep)
{
    const std::size_t n = rep.spinor_dim;
    auto spin = spin_generators(rep);
    // Unknown C flattened row-major; every condition is linear in C.
    ExactMatrix eqs(0, n * n);
    auto add_condition = [&](auto&& entry) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Vec row(n * n);
                entry(i, j, row);
                if (!is_zero(row))
                    eqs.append_row(row);
            }
    };
    for (const auto& s : spin)
        add_condition([&](std::size_t i, std::size_t j, Vec& row) {
            // (s^T C + C s)_{ij} = sum_k s_ki C_kj + C_ik s_kj
            for (std::size_t k = 0; k < n; ++k) {
                row[k * n + j] += s(k, i);
                row[i * n + k] += s(k, j);
            }
        });
    for (const auto& g : rep.gammas)
        add_condition([&](std::size_t i, std::size_t j, Vec& row) {
            // (C g)_{ij} - (C g)_{ji}
            for (std::size_t k = 0; k < n; ++k) {
                row[i * n + k] += g(k, j);
                row[j * n + k] -= g(k, i);
            }
        });
    if (eqs.rows() == 0)
        return ExactMatrix::identity(n * n);
    return kernel(eqs);
}

DiracCurrent build_dirac_current(const CliffordRep& rep, std::size_t copies, const PairingChoice& choice)
{
    const std::size_t n0 = rep.spinor_dim;
    ExactMatrix c0;
    if (choice.kind == PairingChoice::Kind::Solve) {
        ExactMatrix sols = invariant_pairings(rep);
        if (sols.rows() == 0)
            throw NoInvariantPairing("no invariant bilinear with symmetric gamma contraction");
        c0 = unflatten(sols.row(0), n0, n0);
    } else {
        if (choice.bilinear.rows() != n0 || choice.bilinear.cols() != n0)
            throw DimensionMismatch("pairing must act on one copy of the spinor module");
        c0 = choice.bilinear;
    }
    ExactMatrix eta = metric(rep.sig);
    ExactMatrix c = kron(ExactMatrix::identity(copies), c0);
    std::vector<ExactMatrix> comps;
    for (std::size_t a = 0; a < rep.gammas.size(); ++a)
        comps.push_back(c * kron(ExactMatrix::identity(copies), rep.gammas[a]) * eta(a, a));
    DiracCurrent k = dirac_current_from_tensor(std::move(comps));
    k.pairing = c;
    return k;
}

DiracCurrent dirac_current_from_tensor(std::vector<ExactMatrix> components)
{
    DiracCurrent k;
    k.dim_v = components.size();
    k.dim_s = components.empty() ? 0 : components.front().rows();
    bool zero = true;
    for (const auto& m : components) {
        if (m.rows() != k.dim_s || m.cols() != k.dim_s)
            throw DimensionMismatch("kappa component shape");
        if (m != m.transpose())
            k.symmetric = false;
        if (!m.is_zero())
            zero = false;
    }
    k.degenerate = zero;
    k.components = std::move(components);
    return k;
}

EquivarianceCertificate check_equivariance(const DiracCurrent& kappa, const std::vector<ExactMatrix>& so_gens,
                                           const std::vector<ExactMatrix>& spin_gens)
{
    EquivarianceCertificate cert;
    for (std::size_t g = 0; g < spin_gens.size(); ++g) {
        const ExactMatrix& s = spin_gens[g];
        const ExactMatrix& e = so_gens[g];
        ExactMatrix st = s.transpose();
        for (std::size_t a = 0; a < kappa.dim_v; ++a) {
            ExactMatrix lhs = st * kappa.components[a] + kappa.components[a] * s;
            ExactMatrix rhs(kappa.dim_s, kappa.dim_s);
            for (std::size_t b = 0; b < kappa.dim_v; ++b)
                if (sgn(e(a, b)) != 0)
                    rhs = rhs + kappa.components[b] * e(a, b);
            for (std::size_t i = 0; i < kappa.dim_s; ++i)
                for (std::size_t j = 0; j < kappa.dim_s; ++j)
                    if (lhs(i, j) != rhs(i, j)) {
                        cert.pass = false;
                        cert.generator = g;
                        cert.i = i;
                        cert.j = j;
                        return cert;
                    }
        }
    }
    return cert;
}

CausalityResult causality_probe(const DiracCurrent& kappa, const Signature& sig, std::uint64_t seed,
                                std::size_t samples)
{
    CausalityResult res;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < samples; ++k) {
        Vec s(kappa.dim_s);
        for (auto& x : s)
            x = static_cast<long>(rng() % 19) - 9;
        ++res.samples;
        if (eta_norm(sig, kappa.square(s)) > 0) {
            res.causal = false;
            res.counterexample = s;
            return res;
        }
    }
    return res;
}

}  // namespace spencerkit
