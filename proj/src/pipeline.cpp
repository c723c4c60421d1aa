#include "spencerkit/pipeline.hpp"

#include "spencerkit/reconstruct.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

namespace spencerkit {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            throw ConfigError("unknown key '" + k + "' in " + where);
}

const json& required(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key))
        throw ConfigError("missing key '" + key + "' in " + where);
    return j.at(key);
}

std::uint64_t as_uint(const json& j, const std::string& what)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ConfigError(what + " must be a non-negative integer");
    return j.get<std::uint64_t>();
}

Rational as_rational(const json& j, const std::string& what)
{
    if (j.is_number_integer())
        return Rational(j.get<long>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw ConfigError(what + " must be an integer or a \"p/q\" string");
}

Vec as_vec(const json& j, const std::string& what)
{
    if (!j.is_array())
        throw ConfigError(what + " must be an array");
    Vec v;
    for (const auto& x : j)
        v.push_back(as_rational(x, what));
    return v;
}

std::vector<Vec> as_rows(const json& j, const std::string& what)
{
    if (!j.is_array())
        throw ConfigError(what + " must be an array of vectors");
    std::vector<Vec> rows;
    for (const auto& r : j)
        rows.push_back(as_vec(r, what));
    return rows;
}

AlgebraChoice parse_algebra(const json& j, const std::string& what, bool allow_stabiliser, bool allow_zero)
{
    AlgebraChoice a;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "full")
            a.kind = AlgebraChoice::Kind::Full;
        else if (s == "stabiliser" && allow_stabiliser)
            a.kind = AlgebraChoice::Kind::Stabiliser;
        else if (s == "zero" && allow_zero)
            a.kind = AlgebraChoice::Kind::Zero;
        else
            throw ConfigError("invalid choice '" + s + "' for " + what);
        return a;
    }
    only_keys(j, {"basis"}, what);
    a.kind = AlgebraChoice::Kind::Basis;
    a.basis = as_rows(required(j, "basis", what), what + ".basis");
    return a;
}

json rows_json(const std::vector<Vec>& rows);

json algebra_json(const AlgebraChoice& a)
{
    switch (a.kind) {
    case AlgebraChoice::Kind::Full:
        return "full";
    case AlgebraChoice::Kind::Stabiliser:
        return "stabiliser";
    case AlgebraChoice::Kind::Zero:
        return "zero";
    case AlgebraChoice::Kind::Basis:
        break;
    }
    return json{{"basis", rows_json(a.basis)}};
}

// ---------------------------------------------------------------- serialisation

json rat(const Rational& q) { return to_string(q); }

json vec_json(const Vec& v)
{
    json a = json::array();
    for (const auto& x : v)
        a.push_back(rat(x));
    return a;
}

json rows_json(const std::vector<Vec>& rows)
{
    json a = json::array();
    for (const auto& r : rows)
        a.push_back(vec_json(r));
    return a;
}

json mat_json(const ExactMatrix& m) { return rows_json(m.row_vectors()); }

/// Nonzero entries of a two-index family of vectors as [i, j, k, value].
json sparse_pairs(const std::vector<std::vector<Vec>>& t)
{
    json a = json::array();
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t[i].size(); ++j)
            for (std::size_t k = 0; k < t[i][j].size(); ++k)
                if (sgn(t[i][j][k]) != 0)
                    a.push_back(json::array({i, j, k, rat(t[i][j][k])}));
    return a;
}

json sparse_vec(const Vec& v)
{
    json a = json::array();
    for (std::size_t k = 0; k < v.size(); ++k)
        if (sgn(v[k]) != 0)
            a.push_back(json::array({k, rat(v[k])}));
    return a;
}

/// Nonzero brackets grouped by block pair, as [i, j, k, value] with block-local indices.
/// Odd-odd pairs are further split by target block ("SS_V", "SS_A", "SS_R").
json bracket_components(const GradedAlgebra& g)
{
    json out = json::object();
    for (std::size_t i = 0; i < g.dim(); ++i)
        for (std::size_t j = 0; j < g.dim(); ++j) {
            const std::size_t bi = g.block_of(i), bj = g.block_of(j);
            if (bi < bj || (bi == bj && i > j))
                continue;
            const Vec& b = g.bracket(i, j);
            for (std::size_t k = 0; k < b.size(); ++k) {
                if (sgn(b[k]) == 0)
                    continue;
                const std::size_t bk = g.block_of(k);
                std::string key = g.blocks()[bi].name + g.blocks()[bj].name;
                if (g.parity(i) && g.parity(j))
                    key += "_" + g.blocks()[bk].name;
                out[key].push_back(json::array(
                    {i - g.offset(bi), j - g.offset(bj), k - g.offset(bk), rat(b[k])}));
            }
        }
    return out;
}

json banner()
{
    return json{
        {"signature", "eta = diag(-1 (t times), +1 (s times)), timelike directions first"},
        {"clifford", "gamma_i gamma_j + gamma_j gamma_i = 2 eta_ij"},
        {"so_basis", "E_ij v = eta(e_j, v) e_i - eta(e_i, v) e_j, i < j"},
        {"spin", "sigma_ij = [gamma_i, gamma_j] / 4"},
        {"dirac_current", "kappa(x, y)^a = x^T K[a] y"},
        {"cochains", "legs V then S; components by number of V legs descending, then target block V, S, so, r"},
        {"rationals", "canonical p/q strings"},
    };
}

// ---------------------------------------------------------------- stages

enum class Status { Pass, Negative };

struct StageAbort {
    int exit_code;
};

/// Mathematical negatives raised as exceptions by the modules.
bool is_negative(const std::exception& e)
{
    if (dynamic_cast<const DimensionMismatch*>(&e))
        return false;
    return dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const NoRealForm*>(&e) ||
           dynamic_cast<const NoInvariantPairing*>(&e) || dynamic_cast<const NotEquivariant*>(&e) ||
           dynamic_cast<const NotClosed*>(&e) || dynamic_cast<const NotCompactForm*>(&e) ||
           dynamic_cast<const NotACocycle*>(&e);
}

std::string error_type(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e))
        return "ConfigError";
    if (dynamic_cast<const NoRealForm*>(&e))
        return "NoRealForm";
    if (dynamic_cast<const NoInvariantPairing*>(&e))
        return "NoInvariantPairing";
    if (dynamic_cast<const NotEquivariant*>(&e))
        return "NotEquivariant";
    if (dynamic_cast<const NotClosed*>(&e))
        return "NotClosed";
    if (dynamic_cast<const NotCompactForm*>(&e))
        return "NotCompactForm";
    if (dynamic_cast<const KappaZero*>(&e))
        return "KappaZero";
    if (dynamic_cast<const NotHighlySusy*>(&e))
        return "NotHighlySusy";
    if (dynamic_cast<const NotTransitive*>(&e))
        return "NotTransitive";
    if (dynamic_cast<const NotACocycle*>(&e))
        return "NotACocycle";
    if (dynamic_cast<const OracleMismatch*>(&e))
        return "OracleMismatch";
    if (dynamic_cast<const JacobiViolation*>(&e))
        return "JacobiViolation";
    if (dynamic_cast<const FiltrationViolation*>(&e))
        return "FiltrationViolation";
    if (dynamic_cast<const EquivarianceViolation*>(&e))
        return "EquivarianceViolation";
    if (dynamic_cast<const TorsionViolation*>(&e))
        return "TorsionViolation";
    if (dynamic_cast<const CurvatureMismatch*>(&e))
        return "CurvatureMismatch";
    if (dynamic_cast<const std::invalid_argument*>(&e))
        return "InvalidArgument";
    return "InternalError";
}

struct State {
    const PipelineConfig& cfg;
    CliffordRep rep, ext;
    DiracCurrent kappa;
    std::shared_ptr<const FlatModel> model;
    std::shared_ptr<const FlatData> flat;
    GradedSubalgebra sub;
    std::unique_ptr<DeformContext> ctx;
    CohomologyResult h22;
    std::optional<AdmissibleDatum> datum;
    ThetaData theta;
    std::optional<FilteredDeformation> def;
};

Status stage_clifford(State& s, json& out)
{
    s.rep = build_clifford_rep(s.cfg.sig);
    s.ext = extend(s.rep, s.cfg.n);
    out["spinor_dim"] = s.rep.spinor_dim;
    out["extended_dim"] = s.ext.spinor_dim;
    out["clifford_relation"] = check_clifford_relation(s.rep);
    return Status::Pass;
}

Status stage_kappa(State& s, json& out)
{
    const std::size_t d = s.cfg.sig.dim();
    if (s.cfg.explicit_kappa) {
        if (s.cfg.tensor.size() != d)
            throw ConfigError("dirac_current.tensor needs one matrix per vector index");
        for (const auto& m : s.cfg.tensor)
            if (m.rows() != s.ext.spinor_dim || m.cols() != s.ext.spinor_dim)
                throw ConfigError("dirac_current.tensor matrices must be square of the spinor dimension");
        s.kappa = dirac_current_from_tensor(s.cfg.tensor);
    } else {
        s.kappa = build_dirac_current(s.rep, s.cfg.n);
    }
    auto eq = check_equivariance(s.kappa, so_basis(s.cfg.sig), spin_generators(s.ext));
    auto causal = causality_probe(s.kappa, s.cfg.sig, s.cfg.seed, 64);
    out["symmetric"] = s.kappa.symmetric;
    out["degenerate"] = s.kappa.degenerate;
    out["equivariant"] = eq.pass;
    if (!eq.pass)
        out["equivariance_witness"] = json::array({eq.generator, eq.i, eq.j});
    out["causal_samples"] = causal.samples;
    out["causal"] = causal.causal;
    if (causal.counterexample)
        out["causal_counterexample"] = vec_json(*causal.counterexample);
    if (s.kappa.degenerate)
        throw KappaZero("the Dirac current vanishes");
    if (!s.kappa.symmetric)
        throw std::invalid_argument("the Dirac current is not symmetric");
    return eq.pass ? Status::Pass : Status::Negative;
}

Status stage_r(State& s, json& out)
{
    FlatModelOptions opts;
    if (s.cfg.explicit_kappa)
        opts.explicit_kappa = s.cfg.tensor;
    s.model = std::make_shared<const FlatModel>(build_flat_model(s.cfg.sig, s.cfg.n, opts));
    out["schur_dim"] = s.model->schur.dim();
    out["r_dim"] = s.model->r.dim();
    return Status::Pass;
}

Status stage_flat_model(State& s, json& out)
{
    const auto& m = *s.model;
    out["dims"] = json{{"V", m.dim_v()}, {"S", m.dim_s()}, {"so", m.dim_so()}, {"r", m.dim_r()}};
    auto cert = graded_jacobi_check(m.alg);
    out["jacobi"] = cert.pass;
    out["triples_checked"] = cert.triples_checked;
    if (!cert.pass)
        throw JacobiViolation("flat model fails " + cert.failure);
    out["brackets"] = bracket_components(m.alg);
    return Status::Pass;
}

Subspace subspace_from(const std::vector<Vec>& rows, std::size_t ambient, const std::string& what)
{
    for (const auto& r : rows)
        if (r.size() != ambient)
            throw ConfigError(what + " vectors must have length " + std::to_string(ambient));
    return Subspace::span(rows, ambient);
}

Status stage_subalgebra(State& s, json& out)
{
    const auto& m = *s.model;
    Subspace sp;
    switch (s.cfg.sp.kind) {
    case SpinorChoice::Kind::Full:
        sp = Subspace::full(m.dim_s());
        break;
    case SpinorChoice::Kind::Basis:
        sp = subspace_from(s.cfg.sp.basis, m.dim_s(), "subalgebra.S_prime");
        break;
    case SpinorChoice::Kind::Random:
        if (s.cfg.sp.dim > m.dim_s())
            throw ConfigError("subalgebra.S_prime.random.dim exceeds the spinor dimension");
        sp = random_subspace(m.dim_s(), s.cfg.sp.dim, s.cfg.sp.seed);
        break;
    }
    Subspace v = Subspace::full(m.dim_v());
    Subspace h;
    switch (s.cfg.h.kind) {
    case AlgebraChoice::Kind::Stabiliser:
        h = so_stabiliser(m, v, sp);
        break;
    case AlgebraChoice::Kind::Full:
        h = Subspace::full(m.dim_so());
        break;
    default:
        h = subspace_from(s.cfg.h.basis, m.dim_so(), "subalgebra.h");
    }
    Subspace rp;
    switch (s.cfg.rp.kind) {
    case AlgebraChoice::Kind::Full:
        rp = r_stabiliser(m, sp);
        break;
    case AlgebraChoice::Kind::Zero:
        rp = Subspace(m.dim_r());
        break;
    default:
        rp = subspace_from(s.cfg.rp.basis, m.dim_r(), "subalgebra.r_prime");
    }
    auto routed = route_transitive(make_graded_subalgebra(s.model, v, sp, h, rp));
    s.sub = routed.sub;
    out["dims"] = json{{"V", s.sub.dim_v()}, {"S", s.sub.dim_s()}, {"h", s.sub.dim_h()}, {"r", s.sub.dim_rp()}};
    out["S_prime_basis"] = mat_json(s.sub.sp.basis());
    out["r_prime_replaced"] = routed.replaced;
    out["highly_supersymmetric"] = s.sub.highly_susy;
    out["transitive"] = s.sub.transitive;
    out["homogeneity_rank"] = s.sub.kappa_rank;
    out["homogeneous"] = s.sub.homogeneous();
    out["so_annihilator_dim"] = s.sub.so_annihilator_dim;
    auto cert = graded_jacobi_check(s.sub.alg);
    out["jacobi"] = cert.pass;
    if (!cert.pass)
        throw JacobiViolation("subalgebra fails " + cert.failure);
    return s.sub.highly_susy && s.sub.transitive ? Status::Pass : Status::Negative;
}

Status stage_cohomology(State& s, json& out)
{
    s.flat = make_flat_data(s.model);
    auto flat_h = compute_cohomology(s.flat->complex, 2);
    json f;
    f["C22_dim"] = s.flat->complex.spaces[2].dim;
    f["H22_dim"] = flat_h.dim_h;
    f["normalised_dim"] = s.flat->normalised.dim();
    f["splitting_so_equivariant"] = s.flat->splitting.so_equivariant;
    f["splitting_r_equivariant"] = s.flat->splitting.r_equivariant;
    out["flat"] = f;
    if (flat_h.dim_h != s.flat->normalised.dim())
        throw OracleMismatch("normalised cocycles do not match H^{2,2}");
    s.ctx = std::make_unique<DeformContext>(make_deform_context(s.flat, s.sub));
    auto h21 = compute_cohomology(s.ctx->own, 1);
    s.h22 = compute_cohomology(s.ctx->own, 2);
    json a;
    a["H21_dim"] = h21.dim_h;
    a["H22_dim"] = s.h22.dim_h;
    a["invariant_normalised_dim"] = s.ctx->invariant.dim();
    a["K22_dim"] = s.ctx->k22.dim();
    a["admissible_dim"] = admissible_hats(*s.ctx).dim();
    out["subalgebra"] = a;
    return Status::Pass;
}

Status stage_admissibility(State& s, json& out)
{
    const auto& reps = s.h22.representatives;
    Vec mu = zero_vec(s.ctx->own.spaces[2].dim);
    switch (s.cfg.cocycle.kind) {
    case CocycleChoice::Kind::Zero:
        break;
    case CocycleChoice::Kind::BasisElement:
        if (s.cfg.cocycle.index >= reps.rows())
            throw ConfigError("cocycle.basis_element is out of range; H^{2,2} has dimension " +
                              std::to_string(reps.rows()));
        mu = reps.row(s.cfg.cocycle.index);
        break;
    case CocycleChoice::Kind::Explicit:
        if (s.cfg.cocycle.coefficients.size() != reps.rows())
            throw ConfigError("cocycle.explicit needs " + std::to_string(reps.rows()) + " coefficients");
        for (std::size_t i = 0; i < reps.rows(); ++i)
            axpy(mu, s.cfg.cocycle.coefficients[i], reps.row(i));
        break;
    }
    auto r = check_admissibility(*s.ctx, mu);
    out["admissible"] = r.admissible;
    if (!r.admissible) {
        out["certificate"] = sparse_vec(r.certificate);
        return Status::Negative;
    }
    s.datum = r.datum;
    out["hat_coordinates"] = vec_json(r.datum->hat_coords);
    out["lambda"] = sparse_vec(r.datum->lambda);
    return Status::Pass;
}

Status stage_theta(State& s, json& out)
{
    auto delta = solve_delta(*s.ctx, *s.datum);
    out["delta"] = json{{"routes_agree", true}, {"r_to_h_vanishes", delta.delta3_zero}, {"cocycle", delta.cocycle}};
    if (!delta.delta3_zero || !delta.cocycle)
        throw OracleMismatch("delta fails its structural identities");
    s.theta = compute_theta(*s.ctx, *s.datum);
    out["dirac_kernel_annihilated"] = s.theta.annihilated;
    auto ir = check_integrability(*s.ctx, *s.datum, s.theta);
    json checks = json::array();
    for (const auto& c : ir.checks) {
        json e{{"name", c.name}, {"pass", c.pass}};
        if (!c.pass)
            e["witness"] = c.witness;
        checks.push_back(e);
    }
    out["checks"] = checks;
    out["integrable"] = ir.integrable;
    if (s.theta.annihilated) {
        out["alternating"] = s.theta.alternating;
        out["theta_tilde"] = sparse_pairs(s.theta.tilde);
    }
    return ir.integrable ? Status::Pass : Status::Negative;
}

Status stage_deformation(State& s, json& out)
{
    s.def = build_filtered_deformation(*s.ctx, *s.datum, s.theta);
    out["jacobi"] = s.def->jacobi.pass;
    out["triples_checked"] = s.def->jacobi.triples_checked;
    out["filtration"] = s.def->filtration;
    out["associated_graded"] = s.def->associated_graded;
    out["defining_sequence"] = s.def->defining_sequence;
    out["equals_graded"] = s.def->alg == s.sub.alg;
    out["brackets"] = bracket_components(s.def->alg);
    auto env = compute_envelope(*s.ctx, *s.datum);
    auto cand = [](const EnvelopeCandidate& c) {
        return json{{"dim", c.span.dim()},
                    {"subalgebra", c.subalgebra},
                    {"preserves_spinors", c.preserves_spinors},
                    {"preserves_hat", c.preserves_hat}};
    };
    out["envelope"] = json{{"joint", cand(env.joint)}, {"split", cand(env.split)}, {"splits", env.splits}};
    return Status::Pass;
}

Status stage_realisability(State& s, json& out)
{
    auto r = check_geometric_realisability(*s.ctx, *s.datum, s.theta);
    out["realisable"] = r.realisable;
    out["theta2_zero"] = r.theta2_zero;
    out["lambda2_removable"] = r.lambda2_removable;
    if (r.lambda2_removable) {
        out["hat_shift"] = vec_json(r.hat_shift);
        out["lambda_shift"] = sparse_vec(r.lambda_shift);
    } else {
        out["certificate"] = sparse_vec(r.certificate);
    }
    return r.realisable ? Status::Pass : Status::Negative;
}

Status stage_reconstruction(State& s, json& out)
{
    auto nm = build_nomizu_map(*s.ctx, *s.datum, *s.def);
    auto curv = curvature_at_origin(*s.ctx, *s.def, nm, s.theta);
    if (!curv.bianchi)
        throw CurvatureMismatch("curvature at the origin fails the Bianchi identity");
    if (!curv.flat_r)
        throw CurvatureMismatch("realisable datum with nonzero r-curvature");
    out["nomizu"] = mat_json(nm.phi);
    out["nomizu_domain"] = nm.domain;
    out["R0"] = sparse_pairs(curv.r0);
    out["F0"] = sparse_pairs(curv.f0);
    out["bianchi"] = curv.bianchi;
    out["torsion_free"] = true;
    out["equivariant"] = true;
    out["unchecked_hypotheses"] = nm.unchecked_hypotheses;
    out["conclusion"] = "embeds into the Killing superalgebra provided (D, rho) is an admissible pair";
    return Status::Pass;
}

using StageFn = Status (*)(State&, json&);

const std::vector<std::pair<std::string, StageFn>>& stage_table()
{
    static const std::vector<std::pair<std::string, StageFn>> t = {
        {"clifford", stage_clifford},
        {"kappa", stage_kappa},
        {"r_symmetry", stage_r},
        {"flat_model", stage_flat_model},
        {"subalgebra", stage_subalgebra},
        {"cohomology", stage_cohomology},
        {"admissibility", stage_admissibility},
        {"theta", stage_theta},
        {"deformation", stage_deformation},
        {"realisability", stage_realisability},
        {"reconstruction", stage_reconstruction},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& pipeline_stages()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : stage_table())
            n.push_back(name);
        return n;
    }();
    return names;
}

PipelineConfig parse_config(const json& j)
{
    only_keys(j, {"signature", "N", "dirac_current", "subalgebra", "cocycle", "checks", "output_path", "seed"},
              "config");
    PipelineConfig c;
    const json& sig = required(j, "signature", "config");
    only_keys(sig, {"s", "t"}, "signature");
    c.sig.s = static_cast<int>(as_uint(required(sig, "s", "signature"), "signature.s"));
    c.sig.t = static_cast<int>(as_uint(required(sig, "t", "signature"), "signature.t"));
    c.n = as_uint(required(j, "N", "config"), "N");
    if (c.n == 0)
        throw ConfigError("N must be positive");

    if (j.contains("dirac_current")) {
        const json& dc = j.at("dirac_current");
        only_keys(dc, {"kind", "tensor"}, "dirac_current");
        const json& kind = required(dc, "kind", "dirac_current");
        if (kind == "explicit") {
            c.explicit_kappa = true;
            const json& t = required(dc, "tensor", "dirac_current");
            if (!t.is_array())
                throw ConfigError("dirac_current.tensor must be an array of matrices");
            for (const auto& m : t) {
                auto rows = as_rows(m, "dirac_current.tensor");
                std::size_t cols = rows.empty() ? 0 : rows.front().size();
                for (const auto& r : rows)
                    if (r.size() != cols)
                        throw ConfigError("dirac_current.tensor rows must have equal length");
                c.tensor.push_back(ExactMatrix::from_rows(rows, cols));
            }
        } else if (kind == "standard") {
            if (dc.contains("tensor"))
                throw ConfigError("dirac_current.tensor is only allowed with kind 'explicit'");
        } else {
            throw ConfigError("dirac_current.kind must be 'standard' or 'explicit'");
        }
    }

    if (j.contains("subalgebra")) {
        const json& sa = j.at("subalgebra");
        only_keys(sa, {"S_prime", "h", "r_prime"}, "subalgebra");
        if (sa.contains("S_prime")) {
            const json& sp = sa.at("S_prime");
            if (sp == "full") {
                c.sp.kind = SpinorChoice::Kind::Full;
            } else if (sp.is_object() && sp.contains("random")) {
                only_keys(sp, {"random"}, "subalgebra.S_prime");
                const json& r = sp.at("random");
                only_keys(r, {"dim", "seed"}, "subalgebra.S_prime.random");
                c.sp.kind = SpinorChoice::Kind::Random;
                c.sp.dim = as_uint(required(r, "dim", "subalgebra.S_prime.random"), "S_prime.random.dim");
                if (!r.contains("seed"))
                    throw ConfigError("a seed is mandatory for subalgebra.S_prime.random");
                c.sp.seed = as_uint(r.at("seed"), "S_prime.random.seed");
            } else if (sp.is_object()) {
                only_keys(sp, {"basis"}, "subalgebra.S_prime");
                c.sp.kind = SpinorChoice::Kind::Basis;
                c.sp.basis = as_rows(required(sp, "basis", "subalgebra.S_prime"), "subalgebra.S_prime.basis");
            } else {
                throw ConfigError("subalgebra.S_prime must be 'full', {basis} or {random}");
            }
        }
        if (sa.contains("h"))
            c.h = parse_algebra(sa.at("h"), "subalgebra.h", true, false);
        if (sa.contains("r_prime"))
            c.rp = parse_algebra(sa.at("r_prime"), "subalgebra.r_prime", false, true);
    }

    if (j.contains("cocycle")) {
        const json& co = j.at("cocycle");
        if (co == "zero") {
            c.cocycle.kind = CocycleChoice::Kind::Zero;
        } else if (co.is_object()) {
            only_keys(co, {"explicit", "basis_element"}, "cocycle");
            if (co.size() != 1)
                throw ConfigError("cocycle takes exactly one of 'explicit' or 'basis_element'");
            if (co.contains("explicit")) {
                c.cocycle.kind = CocycleChoice::Kind::Explicit;
                c.cocycle.coefficients = as_vec(co.at("explicit"), "cocycle.explicit");
            } else {
                c.cocycle.kind = CocycleChoice::Kind::BasisElement;
                c.cocycle.index = as_uint(co.at("basis_element"), "cocycle.basis_element");
            }
        } else {
            throw ConfigError("cocycle must be 'zero', {explicit} or {basis_element}");
        }
    }

    const auto& names = pipeline_stages();
    if (j.contains("checks")) {
        const json& ch = j.at("checks");
        if (!ch.is_array() || ch.empty())
            throw ConfigError("checks must be a non-empty array of stage names");
        std::ptrdiff_t last = -1;
        for (const auto& x : ch) {
            if (!x.is_string())
                throw ConfigError("checks must contain stage names");
            auto it = std::find(names.begin(), names.end(), x.get<std::string>());
            if (it == names.end())
                throw ConfigError("unknown stage '" + x.get<std::string>() + "'");
            if (it - names.begin() <= last)
                throw ConfigError("checks must be listed once each, in dependency order");
            last = it - names.begin();
            c.checks.push_back(*it);
        }
    } else {
        c.checks = names;
    }
    if (j.contains("output_path")) {
        if (!j.at("output_path").is_string())
            throw ConfigError("output_path must be a string");
        c.output_path = j.at("output_path").get<std::string>();
    }
    if (j.contains("seed"))
        c.seed = as_uint(j.at("seed"), "seed");
    return c;
}

PipelineConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

json canonical_config(const PipelineConfig& c)
{
    json j;
    j["signature"] = json{{"s", c.sig.s}, {"t", c.sig.t}};
    j["N"] = c.n;
    if (c.explicit_kappa) {
        json t = json::array();
        for (const auto& m : c.tensor)
            t.push_back(mat_json(m));
        j["dirac_current"] = json{{"kind", "explicit"}, {"tensor", t}};
    } else {
        j["dirac_current"] = json{{"kind", "standard"}};
    }
    json sp;
    switch (c.sp.kind) {
    case SpinorChoice::Kind::Full:
        sp = "full";
        break;
    case SpinorChoice::Kind::Basis:
        sp = json{{"basis", rows_json(c.sp.basis)}};
        break;
    case SpinorChoice::Kind::Random:
        sp = json{{"random", json{{"dim", c.sp.dim}, {"seed", c.sp.seed}}}};
        break;
    }
    j["subalgebra"] = json{{"S_prime", sp}, {"h", algebra_json(c.h)}, {"r_prime", algebra_json(c.rp)}};
    switch (c.cocycle.kind) {
    case CocycleChoice::Kind::Zero:
        j["cocycle"] = "zero";
        break;
    case CocycleChoice::Kind::Explicit:
        j["cocycle"] = json{{"explicit", vec_json(c.cocycle.coefficients)}};
        break;
    case CocycleChoice::Kind::BasisElement:
        j["cocycle"] = json{{"basis_element", c.cocycle.index}};
        break;
    }
    j["checks"] = c.checks;
    j["seed"] = c.seed;
    return j;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string config_hash(const PipelineConfig& c, const std::string& version)
{
    return sha256_hex(canonical_config(c).dump() + '\n' + version);
}

PipelineResult run_pipeline(const PipelineConfig& c)
{
    State s{c, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    const auto& table = stage_table();
    const auto& names = pipeline_stages();
    const std::size_t last = static_cast<std::size_t>(
        std::find(names.begin(), names.end(), c.checks.back()) - names.begin());
    std::set<std::string> requested(c.checks.begin(), c.checks.end());

    json stages = json::array();
    int exit_code = 0;
    std::string outcome = "pass";
    for (std::size_t k = 0; k <= last; ++k) {
        const auto& [name, fn] = table[k];
        json body;
        json rec{{"name", name}};
        bool stop = false;
        try {
            Status st = fn(s, body);
            rec["status"] = st == Status::Pass ? "pass" : "negative";
            rec["result"] = body;
            if (st == Status::Negative) {
                exit_code = 1;
                outcome = "negative";
                stop = true;
            }
        } catch (const std::exception& e) {
            // no partial results from a failing stage
            rec["error"] = json{{"type", error_type(e)}, {"message", e.what()}};
            if (dynamic_cast<const ConfigError*>(&e)) {
                rec["status"] = "error";
                exit_code = 2;
                outcome = "config_error";
            } else if (is_negative(e)) {
                rec["status"] = "negative";
                exit_code = 1;
                outcome = "negative";
            } else {
                rec["status"] = "error";
                exit_code = 3;
                outcome = "internal_error";
            }
            stop = true;
        }
        if (requested.count(name) || stop)
            stages.push_back(rec);
        if (stop)
            break;
    }

    json report;
    report["config"] = canonical_config(c);
    report["config_hash"] = config_hash(c);
    report["banner"] = banner();
    report["stages"] = stages;
    report["outcome"] = outcome;
    report["exit_code"] = exit_code;
    report["version"] = kEngineVersion;
    return {report.dump(2) + "\n", exit_code, false};
}

ReportCache::ReportCache(std::filesystem::path dir, std::string version)
    : dir_(std::move(dir)), version_(std::move(version))
{
}

std::filesystem::path ReportCache::default_dir()
{
    if (const char* d = std::getenv("SPENCERKIT_CACHE_DIR"); d && *d)
        return d;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x)
        return std::filesystem::path(x) / "spencerkit";
    if (const char* h = std::getenv("HOME"); h && *h)
        return std::filesystem::path(h) / ".cache" / "spencerkit";
    return std::filesystem::temp_directory_path() / "spencerkit-cache";
}

std::optional<PipelineResult> ReportCache::lookup(const std::string& hash) const
{
    const auto path = dir_ / (hash + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    json env;
    try {
        env = json::parse(buf.str());
        if (env.at("version").get<std::string>() != version_)
            return std::nullopt;
        std::string text = env.at("report").get<std::string>();
        if (env.at("checksum").get<std::string>() != sha256_hex(text)) {
            std::cerr << "warning: cache entry " << path.string() << " is corrupt; recomputing\n";
            return std::nullopt;
        }
        return PipelineResult{std::move(text), env.at("exit_code").get<int>(), true};
    } catch (const json::exception&) {
        std::cerr << "warning: cache entry " << path.string() << " is unreadable; recomputing\n";
        return std::nullopt;
    }
}

void ReportCache::store(const std::string& hash, const PipelineResult& r) const
{
    std::filesystem::create_directories(dir_);
    json env{{"version", version_}, {"checksum", sha256_hex(r.text)}, {"exit_code", r.exit_code}, {"report", r.text}};
    const auto final_path = dir_ / (hash + ".json");
    auto tmp = final_path;
    tmp += ".tmp." + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write cache entry " + tmp.string());
        out << env.dump() << '\n';
        if (!out.flush())
            throw std::runtime_error("cannot write cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
}

std::vector<std::string> ReportCache::list() const
{
    std::vector<std::string> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir_, ec))
        return out;
    for (const auto& e : std::filesystem::directory_iterator(dir_))
        if (e.is_regular_file() && e.path().extension() == ".json")
            out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

bool ReportCache::remove(const std::string& hash) const
{
    std::error_code ec;
    return std::filesystem::remove(dir_ / (hash + ".json"), ec);
}

std::size_t ReportCache::clear() const
{
    std::size_t n = 0;
    for (const auto& h : list())
        n += remove(h) ? 1 : 0;
    return n;
}

PipelineResult run_cached(const PipelineConfig& c, const ReportCache* cache)
{
    if (!cache)
        return run_pipeline(c);
    const std::string hash = config_hash(c);
    if (auto hit = cache->lookup(hash))
        return *hit;
    PipelineResult r = run_pipeline(c);
    // internal errors are not worth keeping
    if (r.exit_code != 3)
        cache->store(hash, r);
    return r;
}

}  // namespace spencerkit
