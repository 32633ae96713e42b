#include "qcsp/verify.hpp"

#include <algorithm>
#include <cmath>

namespace qcsp {

namespace {

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

} // namespace

InequalityCheck check_hermitian_square(int kterms, int d, std::uint64_t seed, double tol) {
    Rng rng(seed);
    std::vector<CMatrix> a;
    for (int i = 0; i < kterms; ++i) a.push_back(ginibre(d, d, rng));
    CMatrix sum = CMatrix::Zero(d, d);
    for (const CMatrix& m : a) sum += m;
    InequalityCheck c;
    c.name = "hermitian-square(k=" + std::to_string(kterms) + ")";
    c.lhs = tau_norm2(sum);
    c.rhs = 0;
    for (const CMatrix& m : a) c.rhs += tau_norm2(m);
    c.constant = std::pow(2.0, std::ceil(std::log2(std::max(1, kterms))));
    c.pass = c.lhs <= c.constant * c.rhs + tol;
    return c;
}

InequalityCheck check_basic_gadget(int d, std::uint64_t seed, double tol) {
    GadgetOutput g = basic_gadget(one_in_three());
    SyncStrategy st = random_strategy(Model::CV, g.cs, d, seed);
    int x = g.distinguished.at("x"), y = g.distinguished.at("y");
    CMatrix sx = pvm_unitary(st.variable_pvms[x], 2);
    CMatrix sy = pvm_unitary(st.variable_pvms[y], 2);
    InequalityCheck c;
    c.name = "basic-gadget";
    c.lhs = tau_norm2(commutator(sx, sy));
    c.rhs = 0;
    for (size_t i = 0; i < g.cs.constraints.size(); ++i) {
        const Constraint& con = g.cs.constraints[i];
        for (size_t a = 0; a < con.accepted.size(); ++a) {
            const CMatrix& p = st.context_pvms[i].projectors[a];
            for (int pos = 0; pos < con.arity(); ++pos) {
                const CMatrix& q =
                    st.variable_pvms[con.context[pos]].projectors[con.accepted[a][pos]];
                c.rhs += tau_norm2(p * (CMatrix::Identity(d, d) - q));
            }
        }
    }
    c.constant = 512;
    c.pass = c.lhs <= c.constant * c.rhs + tol;
    return c;
}

InequalityCheck check_3col_oracularisable(int d, std::uint64_t seed, double tol) {
    Rng rng(seed);
    PVM x = random_pvm(d, 3, rng), y = random_pvm(d, 3, rng);
    InequalityCheck c;
    c.name = "3col-oracularisable";
    c.rhs = 0;
    for (int col = 0; col < 3; ++col) c.rhs += tau_norm2(x.projectors[col] * y.projectors[col]);
    c.lhs = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            c.lhs = std::max(c.lhs, tau_norm2(commutator(x.projectors[a], y.projectors[b])));
    c.constant = 16;
    c.pass = c.lhs <= c.constant * c.rhs + tol;
    return c;
}

InequalityCheck check_prism(int d, std::uint64_t seed, double tol) {
    Rng rng(seed);
    // vertex order: x, y, z, x', y', z'
    std::vector<PVM> v;
    for (int i = 0; i < 6; ++i) v.push_back(random_pvm(d, 3, rng));
    InequalityCheck c;
    c.name = "prism";
    c.lhs = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            c.lhs += tau_norm2(commutator(v[0].projectors[a], v[4].projectors[b]));
    const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5},
                                                    {5, 3}, {0, 3}, {1, 4}, {2, 5}};
    c.rhs = 0;
    for (auto [p, q] : edges)
        for (int col = 0; col < 3; ++col)
            c.rhs += tau_norm2(v[p].projectors[col] * v[q].projectors[col]);
    c.constant = 6240;
    c.pass = c.lhs <= c.constant * c.rhs + tol;
    return c;
}

InequalityCheck check_acomm_to_a_3col(const ConstraintSystem& s, const std::vector<Rational>& pi,
                                      int d, std::uint64_t seed, double tol) {
    SyncStrategy st = random_strategy(Model::A, s, d, seed);
    DefectReport rep = defect(st, s, pi);
    InequalityCheck c;
    c.name = "acomm-to-a-3col";
    c.lhs = rep.acomm();
    c.rhs = rep.primary();
    c.constant = 145;
    c.pass = c.lhs <= c.constant * c.rhs + tol;
    return c;
}

InequalityCheck check_acomm_to_a_tvf(const ConstraintSystem& s, const std::vector<Rational>& pi,
                                     int d, std::uint64_t seed, double tol) {
    for (const Constraint& con : s.constraints)
        if (!is_tvf(con)) throw Error("precondition-violated", "system is not TVF");
    SyncStrategy st = random_strategy(Model::A, s, d, seed);
    DefectReport rep = defect(st, s, pi);
    int l = 0;
    for (const Constraint& con : s.constraints) l = std::max(l, con.arity());
    InequalityCheck c;
    c.name = "acomm-to-a-tvf";
    c.lhs = rep.acomm();
    c.rhs = rep.primary();
    c.constant = 16.0 * l * l + 1;
    c.pass = c.lhs <= c.constant * c.rhs + tol;
    return c;
}

ChomCheck chom_boolean_form(const ConstraintSystem& s, const PairDist& pi, int d,
                            std::uint64_t seed, double tol) {
    ConstraintSystem b = boolean_form(s);
    SyncStrategy target = random_strategy(Model::CC, s, d, seed);

    // Pull the strategy back through the isomorphism: outcome phi' of B's i-th
    // constraint corresponds to the phi in C_i with matching indicators.
    SyncStrategy pulled;
    pulled.model = Model::CC;
    pulled.d = d;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        const Constraint& cb = b.constraints[i];
        PVM pvm;
        for (const Tuple& ind : cb.accepted) {
            Tuple phi(c.arity());
            for (int pos = 0; pos < c.arity(); ++pos)
                for (int a = 0; a < s.k; ++a)
                    if (ind[pos * s.k + a] == 1) phi[pos] = a;
            auto it = std::lower_bound(c.accepted.begin(), c.accepted.end(), phi);
            pvm.projectors.push_back(
                target.context_pvms[i].projectors[it - c.accepted.begin()]);
        }
        pulled.context_pvms.push_back(std::move(pvm));
    }
    DefectReport df_target = defect(target, s, pi);
    DefectReport df_pulled = defect(pulled, b, pi);
    ChomCheck c;
    c.transform = "boolean-form";
    c.df_pullback = df_pulled.primary();
    c.df_target = df_target.primary();
    c.constant = 1;
    c.exact = true;
    c.pass = std::abs(c.df_pullback - c.df_target) <= tol;
    return c;
}

ChomCheck chom_cc_to_cv(const ConstraintSystem& s, const PairDist& pi, int d, std::uint64_t seed,
                        double tol) {
    if (!pi.symmetric()) throw Error("precondition-violated", "cc-to-cv needs a symmetric pi");
    SyncStrategy target = random_strategy(Model::CV, s, d, seed);
    SyncStrategy pulled = target;
    pulled.model = Model::CC;
    pulled.variable_pvms.clear();
    int m = static_cast<int>(s.constraints.size());
    DefectReport df_target = defect(target, s, pi.marginal(m));
    DefectReport df_pulled = defect(pulled, s, pi);
    int l = 0;
    for (const Constraint& con : s.constraints) l = std::max(l, con.arity());
    ChomCheck c;
    c.transform = "cc-to-cv";
    c.df_pullback = df_pulled.primary();
    c.df_target = df_target.primary();
    c.constant = 4.0 * l;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

ChomCheck chom_cv_to_cc(const ConstraintSystem& s, const PairDist& pi, int d, std::uint64_t seed,
                        double tol) {
    SyncStrategy target = random_strategy(Model::CC, s, d, seed);
    SyncStrategy pulled = target;
    pulled.model = Model::CV;
    double pmax = 0;
    int m = static_cast<int>(s.constraints.size());
    std::vector<Rational> marg = pi.marginal(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            bool overlap = false;
            for (int v : s.constraints[i].context)
                if (s.constraints[j].position_of(v) >= 0) overlap = true;
            if (!overlap) continue;
            Rational pij = pi.at(i, j);
            if (pij == 0)
                throw Error("precondition-violated",
                            "pi vanishes on an overlapping pair; P is unbounded");
            pmax = std::max(pmax, rat_double(marg[i] / pij));
        }
    // sigma'(x) realized inside the first constraint containing x
    for (size_t x = 0; x < s.variables.size(); ++x) {
        int ix = -1;
        for (int i = 0; i < m && ix < 0; ++i)
            if (s.constraints[i].position_of(static_cast<int>(x)) >= 0) ix = i;
        if (ix < 0) throw Error("precondition-violated", "variable appears in no constraint");
        const Constraint& c = s.constraints[ix];
        int pos = c.position_of(static_cast<int>(x));
        PVM q;
        for (int a = 0; a < s.k; ++a) {
            CMatrix p = CMatrix::Zero(d, d);
            for (size_t t = 0; t < c.accepted.size(); ++t)
                if (c.accepted[t][pos] == a) p += target.context_pvms[ix].projectors[t];
            q.projectors.push_back(std::move(p));
        }
        pulled.variable_pvms.push_back(std::move(q));
    }
    DefectReport df_target = defect(target, s, pi);
    DefectReport df_pulled = defect(pulled, s, marg);
    ChomCheck c;
    c.transform = "cv-to-cc";
    c.df_pullback = df_pulled.primary();
    c.df_target = df_target.primary();
    c.constant = pmax;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

ChomCheck chom_acomm_to_cv(const ConstraintSystem& s, const std::vector<Rational>& pi, int d,
                           std::uint64_t seed, double tol) {
    SyncStrategy target = random_strategy(Model::CV, s, d, seed);
    SyncStrategy pulled = target;
    pulled.model = Model::A;
    pulled.context_pvms.clear();
    DefectReport df_target = defect(target, s, pi);
    DefectReport df_pulled = defect(pulled, s, pi);
    int l = 0;
    for (const Constraint& con : s.constraints) l = std::max(l, con.arity());
    ChomCheck c;
    c.transform = "acomm-to-cv";
    c.df_pullback = df_pulled.acomm();
    c.df_target = df_target.primary();
    c.constant = 20.0 * l * l;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

ChomCheck chom_a_to_acomm(const ConstraintSystem& s, const std::vector<Rational>& pi, int d,
                          std::uint64_t seed, double tol) {
    SyncStrategy st = random_strategy(Model::A, s, d, seed);
    DefectReport rep = defect(st, s, pi);
    ChomCheck c;
    c.transform = "a-to-acomm";
    c.df_pullback = rep.primary();
    c.df_target = rep.acomm();
    c.constant = 1;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

namespace {

// Pullback along a constraintwise extension: the i-th context PVM of the source
// is the marginal of the i-th extended PVM over the shared variables.
SyncStrategy marginal_pullback(const SyncStrategy& target, const ConstraintSystem& small,
                               const ConstraintSystem& big) {
    SyncStrategy pulled;
    pulled.model = Model::CV;
    pulled.d = target.d;
    for (size_t i = 0; i < small.constraints.size(); ++i) {
        const Constraint& cs = small.constraints[i];
        const Constraint& cb = big.constraints[i];
        std::vector<int> shared_pos;
        for (int v : cs.context) {
            int p = cb.position_of(v);
            if (p < 0) throw Error("bad-link", "extended constraint misses a source variable");
            shared_pos.push_back(p);
        }
        PVM pvm;
        for (const Tuple& phi : cs.accepted) {
            CMatrix m = CMatrix::Zero(target.d, target.d);
            for (size_t t = 0; t < cb.accepted.size(); ++t) {
                bool match = true;
                for (size_t p = 0; p < shared_pos.size(); ++p)
                    if (cb.accepted[t][shared_pos[p]] != phi[p]) match = false;
                if (match) m += target.context_pvms[i].projectors[t];
            }
            pvm.projectors.push_back(std::move(m));
        }
        pulled.context_pvms.push_back(std::move(pvm));
    }
    pulled.variable_pvms.assign(target.variable_pvms.begin(),
                                target.variable_pvms.begin() + small.variables.size());
    return pulled;
}

} // namespace

ChomCheck chom_replace_empty(const ConstraintSystem& s, const Constraint& witness, int witness_u,
                             int witness_v, const std::vector<Rational>& pi, int d,
                             std::uint64_t seed, double tol) {
    ConstraintSystem big = replace_empty_nontvf(s, witness, witness_u, witness_v);
    SyncStrategy target = random_strategy(Model::CV, big, d, seed);
    SyncStrategy pulled = marginal_pullback(target, s, big);
    DefectReport df_target = defect(target, big, pi);
    DefectReport df_pulled = defect(pulled, s, pi);
    ChomCheck c;
    c.transform = "replace-empty";
    c.df_pullback = df_pulled.primary();
    c.df_target = df_target.primary();
    c.constant = witness.arity() / 2.0;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

ChomCheck chom_the_bends(const ConstraintSystem& s, const std::vector<TheBendsLink>& links,
                         const std::vector<Rational>& pi, int d, std::uint64_t seed, double tol) {
    ConstraintSystem big = the_bends(s, links);
    SyncStrategy target = random_strategy(Model::CV, big, d, seed);
    SyncStrategy pulled = marginal_pullback(target, s, big);
    DefectReport df_target = defect(target, big, pi);
    DefectReport df_pulled = defect(pulled, s, pi);
    int l = 0;
    for (const TheBendsLink& link : links) l = std::max(l, link.parent.arity());
    ChomCheck c;
    c.transform = "the-bends";
    c.df_pullback = df_pulled.primary();
    c.df_target = df_target.primary();
    c.constant = l;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

ChomCheck chom_cc_expand(const ConstraintSystem& s, const std::vector<Rational>& pi, int d,
                         std::uint64_t seed, double tol) {
    CcExpandResult ex = cc_expand(s, pi);
    SyncStrategy target = random_strategy(Model::CV, ex.cs, d, seed);
    SyncStrategy pulled;
    pulled.model = Model::CV;
    pulled.d = d;
    pulled.context_pvms.assign(target.context_pvms.begin(),
                               target.context_pvms.begin() + s.constraints.size());
    pulled.variable_pvms.assign(target.variable_pvms.begin(),
                                target.variable_pvms.begin() + s.variables.size());
    DefectReport df_target = defect(target, ex.cs, ex.pi_constraints);
    DefectReport df_pulled = defect(pulled, s, pi);
    ChomCheck c;
    c.transform = "cc-expand";
    c.df_pullback = df_pulled.primary();
    c.df_target = df_target.primary();
    c.constant = 2;
    c.pass = c.df_pullback <= c.constant * c.df_target + tol;
    return c;
}

} // namespace qcsp
