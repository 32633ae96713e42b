#include "qcsp/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcsp {

double Rng::uniform() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_cached) {
        have_cached = false;
        return cached;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached = r * std::sin(2.0 * M_PI * u2);
    have_cached = true;
    return r * std::cos(2.0 * M_PI * u2);
}

int Rng::below(int n) {
    return static_cast<int>(gen() % static_cast<std::uint64_t>(n));
}

CMatrix ginibre(int rows, int cols, Rng& rng) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double re = rng.gaussian();
            double im = rng.gaussian();
            m(i, j) = std::complex<double>(re, im);
        }
    return m;
}

CMatrix haar_unitary(int d, Rng& rng) {
    CMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix phases so the distribution is Haar.
    for (int j = 0; j < d; ++j) {
        std::complex<double> rj = r(j, j);
        double a = std::abs(rj);
        q.col(j) *= (a > 0 ? rj / a : 1.0);
    }
    return q;
}

PVM random_pvm(int d, int outcomes, Rng& rng) {
    std::vector<int> order(outcomes);
    std::iota(order.begin(), order.end(), 0);
    for (int i = outcomes - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<int> rank(outcomes, d / outcomes);
    for (int i = 0; i < d % outcomes; ++i) ++rank[order[i]];

    CMatrix u = haar_unitary(d, rng);
    PVM pvm;
    int col = 0;
    for (int a = 0; a < outcomes; ++a) {
        CMatrix p = CMatrix::Zero(d, d);
        for (int r = 0; r < rank[a]; ++r, ++col) p += u.col(col) * u.col(col).adjoint();
        pvm.projectors.push_back(std::move(p));
    }
    return pvm;
}

PVM indicator_pvm(int outcomes, int chosen) {
    PVM pvm;
    for (int a = 0; a < outcomes; ++a)
        pvm.projectors.push_back(CMatrix::Constant(1, 1, a == chosen ? 1.0 : 0.0));
    return pvm;
}

CMatrix pvm_unitary(const PVM& pvm, int k) {
    int d = pvm.dimension();
    CMatrix u = CMatrix::Zero(d, d);
    for (int a = 0; a < pvm.outcomes(); ++a) {
        std::complex<double> omega = std::polar(1.0, 2.0 * M_PI * a / k);
        u += omega * pvm.projectors[a];
    }
    return u;
}

double normalized_trace(const CMatrix& a) { return a.trace().real() / a.rows(); }

double tau_norm2(const CMatrix& a) { return (a.adjoint() * a).trace().real() / a.rows(); }

std::string model_name(Model m) {
    switch (m) {
        case Model::CC: return "cc";
        case Model::CV: return "cv";
        case Model::A: return "a";
    }
    return "?";
}

ValidationReport validate(const SyncStrategy& st, const ConstraintSystem& s) {
    ValidationReport rep;
    auto check_pvm = [&](const PVM& pvm, int expected_outcomes) {
        if (pvm.outcomes() != expected_outcomes)
            throw Error("bad-strategy", "PVM outcome count mismatch");
        int d = pvm.dimension();
        if (d != st.d) throw Error("bad-strategy", "PVM dimension mismatch");
        CMatrix sum = CMatrix::Zero(d, d);
        for (const CMatrix& p : pvm.projectors) {
            rep.projector_residual = std::max(rep.projector_residual, (p * p - p).norm());
            rep.projector_residual = std::max(rep.projector_residual, (p - p.adjoint()).norm());
            sum += p;
        }
        rep.completeness_residual =
            std::max(rep.completeness_residual, (sum - CMatrix::Identity(d, d)).norm());
    };
    bool want_contexts = st.model != Model::A;
    bool want_variables = st.model != Model::CC;
    if (want_contexts) {
        if (st.context_pvms.size() != s.constraints.size())
            throw Error("bad-strategy", "context PVM count mismatch");
        for (size_t i = 0; i < s.constraints.size(); ++i)
            check_pvm(st.context_pvms[i], static_cast<int>(s.constraints[i].accepted.size()));
    }
    if (want_variables) {
        if (st.variable_pvms.size() != s.variables.size())
            throw Error("bad-strategy", "variable PVM count mismatch");
        for (const PVM& pvm : st.variable_pvms) check_pvm(pvm, s.k);
    }
    return rep;
}

namespace {

// sigma_i(x)^l = sum_phi omega^(l phi(x)) P^i_phi inside the i-th context algebra.
CMatrix context_unitary_power(const SyncStrategy& st, const ConstraintSystem& s, int i, int var,
                              int l) {
    const Constraint& c = s.constraints[i];
    int p = c.position_of(var);
    CMatrix out = CMatrix::Zero(st.d, st.d);
    for (size_t a = 0; a < c.accepted.size(); ++a) {
        std::complex<double> omega =
            std::polar(1.0, 2.0 * M_PI * l * c.accepted[a][p] / static_cast<double>(s.k));
        out += omega * st.context_pvms[i].projectors[a];
    }
    return out;
}

// Ordered product prod_{x in V_i} Q^x_{phi(x)} in the global variable order.
CMatrix assignment_projector(const SyncStrategy& st, const Constraint& c, const Tuple& phi,
                             int d) {
    CMatrix out = CMatrix::Identity(d, d);
    for (size_t p = 0; p < c.context.size(); ++p)
        out = out * st.variable_pvms[c.context[p]].projectors[phi[p]];
    return out;
}

} // namespace

double DefectReport::primary() const {
    switch (model) {
        case Model::CC: return totals.count("cc") ? totals.at("cc") : 0;
        case Model::CV: return totals.count("cv") ? totals.at("cv") : 0;
        case Model::A: return totals.count("a") ? totals.at("a") : 0;
    }
    return 0;
}

DefectReport defect(const SyncStrategy& st, const ConstraintSystem& s, const PairDist& pi) {
    if (st.model != Model::CC) throw Error("bad-strategy", "pair distributions go with the cc model");
    DefectReport rep;
    rep.model = Model::CC;
    rep.totals["cc"] = 0;
    rep.totals["inter"] = 0;
    double value = 0;
    for (const auto& [idx, q] : pi.w) {
        if (q == 0) continue;
        auto [i, j] = idx;
        double w = rat_double(q);
        const Constraint &ci = s.constraints[i], &cj = s.constraints[j];
        std::vector<std::pair<int, int>> shared;
        for (int p = 0; p < ci.arity(); ++p) {
            int qpos = cj.position_of(ci.context[p]);
            if (qpos >= 0) shared.push_back({p, qpos});
        }
        for (size_t a = 0; a < ci.accepted.size(); ++a) {
            for (size_t b = 0; b < cj.accepted.size(); ++b) {
                bool agree = true;
                for (auto [p, qpos] : shared)
                    if (ci.accepted[a][p] != cj.accepted[b][qpos]) agree = false;
                CMatrix prod = st.context_pvms[i].projectors[a] * st.context_pvms[j].projectors[b];
                if (agree) {
                    value += w * normalized_trace(prod);
                } else {
                    double n2 = tau_norm2(prod);
                    rep.totals["cc"] += w * n2;
                    rep.terms.push_back({"cc", w, n2});
                }
            }
        }
        // inter-contextual weight function
        if (i != j) {
            for (auto [p, qpos] : shared) {
                (void)qpos;
                int var = ci.context[p];
                for (int l = 1; l < s.k; ++l) {
                    CMatrix diff = context_unitary_power(st, s, i, var, l) -
                                   context_unitary_power(st, s, j, var, l);
                    double n2 = tau_norm2(diff);
                    rep.totals["inter"] += w * n2;
                    rep.terms.push_back({"inter", w, n2});
                }
            }
        }
    }
    rep.value = value;
    return rep;
}

DefectReport defect(const SyncStrategy& st, const ConstraintSystem& s,
                    const std::vector<Rational>& pi) {
    if (pi.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");
    DefectReport rep;
    rep.model = st.model;
    if (st.model == Model::CV) {
        rep.totals["cv"] = 0;
        double value = 0;
        for (size_t i = 0; i < s.constraints.size(); ++i) {
            const Constraint& c = s.constraints[i];
            double w = rat_double(pi[i]) / c.arity();
            if (w == 0) continue;
            for (size_t a = 0; a < c.accepted.size(); ++a) {
                const CMatrix& p = st.context_pvms[i].projectors[a];
                for (int pos = 0; pos < c.arity(); ++pos) {
                    const CMatrix& q = st.variable_pvms[c.context[pos]]
                                           .projectors[c.accepted[a][pos]];
                    CMatrix bad = p * (CMatrix::Identity(st.d, st.d) - q);
                    double n2 = tau_norm2(bad);
                    rep.totals["cv"] += w * n2;
                    rep.terms.push_back({"cv", w, n2});
                    value += w * normalized_trace(p * q);
                }
            }
        }
        rep.value = value;
        return rep;
    }
    if (st.model != Model::A) throw Error("bad-strategy", "vector distributions need cv or a model");

    rep.totals["a"] = 0;
    rep.totals["comm"] = 0;
    bool two_cs = true;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        two_cs = two_cs && c.arity() == 2;
        double w = rat_double(pi[i]);
        if (w == 0) continue;
        for_each_tuple(s.k, c.arity(), [&](const Tuple& t) {
            if (c.accepts(t)) return;
            double n2 = tau_norm2(assignment_projector(st, c, t, st.d));
            rep.totals["a"] += w * n2;
            rep.terms.push_back({"a", w, n2});
        });
    }
    // mu_comm: weight per ordered variable pair is the mass of contexts containing both.
    std::map<std::pair<int, int>, double> pair_weight;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        double w = rat_double(pi[i]);
        if (w == 0) continue;
        for (int x : c.context)
            for (int y : c.context) pair_weight[{x, y}] += w;
    }
    for (const auto& [xy, w] : pair_weight) {
        auto [x, y] = xy;
        for (int a = 0; a < s.k; ++a)
            for (int b = 0; b < s.k; ++b) {
                const CMatrix &qa = st.variable_pvms[x].projectors[a],
                              &qb = st.variable_pvms[y].projectors[b];
                double n2 = tau_norm2(qa * qb - qb * qa);
                rep.totals["comm"] += w * n2;
                rep.terms.push_back({"comm", w, n2});
            }
    }
    if (two_cs) {
        double value = 0;
        for (size_t i = 0; i < s.constraints.size(); ++i) {
            const Constraint& c = s.constraints[i];
            double w = rat_double(pi[i]);
            for (const Tuple& t : c.accepted)
                value += w * normalized_trace(st.variable_pvms[c.context[0]].projectors[t[0]] *
                                              st.variable_pvms[c.context[1]].projectors[t[1]]);
        }
        rep.value = value;
    }
    return rep;
}

double winning_probability_cc(const SyncStrategy& st, const ConstraintSystem& s,
                              const PairDist& pi) {
    return *defect(st, s, pi).value;
}

double winning_probability_cv(const SyncStrategy& st, const ConstraintSystem& s,
                              const std::vector<Rational>& pi) {
    return *defect(st, s, pi).value;
}

double winning_probability_a(const SyncStrategy& st, const ConstraintSystem& s,
                             const std::vector<Rational>& pi) {
    DefectReport rep = defect(st, s, pi);
    if (!rep.value) throw Error("precondition-violated", "assignment-model value needs a 2-CS");
    return *rep.value;
}

SyncStrategy embed_classical(Model model, const ConstraintSystem& s,
                             const std::vector<Value>& phi) {
    if (phi.size() != s.variables.size())
        throw Error("missing-variable", "assignment does not cover the variable table");
    SyncStrategy st;
    st.model = model;
    st.d = 1;
    if (model != Model::A) {
        for (const Constraint& c : s.constraints) {
            Tuple t(c.arity());
            for (int p = 0; p < c.arity(); ++p) t[p] = phi[c.context[p]];
            auto it = std::lower_bound(c.accepted.begin(), c.accepted.end(), t);
            int chosen = it != c.accepted.end() && *it == t
                             ? static_cast<int>(it - c.accepted.begin())
                             : 0;
            st.context_pvms.push_back(indicator_pvm(static_cast<int>(c.accepted.size()), chosen));
        }
    }
    if (model != Model::CC)
        for (const Variable& x : s.variables) st.variable_pvms.push_back(indicator_pvm(s.k, phi[x.id]));
    return st;
}

SyncStrategy embed_classical_cc(const ConstraintSystem& s, const std::vector<int>& choices) {
    if (choices.size() != s.constraints.size())
        throw Error("bad-strategy", "one accepted-set choice per constraint required");
    SyncStrategy st;
    st.model = Model::CC;
    st.d = 1;
    for (size_t i = 0; i < s.constraints.size(); ++i)
        st.context_pvms.push_back(
            indicator_pvm(static_cast<int>(s.constraints[i].accepted.size()), choices[i]));
    return st;
}

SyncStrategy random_strategy(Model model, const ConstraintSystem& s, int d, std::uint64_t seed) {
    Rng rng(seed);
    SyncStrategy st;
    st.model = model;
    st.d = d;
    if (model != Model::A)
        for (const Constraint& c : s.constraints)
            st.context_pvms.push_back(random_pvm(d, static_cast<int>(c.accepted.size()), rng));
    if (model != Model::CC)
        for (size_t x = 0; x < s.variables.size(); ++x)
            st.variable_pvms.push_back(random_pvm(d, s.k, rng));
    return st;
}

double winning_probability(const QuestionStrategy& st, const GameSpec& g) {
    double value = 0;
    for (const auto& [idx, q] : g.dist.w) {
        auto [i, j] = idx;
        double w = rat_double(q);
        if (w == 0) continue;
        for (int a = 0; a < g.answer_count[i]; ++a)
            for (int b = 0; b < g.answer_count[j]; ++b)
                if (g.predicate(a, b, i, j))
                    value += w * normalized_trace(st.pvms[i].projectors[a] *
                                                  st.pvms[j].projectors[b]);
    }
    return value;
}

QuestionStrategy question_strategy_cc(const SyncStrategy& st) {
    return {st.d, st.context_pvms};
}

QuestionStrategy question_strategy_cv(const SyncStrategy& st) {
    QuestionStrategy qs{st.d, st.context_pvms};
    qs.pvms.insert(qs.pvms.end(), st.variable_pvms.begin(), st.variable_pvms.end());
    return qs;
}

QuestionStrategy question_strategy_a(const SyncStrategy& st) {
    return {st.d, st.variable_pvms};
}

namespace {

PVM assign_by_basis(const CMatrix& basis, const std::vector<CMatrix>& f, int d) {
    int n = static_cast<int>(f.size());
    PVM pvm;
    pvm.projectors.assign(n, CMatrix::Zero(d, d));
    for (int col = 0; col < d; ++col) {
        Eigen::VectorXcd v = basis.col(col);
        int best = 0;
        double best_score = -1e300;
        for (int a = 0; a < n; ++a) {
            double score = (v.adjoint() * f[a] * v)(0).real();
            if (score > best_score) {
                best_score = score;
                best = a;
            }
        }
        pvm.projectors[best] += v * v.adjoint();
    }
    return pvm;
}

} // namespace

SeesawResult seesaw(const QuestionStrategy& start, const GameSpec& g, int sweeps) {
    SeesawResult res;
    res.strategy = start;
    double current_value = winning_probability(res.strategy, g);
    res.values.push_back(current_value);
    int n = static_cast<int>(g.questions.size());
    int d = res.strategy.d;

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool improved = false;
        for (int q = 0; q < n; ++q) {
            int na = g.answer_count[q];
            // Linear response operators with the other questions fixed; the
            // diagonal (q,q) term is left out of the linearization and only
            // enters through the true-value acceptance test.
            std::vector<CMatrix> f(na, CMatrix::Zero(d, d));
            bool relevant = false;
            for (const auto& [idx, mass] : g.dist.w) {
                auto [i, j] = idx;
                double w = rat_double(mass);
                if (w == 0) continue;
                if (i == q && j != q) {
                    relevant = true;
                    for (int a = 0; a < na; ++a)
                        for (int b = 0; b < g.answer_count[j]; ++b)
                            if (g.predicate(a, b, q, j)) f[a] += w * res.strategy.pvms[j].projectors[b];
                } else if (j == q && i != q) {
                    relevant = true;
                    for (int a = 0; a < na; ++a)
                        for (int b = 0; b < g.answer_count[i]; ++b)
                            if (g.predicate(b, a, i, q)) f[a] += w * res.strategy.pvms[i].projectors[b];
                }
            }
            if (!relevant) continue;

            std::vector<CMatrix> bases;
            CMatrix pencil = CMatrix::Zero(d, d);
            for (int a = 0; a < na; ++a) pencil += static_cast<double>(a + 1) * f[a];
            Eigen::SelfAdjointEigenSolver<CMatrix> es1((pencil + pencil.adjoint()) / 2.0);
            bases.push_back(es1.eigenvectors());
            for (int a = 0; a < na; ++a)
                for (int b = a + 1; b < na; ++b) {
                    CMatrix diff = f[a] - f[b];
                    Eigen::SelfAdjointEigenSolver<CMatrix> es((diff + diff.adjoint()) / 2.0);
                    bases.push_back(es.eigenvectors());
                }

            PVM keep = res.strategy.pvms[q];
            for (const CMatrix& basis : bases) {
                PVM candidate = assign_by_basis(basis, f, d);
                res.strategy.pvms[q] = candidate;
                double v = winning_probability(res.strategy, g);
                if (v > current_value + 1e-15) {
                    current_value = v;
                    keep = candidate;
                    improved = true;
                }
                res.strategy.pvms[q] = keep;
            }
        }
        res.values.push_back(current_value);
        if (!improved) break;
    }
    return res;
}

double verify_identity_3clique(const PVM& x, const PVM& y, const PVM& z) {
    if (x.outcomes() != 3 || y.outcomes() != 3 || z.outcomes() != 3)
        throw Error("bad-strategy", "3-clique identity needs PVMs over Z_3");
    int d = x.dimension();
    CMatrix id = CMatrix::Identity(d, d);
    double lhs = 0, rhs = 0;
    for (int a = 0; a < 3; ++a) {
        lhs += tau_norm2(x.projectors[a] + y.projectors[a] + z.projectors[a] - id);
        rhs += 2.0 * (tau_norm2(x.projectors[a] * y.projectors[a]) +
                      tau_norm2(y.projectors[a] * z.projectors[a]) +
                      tau_norm2(z.projectors[a] * x.projectors[a]));
    }
    return std::abs(lhs - rhs);
}

} // namespace qcsp
