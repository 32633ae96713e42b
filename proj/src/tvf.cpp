#include "qcsp/tvf.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "qcsp/schaefer.hpp"

namespace qcsp {

namespace {

std::pair<int, int> unord(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

// Every edge as an ordered pair with its forbidden pattern (a on first, b on second).
struct PatternEdge {
    int u, v;
    Value a, b;
};

std::vector<PatternEdge> pattern_edges(const TVFGraph& g) {
    std::vector<PatternEdge> out;
    for (auto [u, v] : g.e00) out.push_back({u, v, 0, 0});
    for (auto [u, v] : g.e11) out.push_back({u, v, 1, 1});
    for (auto [u, v] : g.e01) out.push_back({u, v, 0, 1});
    return out;
}

} // namespace

void TVFGraph::add00(int u, int v) { e00.insert(unord(u, v)); }
void TVFGraph::add11(int u, int v) { e11.insert(unord(u, v)); }
void TVFGraph::add01(int u, int v) {
    if (u != v) e01.insert({u, v});  // 01 loops do not affect assignments
}

bool TVFGraph::has_pair_edge(int u, int v) const {
    return e00.count(unord(u, v)) || e11.count(unord(u, v)) || e01.count({u, v}) ||
           e01.count({v, u});
}

bool TVFGraph::has_loop(int v) const {
    return e00.count({v, v}) || e11.count({v, v});
}

bool TVFGraph::complete() const {
    for (size_t i = 0; i < vertices.size(); ++i)
        for (size_t j = i + 1; j < vertices.size(); ++j)
            if (!has_pair_edge(vertices[i], vertices[j])) return false;
    return true;
}

TVFGraph tvf_graph(const Constraint& c) {
    if (c.k != 2) throw Error("negation-on-nonboolean", "TVF graphs need a boolean alphabet");
    TVFGraph g;
    g.vertices = c.context;
    int n = c.arity();
    for (int p = 0; p < n; ++p) {
        for (int q = p; q < n; ++q) {
            bool seen[2][2] = {{false, false}, {false, false}};
            for (const Tuple& t : c.accepted) seen[t[p]][t[q]] = true;
            int u = c.context[p], v = c.context[q];
            if (!seen[0][0]) g.add00(u, v);
            if (!seen[1][1]) g.add11(u, v);
            if (p != q) {
                if (!seen[0][1]) g.add01(u, v);
                if (!seen[1][0]) g.add01(v, u);
            }
        }
    }
    return g;
}

bool is_tvf(const Constraint& c) { return tvf_graph(c).complete(); }

bool is_tvf(const std::vector<Constraint>& gamma) {
    for (const Constraint& c : gamma)
        if (!is_tvf(c)) return false;
    return true;
}

std::vector<Tuple> graph_assignments(const TVFGraph& g) {
    auto edges = pattern_edges(g);
    std::map<int, int> pos;
    for (size_t i = 0; i < g.vertices.size(); ++i) pos[g.vertices[i]] = static_cast<int>(i);
    std::vector<Tuple> out;
    for_each_tuple(2, static_cast<int>(g.vertices.size()), [&](const Tuple& t) {
        for (const PatternEdge& e : edges)
            if (t[pos.at(e.u)] == e.a && t[pos.at(e.v)] == e.b) return;
        out.push_back(t);
    });
    return out;
}

Constraint constraint_of_graph(const TVFGraph& g) {
    std::vector<Tuple> acc = graph_assignments(g);
    if (acc.empty()) throw Error("empty-constraint-set", "graph admits no assignment");
    return Constraint::make(2, g.vertices, acc);
}

TVFGraph negate_graph_at(const TVFGraph& g, const std::vector<int>& flip) {
    std::set<int> f(flip.begin(), flip.end());
    TVFGraph out;
    out.vertices = g.vertices;
    for (const PatternEdge& e : pattern_edges(g)) {
        Value a = f.count(e.u) ? 1 - e.a : e.a;
        Value b = f.count(e.v) ? 1 - e.b : e.b;
        if (a == 0 && b == 0) out.add00(e.u, e.v);
        else if (a == 1 && b == 1) out.add11(e.u, e.v);
        else if (a == 0 && b == 1) out.add01(e.u, e.v);
        else out.add01(e.v, e.u);
    }
    return out;
}

namespace {

// Implication closure over literals (v, val). Each forbidden pattern (a,b) on
// an ordered pair (u,v) yields (u,a) => (v, 1-b) and (v,b) => (u, 1-a).
struct LiteralClosure {
    std::vector<int> vertices;
    std::map<std::pair<int, Value>, std::vector<std::pair<int, Value>>> implies;

    explicit LiteralClosure(const TVFGraph& g) : vertices(g.vertices) {
        for (const PatternEdge& e : pattern_edges(g)) {
            implies[{e.u, e.a}].push_back({e.v, 1 - e.b});
            implies[{e.v, e.b}].push_back({e.u, 1 - e.a});
        }
    }

    std::set<std::pair<int, Value>> closure(int v, Value val) const {
        std::set<std::pair<int, Value>> seen;
        std::vector<std::pair<int, Value>> stack{{v, val}};
        seen.insert({v, val});
        while (!stack.empty()) {
            auto lit = stack.back();
            stack.pop_back();
            auto it = implies.find(lit);
            if (it == implies.end()) continue;
            for (auto next : it->second)
                if (seen.insert(next).second) stack.push_back(next);
        }
        return seen;
    }

    static bool contradictory(const std::set<std::pair<int, Value>>& cl) {
        for (const auto& [v, val] : cl)
            if (cl.count({v, 1 - val})) return true;
        return false;
    }
};

std::optional<CompressionWitness> pattern_witness(const TVFGraph& g, const LiteralClosure& lc,
                                                  int v) {
    auto c0 = lc.closure(v, 0);
    auto c1 = lc.closure(v, 1);
    bool bad0 = LiteralClosure::contradictory(c0);
    bool bad1 = LiteralClosure::contradictory(c1);
    if (bad0 || bad1) {
        CompressionWitness w;
        w.at = v;
        w.kind = CompressionWitness::Kind::Constant;
        w.b = bad0 ? 1 : 0;  // if both fail the graph has no assignments; any claim holds
        w.from_pattern = true;
        return w;
    }
    for (int u : g.vertices) {
        if (u == v) continue;
        for (Value a : {0, 1}) {
            if (c0.count({u, a}) && lc.closure(u, a).count({v, 0})) {
                CompressionWitness w;
                w.at = v;
                w.kind = a == 0 ? CompressionWitness::Kind::Equality
                                : CompressionWitness::Kind::Negation;
                w.target = u;
                w.from_pattern = true;
                return w;
            }
        }
    }
    return std::nullopt;
}

std::optional<CompressionWitness> semantic_witness(const TVFGraph& g,
                                                   const std::vector<Tuple>& assignments, int v) {
    std::map<int, int> pos;
    for (size_t i = 0; i < g.vertices.size(); ++i) pos[g.vertices[i]] = static_cast<int>(i);
    int pv = pos.at(v);
    CompressionWitness w;
    w.at = v;
    if (assignments.empty()) {
        w.kind = CompressionWitness::Kind::Constant;
        w.b = 0;
        return w;
    }
    bool const0 = true, const1 = true;
    for (const Tuple& t : assignments) {
        const0 = const0 && t[pv] == 0;
        const1 = const1 && t[pv] == 1;
    }
    if (const0 || const1) {
        w.kind = CompressionWitness::Kind::Constant;
        w.b = const0 ? 0 : 1;
        return w;
    }
    for (int u : g.vertices) {
        if (u == v) continue;
        int pu = pos.at(u);
        bool eq = true, neq = true;
        for (const Tuple& t : assignments) {
            eq = eq && t[pv] == t[pu];
            neq = neq && t[pv] == 1 - t[pu];
        }
        if (eq || neq) {
            w.kind = eq ? CompressionWitness::Kind::Equality : CompressionWitness::Kind::Negation;
            w.target = u;
            return w;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<Compression> find_compression(const TVFGraph& g) {
    if (g.vertices.empty()) return std::nullopt;
    auto make = [&](const CompressionWitness& w) {
        Compression c;
        c.witness = w;
        for (int u : g.vertices)
            if (u != w.at) c.kept.push_back(u);
        return c;
    };
    LiteralClosure lc(g);
    // Later variables compress first, so restrictions keep the earliest ones.
    for (auto it = g.vertices.rbegin(); it != g.vertices.rend(); ++it)
        if (auto w = pattern_witness(g, lc, *it)) return make(*w);
    std::vector<Tuple> assignments = graph_assignments(g);
    for (auto it = g.vertices.rbegin(); it != g.vertices.rend(); ++it)
        if (auto w = semantic_witness(g, assignments, *it)) return make(*w);
    return std::nullopt;
}

namespace {

CompressedConstraint compress_single(const Constraint& c, int gamma_index) {
    CompressedConstraint out;
    out.gamma_index = gamma_index;
    out.restricted = c;
    while (true) {
        auto comp = find_compression(tvf_graph(out.restricted));
        if (!comp) break;
        out.chain.push_back(comp->witness);
        out.restricted = restrict_to(out.restricted, comp->kept);
    }
    out.kept = out.restricted.context;
    return out;
}

std::optional<AuxConstraint> find_parent_embedding(const std::vector<Constraint>& gamma,
                                                   const Constraint& aux) {
    int arity = aux.arity();
    for (size_t j = 0; j < gamma.size(); ++j) {
        const Constraint& p = gamma[j];
        if (p.arity() < arity) continue;
        // All ordered position subsets of size `arity`; contexts are sorted, so
        // only increasing id sequences arise.
        std::vector<int> idx(arity, 0);
        std::function<bool(int, int)> rec = [&](int slot, int from) {
            if (slot == arity) {
                std::vector<int> sub;
                for (int i : idx) sub.push_back(p.context[i]);
                Constraint r = restrict_to(p, sub);
                if (r.accepted == aux.accepted) return true;
                return false;
            }
            for (int i = from; i < p.arity(); ++i) {
                idx[slot] = i;
                if (rec(slot + 1, i + 1)) return true;
            }
            return false;
        };
        if (rec(0, 0)) {
            AuxConstraint a;
            a.c = aux;
            a.gamma_index = static_cast<int>(j);
            for (int i : idx) a.positions.push_back(p.context[i]);
            a.exact_parent = true;
            return a;
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<Constraint> MaximalCompression::gamma_max() const {
    std::vector<Constraint> out;
    for (const CompressedConstraint& c : comp) out.push_back(c.restricted);
    for (const auto* aux : {&const0, &const1, &equality, &negation})
        if (aux->has_value()) out.push_back((*aux)->c);
    return out;
}

MaximalCompression maximal_compression(const std::vector<Constraint>& gamma) {
    MaximalCompression mc;
    mc.gamma = gamma;
    bool need0 = false, need1 = false, needEq = false, needNeq = false;
    for (size_t i = 0; i < gamma.size(); ++i) {
        CompressedConstraint cc = compress_single(gamma[i], static_cast<int>(i));
        for (const CompressionWitness& w : cc.chain) {
            switch (w.kind) {
                case CompressionWitness::Kind::Constant: (w.b == 0 ? need0 : need1) = true; break;
                case CompressionWitness::Kind::Equality: needEq = true; break;
                case CompressionWitness::Kind::Negation: needNeq = true; break;
            }
        }
        mc.comp.push_back(std::move(cc));
    }
    auto attach = [&](const Constraint& aux) {
        auto found = find_parent_embedding(gamma, aux);
        if (found) return *found;
        AuxConstraint a;
        a.c = aux;
        return a;
    };
    if (need0) mc.const0 = attach(Constraint::make(2, {0}, {{0}}));
    if (need1) mc.const1 = attach(Constraint::make(2, {0}, {{1}}));
    if (needEq) mc.equality = attach(equality2());
    if (needNeq) mc.negation = attach(negation2());
    return mc;
}

namespace {

// Recursive vertex selection shared by the tableau constructions: each round
// picks the smallest active vertex whose active incident edges are all 1 on it
// (or, when negation is allowed, all 0 on it, in which case the vertex joins U
// and the graph is negated there).
struct TableauOrder {
    std::vector<int> order;
    std::vector<int> negated;  // U
};

TableauOrder triangular_order(const TVFGraph& g, bool allow_negation) {
    TVFGraph work = g;
    std::set<int> active(g.vertices.begin(), g.vertices.end());
    TableauOrder out;
    while (!active.empty()) {
        int chosen = -1;
        bool negate = false;
        for (int v : active) {
            bool has0 = false, has1 = false;
            for (const PatternEdge& e : pattern_edges(work)) {
                if (e.u == v && active.count(e.v) && e.v != v) (e.a == 0 ? has0 : has1) = true;
                if (e.v == v && active.count(e.u) && e.u != v) (e.b == 0 ? has0 : has1) = true;
                if (e.u == v && e.v == v)
                    throw Error("precondition-violated", "tableau input has a loop");
            }
            if (!has0) {
                chosen = v;
                break;
            }
            if (allow_negation && !has1) {
                chosen = v;
                negate = true;
                break;
            }
        }
        if (chosen < 0)
            throw Error("precondition-violated",
                        "no admissible vertex; the graph is compressible or has 00 edges");
        if (negate) {
            out.negated.push_back(chosen);
            work = negate_graph_at(work, {chosen});
        }
        out.order.push_back(chosen);
        active.erase(chosen);
    }
    return out;
}

Tableau rows_from_order(const TVFGraph& g_final, const std::vector<int>& order) {
    int n = static_cast<int>(order.size());
    std::vector<Tuple> assignments = graph_assignments(g_final);
    if (static_cast<int>(assignments.size()) != n + 1)
        throw Error("internal", "completion size differs from |V|+1");
    std::map<int, int> pos;
    for (size_t i = 0; i < g_final.vertices.size(); ++i)
        pos[g_final.vertices[i]] = static_cast<int>(i);

    Tableau t;
    t.variable_order = order;
    std::vector<bool> used(assignments.size(), false);
    for (int i = 0; i < n; ++i) {
        int found = -1;
        for (size_t a = 0; a < assignments.size(); ++a) {
            if (used[a]) continue;
            const Tuple& phi = assignments[a];
            bool ok = phi[pos.at(order[i])] == 1;
            for (int j = 0; ok && j < i; ++j) ok = phi[pos.at(order[j])] == 0;
            if (ok) {
                if (found >= 0) throw Error("internal", "tableau row is not unique");
                found = static_cast<int>(a);
            }
        }
        if (found < 0) throw Error("internal", "missing tableau row");
        used[found] = true;
        Tuple row(n);
        for (int j = 0; j < n; ++j) row[j] = assignments[found][pos.at(order[j])];
        t.rows.push_back(std::move(row));
    }
    t.rows.emplace_back(n, 0);  // the all-zero assignment
    bool have_zero = false;
    for (size_t a = 0; a < assignments.size(); ++a) {
        bool zero = std::all_of(assignments[a].begin(), assignments[a].end(),
                                [](Value v) { return v == 0; });
        if (zero && !used[a]) have_zero = true;
    }
    if (!have_zero) throw Error("internal", "all-zero row missing from the completion");
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < std::min(i, n); ++j)
            if (t.rows[i][j] != 0) throw Error("internal", "tableau is not upper triangular");
    return t;
}

void require_incompressible_complete(const TVFGraph& g) {
    if (!g.complete()) throw Error("precondition-violated", "TVF graph is not complete");
    if (find_compression(g)) throw Error("precondition-violated", "TVF graph is compressible");
}

} // namespace

Tableau tableau_01(const TVFGraph& g) {
    if (!g.e00.empty() || !g.e11.empty())
        throw Error("precondition-violated", "expected only 01 edges");
    require_incompressible_complete(g);
    TableauOrder ord = triangular_order(g, false);
    return rows_from_order(g, ord.order);
}

Tableau tableau_no00(const TVFGraph& g) {
    if (!g.e00.empty()) throw Error("precondition-violated", "expected no 00 edges");
    require_incompressible_complete(g);
    TableauOrder ord = triangular_order(g, false);
    return rows_from_order(g, ord.order);
}

std::pair<std::vector<int>, Tableau> tableau_negated(const TVFGraph& g) {
    require_incompressible_complete(g);
    TableauOrder ord = triangular_order(g, true);
    return {ord.negated, rows_from_order(negate_graph_at(g, ord.negated), ord.order)};
}

Constraint one_in_three() {
    return Constraint::make(2, {0, 1, 2}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}
Constraint equality2() { return Constraint::make(2, {0, 1}, {{0, 0}, {1, 1}}); }
Constraint negation2() { return Constraint::make(2, {0, 1}, {{0, 1}, {1, 0}}); }

const std::vector<Constraint>& simulation_targets() {
    static const std::vector<Constraint> targets = {
        one_in_three(),
        Constraint::make(2, {0, 1, 2}, {{1, 0, 1}, {0, 1, 1}, {0, 0, 0}}),
        Constraint::make(2, {0, 1, 2}, {{1, 1, 1}, {0, 0, 1}, {0, 1, 0}}),
        Constraint::make(2, {0, 1, 2}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}),
    };
    return targets;
}

namespace {

constexpr int kSlotX = 0, kSlotY = 1, kSlotZ = 2, kSlotZPrime = 3;

MapTarget negate_target(const MapTarget& t) {
    switch (t.kind) {
        case MapTarget::Kind::Var: return MapTarget::to_neg(t.var);
        case MapTarget::Kind::NegVar: return MapTarget::to_var(t.var);
        case MapTarget::Kind::Const: return MapTarget::to_const(1 - t.constant);
    }
    return t;
}

// Extend a map on the incompressible core to the chopped-off variables by
// following the compression chain backwards.
void extend_over_chain(VarMap& r, const std::vector<CompressionWitness>& chain) {
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        switch (it->kind) {
            case CompressionWitness::Kind::Constant:
                r.targets[it->at] = MapTarget::to_const(it->b);
                break;
            case CompressionWitness::Kind::Equality:
                r.targets[it->at] = r.targets.at(it->target);
                break;
            case CompressionWitness::Kind::Negation:
                r.targets[it->at] = negate_target(r.targets.at(it->target));
                break;
        }
    }
}

std::vector<int> present_rows(const Tableau& t, const Constraint& c) {
    std::vector<int> present;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        std::map<int, Value> phi;
        for (size_t j = 0; j < t.variable_order.size(); ++j)
            phi[t.variable_order[j]] = t.rows[i][j];
        if (eval(c, phi)) present.push_back(static_cast<int>(i));
    }
    return present;
}

// Lexicographically first triple i<j<k of present rows whose componentwise
// majority row is not present.
struct MajViolation {
    int i, j, k;
    int maj_row;
};

std::optional<MajViolation> first_maj_violation(const Tableau& t, const std::vector<int>& present) {
    std::map<Tuple, int> row_index;
    for (size_t i = 0; i < t.rows.size(); ++i) row_index[t.rows[i]] = static_cast<int>(i);
    std::set<int> in(present.begin(), present.end());
    for (size_t a = 0; a < present.size(); ++a)
        for (size_t b = a + 1; b < present.size(); ++b)
            for (size_t c = b + 1; c < present.size(); ++c) {
                int i = present[a], j = present[b], k = present[c];
                Tuple maj(t.rows[i].size());
                for (size_t p = 0; p < maj.size(); ++p)
                    maj[p] = (t.rows[i][p] + t.rows[j][p] + t.rows[k][p]) >= 2 ? 1 : 0;
                auto it = row_index.find(maj);
                if (it == row_index.end())
                    throw Error("internal", "completion is not closed under majority");
                if (!in.count(it->second)) return MajViolation{i, j, k, it->second};
            }
    return std::nullopt;
}

Constraint simulation_check(const Constraint& c, const VarMap& r, const Constraint& target) {
    Constraint pushed = pushforward(c, r);
    Constraint restricted = restrict_to(pushed, {kSlotX, kSlotY, kSlotZ});
    if (!(restricted == target))
        throw Error("internal", "simulation postcondition failed: pushforward differs from target");
    return restricted;
}

} // namespace

SimulationResult simulate_one_in_three(const Constraint& c) {
    if (!is_tvf(c)) throw Error("precondition-violated", "constraint is not TVF");
    if (!tvf_graph(c).e00.empty())
        throw Error("precondition-violated", "constraint has a 00 edge");
    if (preserves(Polymorphism::maj(), c).preserved)
        throw Error("precondition-violated", "constraint satisfies the majority polymorphism");

    CompressedConstraint core = compress_single(c, -1);
    for (const CompressionWitness& w : core.chain)
        if (w.kind == CompressionWitness::Kind::Negation ||
            (w.kind == CompressionWitness::Kind::Constant && w.b == 1))
            throw Error("internal", "no-00 graphs only compress by constant 0 or equality");

    TVFGraph g = tvf_graph(core.restricted);
    Tableau t = tableau_no00(g);
    t.present = present_rows(t, core.restricted);
    auto violation = first_maj_violation(t, t.present);
    if (!violation) throw Error("internal", "no majority violation in a non-MAJ constraint");
    int i = violation->i, j = violation->j, k = violation->k;

    int n = static_cast<int>(t.variable_order.size());
    const Tuple &pi = t.rows[i], &pj = t.rows[j], &pk = t.rows[k];

    int h = -1;
    for (int l = j + 1; l < std::min(k, n); ++l)
        if (pi[l] == 1 && pj[l] == 1) {
            h = l;
            break;
        }

    VarMap r;
    bool used_zprime = false;
    for (int l = 0; l < n; ++l) {
        int v = t.variable_order[l];
        int a = pi[l], b = pj[l], cc = pk[l];
        if (a == b && b == cc) {
            r.targets[v] = MapTarget::to_const(a);
        } else if (a == 1 && b == 0 && cc == 0) {
            r.targets[v] = MapTarget::to_var(kSlotX);
        } else if (a == 0 && b == 1 && cc == 0) {
            r.targets[v] = MapTarget::to_var(kSlotY);
        } else if (h >= 0) {
            // Case 1: rows i and j agree from h on, row k is 0 before h.
            if (a == 0 && b == 0 && cc == 1) {
                r.targets[v] = MapTarget::to_var(kSlotZPrime);
                used_zprime = true;
            } else if (a == 1 && b == 1 && cc == 0) {
                r.targets[v] = MapTarget::to_var(kSlotZ);
            } else {
                throw Error("internal", "unexpected column pattern in case 1");
            }
        } else {
            if (a == 0 && b == 0 && cc == 1) {
                r.targets[v] = MapTarget::to_var(kSlotZ);
            } else {
                // exactly two of the three are 1
                r.targets[v] = MapTarget::to_var(kSlotZPrime);
                used_zprime = true;
            }
        }
    }
    extend_over_chain(r, core.chain);

    SimulationResult result;
    result.slot_vars = {kSlotX, kSlotY, kSlotZ};

    const Constraint& target_101 = simulation_targets()[1];  // {(1,0,1),(0,1,1),(0,0,0)}
    if (h >= 0) {
        result.map = r;
        if (used_zprime) result.aux_vars = {kSlotZPrime};
        result.target = simulation_check(c, r, target_101);
        return result;
    }

    // Case 2: decide the subcase from the pushforward itself.
    Constraint pushed = pushforward(c, r);
    bool zero_free = true;
    for (const Tuple& tup : pushed.accepted) {
        int px = pushed.position_of(kSlotX), py = pushed.position_of(kSlotY),
            pz = pushed.position_of(kSlotZ);
        if (tup[px] == 0 && tup[py] == 0 && tup[pz] == 0) zero_free = false;
    }
    if (zero_free) {
        result.map = r;
        if (used_zprime) result.aux_vars = {kSlotZPrime};
        result.target = simulation_check(c, r, one_in_three());
        return result;
    }

    if (!used_zprime) throw Error("internal", "zero assignment present but no z' column");
    // r_*C is one of three four-variable constraints; fold z' onto z and pin
    // the slot it determines to the constant 0.
    for (int pinned : {kSlotX, kSlotY, kSlotZ}) {
        VarMap s;
        int next = kSlotX;
        for (int slot : {kSlotX, kSlotY, kSlotZ}) {
            if (slot == pinned) {
                s.targets[slot] = MapTarget::to_const(0);
            } else {
                s.targets[slot] = MapTarget::to_var(next);
                next = next == kSlotX ? kSlotY : kSlotZ;
            }
        }
        s.targets[kSlotZPrime] = MapTarget::to_var(kSlotZ);
        VarMap composed = compose(s, r);
        try {
            result.map = composed;
            result.target = simulation_check(c, composed, target_101);
            return result;
        } catch (const Error&) {
            continue;
        }
    }
    throw Error("internal", "case 2 fold did not produce the expected target");
}

SimulationResult simulate_one_in_three_neg(const Constraint& c) {
    if (!is_tvf(c)) throw Error("precondition-violated", "constraint is not TVF");
    if (preserves(Polymorphism::maj(), c).preserved)
        throw Error("precondition-violated", "constraint satisfies the majority polymorphism");

    CompressedConstraint core = compress_single(c, -1);
    TVFGraph g = tvf_graph(core.restricted);
    auto [negated, t] = tableau_negated(g);
    std::set<int> in_u(negated.begin(), negated.end());

    Constraint negated_core = negated.empty() ? core.restricted : negate_at(core.restricted, negated);
    t.present = present_rows(t, negated_core);
    auto violation = first_maj_violation(t, t.present);
    if (!violation) throw Error("internal", "no majority violation in a non-MAJ constraint");
    int i = violation->i, j = violation->j, k = violation->k;

    int n = static_cast<int>(t.variable_order.size());
    const Tuple &pi = t.rows[i], &pj = t.rows[j], &pk = t.rows[k];

    VarMap r;
    for (int l = 0; l < n; ++l) {
        int v = t.variable_order[l];
        bool flip = in_u.count(v) > 0;
        int a = pi[l], b = pj[l], cc = pk[l];
        MapTarget target;
        if (a == b && b == cc) target = MapTarget::to_const(a);
        else if (a == 1 && b == 0 && cc == 0) target = MapTarget::to_var(kSlotX);
        else if (a == 0 && b == 1 && cc == 1) target = MapTarget::to_neg(kSlotX);
        else if (a == 0 && b == 1 && cc == 0) target = MapTarget::to_var(kSlotY);
        else if (a == 1 && b == 0 && cc == 1) target = MapTarget::to_neg(kSlotY);
        else if (a == 0 && b == 0 && cc == 1) target = MapTarget::to_var(kSlotZ);
        else target = MapTarget::to_neg(kSlotZ);  // (1,1,0)
        r.targets[v] = flip ? negate_target(target) : target;
    }
    extend_over_chain(r, core.chain);

    SimulationResult result;
    result.slot_vars = {kSlotX, kSlotY, kSlotZ};
    result.negated_at = negated;
    result.map = r;
    result.target = simulation_check(c, r, one_in_three());
    return result;
}

} // namespace qcsp
