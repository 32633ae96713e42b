#include "qcsp/gadgets.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "qcsp/schaefer.hpp"

namespace qcsp {

namespace {

Constraint one_hot3_on(const std::vector<int>& ctx) {
    return Constraint::make(2, ctx, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

Constraint neq_k_on(int k, int u, int v) {
    std::vector<Tuple> acc;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (a != b) acc.push_back({a, b});
    return Constraint::make(k, {u, v}, acc);
}

// Candidate order used whenever the pipeline picks among eligible constraints.
bool smaller_candidate(const Constraint& a, const Constraint& b) {
    if (a.arity() != b.arity()) return a.arity() < b.arity();
    return a.accepted < b.accepted;
}

// Copies src's constraints into dst; `identify` pins src variables onto
// existing dst variables, everything else gets a fresh variable. Links are
// remapped along. Returns the variable translation.
std::map<int, int> splice(ConstraintSystem& dst, std::vector<TheBendsLink>& dst_links,
                          const GadgetOutput& src, const std::map<int, int>& identify,
                          const std::string& prefix) {
    std::map<int, int> tr = identify;
    for (const Variable& v : src.cs.variables)
        if (!tr.count(v.id)) tr[v.id] = dst.add_variable(prefix + "." + v.name);
    for (size_t i = 0; i < src.cs.constraints.size(); ++i) {
        const Constraint& c = src.cs.constraints[i];
        std::vector<int> ctx;
        for (int v : c.context) ctx.push_back(tr.at(v));
        // contexts may reorder under translation; make() permutes the tuples
        dst.constraints.push_back(Constraint::make(c.k, ctx, c.accepted));
        TheBendsLink link;
        if (i < src.links.size()) {
            link = src.links[i];
            for (auto& [p, inst] : link.kept_to_instance) inst = tr.at(inst);
        }
        dst_links.push_back(std::move(link));
    }
    return tr;
}

} // namespace

void certify_pair_extensions(GadgetOutput& g, const std::string& role_a,
                             const std::string& role_b) {
    int va = g.distinguished.at(role_a);
    int vb = g.distinguished.at(role_b);
    int k = g.cs.k;
    g.pair_witnesses.clear();
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            SatResult r = is_satisfiable_pinned(g.cs, {{va, a}, {vb, b}});
            if (!r.satisfiable)
                throw Error("certificate-failed",
                            "no extension for pair value (" + std::to_string(a) + "," +
                                std::to_string(b) + ")");
            g.pair_witnesses.push_back(r.witness);
        }
}

Constraint satisfying_restriction(const ConstraintSystem& s, const std::vector<int>& vars) {
    std::vector<Tuple> acc;
    std::uint64_t space = s.assignment_space();
    if (space > kDefaultSearchBound)
        throw Error("search-bound-exceeded", "restriction search above the bound");
    int n = static_cast<int>(s.variables.size());
    for_each_tuple(s.k, n, [&](const Tuple& phi) {
        for (const Constraint& c : s.constraints)
            if (!eval_full(c, phi)) return;
        Tuple t;
        for (int v : vars) t.push_back(phi[v]);
        acc.push_back(t);
    });
    return Constraint::make(s.k, vars, acc);
}

GadgetOutput basic_gadget(const Constraint& base, const std::vector<std::string>& negated) {
    if (base.k != 2 || base.arity() != 3)
        throw Error("bad-base", "base must be a boolean 3-variable constraint");
    // Identify the negation count of the base against the 1-in-3 constraint.
    std::optional<std::vector<int>> neg_positions;
    std::vector<int> positions = {0, 1, 2};
    for (int mask = 0; mask < 8 && !neg_positions; ++mask) {
        std::vector<int> sub;
        for (int p = 0; p < 3; ++p)
            if (mask & (1 << p)) sub.push_back(p);
        if (negate_at(one_in_three(), sub).accepted == base.accepted) neg_positions = sub;
    }
    if (!neg_positions)
        throw Error("bad-base", "base is not the 1-in-3 constraint up to negations");
    size_t n_neg = neg_positions->size();

    GadgetOutput g;
    g.cs.k = 2;
    const char* names[6] = {"u", "v", "w", "x", "y", "z"};
    std::map<std::string, int> id;
    for (const char* name : names) id[name] = g.cs.add_variable(name);
    std::set<std::string> marked(negated.begin(), negated.end());
    for (const std::string& m : marked)
        if (!id.count(m)) throw Error("bad-negation-pattern", "unknown variable " + m);

    const std::vector<std::vector<std::string>> triangles = {
        {"x", "u", "v"}, {"y", "u", "w"}, {"z", "v", "w"}};
    for (const auto& tri : triangles) {
        std::vector<int> ctx;
        std::vector<int> neg_vars;
        for (const std::string& name : tri) {
            ctx.push_back(id[name]);
            if (marked.count(name)) neg_vars.push_back(id[name]);
        }
        if (neg_vars.size() != n_neg)
            throw Error("bad-negation-pattern",
                        "each triangle must carry exactly the base's negated slots");
        Constraint c = one_hot3_on(ctx);
        if (!neg_vars.empty()) c = negate_at(c, neg_vars);
        g.cs.constraints.push_back(c);
        g.links.push_back({base, {}});
    }
    for (size_t i = 0; i < g.cs.constraints.size(); ++i) {
        // identity links: the instance is the base itself on the triangle
        TheBendsLink& link = g.links[i];
        const Constraint& inst = g.cs.constraints[i];
        // choose a bijection base-context -> triangle matching accepted sets
        std::vector<int> perm = {0, 1, 2};
        bool found = false;
        std::sort(perm.begin(), perm.end());
        do {
            VarMap r;
            for (int p = 0; p < 3; ++p)
                r.targets[base.context[p]] = MapTarget::to_var(inst.context[perm[p]]);
            try {
                if (pushforward(base, r) == inst) {
                    link.kept_to_instance.clear();
                    for (int p = 0; p < 3; ++p)
                        link.kept_to_instance[base.context[p]] = inst.context[perm[p]];
                    found = true;
                    break;
                }
            } catch (const Error&) {
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!found) throw Error("internal", "triangle constraint is not a base relabeling");
    }
    g.distinguished = {{"x", id["x"]}, {"y", id["y"]}};
    g.claimed_constant = 512;
    g.provenance = "basic-commutativity-gadget";
    certify_pair_extensions(g, "x", "y");
    return g;
}

GadgetOutput prism_gadget() {
    GadgetOutput g;
    g.cs.k = 3;
    const char* names[6] = {"x", "y", "z", "x'", "y'", "z'"};
    std::map<std::string, int> id;
    for (const char* name : names) id[name] = g.cs.add_variable(name);
    const std::vector<std::pair<std::string, std::string>> edges = {
        {"x", "y"}, {"y", "z"}, {"z", "x"},   {"x'", "y'"}, {"y'", "z'"},
        {"z'", "x'"}, {"x", "x'"}, {"y", "y'"}, {"z", "z'"}};
    for (const auto& [a, b] : edges) {
        g.cs.constraints.push_back(neq_k_on(3, id[a], id[b]));
        g.links.push_back({neq_k_on(3, 0, 1), {}});
    }
    g.distinguished = {{"x", id["x"]}, {"y'", id["y'"]}};
    g.claimed_constant = 6240;
    g.provenance = "prism-soundness";
    certify_pair_extensions(g, "x", "y'");
    return g;
}

namespace {

struct EdgePick {
    int comp_index;  // within mc.comp
    int u, v;        // edge endpoints (variable ids of the restricted constraint)
};

std::optional<EdgePick> find_edge(const MaximalCompression& mc, bool want11) {
    std::optional<EdgePick> best;
    for (size_t i = 0; i < mc.comp.size(); ++i) {
        const Constraint& c = mc.comp[i].restricted;
        TVFGraph g = tvf_graph(c);
        const auto& edges = want11 ? g.e11 : g.e00;
        if (edges.empty()) continue;
        if (!best || smaller_candidate(c, mc.comp[best->comp_index].restricted)) {
            auto [u, v] = *edges.begin();
            best = EdgePick{static_cast<int>(i), u, v};
        }
    }
    return best;
}

// Single-constraint gadget pinning the merged 11-edge (or 00-edge) endpoint.
GadgetOutput edge_pin_gadget(const MaximalCompression& mc, const EdgePick& pick, bool edge11) {
    const CompressedConstraint& cc = mc.comp[pick.comp_index];
    const Constraint& c = cc.restricted;

    GadgetOutput g;
    g.cs.k = 2;
    std::map<int, int> tr;
    for (int v : c.context)
        if (v != pick.v) tr[v] = g.cs.add_variable("pin.v" + std::to_string(v));
    tr[pick.v] = tr.at(pick.u);
    VarMap r;
    for (int v : c.context) r.targets[v] = MapTarget::to_var(tr.at(v));
    g.cs.constraints.push_back(pushforward(c, r));

    TheBendsLink link;
    link.parent = mc.gamma[cc.gamma_index];
    for (int v : c.context) link.kept_to_instance[v] = tr.at(v);
    g.links.push_back(link);

    g.distinguished["pin"] = tr.at(pick.u);
    g.claimed_constant = c.arity() - 1;
    g.provenance = edge11 ? "zero-from-11-edge" : "one-from-00-edge";

    // the merged endpoint can never take the edge's value
    Value forced = edge11 ? 0 : 1;
    SatResult bad = is_satisfiable_pinned(g.cs, {{tr.at(pick.u), 1 - forced}});
    SatResult good = is_satisfiable_pinned(g.cs, {{tr.at(pick.u), forced}});
    if (bad.satisfiable || !good.satisfiable)
        throw Error("certificate-failed", "pin gadget does not force its value");
    return g;
}

// Finds a constraint excluding the all-`excluded` tuple; returns the gadget
// pinning a fresh variable to 1-excluded via the two-variable wiring.
GadgetOutput excluded_pin_gadget(const MaximalCompression& mc, const EdgePick& edge_pick,
                                 bool edge11) {
    Value excluded = edge11 ? 0 : 1;  // the all-`excluded` assignment is missing from C2
    std::optional<int> c2;
    for (size_t i = 0; i < mc.comp.size(); ++i) {
        const Constraint& c = mc.comp[i].restricted;
        Tuple all(c.arity(), excluded);
        if (!c.accepts(all) &&
            (!c2 || smaller_candidate(c, mc.comp[*c2].restricted)))
            c2 = static_cast<int>(i);
    }
    if (!c2)
        throw Error("precondition-violated",
                    std::string("no constraint excludes the all-") + std::to_string(excluded) +
                        " tuple");

    GadgetOutput g = edge_pin_gadget(mc, edge_pick, edge11);
    int u = g.distinguished.at("pin");
    int uprime = g.cs.add_variable("pin.aux");

    const CompressedConstraint& cc2 = mc.comp[*c2];
    const Constraint& c = cc2.restricted;
    const Tuple& phi0 = c.accepted.front();
    VarMap s;
    for (int p = 0; p < c.arity(); ++p)
        s.targets[c.context[p]] = MapTarget::to_var(phi0[p] == excluded ? u : uprime);
    g.cs.constraints.push_back(pushforward(c, s));

    TheBendsLink link;
    link.parent = mc.gamma[cc2.gamma_index];
    for (int p = 0; p < c.arity(); ++p)
        link.kept_to_instance[c.context[p]] = phi0[p] == excluded ? u : uprime;
    g.links.push_back(link);

    g.distinguished["pin"] = uprime;
    g.claimed_constant = 8 * g.claimed_constant;
    g.provenance = edge11 ? "one-from-11-edge" : "zero-from-00-edge";

    Value forced = 1 - excluded;
    SatResult bad = is_satisfiable_pinned(g.cs, {{uprime, 1 - forced}});
    SatResult good = is_satisfiable_pinned(g.cs, {{uprime, forced}});
    if (bad.satisfiable || !good.satisfiable)
        throw Error("certificate-failed", "pin gadget does not force its value");
    return g;
}

} // namespace

ConstGadgets const_gadgets(const MaximalCompression& mc) {
    auto pick = find_edge(mc, true);
    if (!pick) throw Error("precondition-violated", "no incompressible constraint with an 11 edge");
    ConstGadgets g{edge_pin_gadget(mc, *pick, true), excluded_pin_gadget(mc, *pick, true)};
    return g;
}

ConstGadgets const_gadgets_flipped(const MaximalCompression& mc) {
    auto pick = find_edge(mc, false);
    if (!pick) throw Error("precondition-violated", "no incompressible constraint with a 00 edge");
    // the 00 edge pins 1 by identification; the excluded wiring pins 0
    return ConstGadgets{excluded_pin_gadget(mc, *pick, false), edge_pin_gadget(mc, *pick, false)};
}

GadgetOutput negation_gadget(const MaximalCompression& mc) {
    auto pick00 = find_edge(mc, false);
    auto pick11 = find_edge(mc, true);
    if (!pick00 || !pick11)
        throw Error("precondition-violated", "need incompressible constraints with 00 and 11 edges");

    const CompressedConstraint& c00 = mc.comp[pick00->comp_index];
    const CompressedConstraint& c11 = mc.comp[pick11->comp_index];

    GadgetOutput g;
    g.cs.k = 2;
    std::map<int, int> tr00;
    for (int v : c00.restricted.context) tr00[v] = g.cs.add_variable("neq.a" + std::to_string(v));
    {
        VarMap r;
        for (int v : c00.restricted.context) r.targets[v] = MapTarget::to_var(tr00.at(v));
        g.cs.constraints.push_back(pushforward(c00.restricted, r));
        TheBendsLink link;
        link.parent = mc.gamma[c00.gamma_index];
        for (int v : c00.restricted.context) link.kept_to_instance[v] = tr00.at(v);
        g.links.push_back(link);
    }
    int u = tr00.at(pick00->u), v = tr00.at(pick00->v);
    {
        std::map<int, int> tr11;
        tr11[pick11->u] = u;
        tr11[pick11->v] = v;
        for (int w : c11.restricted.context)
            if (!tr11.count(w)) tr11[w] = g.cs.add_variable("neq.b" + std::to_string(w));
        VarMap r;
        for (int w : c11.restricted.context) r.targets[w] = MapTarget::to_var(tr11.at(w));
        g.cs.constraints.push_back(pushforward(c11.restricted, r));
        TheBendsLink link;
        link.parent = mc.gamma[c11.gamma_index];
        for (int w : c11.restricted.context) link.kept_to_instance[w] = tr11.at(w);
        g.links.push_back(link);
    }
    g.distinguished = {{"u", u}, {"v", v}};
    g.claimed_constant =
        4 * std::max(c00.restricted.arity(), c11.restricted.arity());
    g.provenance = "negation-constraint-gadget";

    for (Value a : {0, 1}) {
        SatResult eq = is_satisfiable_pinned(g.cs, {{u, a}, {v, a}});
        SatResult ne = is_satisfiable_pinned(g.cs, {{u, a}, {v, 1 - a}});
        if (eq.satisfiable || !ne.satisfiable)
            throw Error("certificate-failed", "gadget does not force u != v");
    }
    return g;
}

GadgetOutput simulate_gadget(const Constraint& source, const SimulationResult& sim,
                             const std::optional<GadgetOutput>& zero,
                             const std::optional<GadgetOutput>& one,
                             const std::optional<GadgetOutput>& neg,
                             const std::optional<TheBendsLink>& source_parent) {
    GadgetOutput g;
    g.cs.k = 2;
    int x = g.cs.add_variable("sim.x");
    int y = g.cs.add_variable("sim.y");
    int z = g.cs.add_variable("sim.z");
    std::map<int, int> slot_of = {{0, x}, {1, y}, {2, z}};
    for (int aux : sim.aux_vars) slot_of[aux] = g.cs.add_variable("sim.aux" + std::to_string(aux));

    bool used_const[2] = {false, false};
    std::set<int> negated_slots;
    for (const auto& [v, t] : sim.map.targets) {
        (void)v;
        if (t.kind == MapTarget::Kind::Const) used_const[t.constant] = true;
        if (t.kind == MapTarget::Kind::NegVar) negated_slots.insert(t.var);
    }
    std::map<int, int> partner;
    for (int slot : negated_slots)
        partner[slot] = g.cs.add_variable("sim.not" + std::to_string(slot));
    int pin0 = used_const[0] ? g.cs.add_variable("sim.x0") : -1;
    int pin1 = used_const[1] ? g.cs.add_variable("sim.x1") : -1;

    // the big constraint: source pushed onto slots, partners, and pins
    VarMap t;
    for (const auto& [v, target] : sim.map.targets) {
        switch (target.kind) {
            case MapTarget::Kind::Var: t.targets[v] = MapTarget::to_var(slot_of.at(target.var)); break;
            case MapTarget::Kind::NegVar:
                t.targets[v] = MapTarget::to_var(partner.at(target.var));
                break;
            case MapTarget::Kind::Const:
                t.targets[v] = MapTarget::to_var(target.constant == 0 ? pin0 : pin1);
                break;
        }
    }
    g.cs.constraints.push_back(pushforward(source, t));
    {
        TheBendsLink link;
        if (source_parent) {
            link.parent = source_parent->parent;
            for (const auto& [p, sv] : source_parent->kept_to_instance)
                link.kept_to_instance[p] = t.targets.at(sv).var;
        } else {
            link.parent = source;
            for (int v : source.context) link.kept_to_instance[v] = t.targets.at(v).var;
        }
        g.links.push_back(link);
    }

    Rational claimed = 1;
    std::string provenance = "simulation";
    bool nontrivial = used_const[0] || used_const[1] || !sim.aux_vars.empty();
    if (nontrivial) {
        int wprime = 3 + static_cast<int>(sim.aux_vars.size());
        claimed *= 24 * (wprime + 2);
        provenance += "*24(|W'|+2)";
    }

    auto wire_pin = [&](int pin, Value val, const std::optional<GadgetOutput>& gadget) {
        if (pin < 0) return;
        if (gadget) {
            splice(g.cs, g.links, *gadget, {{gadget->distinguished.at("pin"), pin}},
                   val == 0 ? "zero" : "one");
            claimed *= gadget->claimed_constant;
            provenance += "*" + gadget->provenance;
        } else {
            g.cs.constraints.push_back(Constraint::make(2, {pin}, {{val}}));
            g.links.push_back({});
        }
    };
    wire_pin(pin0, 0, zero);
    wire_pin(pin1, 1, one);

    if (!partner.empty()) {
        claimed *= 4 * (source.arity() + 1);
        provenance += "*4(|V|+1)";
        for (const auto& [slot, bar] : partner) {
            if (neg) {
                splice(g.cs, g.links, *neg,
                       {{neg->distinguished.at("u"), slot_of.at(slot)},
                        {neg->distinguished.at("v"), bar}},
                       "neq" + std::to_string(slot));
            } else {
                g.cs.constraints.push_back(
                    Constraint::make(2, {slot_of.at(slot), bar}, {{0, 1}, {1, 0}}));
                g.links.push_back({});
            }
        }
        if (neg) {
            claimed *= neg->claimed_constant;
            provenance += "*" + neg->provenance;
        }
    }

    g.distinguished = {{"x", x}, {"y", y}, {"z", z}};
    g.claimed_constant = claimed;
    g.provenance = provenance;

    Constraint realized = satisfying_restriction(g.cs, {x, y, z});
    Constraint expected = Constraint::make(2, {x, y, z}, sim.target.accepted);
    if (!(realized == expected))
        throw Error("certificate-failed", "realized restriction differs from the target");
    return g;
}

namespace {

// Negation position set of a simulation target within the 1-in-3 family.
std::vector<int> target_negations(const Constraint& target) {
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> sub;
        for (int p = 0; p < 3; ++p)
            if (mask & (1 << p)) sub.push_back(p);
        if (negate_at(one_in_three(), sub).accepted == target.accepted) return sub;
    }
    throw Error("internal", "target is not a negated 1-in-3 constraint");
}

SimulationResult flip_simulation(const Constraint& c, const SimulationResult& plain) {
    SimulationResult out = plain;
    for (auto& [v, t] : out.map.targets)
        if (t.kind == MapTarget::Kind::Const) t.constant = 1 - t.constant;
    out.target = negate_at(plain.target, plain.target.context);
    Constraint pushed = restrict_to(pushforward(c, out.map), {0, 1, 2});
    if (!(pushed == out.target))
        throw Error("internal", "flipped simulation postcondition failed");
    return out;
}

} // namespace

GadgetOutput general_commutativity_gadget(const std::vector<Constraint>& gamma) {
    for (const Constraint& c : gamma)
        if (c.k != 2) throw Error("non-boolean", "the general gadget needs a boolean family");
    if (!is_tvf(gamma)) throw Error("non-tvf", "use the empty-constraint replacement instead");
    DichotomyVerdict verdict = classify_boolean(gamma);
    if (!verdict.np_complete)
        throw Error("not-np-complete", "the family is polynomial-time; certificate: " +
                                           verdict.certificates.front().name);

    MaximalCompression mc = maximal_compression(gamma);

    std::optional<int> c1;
    for (size_t i = 0; i < mc.comp.size(); ++i) {
        if (preserves(Polymorphism::maj(), mc.comp[i].restricted).preserved) continue;
        if (!c1 || smaller_candidate(mc.comp[i].restricted, mc.comp[*c1].restricted))
            c1 = static_cast<int>(i);
    }
    if (!c1) throw Error("internal", "no majority violation in an NP-complete family");
    const Constraint& source = mc.comp[*c1].restricted;
    TVFGraph g1 = tvf_graph(source);

    SimulationResult sim;
    std::optional<GadgetOutput> zero, one, neg;
    if (g1.e00.empty()) {
        sim = simulate_one_in_three(source);
        ConstGadgets cg = const_gadgets(mc);
        zero = cg.zero;
        one = cg.one;
    } else if (g1.e11.empty()) {
        Constraint flipped = negate_at(source, source.context);
        sim = flip_simulation(source, simulate_one_in_three(flipped));
        ConstGadgets cg = const_gadgets_flipped(mc);
        zero = cg.zero;
        one = cg.one;
    } else {
        sim = simulate_one_in_three_neg(source);
        ConstGadgets cg = const_gadgets(mc);
        zero = cg.zero;
        one = cg.one;
        neg = negation_gadget(mc);
    }

    TheBendsLink source_link;
    source_link.parent = mc.gamma[mc.comp[*c1].gamma_index];
    for (int v : source.context) source_link.kept_to_instance[v] = v;
    GadgetOutput realization = simulate_gadget(source, sim, zero, one, neg, source_link);
    std::vector<int> neg_slots = target_negations(sim.target);

    static const std::vector<std::vector<std::string>> mark_sets = {
        {}, {"u", "z"}, {"u", "v", "w"}, {"u", "v", "w", "x", "y", "z"}};
    const std::vector<std::string>& marks_list = mark_sets[neg_slots.size()];
    std::set<std::string> marks(marks_list.begin(), marks_list.end());

    GadgetOutput out;
    out.cs.k = 2;
    const char* names[6] = {"u", "v", "w", "x", "y", "z"};
    std::map<std::string, int> id;
    for (const char* name : names) id[name] = out.cs.add_variable(name);

    const std::vector<std::vector<std::string>> triangles = {
        {"x", "u", "v"}, {"y", "u", "w"}, {"z", "v", "w"}};
    int copy = 0;
    for (const auto& tri : triangles) {
        std::vector<int> marked, unmarked;
        for (const std::string& name : tri)
            (marks.count(name) ? marked : unmarked).push_back(id[name]);
        if (marked.size() != neg_slots.size())
            throw Error("internal", "triangle mark count mismatch");
        std::sort(marked.begin(), marked.end());
        std::sort(unmarked.begin(), unmarked.end());

        std::map<int, int> identify;
        size_t mi = 0, ui = 0;
        std::set<int> negset(neg_slots.begin(), neg_slots.end());
        for (int slot = 0; slot < 3; ++slot) {
            int slot_var = realization.distinguished.at(slot == 0 ? "x" : slot == 1 ? "y" : "z");
            if (negset.count(slot)) identify[slot_var] = marked[mi++];
            else identify[slot_var] = unmarked[ui++];
        }
        splice(out.cs, out.links, realization, identify, "t" + std::to_string(copy));
        ++copy;
    }

    ConstraintSystem bent = the_bends(out.cs, out.links);
    out.cs = bent;
    out.links.clear();
    out.distinguished = {{"x", id["x"]}, {"y", id["y"]}};
    Rational bends_factor = 0;
    for (const Constraint& c : gamma) bends_factor = std::max(bends_factor, Rational(c.arity()));
    out.claimed_constant = 512 * realization.claimed_constant * bends_factor;
    out.provenance = "general-commutativity-gadget: 512*" + realization.provenance + "*L(bends)";
    certify_pair_extensions(out, "x", "y");
    return out;
}

ConstraintSystem replace_empty_nontvf(const ConstraintSystem& s, const Constraint& witness,
                                      int witness_u, int witness_v) {
    s.validate();
    int pu = witness.position_of(witness_u), pv = witness.position_of(witness_v);
    if (pu < 0 || pv < 0 || witness_u == witness_v)
        throw Error("missing-variable", "witness pair must be two context variables");
    for (int a = 0; a < s.k; ++a)
        for (int b = 0; b < s.k; ++b) {
            bool found = false;
            for (const Tuple& t : witness.accepted)
                if (t[pu] == a && t[pv] == b) found = true;
            if (!found)
                throw Error("precondition-violated", "witness pair is falsifiable");
        }
    ConstraintSystem out;
    out.k = s.k;
    out.variables = s.variables;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        if (!c.is_empty_constraint()) {
            out.constraints.push_back(c);
            continue;
        }
        if (c.arity() != 2)
            throw Error("precondition-violated", "empty constraints must be on two variables");
        VarMap r;
        r.targets[witness_u] = MapTarget::to_var(c.context[0]);
        r.targets[witness_v] = MapTarget::to_var(c.context[1]);
        for (int w : witness.context) {
            if (w == witness_u || w == witness_v) continue;
            int fresh = out.add_variable("e" + std::to_string(i) + ".z" + std::to_string(w));
            r.targets[w] = MapTarget::to_var(fresh);
        }
        out.constraints.push_back(pushforward(witness, r));
    }
    return out;
}

std::optional<NonTvfWitness> find_non_tvf_witness(const std::vector<Constraint>& gamma) {
    for (size_t i = 0; i < gamma.size(); ++i) {
        const Constraint& c = gamma[i];
        for (int p = 0; p < c.arity(); ++p)
            for (int q = 0; q < c.arity(); ++q) {
                if (p == q) continue;
                int total = c.k * c.k;
                std::set<std::pair<Value, Value>> seen;
                for (const Tuple& t : c.accepted) seen.insert({t[p], t[q]});
                if (static_cast<int>(seen.size()) == total)
                    return NonTvfWitness{static_cast<int>(i), c.context[p], c.context[q]};
            }
    }
    return std::nullopt;
}

ConstraintSystem the_bends(const ConstraintSystem& s, const std::vector<TheBendsLink>& links) {
    if (links.size() != s.constraints.size())
        throw Error("bad-link", "one link per constraint required");
    ConstraintSystem out;
    out.k = s.k;
    out.variables = s.variables;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& inst = s.constraints[i];
        const TheBendsLink& link = links[i];
        if (link.kept_to_instance.empty() && link.parent.context.empty())
            throw Error("bad-link", "constraint " + std::to_string(i) + " has no parent link");
        std::vector<int> kept;
        for (const auto& [p, v] : link.kept_to_instance) {
            (void)v;
            kept.push_back(p);
        }
        VarMap kept_map;
        for (const auto& [p, v] : link.kept_to_instance) kept_map.targets[p] = MapTarget::to_var(v);
        Constraint check = pushforward(restrict_to(link.parent, kept), kept_map);
        if (!(check == inst))
            throw Error("bad-link", "link does not reproduce instance constraint " +
                                        std::to_string(i));
        VarMap full = kept_map;
        for (int p : link.parent.context)
            if (!full.targets.count(p)) {
                int fresh =
                    out.add_variable("bend" + std::to_string(i) + ".x" + std::to_string(p));
                full.targets[p] = MapTarget::to_var(fresh);
            }
        out.constraints.push_back(pushforward(link.parent, full));
    }
    return out;
}

ReweightedSystem replace_empty_3col(const ConstraintSystem& s, const std::vector<Rational>& pi) {
    s.validate();
    if (s.k != 3) throw Error("precondition-violated", "3-colouring replacement needs k = 3");
    if (pi.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");
    ReweightedSystem out;
    out.cs.k = 3;
    out.cs.variables = s.variables;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        if (c.arity() != 2)
            throw Error("precondition-violated", "expected a 2-CS");
        if (!c.is_empty_constraint()) {
            out.cs.constraints.push_back(c);
            out.dist.push_back(pi[i]);
            continue;
        }
        int x = c.context[0], yp = c.context[1];
        int y = out.cs.add_variable("p" + std::to_string(i) + ".y");
        int z = out.cs.add_variable("p" + std::to_string(i) + ".z");
        int xp = out.cs.add_variable("p" + std::to_string(i) + ".x'");
        int zp = out.cs.add_variable("p" + std::to_string(i) + ".z'");
        const std::vector<std::pair<int, int>> edges = {{x, y},  {y, z},  {z, x},
                                                        {xp, yp}, {yp, zp}, {zp, xp},
                                                        {x, xp}, {y, yp}, {z, zp}};
        for (auto [a, b] : edges) {
            out.cs.constraints.push_back(neq_k_on(3, a, b));
            out.dist.push_back(pi[i] / 9);
        }
    }
    return out;
}

ReweightedSystem cv_to_2csp(const ConstraintSystem& s, const std::vector<Rational>& pi, int k) {
    s.validate();
    if (s.k != 2) throw Error("precondition-violated", "expected a boolean one-hot system");
    if (k < 3) throw Error("precondition-violated", "the construction needs k >= 3");
    if (pi.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");

    // the one-hot template on [k]
    std::vector<Tuple> hot;
    for (int a = 0; a < k; ++a) {
        Tuple t(k, 0);
        t[a] = 1;
        hot.push_back(t);
    }

    ReweightedSystem out;
    out.cs.k = k;
    out.cs.variables = s.variables;
    std::vector<int> question_var(s.constraints.size());
    for (size_t i = 0; i < s.constraints.size(); ++i)
        question_var[i] = out.cs.add_variable("q" + std::to_string(i));

    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        // reconstruct a map r: [k] -> V_i with r_* (one-hot) = C_i
        std::vector<int> r(k, 0);
        std::function<bool(int)> search = [&](int pos) {
            if (pos == k) {
                std::vector<Tuple> acc;
                for_each_tuple(2, c.arity(), [&](const Tuple& t) {
                    Tuple composed(k);
                    for (int p = 0; p < k; ++p) composed[p] = t[r[p]];
                    int count = 0;
                    for (int p = 0; p < k; ++p) count += composed[p];
                    if (count == 1) acc.push_back(t);
                });
                std::sort(acc.begin(), acc.end());
                return acc == c.accepted;
            }
            for (int p = 0; p < c.arity(); ++p) {
                r[pos] = p;
                if (search(pos + 1)) return true;
            }
            return false;
        };
        if (!search(0))
            throw Error("precondition-violated",
                        "constraint " + std::to_string(i) + " is not a one-hot pushforward");

        for (int pos = 0; pos < c.arity(); ++pos) {
            int x = c.context[pos];
            std::vector<Tuple> pairs;  // (y_i value a, x value b)
            for (int a = 0; a < k; ++a) {
                // f with f o r = c_a; positions identified by r must agree, and
                // positions outside the image of r stay free
                std::vector<int> f(c.arity(), -1);
                bool consistent = true;
                for (int p = 0; p < k; ++p) {
                    int val = hot[a][p];
                    if (f[r[p]] < 0) f[r[p]] = val;
                    else if (f[r[p]] != val) consistent = false;
                }
                if (!consistent) continue;
                if (f[pos] == 0) {
                    pairs.push_back({a, 0});
                } else if (f[pos] == 1) {
                    for (int b = 1; b < k; ++b) pairs.push_back({a, b});
                } else {
                    for (int b = 0; b < k; ++b) pairs.push_back({a, b});
                }
            }
            out.cs.constraints.push_back(
                Constraint::make(k, {question_var[i], x}, pairs));
            out.dist.push_back(pi[i] / c.arity());
        }
    }
    return out;
}

CcExpandResult cc_expand(const ConstraintSystem& s, const std::vector<Rational>& pi) {
    s.validate();
    if (pi.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");
    // C_0 with a free variable: every alphabet value appears at some position
    std::optional<std::pair<int, int>> anchor;  // (constraint, position)
    for (size_t i = 0; i < s.constraints.size() && !anchor; ++i) {
        const Constraint& c = s.constraints[i];
        for (int p = 0; p < c.arity() && !anchor; ++p) {
            std::set<Value> seen;
            for (const Tuple& t : c.accepted) seen.insert(t[p]);
            if (static_cast<int>(seen.size()) == s.k) anchor = {static_cast<int>(i), p};
        }
    }
    if (!anchor)
        throw Error("precondition-violated", "no constraint with a free variable");

    const Constraint& c0 = s.constraints[anchor->first];
    int free_var = c0.context[anchor->second];

    CcExpandResult out;
    out.anchor_template = anchor->first;
    out.cs.k = s.k;
    out.cs.variables = s.variables;
    out.cs.constraints = s.constraints;
    int m = static_cast<int>(s.constraints.size());
    int nv = static_cast<int>(s.variables.size());

    for (int i = 0; i < m; ++i) out.pi_constraints.push_back(pi[i] / 2);
    for (int x = 0; x < nv; ++x) {
        VarMap r;
        r.targets[free_var] = MapTarget::to_var(x);
        for (int u : c0.context) {
            if (u == free_var) continue;
            int fresh = out.cs.add_variable("anchor" + std::to_string(x) + ".u" +
                                            std::to_string(u));
            r.targets[u] = MapTarget::to_var(fresh);
        }
        out.cs.constraints.push_back(pushforward(c0, r));
        Rational mass = 0;
        for (int i = 0; i < m; ++i)
            if (s.constraints[i].position_of(x) >= 0) mass += pi[i] / (2 * s.constraints[i].arity());
        out.pi_constraints.push_back(mass);
    }
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < s.constraints[i].arity(); ++p) {
            int x = s.constraints[i].context[p];
            Rational w = pi[i] / s.constraints[i].arity();
            if (w > 0) out.pi_pairs.w[{i, m + x}] += w;
        }
    return out;
}

SubdivideResult subdivide(const ConstraintSystem& b, const PairDist& pi,
                          const std::vector<std::vector<Constraint>>& clauses) {
    b.validate();
    if (b.k != 2) throw Error("precondition-violated", "subdivision is defined for boolean systems");
    if (clauses.size() != b.constraints.size())
        throw Error("bad-input", "one clause list per constraint required");

    SubdivideResult out;
    out.cs.k = 2;
    out.cs.variables = b.variables;
    for (size_t i = 0; i < b.constraints.size(); ++i) {
        const Constraint& c = b.constraints[i];
        if (clauses[i].empty()) throw Error("bad-input", "empty clause list");
        for (const Constraint& d : clauses[i])
            for (int v : d.context)
                if (c.position_of(v) < 0)
                    throw Error("pair-coverage-violated",
                                "clause variable outside the parent context");
        for (int p = 0; p < c.arity(); ++p)
            for (int q = p; q < c.arity(); ++q) {
                bool covered = false;
                for (const Constraint& d : clauses[i])
                    if (d.position_of(c.context[p]) >= 0 && d.position_of(c.context[q]) >= 0)
                        covered = true;
                if (!covered)
                    throw Error("pair-coverage-violated",
                                "pair (" + b.variables[c.context[p]].name + "," +
                                    b.variables[c.context[q]].name + ") uncovered in constraint " +
                                    std::to_string(i));
            }
        // conjunction check by enumeration over the parent context
        bool mismatch = false;
        for_each_tuple(2, c.arity(), [&](const Tuple& t) {
            bool in_all = true;
            for (const Constraint& d : clauses[i]) {
                Tuple sub(d.arity());
                for (int p = 0; p < d.arity(); ++p) sub[p] = t[c.position_of(d.context[p])];
                if (!d.accepts(sub)) in_all = false;
            }
            if (in_all != c.accepts(t)) mismatch = true;
        });
        if (mismatch) throw Error("conjunction-mismatch",
                                  "clauses do not conjoin to constraint " + std::to_string(i));
        for (size_t j = 0; j < clauses[i].size(); ++j) {
            out.cs.constraints.push_back(clauses[i][j]);
            out.index_map.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
    }
    // pi_sub(ij,kl) = pi(i,k) / (m_i m_k)
    std::vector<int> first_index(b.constraints.size(), 0);
    for (size_t t = 0; t < out.index_map.size(); ++t)
        if (out.index_map[t].second == 0) first_index[out.index_map[t].first] = static_cast<int>(t);
    for (const auto& [p, q] : pi.w) {
        if (q == 0) continue;
        auto [i, kk] = p;
        int mi = static_cast<int>(clauses[i].size());
        int mk = static_cast<int>(clauses[kk].size());
        for (int a = 0; a < mi; ++a)
            for (int c2 = 0; c2 < mk; ++c2)
                out.dist.w[{first_index[i] + a, first_index[kk] + c2}] = q / (mi * mk);
    }
    return out;
}

std::vector<std::vector<Constraint>> canonical_decomposition(const ConstraintSystem& b) {
    std::vector<std::vector<Constraint>> out;
    for (const Constraint& c : b.constraints) {
        std::vector<Constraint> pairwise;
        if (c.arity() >= 2) {
            for (int p = 0; p < c.arity(); ++p)
                for (int q = p + 1; q < c.arity(); ++q)
                    pairwise.push_back(restrict_to(c, {c.context[p], c.context[q]}));
        }
        bool works = !pairwise.empty();
        if (works) {
            for_each_tuple(2, c.arity(), [&](const Tuple& t) {
                bool in_all = true;
                for (const Constraint& d : pairwise) {
                    Tuple sub(d.arity());
                    for (int p = 0; p < d.arity(); ++p) sub[p] = t[c.position_of(d.context[p])];
                    if (!d.accepts(sub)) in_all = false;
                }
                if (in_all != c.accepts(t)) works = false;
            });
        }
        if (works) out.push_back(pairwise);
        else out.push_back({c});
    }
    return out;
}

OracularizeResult oracularize(const GameSpec& g) {
    g.validate();
    if (!g.synchronous) throw Error("precondition-violated", "oracularization needs a synchronous game");
    OracularizeResult out;
    out.cs.k = 2;
    int nq = static_cast<int>(g.questions.size());

    std::vector<std::vector<int>> qvars(nq);
    std::vector<int> bits(nq);
    for (int i = 0; i < nq; ++i) {
        int count = g.answer_count[i];
        int m = 1;
        while ((1 << m) < count) ++m;
        bits[i] = m;
        for (int bpos = 0; bpos < m; ++bpos)
            qvars[i].push_back(out.cs.add_variable("q" + std::to_string(i) + ".b" +
                                                   std::to_string(bpos)));
    }
    auto encode = [&](int i, int a) {
        Tuple t(bits[i]);
        for (int bpos = 0; bpos < bits[i]; ++bpos) t[bpos] = (a >> bpos) & 1;
        return t;
    };

    std::map<int, int> question_constraint;   // game question -> CS constraint index
    std::map<std::pair<int, int>, int> pair_constraint;
    for (int i = 0; i < nq; ++i) {
        std::vector<Tuple> acc;
        for (int a = 0; a < g.answer_count[i]; ++a) acc.push_back(encode(i, a));
        question_constraint[i] = static_cast<int>(out.cs.constraints.size());
        out.cs.constraints.push_back(Constraint::make(2, qvars[i], acc));
    }
    for (const auto& [p, mass] : g.dist.w) {
        if (mass == 0) continue;
        auto [i, j] = p;
        std::vector<int> ctx = qvars[i];
        if (j != i) ctx.insert(ctx.end(), qvars[j].begin(), qvars[j].end());
        std::vector<Tuple> acc;
        for (int a = 0; a < g.answer_count[i]; ++a)
            for (int b = 0; b < g.answer_count[j]; ++b) {
                if (!g.predicate(a, b, i, j)) continue;
                if (i == j && a != b) continue;
                Tuple t = encode(i, a);
                if (j != i) {
                    Tuple tb = encode(j, b);
                    t.insert(t.end(), tb.begin(), tb.end());
                }
                acc.push_back(t);
            }
        pair_constraint[{i, j}] = static_cast<int>(out.cs.constraints.size());
        out.pair_questions.push_back(static_cast<int>(out.cs.constraints.size()));
        out.cs.constraints.push_back(Constraint::make(2, ctx, acc));
    }
    for (const auto& [p, mass] : g.dist.w) {
        if (mass == 0) continue;
        auto [i, j] = p;
        int pc = pair_constraint.at({i, j});
        int qi = question_constraint.at(i), qj = question_constraint.at(j);
        out.dist.w[{pc, qi}] += mass / 8;
        out.dist.w[{pc, qj}] += mass / 8;
        out.dist.w[{qi, pc}] += mass / 8;
        out.dist.w[{qj, pc}] += mass / 8;
        out.dist.w[{pc, pc}] += mass / 2;
    }
    out.game = cc_game(out.cs, out.dist);
    return out;
}

ConstraintSystem one_in_three_cs() {
    ConstraintSystem s;
    s.k = 2;
    s.add_variable("x");
    s.add_variable("y");
    s.add_variable("z");
    s.constraints.push_back(one_hot3_on({0, 1, 2}));
    return s;
}

ConstraintSystem colouring_cs(int k, const std::vector<std::pair<int, int>>& edges, int n) {
    ConstraintSystem s;
    s.k = k;
    for (int i = 0; i < n; ++i) s.add_variable("v" + std::to_string(i));
    for (auto [u, v] : edges) s.constraints.push_back(neq_k_on(k, u, v));
    return s;
}

ConstraintSystem triangle_3col() { return colouring_cs(3, {{0, 1}, {1, 2}, {0, 2}}, 3); }

ConstraintSystem k4_3col() {
    return colouring_cs(3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 4);
}

} // namespace qcsp
