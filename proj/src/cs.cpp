#include "qcsp/cs.hpp"

#include <algorithm>
#include <numeric>

namespace qcsp {

Constraint Constraint::make(int k, std::vector<int> context, std::vector<Tuple> accepted) {
    if (k < 2) throw Error("bad-alphabet", "alphabet size must be at least 2");
    // Normalize to the global variable order, permuting tuple columns along.
    std::vector<int> perm(context.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) { return context[a] < context[b]; });
    std::vector<int> ctx(context.size());
    for (size_t i = 0; i < perm.size(); ++i) ctx[i] = context[perm[i]];
    for (size_t i = 1; i < ctx.size(); ++i)
        if (ctx[i] == ctx[i - 1]) throw Error("duplicate-variable", "context repeats a variable");

    std::vector<Tuple> acc;
    acc.reserve(accepted.size());
    for (const Tuple& t : accepted) {
        if (t.size() != context.size())
            throw Error("bad-tuple", "accepted tuple length does not match context");
        Tuple u(t.size());
        for (size_t i = 0; i < t.size(); ++i) {
            if (t[perm[i]] < 0 || t[perm[i]] >= k)
                throw Error("bad-tuple", "tuple entry outside alphabet");
            u[i] = t[perm[i]];
        }
        acc.push_back(std::move(u));
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    if (acc.empty()) throw Error("empty-constraint-set", "accepted set may not be empty");

    Constraint c;
    c.k = k;
    c.context = std::move(ctx);
    c.accepted = std::move(acc);
    return c;
}

bool Constraint::accepts(const Tuple& t) const {
    return std::binary_search(accepted.begin(), accepted.end(), t);
}

int Constraint::position_of(int var) const {
    auto it = std::lower_bound(context.begin(), context.end(), var);
    if (it == context.end() || *it != var) return -1;
    return static_cast<int>(it - context.begin());
}

bool Constraint::is_empty_constraint() const {
    std::uint64_t total = 1;
    for (size_t i = 0; i < context.size(); ++i) total *= static_cast<std::uint64_t>(k);
    return accepted.size() == total;
}

int ConstraintSystem::add_variable(const std::string& name) {
    int id = static_cast<int>(variables.size());
    variables.push_back({id, name});
    return id;
}

void ConstraintSystem::validate() const {
    if (k < 2) throw Error("bad-alphabet", "alphabet size must be at least 2");
    for (size_t i = 0; i < variables.size(); ++i)
        if (variables[i].id != static_cast<int>(i))
            throw Error("bad-variable-table", "variable ids must be their table index");
    for (const Constraint& c : constraints) {
        if (c.k != k) throw Error("alphabet-mismatch", "constraint alphabet differs from system");
        for (int v : c.context)
            if (v < 0 || v >= static_cast<int>(variables.size()))
                throw Error("missing-variable", "context variable not in the table");
    }
}

std::uint64_t ConstraintSystem::assignment_space() const {
    std::uint64_t total = 1;
    for (size_t i = 0; i < variables.size(); ++i) {
        if (total > (std::uint64_t(1) << 62) / static_cast<std::uint64_t>(k))
            return std::uint64_t(1) << 63;
        total *= static_cast<std::uint64_t>(k);
    }
    return total;
}

bool eval(const Constraint& c, const std::map<int, Value>& phi) {
    Tuple t(c.context.size());
    for (size_t i = 0; i < c.context.size(); ++i) {
        auto it = phi.find(c.context[i]);
        if (it == phi.end())
            throw Error("missing-variable", "assignment undefined on a context variable");
        t[i] = it->second;
    }
    return c.accepts(t);
}

bool eval_full(const Constraint& c, const std::vector<Value>& phi) {
    Tuple t(c.context.size());
    for (size_t i = 0; i < c.context.size(); ++i) {
        int v = c.context[i];
        if (v < 0 || v >= static_cast<int>(phi.size()))
            throw Error("missing-variable", "assignment undefined on a context variable");
        t[i] = phi[v];
    }
    return c.accepts(t);
}

namespace {

Value apply_target(const MapTarget& t, const std::map<int, Value>& phi) {
    switch (t.kind) {
        case MapTarget::Kind::Var: return phi.at(t.var);
        case MapTarget::Kind::NegVar: return 1 - phi.at(t.var);
        case MapTarget::Kind::Const: return t.constant;
    }
    return 0;
}

} // namespace

Constraint pushforward(const Constraint& c, const VarMap& r) {
    std::vector<int> target_vars;
    for (int v : c.context) {
        auto it = r.targets.find(v);
        if (it == r.targets.end())
            throw Error("missing-variable", "map undefined on a context variable");
        const MapTarget& t = it->second;
        if (t.kind == MapTarget::Kind::NegVar && c.k != 2)
            throw Error("negation-on-nonboolean", "negated targets need a boolean alphabet");
        if (t.kind == MapTarget::Kind::Const && (t.constant < 0 || t.constant >= c.k))
            throw Error("alphabet-mismatch", "constant target outside alphabet");
        if (t.kind != MapTarget::Kind::Const) target_vars.push_back(t.var);
    }
    std::sort(target_vars.begin(), target_vars.end());
    target_vars.erase(std::unique(target_vars.begin(), target_vars.end()), target_vars.end());

    std::vector<Tuple> acc;
    int n = static_cast<int>(target_vars.size());
    for_each_tuple(c.k, n, [&](const Tuple& t) {
        std::map<int, Value> phi;
        for (int i = 0; i < n; ++i) phi[target_vars[i]] = t[i];
        Tuple composed(c.context.size());
        for (size_t i = 0; i < c.context.size(); ++i)
            composed[i] = apply_target(r.targets.at(c.context[i]), phi);
        if (c.accepts(composed)) acc.push_back(t);
    });
    if (acc.empty())
        throw Error("empty-pushforward", "pushforward produced an empty accepted set");
    return Constraint::make(c.k, target_vars, acc);
}

VarMap compose(const VarMap& outer, const VarMap& inner) {
    auto negated = [](MapTarget t) {
        switch (t.kind) {
            case MapTarget::Kind::Var: return MapTarget::to_neg(t.var);
            case MapTarget::Kind::NegVar: return MapTarget::to_var(t.var);
            case MapTarget::Kind::Const: return MapTarget::to_const(1 - t.constant);
        }
        return t;
    };
    VarMap out;
    for (const auto& [v, t] : inner.targets) {
        switch (t.kind) {
            case MapTarget::Kind::Const:
                out.targets[v] = t;
                break;
            case MapTarget::Kind::Var:
                out.targets[v] = outer.targets.at(t.var);
                break;
            case MapTarget::Kind::NegVar:
                out.targets[v] = negated(outer.targets.at(t.var));
                break;
        }
    }
    return out;
}

Constraint restrict_to(const Constraint& c, const std::vector<int>& sub_context) {
    std::vector<int> positions;
    for (int v : sub_context) {
        int p = c.position_of(v);
        if (p < 0) throw Error("missing-variable", "restriction variable not in context");
        positions.push_back(p);
    }
    std::vector<Tuple> acc;
    for (const Tuple& t : c.accepted) {
        Tuple u(positions.size());
        for (size_t i = 0; i < positions.size(); ++i) u[i] = t[positions[i]];
        acc.push_back(std::move(u));
    }
    return Constraint::make(c.k, sub_context, acc);
}

Constraint negate_at(const Constraint& c, const std::vector<int>& vars) {
    if (c.k != 2) throw Error("negation-on-nonboolean", "negation needs a boolean alphabet");
    std::vector<bool> flip(c.context.size(), false);
    for (int v : vars) {
        int p = c.position_of(v);
        if (p < 0) throw Error("missing-variable", "negation variable not in context");
        flip[p] = true;
    }
    std::vector<Tuple> acc;
    for (const Tuple& t : c.accepted) {
        Tuple u = t;
        for (size_t i = 0; i < u.size(); ++i)
            if (flip[i]) u[i] = 1 - u[i];
        acc.push_back(std::move(u));
    }
    return Constraint::make(c.k, c.context, acc);
}

ConstraintSystem boolean_form(const ConstraintSystem& s) {
    s.validate();
    ConstraintSystem b;
    b.k = 2;
    for (const Variable& x : s.variables)
        for (int a = 0; a < s.k; ++a)
            b.add_variable(x.name + "@" + std::to_string(a));

    for (const Constraint& c : s.constraints) {
        std::vector<int> ctx;
        for (int x : c.context)
            for (int a = 0; a < s.k; ++a) ctx.push_back(indicator_id(x, a, s.k));
        std::vector<Tuple> acc;
        for (const Tuple& t : c.accepted) {
            Tuple u(ctx.size(), 0);
            for (size_t i = 0; i < c.context.size(); ++i) u[i * s.k + t[i]] = 1;
            acc.push_back(std::move(u));
        }
        b.constraints.push_back(Constraint::make(2, ctx, acc));
    }
    return b;
}

namespace {

template <typename F>
void search_assignments(const ConstraintSystem& s, const std::map<int, Value>& pins,
                        std::uint64_t search_bound, F&& visit) {
    s.validate();
    std::uint64_t space = s.assignment_space();
    if (space > search_bound)
        throw Error("search-bound-exceeded", "assignment space k^|X| above the search bound");
    int n = static_cast<int>(s.variables.size());
    std::vector<Value> phi(n, 0);
    std::vector<bool> pinned(n, false);
    for (const auto& [v, a] : pins) {
        if (v < 0 || v >= n) throw Error("missing-variable", "pinned variable not in the table");
        if (a < 0 || a >= s.k) throw Error("alphabet-mismatch", "pinned value outside alphabet");
        phi[v] = a;
        pinned[v] = true;
    }
    while (true) {
        if (visit(const_cast<const std::vector<Value>&>(phi))) return;
        int pos = n - 1;
        while (pos >= 0 && (pinned[pos] || phi[pos] == s.k - 1)) {
            if (!pinned[pos]) phi[pos] = 0;
            --pos;
        }
        if (pos < 0) return;
        ++phi[pos];
    }
}

} // namespace

SatResult is_satisfiable(const ConstraintSystem& s, std::uint64_t search_bound) {
    return is_satisfiable_pinned(s, {}, search_bound);
}

SatResult is_satisfiable_pinned(const ConstraintSystem& s, const std::map<int, Value>& pins,
                                std::uint64_t search_bound) {
    SatResult result;
    search_assignments(s, pins, search_bound, [&](const std::vector<Value>& phi) {
        for (const Constraint& c : s.constraints)
            if (!eval_full(c, phi)) return false;
        result.satisfiable = true;
        result.witness = phi;
        return true;
    });
    return result;
}

Rational max_satisfying_fraction(const ConstraintSystem& s, const std::vector<Rational>& dist,
                                 std::uint64_t search_bound) {
    if (dist.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");
    Rational best = 0;
    search_assignments(s, {}, search_bound, [&](const std::vector<Value>& phi) {
        Rational mass = 0;
        for (size_t i = 0; i < s.constraints.size(); ++i)
            if (eval_full(s.constraints[i], phi)) mass += dist[i];
        if (mass > best) best = mass;
        return false;
    });
    return best;
}

std::vector<Rational> uniform_dist(int m) {
    return std::vector<Rational>(m, rat(1, m));
}

} // namespace qcsp
