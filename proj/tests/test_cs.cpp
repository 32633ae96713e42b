#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcsp/cs.hpp"

#include <map>
#include <random>
#include <set>

using namespace qcsp;

namespace {

Constraint one3() {
    return Constraint::make(2, {0, 1, 2}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

Constraint empty2() {
    return Constraint::make(2, {0, 1}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

Constraint eq2() { return Constraint::make(2, {0, 1}, {{0, 0}, {1, 1}}); }

// Independent oracle: pushforward by direct enumeration of target tuples.
std::set<Tuple> pushforward_oracle(const Constraint& c, const VarMap& r,
                                   const std::vector<int>& target_ctx) {
    std::set<Tuple> out;
    for_each_tuple(c.k, static_cast<int>(target_ctx.size()), [&](const Tuple& t) {
        std::map<int, Value> phi;
        for (size_t i = 0; i < target_ctx.size(); ++i) phi[target_ctx[i]] = t[i];
        Tuple composed;
        for (int v : c.context) {
            const MapTarget& mt = r.targets.at(v);
            if (mt.kind == MapTarget::Kind::Const) composed.push_back(mt.constant);
            else if (mt.kind == MapTarget::Kind::Var) composed.push_back(phi.at(mt.var));
            else composed.push_back(1 - phi.at(mt.var));
        }
        if (c.accepts(composed)) out.insert(t);
    });
    return out;
}

} // namespace

TEST_CASE("eval on 1-in-3 and the empty constraint") {
    Constraint c = one3();
    CHECK(eval(c, {{0, 0}, {1, 1}, {2, 0}}));
    CHECK_FALSE(eval(c, {{0, 1}, {1, 1}, {2, 0}}));
    CHECK(eval(empty2(), {{0, 1}, {1, 1}}));
    CHECK_THROWS_AS(eval(c, std::map<int, Value>{{0, 0}, {1, 1}}), Error);
}

TEST_CASE("pushforward identifies, keeps identity, and pins constants") {
    Constraint c = one3();
    SUBCASE("identify first two variables") {
        VarMap r;
        r.targets[0] = MapTarget::to_var(10);
        r.targets[1] = MapTarget::to_var(10);
        r.targets[2] = MapTarget::to_var(11);
        Constraint p = pushforward(c, r);
        CHECK(p.context == std::vector<int>{10, 11});
        CHECK(p.accepted == std::vector<Tuple>{{0, 1}});
        std::set<Tuple> oracle = pushforward_oracle(c, r, {10, 11});
        CHECK(std::set<Tuple>(p.accepted.begin(), p.accepted.end()) == oracle);
    }
    SUBCASE("identity map") {
        VarMap r;
        for (int v : c.context) r.targets[v] = MapTarget::to_var(v);
        CHECK(pushforward(c, r) == c);
    }
    SUBCASE("constant on the third slot") {
        VarMap r;
        r.targets[0] = MapTarget::to_var(0);
        r.targets[1] = MapTarget::to_var(1);
        r.targets[2] = MapTarget::to_const(0);
        Constraint p = pushforward(c, r);
        CHECK(p.accepted == std::vector<Tuple>{{0, 1}, {1, 0}});
    }
    SUBCASE("negation target needs a boolean alphabet") {
        Constraint c3 = Constraint::make(3, {0, 1}, {{0, 1}, {1, 2}});
        VarMap r;
        r.targets[0] = MapTarget::to_neg(0);
        r.targets[1] = MapTarget::to_var(1);
        CHECK_THROWS_AS(pushforward(c3, r), Error);
    }
}

TEST_CASE("pushforward composes and is consistent with eval") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + static_cast<int>(gen() % 4);  // |V| <= 5
        std::vector<int> ctx(n);
        for (int i = 0; i < n; ++i) ctx[i] = i;
        std::vector<Tuple> acc;
        for_each_tuple(2, n, [&](const Tuple& t) {
            if (gen() % 3) acc.push_back(t);
        });
        if (acc.empty()) continue;
        Constraint c = Constraint::make(2, ctx, acc);

        auto random_map = [&](const std::vector<int>& source, int lo) {
            VarMap r;
            for (int v : source) {
                int roll = static_cast<int>(gen() % 4);
                if (roll == 0) r.targets[v] = MapTarget::to_const(static_cast<Value>(gen() % 2));
                else if (roll == 1) r.targets[v] = MapTarget::to_neg(lo + static_cast<int>(gen() % 3));
                else r.targets[v] = MapTarget::to_var(lo + static_cast<int>(gen() % 3));
            }
            return r;
        };
        VarMap r = random_map(ctx, 100);
        std::vector<int> mid = {100, 101, 102};
        VarMap s = random_map(mid, 200);

        Constraint rc;
        try {
            rc = pushforward(c, r);
        } catch (const Error&) {
            continue;  // empty pushforward
        }
        // eval(r_*C, phi) iff eval(C, phi o r), exhaustively
        std::set<Tuple> oracle = pushforward_oracle(c, r, rc.context);
        CHECK(std::set<Tuple>(rc.accepted.begin(), rc.accepted.end()) == oracle);

        // (s o r)_* C = s_*(r_* C) when both sides are non-empty
        VarMap sr = compose(s, r);
        // restrict s to the variables actually appearing in rc
        VarMap s_used;
        for (int v : rc.context) s_used.targets[v] = s.targets.at(v);
        try {
            Constraint lhs = pushforward(c, sr);
            Constraint rhs = pushforward(rc, s_used);
            CHECK(lhs == rhs);
        } catch (const Error&) {
        }
    }
}

TEST_CASE("restriction projects accepted tuples") {
    Constraint c = one3();
    Constraint r = restrict_to(c, {0, 1});
    CHECK(r.accepted == std::vector<Tuple>{{0, 0}, {0, 1}, {1, 0}});
    CHECK(restrict_to(c, c.context) == c);
    CHECK(restrict_to(eq2(), {0}).accepted == std::vector<Tuple>{{0}, {1}});
}

TEST_CASE("negation flips the chosen variables") {
    Constraint c = one3();
    Constraint n = negate_at(c, {2});
    CHECK(n.accepted == std::vector<Tuple>{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}});
    CHECK(negate_at(c, {}) == c);
    CHECK(negate_at(negate_at(c, {0, 2}), {0, 2}) == c);
    CHECK(negate_at(c, {1}).accepted.size() == c.accepted.size());
}

TEST_CASE("boolean form uses indicator variables") {
    ConstraintSystem s;
    s.k = 3;
    s.add_variable("x");
    s.constraints.push_back(Constraint::make(3, {0}, {{0}, {2}}));
    ConstraintSystem b = boolean_form(s);
    REQUIRE(b.k == 2);
    REQUIRE(b.variables.size() == 3);
    REQUIRE(b.constraints.size() == 1);
    CHECK(b.constraints[0].context == std::vector<int>{0, 1, 2});
    CHECK(b.constraints[0].accepted == std::vector<Tuple>{{0, 0, 1}, {1, 0, 0}});
    CHECK(b.constraints[0].accepted.size() == s.constraints[0].accepted.size());
}

TEST_CASE("boolean form preserves satisfiability") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 40; ++trial) {
        ConstraintSystem s;
        s.k = 2 + static_cast<int>(gen() % 2);
        int n = 2 + static_cast<int>(gen() % 3);
        for (int i = 0; i < n; ++i) s.add_variable("v" + std::to_string(i));
        int m = 1 + static_cast<int>(gen() % 3);
        for (int i = 0; i < m; ++i) {
            int a = static_cast<int>(gen() % n), b = static_cast<int>(gen() % n);
            if (a == b) b = (b + 1) % n;
            std::vector<Tuple> acc;
            for_each_tuple(s.k, 2, [&](const Tuple& t) {
                if (gen() % 3) acc.push_back(t);
            });
            if (acc.empty()) acc.push_back({0, 0});
            s.constraints.push_back(Constraint::make(s.k, {std::min(a, b), std::max(a, b)}, acc));
        }
        CHECK(is_satisfiable(s).satisfiable == is_satisfiable(boolean_form(s)).satisfiable);
    }
}

TEST_CASE("exhaustive satisfiability with witnesses") {
    SUBCASE("triangle 3-colouring") {
        ConstraintSystem s;
        s.k = 3;
        for (int i = 0; i < 3; ++i) s.add_variable("v" + std::to_string(i));
        std::vector<Tuple> neq;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) neq.push_back({a, b});
        for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}})
            s.constraints.push_back(Constraint::make(3, {u, v}, neq));
        SatResult r = is_satisfiable(s);
        REQUIRE(r.satisfiable);
        for (const Constraint& c : s.constraints) CHECK(eval_full(c, r.witness));
    }
    SUBCASE("K4 is not 3-colourable") {
        ConstraintSystem s;
        s.k = 3;
        for (int i = 0; i < 4; ++i) s.add_variable("v" + std::to_string(i));
        std::vector<Tuple> neq;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) neq.push_back({a, b});
        for (int u = 0; u < 4; ++u)
            for (int v = u + 1; v < 4; ++v)
                s.constraints.push_back(Constraint::make(3, {u, v}, neq));
        CHECK_FALSE(is_satisfiable(s).satisfiable);
    }
    SUBCASE("basic gadget system is satisfiable and its witness checks out") {
        // u,v,w,x,y,z with one-hot triangles {x,u,v}, {y,u,w}, {z,v,w}
        ConstraintSystem s;
        s.k = 2;
        for (const char* n : {"u", "v", "w", "x", "y", "z"}) s.add_variable(n);
        auto hot = [](std::vector<int> ctx) {
            return Constraint::make(2, ctx, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
        };
        s.constraints.push_back(hot({3, 0, 1}));
        s.constraints.push_back(hot({4, 0, 2}));
        s.constraints.push_back(hot({5, 1, 2}));
        SatResult r = is_satisfiable(s);
        REQUIRE(r.satisfiable);
        for (const Constraint& c : s.constraints) CHECK(eval_full(c, r.witness));
    }
    SUBCASE("search bound is enforced") {
        ConstraintSystem s;
        s.k = 2;
        for (int i = 0; i < 30; ++i) s.add_variable("v" + std::to_string(i));
        s.constraints.push_back(empty2());
        CHECK_THROWS_AS(is_satisfiable(s), Error);
    }
}

TEST_CASE("max satisfying fraction") {
    SUBCASE("satisfiable system reaches 1") {
        ConstraintSystem s;
        s.k = 2;
        s.add_variable("x");
        s.add_variable("y");
        s.add_variable("z");
        s.constraints.push_back(one3());
        CHECK(max_satisfying_fraction(s, uniform_dist(1)) == Rational(1));
    }
    SUBCASE("K4 3-colouring misses one edge") {
        ConstraintSystem s;
        s.k = 3;
        for (int i = 0; i < 4; ++i) s.add_variable("v" + std::to_string(i));
        std::vector<Tuple> neq;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) neq.push_back({a, b});
        for (int u = 0; u < 4; ++u)
            for (int v = u + 1; v < 4; ++v)
                s.constraints.push_back(Constraint::make(3, {u, v}, neq));
        // independent oracle over all 3^4 colourings
        int best = 0;
        for (int code = 0; code < 81; ++code) {
            int col[4], c = code;
            for (int i = 0; i < 4; ++i) {
                col[i] = c % 3;
                c /= 3;
            }
            int sat = 0;
            for (int u = 0; u < 4; ++u)
                for (int v = u + 1; v < 4; ++v)
                    if (col[u] != col[v]) ++sat;
            best = std::max(best, sat);
        }
        CHECK(best == 5);
        CHECK(max_satisfying_fraction(s, uniform_dist(6)) == rat(5, 6));
    }
    SUBCASE("max fraction 1 iff satisfiable") {
        std::mt19937_64 gen(3);
        for (int trial = 0; trial < 30; ++trial) {
            ConstraintSystem s;
            s.k = 2;
            int n = 2 + static_cast<int>(gen() % 3);
            for (int i = 0; i < n; ++i) s.add_variable("v" + std::to_string(i));
            for (int i = 0; i < 3; ++i) {
                int a = static_cast<int>(gen() % n), b = static_cast<int>(gen() % n);
                if (a == b) b = (b + 1) % n;
                std::vector<Tuple> acc;
                for_each_tuple(2, 2, [&](const Tuple& t) {
                    if (gen() % 2) acc.push_back(t);
                });
                if (acc.empty()) acc.push_back({1, 1});
                s.constraints.push_back(
                    Constraint::make(2, {std::min(a, b), std::max(a, b)}, acc));
            }
            bool sat = is_satisfiable(s).satisfiable;
            Rational frac = max_satisfying_fraction(s, uniform_dist(3));
            CHECK((frac == 1) == sat);
        }
    }
}

TEST_CASE("constraint construction invariants") {
    CHECK_THROWS_AS(Constraint::make(2, {0, 0}, {{0, 0}}), Error);
    CHECK_THROWS_AS(Constraint::make(2, {0, 1}, std::vector<Tuple>{}), Error);
    CHECK_THROWS_AS(Constraint::make(2, {0, 1}, {{0, 2}}), Error);
    CHECK_THROWS_AS(Constraint::make(2, {0, 1}, {{0}}), Error);
    // contexts normalize to the table order
    Constraint c = Constraint::make(2, {2, 0}, {{1, 0}});
    CHECK(c.context == std::vector<int>{0, 2});
    CHECK(c.accepted == std::vector<Tuple>{{0, 1}});
}
