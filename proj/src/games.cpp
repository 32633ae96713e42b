#include "qcsp/games.hpp"

#include <algorithm>
#include <memory>
#include <set>

namespace qcsp {

Rational PairDist::at(int i, int j) const {
    auto it = w.find({i, j});
    return it == w.end() ? Rational(0) : it->second;
}

Rational PairDist::row_sum(int i) const {
    Rational s = 0;
    for (const auto& [p, q] : w)
        if (p.first == i) s += q;
    return s;
}

Rational PairDist::col_sum(int j) const {
    Rational s = 0;
    for (const auto& [p, q] : w)
        if (p.second == j) s += q;
    return s;
}

Rational PairDist::total() const {
    Rational s = 0;
    for (const auto& [p, q] : w) s += q;
    return s;
}

bool PairDist::symmetric() const {
    for (const auto& [p, q] : w)
        if (at(p.second, p.first) != q) return false;
    return true;
}

std::vector<Rational> PairDist::marginal(int m) const {
    std::vector<Rational> out(m, Rational(0));
    for (const auto& [p, q] : w) {
        if (p.first < 0 || p.first >= m) throw Error("bad-distribution", "index out of range");
        out[p.first] += q;
    }
    return out;
}

void PairDist::validate() const {
    for (const auto& [p, q] : w)
        if (q < 0) throw Error("bad-distribution", "negative weight");
    if (total() != 1) throw Error("bad-distribution", "weights do not sum to 1");
}

PairDist uniform_pairs(int m) {
    PairDist d;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) d.w[{i, j}] = rat(1, m * m);
    return d;
}

PairDist uniform_diagonal(int m) {
    PairDist d;
    for (int i = 0; i < m; ++i) d.w[{i, i}] = rat(1, m);
    return d;
}

void GameSpec::validate() const {
    if (questions.size() != answer_count.size())
        throw Error("bad-game", "answer table size does not match question count");
    dist.validate();
    int n = static_cast<int>(questions.size());
    for (const auto& [p, q] : dist.w) {
        (void)q;
        if (p.first < 0 || p.first >= n || p.second < 0 || p.second >= n)
            throw Error("bad-game", "distribution refers to a missing question");
    }
    if (synchronous) {
        for (const auto& [p, q] : dist.w) {
            (void)q;
            if (p.first != p.second) continue;
            for (int a = 0; a < answer_count[p.first]; ++a)
                for (int b = 0; b < answer_count[p.first]; ++b)
                    if (a != b && predicate(a, b, p.first, p.second))
                        throw Error("bad-game", "synchronous flag with off-diagonal acceptance");
        }
    }
}

GameSpec cc_game(const ConstraintSystem& s, const PairDist& pi) {
    s.validate();
    pi.validate();
    GameSpec g;
    int m = static_cast<int>(s.constraints.size());
    for (int i = 0; i < m; ++i) {
        g.questions.push_back("c" + std::to_string(i));
        g.answer_count.push_back(static_cast<int>(s.constraints[i].accepted.size()));
    }
    for (const auto& [p, q] : pi.w)
        if (q > 0) g.dist.w[p] = q;
    // Shared positions are precomputed per constraint pair.
    auto overlaps = std::make_shared<std::vector<std::vector<std::vector<std::pair<int, int>>>>>();
    overlaps->assign(m, std::vector<std::vector<std::pair<int, int>>>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int p = 0; p < s.constraints[i].arity(); ++p) {
                int q = s.constraints[j].position_of(s.constraints[i].context[p]);
                if (q >= 0) (*overlaps)[i][j].push_back({p, q});
            }
    auto cs = std::make_shared<ConstraintSystem>(s);
    g.predicate = [cs, overlaps](int a, int b, int i, int j) {
        const Tuple& phi = cs->constraints[i].accepted[a];
        const Tuple& psi = cs->constraints[j].accepted[b];
        for (auto [p, q] : (*overlaps)[i][j])
            if (phi[p] != psi[q]) return false;
        return true;
    };
    g.synchronous = true;
    return g;
}

GameSpec cv_game(const ConstraintSystem& s, const std::vector<Rational>& pi,
                 const CvGameOptions& options) {
    s.validate();
    if (pi.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");
    GameSpec g;
    int m = static_cast<int>(s.constraints.size());
    int nv = static_cast<int>(s.variables.size());
    for (int i = 0; i < m; ++i) {
        g.questions.push_back("c" + std::to_string(i));
        g.answer_count.push_back(static_cast<int>(s.constraints[i].accepted.size()));
    }
    for (int x = 0; x < nv; ++x) {
        g.questions.push_back("v:" + s.variables[x].name);
        g.answer_count.push_back(s.k);
    }
    Rational consistency_total = 0;
    if (options.symmetrize && options.consistency > 0) {
        // nu(i,i) mass spread uniformly over constraint questions
        consistency_total = options.consistency;
    }
    Rational scale = 1 - consistency_total;
    for (int i = 0; i < m; ++i) {
        const Constraint& c = s.constraints[i];
        Rational mass = pi[i] / c.arity();
        for (int x : c.context) {
            int qx = m + x;
            if (mass == 0) continue;
            if (options.symmetrize) {
                g.dist.w[{i, qx}] += scale * mass / 2;
                g.dist.w[{qx, i}] += scale * mass / 2;
            } else {
                g.dist.w[{i, qx}] += mass;
            }
        }
        if (consistency_total > 0 && pi[i] > 0) g.dist.w[{i, i}] += consistency_total * pi[i];
    }
    auto cs = std::make_shared<ConstraintSystem>(s);
    g.predicate = [cs, m](int a, int b, int i, int j) {
        auto value_of = [&](int question, int answer, int var) -> std::optional<Value> {
            if (question < m) {
                const Constraint& c = cs->constraints[question];
                int p = c.position_of(var);
                if (p < 0) return std::nullopt;
                return c.accepted[answer][p];
            }
            return answer;
        };
        if (i < m && j < m) {
            // consistency check: same constraint, equal assignments
            return i != j || a == b;
        }
        int var = i < m ? j - m : i - m;
        auto va = value_of(i, a, var);
        auto vb = value_of(j, b, var);
        if (!va || !vb) return false;
        return *va == *vb;
    };
    g.synchronous = false;
    return g;
}

GameSpec twocs_game(const ConstraintSystem& s, const std::vector<Rational>& pi) {
    s.validate();
    if (pi.size() != s.constraints.size())
        throw Error("bad-distribution", "weight count does not match constraint count");
    GameSpec g;
    int nv = static_cast<int>(s.variables.size());
    std::map<std::pair<int, int>, int> edge_constraint;
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        const Constraint& c = s.constraints[i];
        if (c.arity() != 2) throw Error("precondition-violated", "2-CS games need 2-variable contexts");
        auto key = std::make_pair(c.context[0], c.context[1]);
        auto it = edge_constraint.find(key);
        if (it != edge_constraint.end()) {
            if (!(s.constraints[it->second] == c))
                throw Error("duplicate-context", "two distinct constraints share a context");
        } else {
            edge_constraint[key] = static_cast<int>(i);
        }
    }
    for (int x = 0; x < nv; ++x) {
        g.questions.push_back("v:" + s.variables[x].name);
        g.answer_count.push_back(s.k);
    }
    for (size_t i = 0; i < s.constraints.size(); ++i) {
        if (pi[i] == 0) continue;
        int x = s.constraints[i].context[0], y = s.constraints[i].context[1];
        g.dist.w[{x, y}] += pi[i] / 2;
        g.dist.w[{y, x}] += pi[i] / 2;
    }
    auto cs = std::make_shared<ConstraintSystem>(s);
    auto edges = std::make_shared<std::map<std::pair<int, int>, int>>(std::move(edge_constraint));
    g.predicate = [cs, edges](int a, int b, int x, int y) {
        auto it = edges->find({std::min(x, y), std::max(x, y)});
        if (it == edges->end()) return true;
        const Constraint& c = cs->constraints[it->second];
        Tuple t(2);
        t[0] = x < y ? a : b;
        t[1] = x < y ? b : a;
        return c.accepts(t);
    };
    g.synchronous = true;
    return g;
}

ClassicalValue classical_value(const GameSpec& g, std::uint64_t search_bound) {
    g.validate();
    int n = static_cast<int>(g.questions.size());
    std::set<int> first_set, second_set, any_set;
    for (const auto& [p, q] : g.dist.w) {
        if (q == 0) continue;
        first_set.insert(p.first);
        second_set.insert(p.second);
        any_set.insert(p.first);
        any_set.insert(p.second);
    }
    std::vector<int> first(first_set.begin(), first_set.end());

    std::uint64_t space = 1;
    for (int i : first) {
        std::uint64_t cnt = static_cast<std::uint64_t>(g.answer_count[i]);
        if (space > search_bound / std::max<std::uint64_t>(cnt, 1))
            throw Error("search-bound-exceeded", "deterministic strategy space above bound");
        space *= cnt;
    }

    // Group distribution entries by the second question for best responses.
    std::map<int, std::vector<std::pair<int, Rational>>> by_second;
    for (const auto& [p, q] : g.dist.w)
        if (q > 0) by_second[p.second].push_back({p.first, q});

    ClassicalValue out;
    out.value = 0;

    std::vector<int> f(n, 0);  // answers for the first player's questions
    std::function<void(size_t)> enumerate = [&](size_t pos) {
        if (pos == first.size()) {
            // Best response for each second-slot question independently.
            Rational total = 0;
            for (const auto& [j, entries] : by_second) {
                Rational best = 0;
                for (int b = 0; b < g.answer_count[j]; ++b) {
                    Rational v = 0;
                    for (const auto& [i, q] : entries)
                        if (g.predicate(f[i], b, i, j)) v += q;
                    if (v > best) best = v;
                }
                total += best;
            }
            if (total > out.value) out.value = total;
            return;
        }
        int i = first[pos];
        for (int a = 0; a < g.answer_count[i]; ++a) {
            f[i] = a;
            enumerate(pos + 1);
        }
    };
    enumerate(0);

    if (g.synchronous) {
        std::vector<int> all(any_set.begin(), any_set.end());
        std::uint64_t sp = 1;
        for (int i : all) {
            std::uint64_t cnt = static_cast<std::uint64_t>(g.answer_count[i]);
            if (sp > search_bound / std::max<std::uint64_t>(cnt, 1))
                throw Error("search-bound-exceeded", "synchronous strategy space above bound");
            sp *= cnt;
        }
        Rational best_sync = 0;
        std::vector<int> h(n, 0);
        std::function<void(size_t)> enumerate_sync = [&](size_t pos) {
            if (pos == all.size()) {
                Rational total = 0;
                for (const auto& [p, q] : g.dist.w)
                    if (g.predicate(h[p.first], h[p.second], p.first, p.second)) total += q;
                if (total > best_sync) best_sync = total;
                return;
            }
            int i = all[pos];
            for (int a = 0; a < g.answer_count[i]; ++a) {
                h[i] = a;
                enumerate_sync(pos + 1);
            }
        };
        enumerate_sync(0);
        out.sync_value = best_sync;
    }
    return out;
}

bool is_diagonally_dominant(const PairDist& pi, const Rational& c) {
    std::set<int> qs;
    for (const auto& [p, q] : pi.w) {
        (void)q;
        qs.insert(p.first);
        qs.insert(p.second);
    }
    return is_diagonally_dominant_at(pi, c, std::vector<int>(qs.begin(), qs.end()));
}

bool is_diagonally_dominant_at(const PairDist& pi, const Rational& c,
                               const std::vector<int>& questions) {
    for (int a : questions) {
        Rational diag = pi.at(a, a);
        if (diag < c * pi.row_sum(a)) return false;
        if (diag < c * pi.col_sum(a)) return false;
    }
    return true;
}

} // namespace qcsp
