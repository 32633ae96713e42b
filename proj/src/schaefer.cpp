#include "qcsp/schaefer.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace qcsp {

namespace {

int table_index(const Tuple& args, int k) {
    int idx = 0;
    for (Value a : args) idx = idx * k + a;
    return idx;
}

Polymorphism from_fn(int k, int arity, const std::string& name,
                     const std::function<Value(const Tuple&)>& fn) {
    Polymorphism f;
    f.k = k;
    f.arity = arity;
    f.name = name;
    for_each_tuple(k, arity, [&](const Tuple& t) { f.table.push_back(fn(t)); });
    return f;
}

} // namespace

Value Polymorphism::apply_args(const Tuple& args) const {
    if (static_cast<int>(args.size()) != arity)
        throw Error("arity-mismatch", "argument count does not match polymorphism arity");
    for (Value a : args)
        if (a < 0 || a >= k) throw Error("alphabet-mismatch", "argument outside alphabet");
    return table[table_index(args, k)];
}

Polymorphism Polymorphism::const0() {
    return from_fn(2, 0, "0", [](const Tuple&) { return 0; });
}
Polymorphism Polymorphism::const1() {
    return from_fn(2, 0, "1", [](const Tuple&) { return 1; });
}
Polymorphism Polymorphism::and2() {
    return from_fn(2, 2, "AND", [](const Tuple& t) { return t[0] & t[1]; });
}
Polymorphism Polymorphism::or2() {
    return from_fn(2, 2, "OR", [](const Tuple& t) { return t[0] | t[1]; });
}
Polymorphism Polymorphism::maj() {
    return from_fn(2, 3, "MAJ",
                   [](const Tuple& t) { return (t[0] & t[1]) | (t[1] & t[2]) | (t[2] & t[0]); });
}
Polymorphism Polymorphism::min3() {
    return from_fn(2, 3, "MIN", [](const Tuple& t) { return t[0] ^ t[1] ^ t[2]; });
}

const std::vector<Polymorphism>& Polymorphism::boolean_six() {
    static const std::vector<Polymorphism> six = {const0(), const1(), and2(),
                                                  or2(),    maj(),    min3()};
    return six;
}

Tuple apply(const Polymorphism& f, const std::vector<Tuple>& rows) {
    if (static_cast<int>(rows.size()) != f.arity)
        throw Error("arity-mismatch", "row count does not match polymorphism arity");
    size_t width = rows.empty() ? 0 : rows[0].size();
    for (const Tuple& r : rows)
        if (r.size() != width) throw Error("bad-tuple", "rows have unequal lengths");
    if (f.arity == 0)
        throw Error("arity-mismatch", "componentwise application needs a row to fix the width");
    Tuple out(width);
    Tuple args(f.arity);
    for (size_t v = 0; v < width; ++v) {
        for (int i = 0; i < f.arity; ++i) args[i] = rows[i][v];
        out[v] = f.apply_args(args);
    }
    return out;
}

PreserveResult preserves(const Polymorphism& f, const Constraint& c) {
    if (f.k != c.k) throw Error("alphabet-mismatch", "polymorphism and constraint alphabets differ");
    PreserveResult res;
    if (f.arity == 0) {
        Tuple image(c.context.size(), f.table[0]);
        if (!c.accepts(image)) res.preserved = false;
        return res;
    }
    // Exhaustive over |C|^arity row tuples, lexicographic in the row indices.
    int m = static_cast<int>(c.accepted.size());
    std::vector<int> idx(f.arity, 0);
    std::vector<Tuple> rows(f.arity);
    while (true) {
        for (int i = 0; i < f.arity; ++i) rows[i] = c.accepted[idx[i]];
        Tuple image = apply(f, rows);
        if (!c.accepts(image)) {
            res.preserved = false;
            res.counterexample = rows;
            return res;
        }
        int pos = f.arity - 1;
        while (pos >= 0 && idx[pos] == m - 1) idx[pos--] = 0;
        if (pos < 0) break;
        ++idx[pos];
    }
    return res;
}

bool is_weak_near_unanimity(const Polymorphism& f) {
    if (f.arity == 0) return false;
    Tuple args(f.arity);
    for (Value a = 0; a < f.k; ++a) {
        for (Value b = 0; b < f.k; ++b) {
            std::fill(args.begin(), args.end(), a);
            args[0] = b;
            Value first = f.apply_args(args);
            for (int pos = 1; pos < f.arity; ++pos) {
                std::fill(args.begin(), args.end(), a);
                args[pos] = b;
                if (f.apply_args(args) != first) return false;
            }
        }
    }
    return true;
}

DichotomyVerdict classify_boolean(const std::vector<Constraint>& gamma) {
    for (const Constraint& c : gamma)
        if (c.k != 2) throw Error("alphabet-mismatch", "boolean classification needs k = 2");
    DichotomyVerdict verdict;
    for (const Polymorphism& f : Polymorphism::boolean_six()) {
        bool all = true;
        for (size_t i = 0; i < gamma.size(); ++i) {
            PreserveResult r = preserves(f, gamma[i]);
            if (!r.preserved) {
                verdict.violations.push_back({f.name, static_cast<int>(i), r.counterexample});
                all = false;
                break;
            }
        }
        if (all) verdict.certificates.push_back(f);
    }
    verdict.np_complete = verdict.certificates.empty();
    return verdict;
}

namespace {

// Backtracking search for a preserving WNU of the given arity. Table cells are
// grouped by the WNU orbit (all "one b among a's" patterns share a value), and
// each constraint contributes membership requirements over row combinations.
struct WnuSearch {
    int k, arity;
    const std::vector<Constraint>& gamma;
    int cells;
    std::vector<int> cell_class;           // cell -> class representative index
    int classes = 0;
    std::vector<Value> class_value;        // assigned value per class, -1 unknown

    struct Requirement {
        const Constraint* c;
        std::vector<int> cell_of_position;  // |context| cells; image tuple must be accepted
        int unassigned = 0;
    };
    std::vector<Requirement> reqs;
    std::vector<std::vector<int>> class_reqs;  // class -> requirement indices

    WnuSearch(int k_, int arity_, const std::vector<Constraint>& g) : k(k_), arity(arity_), gamma(g) {
        cells = 1;
        for (int i = 0; i < arity; ++i) cells *= k;
        // Union-find over cells to impose the WNU equalities.
        std::vector<int> parent(cells);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        Tuple t(arity);
        for (Value a = 0; a < k; ++a)
            for (Value b = 0; b < k; ++b) {
                if (a == b) continue;
                std::fill(t.begin(), t.end(), a);
                t[0] = b;
                int base = index_of(t);
                for (int pos = 1; pos < arity; ++pos) {
                    std::fill(t.begin(), t.end(), a);
                    t[pos] = b;
                    int u = find(base), v = find(index_of(t));
                    if (u != v) parent[u] = v;
                }
            }
        cell_class.resize(cells);
        std::vector<int> remap(cells, -1);
        for (int c = 0; c < cells; ++c) {
            int r = find(c);
            if (remap[r] < 0) remap[r] = classes++;
            cell_class[c] = remap[r];
        }
        class_value.assign(classes, -1);
        class_reqs.resize(classes);

        for (const Constraint& c : gamma) build_requirements(c);
    }

    int index_of(const Tuple& t) const {
        int idx = 0;
        for (Value a : t) idx = idx * k + a;
        return idx;
    }

    void build_requirements(const Constraint& c) {
        int m = static_cast<int>(c.accepted.size());
        std::vector<int> idx(arity, 0);
        while (true) {
            Requirement req;
            req.c = &c;
            req.cell_of_position.resize(c.context.size());
            Tuple args(arity);
            for (size_t p = 0; p < c.context.size(); ++p) {
                for (int i = 0; i < arity; ++i) args[i] = c.accepted[idx[i]][p];
                req.cell_of_position[p] = cell_class[index_of(args)];
            }
            int ri = static_cast<int>(reqs.size());
            std::vector<int> touched = req.cell_of_position;
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            req.unassigned = static_cast<int>(touched.size());
            for (int cls : touched) class_reqs[cls].push_back(ri);
            reqs.push_back(std::move(req));

            int pos = arity - 1;
            while (pos >= 0 && idx[pos] == m - 1) idx[pos--] = 0;
            if (pos < 0) break;
            ++idx[pos];
        }
    }

    bool requirement_ok(const Requirement& req) const {
        Tuple image(req.cell_of_position.size());
        for (size_t p = 0; p < image.size(); ++p) {
            Value v = class_value[req.cell_of_position[p]];
            if (v < 0) return true;  // not fully determined yet
            image[p] = v;
        }
        return req.c->accepts(image);
    }

    bool assign(int cls, Value v) {
        class_value[cls] = v;
        bool ok = true;
        for (int ri : class_reqs[cls])
            if (--reqs[ri].unassigned == 0 && !requirement_ok(reqs[ri])) ok = false;
        return ok;
    }

    void unassign(int cls) {
        class_value[cls] = -1;
        for (int ri : class_reqs[cls]) ++reqs[ri].unassigned;
    }

    bool solve(int cls) {
        if (cls == classes) return true;
        for (Value v = 0; v < k; ++v) {
            if (assign(cls, v) && solve(cls + 1)) return true;
            unassign(cls);
        }
        return false;
    }
};

} // namespace

std::optional<Polymorphism> has_wnu_homomorphism_smallarity(const std::vector<Constraint>& gamma,
                                                            int max_arity) {
    if (gamma.empty()) throw Error("bad-input", "empty constraint family");
    int k = gamma[0].k;
    for (const Constraint& c : gamma)
        if (c.k != k) throw Error("alphabet-mismatch", "mixed alphabets in the family");
    for (int arity = 1; arity <= max_arity; ++arity) {
        WnuSearch search(k, arity, gamma);
        if (search.solve(0)) {
            Polymorphism f;
            f.k = k;
            f.arity = arity;
            f.name = "wnu" + std::to_string(arity);
            f.table.resize(search.cells);
            for (int c = 0; c < search.cells; ++c)
                f.table[c] = search.class_value[search.cell_class[c]];
            if (!is_weak_near_unanimity(f))
                throw Error("internal", "search produced a non-WNU table");
            for (const Constraint& c : gamma)
                if (!preserves(f, c).preserved)
                    throw Error("internal", "search produced a non-preserving table");
            return f;
        }
    }
    return std::nullopt;
}

} // namespace qcsp
