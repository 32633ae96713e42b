#include "qcsp/serialize.hpp"

#include <map>

namespace qcsp {

namespace {

void reject_unknown(const Json& j, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const std::string& key : allowed)
            if (it.key() == key) ok = true;
        if (!ok) throw Error("parse-error", "unknown field '" + it.key() + "' in " + where);
    }
}

Rational rational_field(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw Error("parse-error", "expected integer or string number in " + where);
}

int index_field(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) return std::stoi(v.get<std::string>());
    throw Error("parse-error", "expected an index in " + where);
}

} // namespace

ParsedInstance parse_instance(const Json& j) {
    if (!j.is_object()) throw Error("parse-error", "instance must be a JSON object");
    reject_unknown(j, {"k", "variables", "constraints", "distribution"}, "instance");
    if (!j.contains("k") || !j["k"].is_number_integer())
        throw Error("parse-error", "missing integer field 'k'");
    ParsedInstance out;
    out.cs.k = j["k"].get<int>();
    if (out.cs.k < 2) throw Error("parse-error", "k must be at least 2");

    std::map<std::string, int> by_name;
    if (!j.contains("variables") || !j["variables"].is_array())
        throw Error("parse-error", "missing array field 'variables'");
    for (const Json& v : j["variables"]) {
        if (!v.is_string()) throw Error("parse-error", "variable names must be strings");
        std::string name = v.get<std::string>();
        if (by_name.count(name)) throw Error("parse-error", "duplicate variable " + name);
        by_name[name] = out.cs.add_variable(name);
    }
    if (!j.contains("constraints") || !j["constraints"].is_array())
        throw Error("parse-error", "missing array field 'constraints'");
    int ci = 0;
    for (const Json& c : j["constraints"]) {
        std::string where = "constraint " + std::to_string(ci++);
        if (!c.is_object()) throw Error("parse-error", where + " must be an object");
        reject_unknown(c, {"context", "accepted"}, where);
        if (!c.contains("context") || !c.contains("accepted"))
            throw Error("parse-error", where + " needs 'context' and 'accepted'");
        std::vector<int> ctx;
        for (const Json& v : c["context"]) {
            std::string name = v.get<std::string>();
            auto it = by_name.find(name);
            if (it == by_name.end())
                throw Error("parse-error", where + " uses unknown variable " + name);
            ctx.push_back(it->second);
        }
        std::vector<Tuple> acc;
        for (const Json& row : c["accepted"]) {
            Tuple t;
            for (const Json& e : row) t.push_back(e.get<int>());
            acc.push_back(t);
        }
        out.cs.constraints.push_back(Constraint::make(out.cs.k, ctx, acc));
    }
    out.cs.validate();

    if (j.contains("distribution")) {
        const Json& d = j["distribution"];
        reject_unknown(d, {"kind", "weights"}, "distribution");
        std::string kind = d.at("kind").get<std::string>();
        if (kind == "uniform") {
            out.vec_dist = uniform_dist(static_cast<int>(out.cs.constraints.size()));
        } else if (kind == "explicit") {
            if (!d.contains("weights")) throw Error("parse-error", "explicit weights missing");
            bool pairs = false, singles = false;
            PairDist pd;
            std::vector<Rational> vd(out.cs.constraints.size(), Rational(0));
            for (const Json& w : d["weights"]) {
                if (!w.is_array() || (w.size() != 3 && w.size() != 4))
                    throw Error("parse-error", "weight entries are [i,j,num,den] or [i,num,den]");
                if (w.size() == 4) {
                    pairs = true;
                    int i = index_field(w[0], "weights");
                    int jj = index_field(w[1], "weights");
                    pd.w[{i, jj}] += rational_field(w[2], "weights") /
                                     rational_field(w[3], "weights");
                } else {
                    singles = true;
                    int i = index_field(w[0], "weights");
                    if (i < 0 || i >= static_cast<int>(vd.size()))
                        throw Error("parse-error", "weight index out of range");
                    vd[i] += rational_field(w[1], "weights") / rational_field(w[2], "weights");
                }
            }
            if (pairs && singles)
                throw Error("parse-error", "mixed pair and single weight entries");
            if (pairs) {
                pd.validate();
                out.pair_dist = pd;
            } else {
                Rational total = 0;
                for (const Rational& q : vd) total += q;
                if (total != 1) throw Error("bad-distribution", "weights do not sum to 1");
                out.vec_dist = vd;
            }
        } else {
            throw Error("parse-error", "distribution kind must be uniform or explicit");
        }
    }
    return out;
}

Json serialize_instance(const ConstraintSystem& cs, const std::optional<PairDist>& pair_dist,
                        const std::optional<std::vector<Rational>>& vec_dist) {
    Json j;
    j["k"] = cs.k;
    j["variables"] = Json::array();
    for (const Variable& v : cs.variables) j["variables"].push_back(v.name);
    j["constraints"] = Json::array();
    for (const Constraint& c : cs.constraints) {
        Json jc;
        jc["context"] = Json::array();
        for (int v : c.context) jc["context"].push_back(cs.variables[v].name);
        jc["accepted"] = Json::array();
        for (const Tuple& t : c.accepted) jc["accepted"].push_back(t);
        j["constraints"].push_back(jc);
    }
    if (pair_dist) {
        Json d;
        d["kind"] = "explicit";
        d["weights"] = Json::array();
        for (const auto& [p, q] : pair_dist->w) {
            if (q == 0) continue;
            d["weights"].push_back({std::to_string(p.first), std::to_string(p.second),
                                    q.get_num().get_str(), q.get_den().get_str()});
        }
        j["distribution"] = d;
    } else if (vec_dist) {
        Json d;
        d["kind"] = "explicit";
        d["weights"] = Json::array();
        for (size_t i = 0; i < vec_dist->size(); ++i) {
            if ((*vec_dist)[i] == 0) continue;
            d["weights"].push_back({std::to_string(i), (*vec_dist)[i].get_num().get_str(),
                                    (*vec_dist)[i].get_den().get_str()});
        }
        j["distribution"] = d;
    }
    return j;
}

namespace {

CMatrix parse_matrix(const Json& j, int d) {
    if (!j.is_array() || static_cast<int>(j.size()) != d)
        throw Error("parse-error", "matrix must have d rows");
    CMatrix m(d, d);
    for (int r = 0; r < d; ++r) {
        if (static_cast<int>(j[r].size()) != d)
            throw Error("parse-error", "matrix row length mismatch");
        for (int c = 0; c < d; ++c) {
            const Json& e = j[r][c];
            if (!e.is_array() || e.size() != 2)
                throw Error("parse-error", "matrix entries are [re, im]");
            m(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

Json serialize_matrix(const CMatrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

} // namespace

SyncStrategy parse_strategy(const Json& j, const ConstraintSystem& cs) {
    reject_unknown(j, {"model", "d", "context_pvms", "variable_pvms"}, "strategy");
    SyncStrategy st;
    std::string model = j.at("model").get<std::string>();
    if (model == "cc") st.model = Model::CC;
    else if (model == "cv") st.model = Model::CV;
    else if (model == "a") st.model = Model::A;
    else throw Error("parse-error", "model must be cc, cv, or a");
    st.d = j.at("d").get<int>();
    if (st.d < 1) throw Error("parse-error", "dimension must be positive");

    if (st.model != Model::A) {
        const Json& cp = j.at("context_pvms");
        if (cp.size() != cs.constraints.size())
            throw Error("parse-error", "one context PVM per constraint required");
        for (size_t i = 0; i < cs.constraints.size(); ++i) {
            PVM pvm;
            for (const Json& mat : cp[i]) pvm.projectors.push_back(parse_matrix(mat, st.d));
            if (pvm.outcomes() != static_cast<int>(cs.constraints[i].accepted.size()))
                throw Error("parse-error", "context PVM outcome count mismatch");
            st.context_pvms.push_back(std::move(pvm));
        }
    }
    if (st.model != Model::CC) {
        const Json& vp = j.at("variable_pvms");
        for (const Variable& v : cs.variables) {
            if (!vp.contains(v.name))
                throw Error("parse-error", "missing variable PVM for " + v.name);
            PVM pvm;
            for (const Json& mat : vp[v.name]) pvm.projectors.push_back(parse_matrix(mat, st.d));
            if (pvm.outcomes() != cs.k)
                throw Error("parse-error", "variable PVM outcome count mismatch");
            st.variable_pvms.push_back(std::move(pvm));
        }
    }
    return st;
}

Json serialize_strategy(const SyncStrategy& st, const ConstraintSystem& cs) {
    Json j;
    j["model"] = model_name(st.model);
    j["d"] = st.d;
    if (st.model != Model::A) {
        Json cp = Json::array();
        for (const PVM& pvm : st.context_pvms) {
            Json outcomes = Json::array();
            for (const CMatrix& p : pvm.projectors) outcomes.push_back(serialize_matrix(p));
            cp.push_back(outcomes);
        }
        j["context_pvms"] = cp;
    }
    if (st.model != Model::CC) {
        Json vp = Json::object();
        for (size_t x = 0; x < st.variable_pvms.size(); ++x) {
            Json outcomes = Json::array();
            for (const CMatrix& p : st.variable_pvms[x].projectors)
                outcomes.push_back(serialize_matrix(p));
            vp[cs.variables[x].name] = outcomes;
        }
        j["variable_pvms"] = vp;
    }
    return j;
}

VarMap parse_varmap(const Json& j, const ConstraintSystem& cs) {
    reject_unknown(j, {"map"}, "varmap");
    std::map<std::string, int> by_name;
    for (const Variable& v : cs.variables) by_name[v.name] = v.id;
    VarMap r;
    for (auto it = j.at("map").begin(); it != j.at("map").end(); ++it) {
        auto src = by_name.find(it.key());
        if (src == by_name.end()) throw Error("parse-error", "unknown variable " + it.key());
        const Json& v = it.value();
        if (v.is_string()) {
            std::string t = v.get<std::string>();
            bool neg = !t.empty() && t[0] == '!';
            std::string name = neg ? t.substr(1) : t;
            auto dst = by_name.find(name);
            if (dst == by_name.end()) throw Error("parse-error", "unknown variable " + name);
            r.targets[src->second] =
                neg ? MapTarget::to_neg(dst->second) : MapTarget::to_var(dst->second);
        } else if (v.is_object()) {
            reject_unknown(v, {"const"}, "varmap target");
            r.targets[src->second] = MapTarget::to_const(v.at("const").get<int>());
        } else {
            throw Error("parse-error", "map targets are names, !names, or {const: a}");
        }
    }
    return r;
}

Json serialize_varmap(const VarMap& r, const ConstraintSystem& cs) {
    Json m = Json::object();
    for (const auto& [v, t] : r.targets) {
        const std::string& name = cs.variables[v].name;
        switch (t.kind) {
            case MapTarget::Kind::Var: m[name] = cs.variables[t.var].name; break;
            case MapTarget::Kind::NegVar: m[name] = "!" + cs.variables[t.var].name; break;
            case MapTarget::Kind::Const: m[name] = Json{{"const", t.constant}}; break;
        }
    }
    return Json{{"map", m}};
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace qcsp
