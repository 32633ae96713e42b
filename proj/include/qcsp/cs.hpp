#ifndef QCSP_CS_HPP
#define QCSP_CS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcsp/rational.hpp"

namespace qcsp {

struct Error : std::runtime_error {
    std::string kind;
    Error(std::string kind_, const std::string& what_)
        : std::runtime_error(kind_ + ": " + what_), kind(std::move(kind_)) {}
};

using Value = int;
using Tuple = std::vector<Value>;

struct Variable {
    int id = -1;
    std::string name;
};

// A constraint (V, C): an ordered context of variable ids and the accepted
// assignment tuples over Z_k. Contexts are kept sorted by variable id (the
// global order on X) and accepted tuples sorted lexicographically, so equal
// constraints compare equal by value. Accepted sets are never empty.
struct Constraint {
    int k = 2;
    std::vector<int> context;
    std::vector<Tuple> accepted;

    static Constraint make(int k, std::vector<int> context, std::vector<Tuple> accepted);

    int arity() const { return static_cast<int>(context.size()); }
    bool accepts(const Tuple& t) const;
    int position_of(int var) const;
    bool is_empty_constraint() const;  // C = Z_k^V

    bool operator==(const Constraint& o) const {
        return k == o.k && context == o.context && accepted == o.accepted;
    }
};

struct ConstraintSystem {
    int k = 2;
    std::vector<Variable> variables;  // variables[i].id == i
    std::vector<Constraint> constraints;

    int add_variable(const std::string& name);
    void validate() const;
    std::uint64_t assignment_space() const;  // k^|X|, saturating
};

// Targets of a (possibly augmented) variable map: a variable, a negated
// variable (boolean alphabets only), or a constant.
struct MapTarget {
    enum class Kind { Var, NegVar, Const };
    Kind kind = Kind::Var;
    int var = -1;
    Value constant = 0;

    static MapTarget to_var(int v) { return {Kind::Var, v, 0}; }
    static MapTarget to_neg(int v) { return {Kind::NegVar, v, 0}; }
    static MapTarget to_const(Value a) { return {Kind::Const, -1, a}; }

    bool operator==(const MapTarget& o) const {
        return kind == o.kind && var == o.var && constant == o.constant;
    }
};

struct VarMap {
    std::map<int, MapTarget> targets;  // keyed by source variable id
};

// Iterate all tuples in Z_k^n in lexicographic order.
template <typename F>
void for_each_tuple(int k, int n, F&& f) {
    Tuple t(n, 0);
    while (true) {
        f(const_cast<const Tuple&>(t));
        int pos = n - 1;
        while (pos >= 0 && t[pos] == k - 1) t[pos--] = 0;
        if (pos < 0) return;
        ++t[pos];
    }
}

bool eval(const Constraint& c, const std::map<int, Value>& phi);
bool eval_full(const Constraint& c, const std::vector<Value>& phi);

Constraint pushforward(const Constraint& c, const VarMap& r);
VarMap compose(const VarMap& outer, const VarMap& inner);  // outer after inner

Constraint restrict_to(const Constraint& c, const std::vector<int>& sub_context);
Constraint negate_at(const Constraint& c, const std::vector<int>& vars);

ConstraintSystem boolean_form(const ConstraintSystem& s);
// Indicator variable id for (x, a) in boolean_form's variable table.
inline int indicator_id(int x, int a, int k) { return x * k + a; }

struct SatResult {
    bool satisfiable = false;
    std::vector<Value> witness;  // indexed by variable id, present iff satisfiable
};

inline constexpr std::uint64_t kDefaultSearchBound = std::uint64_t(1) << 24;

SatResult is_satisfiable(const ConstraintSystem& s,
                         std::uint64_t search_bound = kDefaultSearchBound);

// Exhaustive search with some variables pinned to fixed values.
SatResult is_satisfiable_pinned(const ConstraintSystem& s,
                                const std::map<int, Value>& pins,
                                std::uint64_t search_bound = kDefaultSearchBound);

Rational max_satisfying_fraction(const ConstraintSystem& s,
                                 const std::vector<Rational>& dist,
                                 std::uint64_t search_bound = kDefaultSearchBound);

std::vector<Rational> uniform_dist(int m);

} // namespace qcsp

#endif
