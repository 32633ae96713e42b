#ifndef QCSP_SCHAEFER_HPP
#define QCSP_SCHAEFER_HPP

#include <optional>
#include <string>
#include <vector>

#include "qcsp/cs.hpp"

namespace qcsp {

// A polymorphism f: Z_k^arity -> Z_k as a full function table. The table is
// indexed lexicographically: entry for (a_1,...,a_n) sits at
// a_1*k^(n-1) + ... + a_n.
struct Polymorphism {
    int k = 2;
    int arity = 0;
    std::vector<Value> table;
    std::string name;

    Value apply_args(const Tuple& args) const;

    static Polymorphism const0();
    static Polymorphism const1();
    static Polymorphism and2();
    static Polymorphism or2();
    static Polymorphism maj();
    static Polymorphism min3();
    static const std::vector<Polymorphism>& boolean_six();
};

Tuple apply(const Polymorphism& f, const std::vector<Tuple>& rows);

struct PreserveResult {
    bool preserved = true;
    std::vector<Tuple> counterexample;  // rows whose image lies outside C
};

PreserveResult preserves(const Polymorphism& f, const Constraint& c);
bool is_weak_near_unanimity(const Polymorphism& f);

struct DichotomyVerdict {
    bool np_complete = false;
    // P case: every named polymorphism preserving all of gamma.
    std::vector<Polymorphism> certificates;
    // NP-complete case: per named polymorphism, the first violation found
    // (constraint index within gamma and the violating rows).
    struct Violation {
        std::string polymorphism;
        int constraint_index;
        std::vector<Tuple> rows;
    };
    std::vector<Violation> violations;
};

DichotomyVerdict classify_boolean(const std::vector<Constraint>& gamma);

// Searches for a preserving weak near-unanimity polymorphism of arity 1..max_arity
// by backtracking over the function table. Absence up to max_arity is not a
// hardness proof; callers report it as inconclusive.
std::optional<Polymorphism> has_wnu_homomorphism_smallarity(const std::vector<Constraint>& gamma,
                                                            int max_arity = 3);

} // namespace qcsp

#endif
