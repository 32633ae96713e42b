#ifndef QCSP_TVF_HPP
#define QCSP_TVF_HPP

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qcsp/cs.hpp"

namespace qcsp {

// Boolean TVF graph: undirected 00/11 edges and directed 01 edges over a set
// of variable ids. An edge {u,v} in e00 forbids phi(u)=phi(v)=0, e11 forbids
// both 1, and (u,v) in e01 forbids phi(u)=0, phi(v)=1. 01 loops are dropped.
struct TVFGraph {
    std::vector<int> vertices;  // sorted ids
    std::set<std::pair<int, int>> e00, e11;  // stored with first <= second
    std::set<std::pair<int, int>> e01;       // ordered pairs, no loops

    void add00(int u, int v);
    void add11(int u, int v);
    void add01(int u, int v);
    bool has_pair_edge(int u, int v) const;  // any edge between distinct u, v
    bool has_loop(int v) const;
    bool complete() const;

    bool operator==(const TVFGraph& o) const {
        return vertices == o.vertices && e00 == o.e00 && e11 == o.e11 && e01 == o.e01;
    }
};

TVFGraph tvf_graph(const Constraint& c);
bool is_tvf(const Constraint& c);
bool is_tvf(const std::vector<Constraint>& gamma);

// All assignments to the graph (tuples over `vertices` in order). May be empty.
std::vector<Tuple> graph_assignments(const TVFGraph& g);
// C_TVF(G); throws if the graph admits no assignment.
Constraint constraint_of_graph(const TVFGraph& g);
// The graph of the negated constraint set: flips edge patterns at `flip` vertices.
TVFGraph negate_graph_at(const TVFGraph& g, const std::vector<int>& flip);

struct CompressionWitness {
    int at = -1;  // the vertex whose value is determined
    enum class Kind { Constant, Equality, Negation } kind = Kind::Constant;
    Value b = 0;      // Constant
    int target = -1;  // Equality / Negation
    bool from_pattern = false;  // found by the implication-pattern detector
};

struct Compression {
    std::vector<int> kept;  // the subset U, sorted
    CompressionWitness witness;
};

// One compression step: a proper subset U = V \ {v} together with the witness
// for v, or nullopt when the graph is incompressible. Pattern detectors
// (loops, double edges, alternating cycles via implication closure) run before
// the exhaustive dependence check over graph_assignments.
std::optional<Compression> find_compression(const TVFGraph& g);

struct CompressedConstraint {
    Constraint restricted;  // C|_U, incompressible
    int gamma_index = -1;
    std::vector<int> kept;  // final U (variable ids of the parent context)
    std::vector<CompressionWitness> chain;  // witnesses in removal order
};

struct AuxConstraint {
    Constraint c;
    // A parent (V', C') in gamma and positions p with C'|_p == c, when one exists.
    int gamma_index = -1;
    std::vector<int> positions;
    bool exact_parent = false;
};

struct MaximalCompression {
    std::vector<Constraint> gamma;           // the source family
    std::vector<CompressedConstraint> comp;  // Gamma_comp, one entry per gamma element
    std::optional<AuxConstraint> const0, const1, equality, negation;  // Gamma_aux
    std::vector<Constraint> gamma_max() const;
};

MaximalCompression maximal_compression(const std::vector<Constraint>& gamma);

struct Tableau {
    std::vector<int> variable_order;  // v_1 ... v_n
    std::vector<Tuple> rows;          // n+1 rows; columns follow variable_order
    std::vector<int> present;         // I: 0-based row indices present in the source constraint
};

Tableau tableau_01(const TVFGraph& g);
Tableau tableau_no00(const TVFGraph& g);
// Returns the negation set U and the upper triangular tableau of C_TVF(G)_{not U}.
std::pair<std::vector<int>, Tableau> tableau_negated(const TVFGraph& g);

struct SimulationResult {
    Constraint target;           // on fresh slot ids {0,1,2} = (x,y,z)
    std::vector<int> slot_vars;  // {0,1,2}
    std::vector<int> aux_vars;   // fresh ids >= 3 (the z' slot), possibly empty
    VarMap map;                  // source context -> slots/aux/constants (negations allowed)
    std::vector<int> negated_at; // U for the with-negation construction, else empty
};

// Prop: a TVF constraint with no 00 edges failing MAJ simulates one of
// {(1,0,0),(0,1,0),(0,0,1)} or {(1,0,1),(0,1,1),(0,0,0)}.
SimulationResult simulate_one_in_three(const Constraint& c);
// Prop: a TVF constraint failing MAJ simulates {(1,0,0),(0,1,0),(0,0,1)} with negation.
SimulationResult simulate_one_in_three_neg(const Constraint& c);

Constraint one_in_three();                       // {(1,0,0),(0,1,0),(0,0,1)} on {0,1,2}
Constraint equality2();                          // {(0,0),(1,1)} on {0,1}
Constraint negation2();                          // {(0,1),(1,0)} on {0,1}
const std::vector<Constraint>& simulation_targets();  // the four 3-variable targets

} // namespace qcsp

#endif
