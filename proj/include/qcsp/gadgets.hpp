#ifndef QCSP_GADGETS_HPP
#define QCSP_GADGETS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcsp/cs.hpp"
#include "qcsp/games.hpp"
#include "qcsp/tvf.hpp"

namespace qcsp {

struct TheBendsLink {
    Constraint parent;                    // C' in Gamma
    std::map<int, int> kept_to_instance;  // parent context variable -> instance variable
};

struct GadgetOutput {
    ConstraintSystem cs;
    std::map<std::string, int> distinguished;  // role name -> variable id
    Rational claimed_constant = 1;
    std::string provenance;
    // For commutativity gadgets: per joint value (a,b) of the distinguished
    // pair (index a*k+b), a full satisfying assignment extending it.
    std::vector<std::vector<Value>> pair_witnesses;
    // Parent links per constraint, for the general pipeline's final pass.
    std::vector<TheBendsLink> links;
};

// Brute-force completeness certificate: every joint value of the two roles
// extends to a satisfying assignment. Fills pair_witnesses or throws.
void certify_pair_extensions(GadgetOutput& g, const std::string& role_a,
                             const std::string& role_b);

// The restriction of the satisfying-assignment set to the given variables,
// computed by exhaustive search.
Constraint satisfying_restriction(const ConstraintSystem& s, const std::vector<int>& vars);

// Three copies of a 3-variable base constraint in the triangular arrangement
// V1={x,u,v}, V2={y,u,w}, V3={z,v,w}. The base must be the 1-in-3 constraint
// negated at some position set; `negated` lists the gadget variables carrying
// the negated slots, and each triangle must receive exactly that many of them.
GadgetOutput basic_gadget(const Constraint& base, const std::vector<std::string>& negated = {});

GadgetOutput prism_gadget();

struct ConstGadgets {
    GadgetOutput zero, one;
};
// Pins from the maximal compression: zero needs an incompressible constraint
// with an 11 edge, one additionally a constraint excluding the all-0 tuple.
ConstGadgets const_gadgets(const MaximalCompression& mc);
// Mirrored variants built from a 00 edge and an all-1-excluding constraint.
ConstGadgets const_gadgets_flipped(const MaximalCompression& mc);

GadgetOutput negation_gadget(const MaximalCompression& mc);

// Realizes the simulated 3-variable target over the source constraint, wiring
// constants through the const gadgets and negated slots through C_neq pairs
// (replaced by copies of `neg` when provided). `source_parent`, when given,
// records the Gamma parent of the source for the final lifting pass.
GadgetOutput simulate_gadget(const Constraint& source, const SimulationResult& sim,
                             const std::optional<GadgetOutput>& zero,
                             const std::optional<GadgetOutput>& one,
                             const std::optional<GadgetOutput>& neg,
                             const std::optional<TheBendsLink>& source_parent = std::nullopt);

GadgetOutput general_commutativity_gadget(const std::vector<Constraint>& gamma);

// Replaces every empty 2-variable constraint by the non-TVF witness constraint
// placed on the pair, with fresh variables for the remaining positions.
ConstraintSystem replace_empty_nontvf(const ConstraintSystem& s, const Constraint& witness,
                                      int witness_u, int witness_v);
// First constraint of a non-TVF family whose pair admits all k^2 joint values.
struct NonTvfWitness {
    int index;
    int u, v;
};
std::optional<NonTvfWitness> find_non_tvf_witness(const std::vector<Constraint>& gamma);

// Replaces each instance constraint by its parent on an extended context with
// fresh variables; links are validated against the instance constraints.
ConstraintSystem the_bends(const ConstraintSystem& s, const std::vector<TheBendsLink>& links);

struct ReweightedSystem {
    ConstraintSystem cs;
    std::vector<Rational> dist;
};

// 3-colouring: empty constraints become the nine prism edges, pi'(ie)=pi(i)/9.
ReweightedSystem replace_empty_3col(const ConstraintSystem& s, const std::vector<Rational>& pi);

// One-hot BCS -> k-ary 2-CS with a question variable per constraint.
ReweightedSystem cv_to_2csp(const ConstraintSystem& s, const std::vector<Rational>& pi, int k);

struct CcExpandResult {
    ConstraintSystem cs;
    std::vector<Rational> pi_constraints;        // pi' on [m']
    PairDist pi_pairs;                           // pi'' on [m'] x [m']
    int anchor_template;                         // index of the constraint used as C_0
};
CcExpandResult cc_expand(const ConstraintSystem& s, const std::vector<Rational>& pi);

struct SubdivideResult {
    ConstraintSystem cs;
    PairDist dist;                                // pi_sub
    std::vector<std::pair<int, int>> index_map;   // subdivided index -> (i, j)
};
// Clause decompositions are caller-provided; conditions (1)-(3) are enforced.
SubdivideResult subdivide(const ConstraintSystem& b, const PairDist& pi,
                          const std::vector<std::vector<Constraint>>& clauses);
// One clause per variable pair (the pairwise projections) when their
// conjunction recovers the constraint, else the trivial one-clause split.
std::vector<std::vector<Constraint>> canonical_decomposition(const ConstraintSystem& b);

struct OracularizeResult {
    ConstraintSystem cs;           // the BCS built from the game
    PairDist dist;                 // pi^orac over the CS constraints
    GameSpec game;                 // G(B, pi^orac)
    std::vector<int> pair_questions;  // indices of the pair questions in the CS
};
OracularizeResult oracularize(const GameSpec& g);

// Canonical small systems used by tests and the CLI.
ConstraintSystem one_in_three_cs();
ConstraintSystem colouring_cs(int k, const std::vector<std::pair<int, int>>& edges, int n);
ConstraintSystem triangle_3col();
ConstraintSystem k4_3col();

} // namespace qcsp

#endif
