#ifndef QCSP_GAMES_HPP
#define QCSP_GAMES_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcsp/cs.hpp"

namespace qcsp {

// Probability distribution on question pairs, stored sparsely as exact rationals.
struct PairDist {
    std::map<std::pair<int, int>, Rational> w;

    Rational at(int i, int j) const;
    Rational row_sum(int i) const;
    Rational col_sum(int j) const;
    Rational total() const;
    bool symmetric() const;
    std::vector<Rational> marginal(int m) const;  // pi'(i) = sum_j pi(i,j)
    void validate() const;                        // nonnegative, sums to 1
};

PairDist uniform_pairs(int m);
PairDist uniform_diagonal(int m);

struct GameSpec {
    std::vector<std::string> questions;
    std::vector<int> answer_count;
    PairDist dist;  // pairs with zero mass are pruned
    std::function<bool(int a, int b, int i, int j)> predicate;
    bool synchronous = false;

    void validate() const;
};

// The three CS game models.
GameSpec cc_game(const ConstraintSystem& s, const PairDist& pi);

struct CvGameOptions {
    bool symmetrize = false;       // give each player both roles with mass 1/2
    Rational consistency = 0;      // extra diagonal consistency mass (symmetrized form)
};
GameSpec cv_game(const ConstraintSystem& s, const std::vector<Rational>& pi,
                 const CvGameOptions& options = {});

GameSpec twocs_game(const ConstraintSystem& s, const std::vector<Rational>& pi);

struct ClassicalValue {
    Rational value;                      // max over deterministic strategy pairs
    std::optional<Rational> sync_value;  // single-function optimum, synchronous games
};

ClassicalValue classical_value(const GameSpec& g, std::uint64_t search_bound = kDefaultSearchBound);

bool is_diagonally_dominant(const PairDist& pi, const Rational& c);
// The same inequality checked only at the listed questions' rows and columns.
bool is_diagonally_dominant_at(const PairDist& pi, const Rational& c,
                               const std::vector<int>& questions);

} // namespace qcsp

#endif
