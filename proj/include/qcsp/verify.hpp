#ifndef QCSP_VERIFY_HPP
#define QCSP_VERIFY_HPP

#include <cstdint>
#include <string>

#include "qcsp/gadgets.hpp"
#include "qcsp/quantum.hpp"

namespace qcsp {

// One trace inequality tau(LHS) <= constant * tau(RHS) evaluated on seeded
// random finite-dimensional operators. pass iff lhs <= constant*rhs + tol.
struct InequalityCheck {
    std::string name;
    double lhs = 0, rhs = 0;
    double constant = 0;
    bool pass = false;
};

InequalityCheck check_hermitian_square(int kterms, int d, std::uint64_t seed,
                                       double tol = kTolNum);
InequalityCheck check_basic_gadget(int d, std::uint64_t seed, double tol = kTolNum);
InequalityCheck check_3col_oracularisable(int d, std::uint64_t seed, double tol = kTolNum);
InequalityCheck check_prism(int d, std::uint64_t seed, double tol = kTolNum);
InequalityCheck check_acomm_to_a_3col(const ConstraintSystem& s, const std::vector<Rational>& pi,
                                      int d, std::uint64_t seed, double tol = kTolNum);
InequalityCheck check_acomm_to_a_tvf(const ConstraintSystem& s, const std::vector<Rational>& pi,
                                     int d, std::uint64_t seed, double tol = kTolNum);

// A defect pullback across one transformation: df(pullback) <= C * df(target).
struct ChomCheck {
    std::string transform;
    double df_pullback = 0, df_target = 0;
    double constant = 0;
    bool pass = false;
    bool exact = false;  // 1-homomorphisms both ways: defects equal
};

ChomCheck chom_boolean_form(const ConstraintSystem& s, const PairDist& pi, int d,
                            std::uint64_t seed, double tol = kTolNum);
ChomCheck chom_cc_to_cv(const ConstraintSystem& s, const PairDist& pi, int d, std::uint64_t seed,
                        double tol = kTolNum);
ChomCheck chom_cv_to_cc(const ConstraintSystem& s, const PairDist& pi, int d, std::uint64_t seed,
                        double tol = kTolNum);
ChomCheck chom_acomm_to_cv(const ConstraintSystem& s, const std::vector<Rational>& pi, int d,
                           std::uint64_t seed, double tol = kTolNum);
ChomCheck chom_a_to_acomm(const ConstraintSystem& s, const std::vector<Rational>& pi, int d,
                          std::uint64_t seed, double tol = kTolNum);
ChomCheck chom_replace_empty(const ConstraintSystem& s, const Constraint& witness, int witness_u,
                             int witness_v, const std::vector<Rational>& pi, int d,
                             std::uint64_t seed, double tol = kTolNum);
ChomCheck chom_the_bends(const ConstraintSystem& s, const std::vector<TheBendsLink>& links,
                         const std::vector<Rational>& pi, int d, std::uint64_t seed,
                         double tol = kTolNum);
ChomCheck chom_cc_expand(const ConstraintSystem& s, const std::vector<Rational>& pi, int d,
                         std::uint64_t seed, double tol = kTolNum);

} // namespace qcsp

#endif
