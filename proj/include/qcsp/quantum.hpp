#ifndef QCSP_QUANTUM_HPP
#define QCSP_QUANTUM_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qcsp/cs.hpp"
#include "qcsp/games.hpp"

namespace qcsp {

using CMatrix = Eigen::MatrixXcd;

inline constexpr double kTolProj = 1e-9;
inline constexpr double kTolNum = 1e-7;

// Deterministic random source: raw mt19937_64 bits plus an explicit Box-Muller
// transform, so streams are identical across platforms and library versions.
struct Rng {
    std::mt19937_64 gen;
    bool have_cached = false;
    double cached = 0;

    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform();   // [0, 1)
    double gaussian();  // standard normal
    int below(int n);   // uniform in [0, n)
};

CMatrix haar_unitary(int d, Rng& rng);
CMatrix ginibre(int rows, int cols, Rng& rng);

struct PVM {
    std::vector<CMatrix> projectors;

    int outcomes() const { return static_cast<int>(projectors.size()); }
    int dimension() const { return projectors.empty() ? 0 : static_cast<int>(projectors[0].rows()); }
};

// Projectors with near-equal ranks conjugated by a Haar unitary; the remainder
// ranks land on random outcomes, so d=1 yields a random deterministic answer.
PVM random_pvm(int d, int outcomes, Rng& rng);
PVM indicator_pvm(int outcomes, int chosen);  // d = 1
// The generating order-k unitary sum_a omega_k^a P_a.
CMatrix pvm_unitary(const PVM& pvm, int k);

double normalized_trace(const CMatrix& a);      // Re tr(a)/d
double tau_norm2(const CMatrix& a);             // tr(a^* a)/d

enum class Model { CC, CV, A };
std::string model_name(Model m);

struct SyncStrategy {
    Model model = Model::CC;
    int d = 1;
    std::vector<PVM> context_pvms;   // per constraint, outcomes |C_i| (CC, CV)
    std::vector<PVM> variable_pvms;  // per variable, outcomes k (CV, A)
};

struct ValidationReport {
    double projector_residual = 0;   // max over ||P^2 - P||_F and ||P - P^*||_F
    double completeness_residual = 0;  // max over ||sum_a P_a - I||_F
    bool pass(double tol = kTolProj) const {
        return projector_residual <= tol && completeness_residual <= tol;
    }
};

ValidationReport validate(const SyncStrategy& st, const ConstraintSystem& s);

struct DefectTerm {
    std::string mu;  // which weight function
    double weight = 0;
    double norm2 = 0;
};

struct DefectReport {
    Model model = Model::CC;
    std::optional<double> value;
    std::map<std::string, double> totals;  // per weight function: cc, inter, cv, a, comm
    std::vector<DefectTerm> terms;

    double primary() const;  // the model's own defect
    double acomm() const { return totals.count("a") ? totals.at("a") + totals.at("comm") : 0; }
};

DefectReport defect(const SyncStrategy& st, const ConstraintSystem& s, const PairDist& pi);
DefectReport defect(const SyncStrategy& st, const ConstraintSystem& s,
                    const std::vector<Rational>& pi);

double winning_probability_cc(const SyncStrategy& st, const ConstraintSystem& s,
                              const PairDist& pi);
double winning_probability_cv(const SyncStrategy& st, const ConstraintSystem& s,
                              const std::vector<Rational>& pi);
double winning_probability_a(const SyncStrategy& st, const ConstraintSystem& s,
                             const std::vector<Rational>& pi);  // 2-CS only

SyncStrategy embed_classical(Model model, const ConstraintSystem& s,
                             const std::vector<Value>& phi);
// cc model from independent per-context choices (indices into accepted sets).
SyncStrategy embed_classical_cc(const ConstraintSystem& s, const std::vector<int>& choices);
SyncStrategy random_strategy(Model model, const ConstraintSystem& s, int d, std::uint64_t seed);

// Strategy aligned with a GameSpec's question list.
struct QuestionStrategy {
    int d = 1;
    std::vector<PVM> pvms;
};

double winning_probability(const QuestionStrategy& st, const GameSpec& g);
QuestionStrategy question_strategy_cc(const SyncStrategy& st);
QuestionStrategy question_strategy_cv(const SyncStrategy& st);
QuestionStrategy question_strategy_a(const SyncStrategy& st);

struct SeesawResult {
    QuestionStrategy strategy;
    std::vector<double> values;  // start value, then one entry per sweep
};

// Alternating per-question PVM updates; each candidate update comes from a
// closed-form eigenprojector assignment and is kept only when the true value
// does not decrease, so the trace is monotone and stalls at a fixed point.
SeesawResult seesaw(const QuestionStrategy& start, const GameSpec& g, int sweeps);

// |LHS - RHS| of the 3-clique trace identity for order-3 unitary triples.
double verify_identity_3clique(const PVM& x, const PVM& y, const PVM& z);

} // namespace qcsp

#endif
