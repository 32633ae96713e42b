#ifndef QCSP_RATIONAL_HPP
#define QCSP_RATIONAL_HPP

#include <gmpxx.h>
#include <string>
#include <vector>

namespace qcsp {

// Exact arithmetic for distributions and classical values.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string rat_str(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline double rat_double(const Rational& q) { return q.get_d(); }

inline Rational parse_rational(const std::string& s) {
    Rational q(s);
    q.canonicalize();
    return q;
}

} // namespace qcsp

#endif
