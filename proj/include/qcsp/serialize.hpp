#ifndef QCSP_SERIALIZE_HPP
#define QCSP_SERIALIZE_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "qcsp/cs.hpp"
#include "qcsp/games.hpp"
#include "qcsp/quantum.hpp"

namespace qcsp {

using Json = nlohmann::ordered_json;

struct ParsedInstance {
    ConstraintSystem cs;
    std::optional<PairDist> pair_dist;            // explicit pair weights
    std::optional<std::vector<Rational>> vec_dist;  // uniform or pairless weights
};

// Instance files: {"k": int, "variables": [names], "constraints":
// [{"context": [names], "accepted": [[ints]]}], "distribution": {...}}.
// Unknown fields are rejected.
ParsedInstance parse_instance(const Json& j);
Json serialize_instance(const ConstraintSystem& cs,
                        const std::optional<PairDist>& pair_dist = std::nullopt,
                        const std::optional<std::vector<Rational>>& vec_dist = std::nullopt);

SyncStrategy parse_strategy(const Json& j, const ConstraintSystem& cs);
Json serialize_strategy(const SyncStrategy& st, const ConstraintSystem& cs);

VarMap parse_varmap(const Json& j, const ConstraintSystem& cs);
Json serialize_varmap(const VarMap& r, const ConstraintSystem& cs);

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace qcsp

#endif
