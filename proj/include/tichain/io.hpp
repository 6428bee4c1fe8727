#pragma once

// Text and JSON formats shared by the command-line tool and the tests.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "tichain/bell_polytope.hpp"
#include "tichain/marginals.hpp"
#include "tichain/quantum_eval.hpp"
#include "tichain/witnesses.hpp"

namespace tichain {

/// One inequality per line: C0 C1 CAB00 CAB01 CAB10 CAB11 CAC00 CAC01 CAC10
/// CAC11 L. Entries may be integers, fractions or decimals. '#' starts a
/// comment; blank lines are skipped. Throws std::invalid_argument naming the
/// offending line.
std::vector<BellInequality> read_inequalities(std::istream& in);
std::string format_inequality(const BellInequality& ineq);

/// {"d": d, "n": n, "probs": [...]}; throws std::invalid_argument on bad input.
JointDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const JointDistribution& p);
nlohmann::json to_json(const DominoLoop& loop);
nlohmann::json to_json(const BellInequality& ineq);
nlohmann::json to_json(const ExactBehavior& b);
nlohmann::json to_json(const FacetCheck& f);
nlohmann::json to_json(const WitnessReport& r);
nlohmann::json to_json(const GroundResult& r);
nlohmann::json to_json(const RegisterMeasurements& m);

}  // namespace tichain
