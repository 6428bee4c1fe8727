#include "tichain/io.hpp"

#include <cctype>
#include <istream>
#include <sstream>

namespace tichain {

namespace {

BigInt parse_integer(std::string_view digits) {
  if (digits.empty()) throw std::invalid_argument("parse_rational: missing digits");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("parse_rational: unexpected character in '" + std::string(digits) + "'");
    }
  }
  // Leading zeros would select octal in the string constructor.
  const auto first = digits.find_first_not_of('0');
  return first == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(first)));
}

BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string original(text);
  if (text.empty()) throw std::invalid_argument("parse_rational: empty input");
  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational value;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator in '" + original + "'");
    value = Rational(parse_integer(text.substr(0, slash)), den);
  } else {
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp = text.substr(e + 1);
      bool neg_exp = false;
      if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
        neg_exp = exp.front() == '-';
        exp.remove_prefix(1);
      }
      if (exp.empty() || exp.size() > 6) throw std::invalid_argument("parse_rational: bad exponent in '" + original + "'");
      exponent = std::stol(std::string(parse_integer(exp).str()));
      if (neg_exp) exponent = -exponent;
      text = text.substr(0, e);
    }
    std::string digits;
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
      const auto frac = text.substr(dot + 1);
      digits = std::string(text.substr(0, dot)) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    } else {
      digits = std::string(text);
    }
    const BigInt mant = parse_integer(digits);
    value = exponent >= 0 ? Rational(mant * pow10(exponent)) : Rational(mant, pow10(-exponent));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& r) { return r.str(); }

std::vector<BellInequality> read_inequalities(std::istream& in) {
  std::vector<BellInequality> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    const std::string where = "inequality file line " + std::to_string(line_no) + ": ";
    if (tokens.size() != kNumCoords + 1) {
      throw std::invalid_argument(where + "expected 11 numbers, found " + std::to_string(tokens.size()));
    }
    try {
      CoordVector<Rational> c;
      for (int i = 0; i < kNumCoords; ++i) c(i) = parse_rational(tokens[i]);
      out.emplace_back(c, parse_rational(tokens[kNumCoords]), "line-" + std::to_string(line_no));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  return out;
}

std::string format_inequality(const BellInequality& ineq) {
  std::string s;
  for (int i = 0; i < kNumCoords; ++i) s += to_string(ineq.coeffs(i)) + " ";
  return s + to_string(ineq.bound);
}

JointDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("distribution: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "d" && key != "n" && key != "probs") {
      throw std::invalid_argument("distribution: unknown key '" + key + "'");
    }
  }
  if (!j.contains("d") || !j.contains("n") || !j.contains("probs")) {
    throw std::invalid_argument("distribution: need keys d, n and probs");
  }
  if (!j["d"].is_number_integer() || !j["n"].is_number_integer() || !j["probs"].is_array()) {
    throw std::invalid_argument("distribution: d and n must be integers and probs an array");
  }
  std::vector<double> probs;
  for (const auto& p : j["probs"]) {
    if (!p.is_number()) throw std::invalid_argument("distribution: probs must be numbers");
    probs.push_back(p.get<double>());
  }
  return JointDistribution(j["d"].get<int>(), j["n"].get<int>(), std::move(probs), 1e-9);
}

nlohmann::json to_json(const JointDistribution& p) {
  return {{"d", p.d()}, {"n", p.n()}, {"probs", p.probs()}};
}

nlohmann::json to_json(const DominoLoop& loop) {
  nlohmann::json tiles = nlohmann::json::array();
  for (std::size_t s = 0; s < loop.size(); ++s) tiles.push_back(loop.symbols(s));
  return {{"length", loop.size()}, {"tiles", tiles}, {"text", to_string(loop)}};
}

nlohmann::json to_json(const BellInequality& ineq) {
  std::vector<std::string> c;
  for (int i = 0; i < kNumCoords; ++i) c.push_back(to_string(ineq.coeffs(i)));
  return {{"name", ineq.name},
          {"coefficients", c},
          {"bound", to_string(ineq.bound)},
          {"text", format_inequality(ineq)}};
}

nlohmann::json to_json(const ExactBehavior& b) {
  std::vector<std::string> e;
  for (int i = 0; i < kNumCoords; ++i) e.push_back(to_string(b.e(i)));
  return e;
}

nlohmann::json to_json(const FacetCheck& f) {
  return {{"valid", f.valid},
          {"tight", f.tight},
          {"face_dim", f.face_dim},
          {"ambient_dim", f.ambient_dim},
          {"facet", f.is_facet()}};
}

nlohmann::json to_json(const WitnessReport& r) {
  nlohmann::json j = {{"value", r.value},
                      {"tis_bound", r.tis_bound},
                      {"violation", r.violation},
                      {"ppt", r.ppt}};
  j["ti_bound"] = r.ti_bound ? nlohmann::json(*r.ti_bound) : nlohmann::json(nullptr);
  j["excluded_block_size"] =
      r.excluded_block_size ? nlohmann::json(*r.excluded_block_size) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const GroundResult& r) {
  return {{"rings", r.ring_sizes},
          {"energies", r.energies},
          {"energy_per_site", r.energy_per_site},
          {"extrapolated", r.extrapolated},
          {"residual", r.residual},
          {"iterations", r.matvecs}};
}

nlohmann::json to_json(const RegisterMeasurements& m) {
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& pair : m.sets) {
    nlohmann::json both = nlohmann::json::array();
    for (const auto& a : pair) {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < a.rows(); ++i) {
        std::vector<double> row(a.cols());
        for (int k = 0; k < a.cols(); ++k) row[k] = a(i, k);
        rows.push_back(row);
      }
      both.push_back(rows);
    }
    sets.push_back(both);
  }
  return {{"m", m.m}, {"sets", sets}};
}

}  // namespace tichain
