#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nonlocal/protocol.hpp"

namespace nonlocal {
namespace {

using Json = nlohmann::ordered_json;

Json rational_to_json(const Rational& r) {
  return Json::array({checked_int64(numerator(r), "numerator"),
                      checked_int64(denominator(r), "denominator")});
}

Rational rational_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    fail(ErrorCode::ParseError,
         std::string(what) + " must be a [numerator, denominator] pair");
  }
  auto den = j[1].get<std::int64_t>();
  if (den < 1) {
    fail(ErrorCode::ParseError,
         std::string(what) + " denominator must be >= 1");
  }
  return make_rational(j[0].get<std::int64_t>(), den);
}

Json matrix_to_json(const CMat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex complex_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    fail(ErrorCode::ParseError,
         std::string(what) + " entries must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

CMat matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorCode::ParseError,
         std::string(what) + " must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  CMat m;
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || row.empty()) {
      fail(ErrorCode::ParseError,
           std::string(what) + " rows must be nonempty arrays");
    }
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows),
               static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      fail(ErrorCode::ParseError, std::string(what) + " rows differ in length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_from_json(row[c], what);
    }
  }
  return m;
}

Json vector_to_json(const CVec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(Json::array({v(i).real(), v(i).imag()}));
  }
  return out;
}

CVec vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorCode::ParseError,
         std::string(what) + " must be a nonempty array");
  }
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], what);
  }
  return v;
}

Json families_to_json(const std::vector<std::vector<CMat>>& families) {
  Json out = Json::array();
  for (const auto& family : families) {
    Json f = Json::array();
    for (const CMat& m : family) f.push_back(matrix_to_json(m));
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::vector<CMat>> families_from_json(const Json& j,
                                                  const char* what) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorCode::ParseError,
         std::string(what) + " must be a nonempty array of families");
  }
  std::vector<std::vector<CMat>> out;
  for (const auto& fj : j) {
    if (!fj.is_array() || fj.empty()) {
      fail(ErrorCode::ParseError,
           std::string(what) + " families must be nonempty arrays");
    }
    std::vector<CMat> family;
    for (const auto& mj : fj) family.push_back(matrix_from_json(mj, what));
    out.push_back(std::move(family));
  }
  return out;
}

int parse_int(const Json& j, const char* key, int lo, int hi) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    fail(ErrorCode::ParseError,
         std::string("protocol file needs an integer '") + key + "'");
  }
  auto v = j[key].get<std::int64_t>();
  if (v < lo || v > hi) {
    fail(ErrorCode::ParseError, std::string("'") + key + "' value " +
                                    std::to_string(v) + " out of range");
  }
  return static_cast<int>(v);
}

const Json& require_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    fail(ErrorCode::ParseError,
         std::string("protocol file needs an array '") + key + "'");
  }
  return j[key];
}

Json classical_to_json(const ClassicalProtocol& p) {
  Json j;
  j["kind"] = "classical";
  j["x_count"] = p.x_count;
  j["y_count"] = p.y_count;
  j["a_count"] = p.a_count;
  j["b_count"] = p.b_count;
  Json randomness = Json::array();
  for (const Rational& r : p.randomness) randomness.push_back(rational_to_json(r));
  j["randomness"] = std::move(randomness);
  j["speakers"] = p.speakers;
  Json next = Json::array();
  for (const auto& table : p.next_bit) {
    Json t = Json::array();
    for (auto bit : table) t.push_back(static_cast<int>(bit));
    next.push_back(std::move(t));
  }
  j["next_bit"] = std::move(next);
  j["alice_output"] = p.alice_output;
  j["bob_output"] = p.bob_output;
  return j;
}

ClassicalProtocol classical_from_json(const Json& j) {
  ClassicalProtocol p;
  p.x_count = parse_int(j, "x_count", 1, 1 << 20);
  p.y_count = parse_int(j, "y_count", 1, 1 << 20);
  p.a_count = parse_int(j, "a_count", 1, 1 << 20);
  p.b_count = parse_int(j, "b_count", 1, 1 << 20);
  for (const auto& rj : require_array(j, "randomness")) {
    p.randomness.push_back(rational_from_json(rj, "randomness entry"));
  }
  for (const auto& sj : require_array(j, "speakers")) {
    if (!sj.is_number_integer()) {
      fail(ErrorCode::ParseError, "speakers must be integers");
    }
    p.speakers.push_back(sj.get<int>());
  }
  for (const auto& tj : require_array(j, "next_bit")) {
    if (!tj.is_array()) {
      fail(ErrorCode::ParseError, "next_bit must hold arrays");
    }
    std::vector<std::uint8_t> table;
    for (const auto& bj : tj) {
      if (!bj.is_number_integer()) {
        fail(ErrorCode::ParseError, "next_bit entries must be integers");
      }
      table.push_back(static_cast<std::uint8_t>(bj.get<int>()));
    }
    p.next_bit.push_back(std::move(table));
  }
  for (const auto& oj : require_array(j, "alice_output")) {
    if (!oj.is_number_integer()) {
      fail(ErrorCode::ParseError, "alice_output entries must be integers");
    }
    p.alice_output.push_back(oj.get<int>());
  }
  for (const auto& oj : require_array(j, "bob_output")) {
    if (!oj.is_number_integer()) {
      fail(ErrorCode::ParseError, "bob_output entries must be integers");
    }
    p.bob_output.push_back(oj.get<int>());
  }
  validate_protocol(p);
  return p;
}

Json quantum_to_json(const QuantumProtocol& p) {
  Json j;
  j["kind"] = "quantum";
  j["x_count"] = p.x_count;
  j["y_count"] = p.y_count;
  j["a_count"] = p.a_count;
  j["b_count"] = p.b_count;
  j["alice_qubits"] = p.alice_qubits;
  j["bob_qubits"] = p.bob_qubits;
  j["epr_pairs"] = p.epr_pairs;
  j["qubit_budget"] = p.qubit_budget;
  Json rounds = Json::array();
  for (const QuantumRound& round : p.rounds) {
    Json rj;
    rj["speaker"] = round.speaker;
    Json us = Json::array();
    for (const CMat& u : round.unitaries) us.push_back(matrix_to_json(u));
    rj["unitaries"] = std::move(us);
    rounds.push_back(std::move(rj));
  }
  j["rounds"] = std::move(rounds);
  j["alice_measurement"] = families_to_json(p.alice_measurement);
  j["bob_measurement"] = families_to_json(p.bob_measurement);
  return j;
}

QuantumProtocol quantum_from_json(const Json& j) {
  QuantumProtocol p;
  p.x_count = parse_int(j, "x_count", 1, 1 << 20);
  p.y_count = parse_int(j, "y_count", 1, 1 << 20);
  p.a_count = parse_int(j, "a_count", 1, 1 << 20);
  p.b_count = parse_int(j, "b_count", 1, 1 << 20);
  p.alice_qubits = parse_int(j, "alice_qubits", 1, 32);
  p.bob_qubits = parse_int(j, "bob_qubits", 1, 32);
  p.epr_pairs = parse_int(j, "epr_pairs", 0, 32);
  p.qubit_budget = parse_int(j, "qubit_budget", 0, 32);
  p.rounds.clear();
  for (const auto& rj : require_array(j, "rounds")) {
    QuantumRound round;
    round.speaker = parse_int(rj, "speaker", 0, 1);
    for (const auto& uj : require_array(rj, "unitaries")) {
      round.unitaries.push_back(matrix_from_json(uj, "round unitary"));
    }
    p.rounds.push_back(std::move(round));
  }
  p.alice_measurement =
      families_from_json(require_array(j, "alice_measurement"),
                         "alice_measurement");
  p.bob_measurement = families_from_json(require_array(j, "bob_measurement"),
                                         "bob_measurement");
  validate_protocol(p);
  return p;
}

Json zerocomm_to_json(const ZeroCommProtocol& p) {
  Json j;
  j["kind"] = "zerocomm";
  j["epr_pairs"] = p.epr_pairs;
  Json weights = Json::array();
  for (const Rational& w : p.weights) weights.push_back(rational_to_json(w));
  j["weights"] = std::move(weights);
  Json parts = Json::array();
  for (const QuantumStrategy& s : p.parts) {
    Json sj;
    sj["d_a"] = s.d_a;
    sj["d_b"] = s.d_b;
    sj["state"] = vector_to_json(s.state);
    sj["alice"] = families_to_json(s.alice);
    sj["bob"] = families_to_json(s.bob);
    parts.push_back(std::move(sj));
  }
  j["parts"] = std::move(parts);
  return j;
}

ZeroCommProtocol zerocomm_from_json(const Json& j) {
  ZeroCommProtocol p;
  p.epr_pairs = parse_int(j, "epr_pairs", -1, 32);
  for (const auto& wj : require_array(j, "weights")) {
    p.weights.push_back(rational_from_json(wj, "ensemble weight"));
  }
  for (const auto& sj : require_array(j, "parts")) {
    QuantumStrategy s;
    s.d_a = parse_int(sj, "d_a", 1, 1 << 12);
    s.d_b = parse_int(sj, "d_b", 1, 1 << 12);
    s.state = vector_from_json(require_array(sj, "state"), "state");
    s.alice = families_from_json(require_array(sj, "alice"), "alice");
    s.bob = families_from_json(require_array(sj, "bob"), "bob");
    p.parts.push_back(std::move(s));
  }
  validate_protocol(p);
  return p;
}

}  // namespace

std::string protocol_to_json(const ProtocolVariant& p) {
  Json j;
  if (const auto* c = std::get_if<ClassicalProtocol>(&p)) {
    j = classical_to_json(*c);
  } else if (const auto* q = std::get_if<QuantumProtocol>(&p)) {
    j = quantum_to_json(*q);
  } else if (const auto* z = std::get_if<ZeroCommProtocol>(&p)) {
    j = zerocomm_to_json(*z);
  } else {
    fail(ErrorCode::InvalidArgument,
         "teleported protocols are derived; store the source quantum "
         "protocol instead");
  }
  return j.dump(2) + "\n";
}

ProtocolVariant protocol_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    fail(ErrorCode::ParseError, "protocol file needs a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "classical") return classical_from_json(j);
  if (kind == "quantum") return quantum_from_json(j);
  if (kind == "zerocomm") return zerocomm_from_json(j);
  fail(ErrorCode::ParseError, "unknown protocol kind '" + kind + "'");
}

ProtocolVariant load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::ParseError, "cannot open protocol file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return protocol_from_json(buffer.str());
}

void save_protocol(const ProtocolVariant& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    fail(ErrorCode::ParseError, "cannot write protocol file '" + path + "'");
  }
  out << protocol_to_json(p);
}

ProtocolVariant builtin_protocol(const std::string& spec) {
  if (spec == "chsh-send-x") return chsh_send_x_protocol();
  if (spec == "chsh-send-x-quantum") return chsh_send_x_quantum_protocol();
  fail(ErrorCode::InvalidArgument,
       "unknown protocol '" + spec +
           "' (try chsh-send-x or chsh-send-x-quantum)");
}

}  // namespace nonlocal
