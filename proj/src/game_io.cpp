#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "nonlocal/game.hpp"

namespace nonlocal {
namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> parse_label_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
    fail(ErrorCode::ParseError,
         std::string("game file needs a nonempty array '") + key + "'");
  }
  std::vector<std::string> labels;
  for (const auto& item : j[key]) {
    if (!item.is_string()) {
      fail(ErrorCode::ParseError,
           std::string("entries of '") + key + "' must be strings");
    }
    labels.push_back(item.get<std::string>());
  }
  return labels;
}

int parse_index(const Json& j, std::size_t limit, const char* what) {
  if (!j.is_number_integer()) {
    fail(ErrorCode::ParseError, std::string(what) + " index must be an integer");
  }
  auto v = j.get<std::int64_t>();
  if (v < 0 || static_cast<std::size_t>(v) >= limit) {
    fail(ErrorCode::ParseError, std::string(what) + " index " +
                                    std::to_string(v) + " out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

std::string game_to_json(const Game& g) {
  const GameData& d = g.data();
  Json j;
  j["questions_a"] = d.questions_a;
  j["questions_b"] = d.questions_b;
  j["answers_a"] = d.answers_a;
  j["answers_b"] = d.answers_b;

  Json dist = Json::array();
  for (int x = 0; x < g.x_count(); ++x)
    for (int y = 0; y < g.y_count(); ++y) {
      const Rational& p = g.prob(x, y);
      if (p == 0) continue;
      dist.push_back({x, y, checked_int64(numerator(p), "numerator"),
                      checked_int64(denominator(p), "denominator")});
    }
  j["distribution"] = std::move(dist);

  Json pred = Json::array();
  for (int x = 0; x < g.x_count(); ++x)
    for (int y = 0; y < g.y_count(); ++y)
      for (int a = 0; a < g.a_count(); ++a)
        for (int b = 0; b < g.b_count(); ++b)
          if (g.accepts(x, y, a, b)) pred.push_back({x, y, a, b});
  j["predicate"] = std::move(pred);
  return j.dump(2) + "\n";
}

Game game_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  GameData d;
  d.questions_a = parse_label_array(j, "questions_a");
  d.questions_b = parse_label_array(j, "questions_b");
  d.answers_a = parse_label_array(j, "answers_a");
  d.answers_b = parse_label_array(j, "answers_b");
  std::size_t nx = d.questions_a.size(), ny = d.questions_b.size();
  std::size_t na = d.answers_a.size(), nb = d.answers_b.size();

  d.distribution.assign(nx * ny, Rational(0));
  if (!j.contains("distribution") || !j["distribution"].is_array()) {
    fail(ErrorCode::ParseError, "game file needs an array 'distribution'");
  }
  std::set<std::size_t> seen;
  for (const auto& row : j["distribution"]) {
    if (!row.is_array() || row.size() != 4) {
      fail(ErrorCode::ParseError,
           "distribution rows must be [x, y, num, den]");
    }
    int x = parse_index(row[0], nx, "question x");
    int y = parse_index(row[1], ny, "question y");
    if (!row[2].is_number_integer() || !row[3].is_number_integer()) {
      fail(ErrorCode::ParseError, "distribution num/den must be integers");
    }
    auto num = row[2].get<std::int64_t>();
    auto den = row[3].get<std::int64_t>();
    if (den < 1) {
      fail(ErrorCode::ParseError, "distribution denominator must be >= 1");
    }
    std::size_t cell = static_cast<std::size_t>(x) * ny + y;
    if (!seen.insert(cell).second) {
      fail(ErrorCode::ParseError, "duplicate distribution entry for (" +
                                      std::to_string(x) + ", " +
                                      std::to_string(y) + ")");
    }
    d.distribution[cell] = make_rational(num, den);
  }

  d.predicate.assign(nx * ny * na * nb, 0);
  if (!j.contains("predicate") || !j["predicate"].is_array()) {
    fail(ErrorCode::ParseError, "game file needs an array 'predicate'");
  }
  for (const auto& row : j["predicate"]) {
    if (!row.is_array() || row.size() != 4) {
      fail(ErrorCode::ParseError, "predicate rows must be [x, y, a, b]");
    }
    int x = parse_index(row[0], nx, "question x");
    int y = parse_index(row[1], ny, "question y");
    int a = parse_index(row[2], na, "answer a");
    int b = parse_index(row[3], nb, "answer b");
    std::size_t idx =
        ((static_cast<std::size_t>(x) * ny + y) * na + a) * nb + b;
    if (d.predicate[idx]) {
      fail(ErrorCode::ParseError, "duplicate predicate entry");
    }
    d.predicate[idx] = 1;
  }
  return Game::make(std::move(d));
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open game file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return game_from_json(buffer.str());
}

void save_game(const Game& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write game file '" + path + "'");
  out << game_to_json(g);
}

}  // namespace nonlocal
