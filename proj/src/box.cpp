#include "nonlocal/box.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nonlocal/rational.hpp"

namespace nonlocal {

Box make_box(int x_count, int y_count, int a_count, int b_count) {
  if (x_count <= 0 || y_count <= 0 || a_count <= 0 || b_count <= 0) {
    fail(ErrorCode::InvalidArgument, "box dimensions must be positive");
  }
  Box box;
  box.x_count = x_count;
  box.y_count = y_count;
  box.a_count = a_count;
  box.b_count = b_count;
  box.p.assign(static_cast<std::size_t>(x_count) * y_count * a_count * b_count,
               0.0);
  return box;
}

Box pr_box() {
  Box box = make_box(2, 2, 2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) box.at(x, y, a, b) = 0.5;
  return box;
}

NonsignalingReport check_nonsignaling(const Box& box, double tol) {
  NonsignalingReport report;
  double worst = 0.0;
  for (int x = 0; x < box.x_count; ++x) {
    for (int y = 0; y < box.y_count; ++y) {
      double sum = 0.0;
      for (int a = 0; a < box.a_count; ++a)
        for (int b = 0; b < box.b_count; ++b) {
          double v = box.at(x, y, a, b);
          worst = std::max(worst, -v);  // negative entries are deviations too
          sum += v;
        }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  // Alice's marginal must not depend on y.
  for (int x = 0; x < box.x_count; ++x) {
    for (int a = 0; a < box.a_count; ++a) {
      double ref = 0.0;
      for (int b = 0; b < box.b_count; ++b) ref += box.at(x, 0, a, b);
      for (int y = 1; y < box.y_count; ++y) {
        double sum = 0.0;
        for (int b = 0; b < box.b_count; ++b) sum += box.at(x, y, a, b);
        worst = std::max(worst, std::abs(sum - ref));
      }
    }
  }
  // Bob's marginal must not depend on x.
  for (int y = 0; y < box.y_count; ++y) {
    for (int b = 0; b < box.b_count; ++b) {
      double ref = 0.0;
      for (int a = 0; a < box.a_count; ++a) ref += box.at(0, y, a, b);
      for (int x = 1; x < box.x_count; ++x) {
        double sum = 0.0;
        for (int a = 0; a < box.a_count; ++a) sum += box.at(x, y, a, b);
        worst = std::max(worst, std::abs(sum - ref));
      }
    }
  }
  report.worst_deviation = worst;
  report.ok = worst <= tol;
  return report;
}

double box_value(const Game& game, const Box& box) {
  if (box.x_count != game.x_count() || box.y_count != game.y_count() ||
      box.a_count != game.a_count() || box.b_count != game.b_count()) {
    fail(ErrorCode::ShapeMismatch, "box shape does not match the game");
  }
  double total = 0.0;
  for (int x = 0; x < box.x_count; ++x) {
    for (int y = 0; y < box.y_count; ++y) {
      double pi = to_double(game.prob(x, y));
      if (pi == 0.0) continue;
      double win = 0.0;
      for (int a = 0; a < box.a_count; ++a)
        for (int b = 0; b < box.b_count; ++b)
          if (game.accepts(x, y, a, b)) win += box.at(x, y, a, b);
      total += pi * win;
    }
  }
  return total;
}

std::string box_to_csv(const Box& box) {
  std::string out = "x,y,a,b,p\n";
  char buf[64];
  for (int x = 0; x < box.x_count; ++x)
    for (int y = 0; y < box.y_count; ++y)
      for (int a = 0; a < box.a_count; ++a)
        for (int b = 0; b < box.b_count; ++b) {
          std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g\n", x, y, a, b,
                        box.at(x, y, a, b));
          out += buf;
        }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_index(const std::string& field, int bound, const char* what) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(field, &pos);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, std::string("bad ") + what + " field");
  }
  if (pos != field.size() || value < 0 || value >= bound) {
    fail(ErrorCode::ParseError,
         std::string(what) + " index out of range: " + field);
  }
  return static_cast<int>(value);
}

}  // namespace

Box box_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::ParseError, "empty box table");
  }
  {
    auto header = split_fields(line);
    if (header != std::vector<std::string>{"x", "y", "a", "b", "p"}) {
      fail(ErrorCode::ParseError, "box table must start with x,y,a,b,p");
    }
  }
  struct Row {
    int x, y, a, b;
    double p;
  };
  std::vector<Row> rows;
  int x_max = -1, y_max = -1, a_max = -1, b_max = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (fields.size() != 5) {
      fail(ErrorCode::ParseError, "box row must have 5 fields: " + line);
    }
    Row row;
    row.x = parse_index(fields[0], 1 << 30, "x");
    row.y = parse_index(fields[1], 1 << 30, "y");
    row.a = parse_index(fields[2], 1 << 30, "a");
    row.b = parse_index(fields[3], 1 << 30, "b");
    try {
      std::size_t pos = 0;
      row.p = std::stod(fields[4], &pos);
      if (pos != fields[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad probability field: " + fields[4]);
    }
    x_max = std::max(x_max, row.x);
    y_max = std::max(y_max, row.y);
    a_max = std::max(a_max, row.a);
    b_max = std::max(b_max, row.b);
    rows.push_back(row);
  }
  if (rows.empty()) {
    fail(ErrorCode::ParseError, "box table has no rows");
  }
  Box box = make_box(x_max + 1, y_max + 1, a_max + 1, b_max + 1);
  std::vector<bool> seen(box.p.size(), false);
  for (const Row& row : rows) {
    std::size_t idx =
        ((static_cast<std::size_t>(row.x) * box.y_count + row.y) * box.a_count +
         row.a) *
            box.b_count +
        row.b;
    if (seen[idx]) {
      fail(ErrorCode::ParseError, "duplicate box cell");
    }
    seen[idx] = true;
    box.p[idx] = row.p;
  }
  for (bool s : seen) {
    if (!s) fail(ErrorCode::ParseError, "box table is missing cells");
  }
  return box;
}

void save_box(const Box& box, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << box_to_csv(box);
}

Box load_box(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return box_from_csv(buf.str());
}

}  // namespace nonlocal
