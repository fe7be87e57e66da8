#include "nonlocal/protocol.hpp"

namespace nonlocal {

namespace {

// Transcripts are table indices, so the bit budget must keep 2^c (and the
// guess-extended randomness set R * 2^c) enumerable.
constexpr int kMaxBits = 20;

void check_output_table(const std::vector<int>& table, int inputs,
                        std::size_t r_count, int transcripts, int answers,
                        const char* who) {
  const std::size_t expected =
      static_cast<std::size_t>(inputs) * r_count * transcripts;
  if (table.size() != expected) {
    fail(ErrorCode::InvalidArgument,
         std::string(who) + " output table has " +
             std::to_string(table.size()) + " entries, expected " +
             std::to_string(expected));
  }
  for (int v : table) {
    if (v < -1 || v >= answers) {
      fail(ErrorCode::InvalidArgument,
           std::string(who) + " output " + std::to_string(v) +
               " outside [-1, " + std::to_string(answers) + ")");
    }
  }
}

struct Execution {
  int transcript = 0;
  int alice_answer = 0;  // post-abort-fold answers
  int bob_answer = 0;
  bool aborted = false;
};

Execution execute(const ClassicalProtocol& p, int x, int y, std::size_t r) {
  const std::size_t r_count = p.randomness.size();
  Execution e;
  for (int t = 0; t < p.bits(); ++t) {
    const bool alice_speaks = p.speakers[static_cast<std::size_t>(t)] == 0;
    const std::size_t input = static_cast<std::size_t>(alice_speaks ? x : y);
    const std::size_t idx =
        (input * r_count + r) * (std::size_t{1} << t) +
        static_cast<std::size_t>(e.transcript);
    e.transcript |= p.next_bit[static_cast<std::size_t>(t)][idx] << t;
  }
  const std::size_t transcripts = std::size_t{1} << p.bits();
  const int ao = p.alice_output[(static_cast<std::size_t>(x) * r_count + r) *
                                    transcripts +
                                static_cast<std::size_t>(e.transcript)];
  const int bo = p.bob_output[(static_cast<std::size_t>(y) * r_count + r) *
                                  transcripts +
                              static_cast<std::size_t>(e.transcript)];
  e.aborted = ao < 0 || bo < 0;
  e.alice_answer = ao < 0 ? 0 : ao;
  e.bob_answer = bo < 0 ? 0 : bo;
  return e;
}

}  // namespace

void validate_protocol(const ClassicalProtocol& p) {
  if (p.x_count < 1 || p.y_count < 1 || p.a_count < 1 || p.b_count < 1) {
    fail(ErrorCode::InvalidArgument, "empty question or answer set");
  }
  if (p.randomness.empty()) {
    fail(ErrorCode::InvalidArgument, "empty shared randomness set");
  }
  Rational total(0);
  for (const Rational& w : p.randomness) {
    if (w < 0) {
      fail(ErrorCode::InvalidArgument, "negative randomness weight");
    }
    total += w;
  }
  if (total != Rational(1)) {
    fail(ErrorCode::InvalidArgument, "randomness weights must sum to 1");
  }
  if (p.bits() > kMaxBits) {
    fail(ErrorCode::BudgetViolation,
         "communication budget " + std::to_string(p.bits()) +
             " exceeds the transcript cap of " + std::to_string(kMaxBits));
  }
  if (p.next_bit.size() != p.speakers.size()) {
    fail(ErrorCode::InvalidArgument,
         "expected one next-bit table per round");
  }
  const std::size_t r_count = p.randomness.size();
  for (int t = 0; t < p.bits(); ++t) {
    const int speaker = p.speakers[static_cast<std::size_t>(t)];
    if (speaker != 0 && speaker != 1) {
      fail(ErrorCode::InvalidArgument, "speaker entries must be 0 or 1");
    }
    const int inputs = speaker == 0 ? p.x_count : p.y_count;
    const std::size_t expected =
        static_cast<std::size_t>(inputs) * r_count * (std::size_t{1} << t);
    const auto& table = p.next_bit[static_cast<std::size_t>(t)];
    if (table.size() != expected) {
      fail(ErrorCode::InvalidArgument,
           "round " + std::to_string(t) + " next-bit table has " +
               std::to_string(table.size()) + " entries, expected " +
               std::to_string(expected));
    }
    for (std::uint8_t bit : table) {
      if (bit > 1) {
        fail(ErrorCode::InvalidArgument, "next-bit entries must be 0 or 1");
      }
    }
  }
  const int transcripts = 1 << p.bits();
  check_output_table(p.alice_output, p.x_count, r_count, transcripts,
                     p.a_count, "alice");
  check_output_table(p.bob_output, p.y_count, r_count, transcripts, p.b_count,
                     "bob");
}

ClassicalRunResult run_protocol(const ClassicalProtocol& p, const Game& g) {
  validate_protocol(p);
  if (p.x_count != g.x_count() || p.y_count != g.y_count() ||
      p.a_count != g.a_count() || p.b_count != g.b_count()) {
    fail(ErrorCode::ShapeMismatch,
         "protocol question/answer sets do not match the game");
  }
  ClassicalRunResult result;
  result.success = Rational(0);
  result.abort_mass = Rational(0);
  result.outcomes = make_box(p.x_count, p.y_count, p.a_count, p.b_count);

  const std::size_t r_count = p.randomness.size();
  std::vector<Rational> slice(
      static_cast<std::size_t>(p.a_count) * p.b_count);
  for (int x = 0; x < p.x_count; ++x) {
    for (int y = 0; y < p.y_count; ++y) {
      const Rational& pi = g.prob(x, y);
      std::fill(slice.begin(), slice.end(), Rational(0));
      for (std::size_t r = 0; r < r_count; ++r) {
        const Rational& w = p.randomness[r];
        if (w == 0) continue;
        Execution e = execute(p, x, y, r);
        slice[static_cast<std::size_t>(e.alice_answer) * p.b_count +
              e.bob_answer] += w;
        if (e.aborted) {
          result.abort_mass += pi * w;
        } else if (g.accepts(x, y, e.alice_answer, e.bob_answer)) {
          result.success += pi * w;
        }
      }
      for (int a = 0; a < p.a_count; ++a)
        for (int b = 0; b < p.b_count; ++b)
          result.outcomes.at(x, y, a, b) = to_double(
              slice[static_cast<std::size_t>(a) * p.b_count + b]);
    }
  }
  return result;
}

ClassicalProtocol transcript_guess_transform(const ClassicalProtocol& p) {
  validate_protocol(p);
  const int c = p.bits();
  const std::size_t r_count = p.randomness.size();
  const std::size_t guesses = std::size_t{1} << c;

  ClassicalProtocol out;
  out.x_count = p.x_count;
  out.y_count = p.y_count;
  out.a_count = p.a_count;
  out.b_count = p.b_count;
  out.randomness.reserve(r_count * guesses);
  const Rational guess_weight(1, std::int64_t{1} << c);
  for (std::size_t r = 0; r < r_count; ++r)
    for (std::size_t g = 0; g < guesses; ++g)
      out.randomness.push_back(p.randomness[r] * guess_weight);

  // Each party replays only its own rounds against the guess; one mismatch
  // anywhere means the guess is not the transcript that would have been
  // spoken, and the party aborts.
  auto verified_output = [&](int party, int input, std::size_t r,
                             std::size_t guess) -> int {
    for (int t = 0; t < c; ++t) {
      if (p.speakers[static_cast<std::size_t>(t)] != party) continue;
      const std::size_t prefix = guess & ((std::size_t{1} << t) - 1);
      const std::size_t idx =
          (static_cast<std::size_t>(input) * r_count + r) *
              (std::size_t{1} << t) +
          prefix;
      if (p.next_bit[static_cast<std::size_t>(t)][idx] !=
          ((guess >> t) & 1)) {
        return -1;
      }
    }
    const auto& table = party == 0 ? p.alice_output : p.bob_output;
    return table[(static_cast<std::size_t>(input) * r_count + r) * guesses +
                 guess];
  };

  out.alice_output.resize(static_cast<std::size_t>(p.x_count) * r_count *
                          guesses);
  out.bob_output.resize(static_cast<std::size_t>(p.y_count) * r_count *
                        guesses);
  for (int x = 0; x < p.x_count; ++x)
    for (std::size_t r = 0; r < r_count; ++r)
      for (std::size_t g = 0; g < guesses; ++g)
        out.alice_output[static_cast<std::size_t>(x) * (r_count * guesses) +
                         r * guesses + g] = verified_output(0, x, r, g);
  for (int y = 0; y < p.y_count; ++y)
    for (std::size_t r = 0; r < r_count; ++r)
      for (std::size_t g = 0; g < guesses; ++g)
        out.bob_output[static_cast<std::size_t>(y) * (r_count * guesses) +
                       r * guesses + g] = verified_output(1, y, r, g);
  return out;
}

ClassicalProtocol chsh_send_x_protocol() {
  ClassicalProtocol p;
  p.x_count = p.y_count = p.a_count = p.b_count = 2;
  p.randomness = {Rational(1)};
  p.speakers = {0, 1};
  p.next_bit.resize(2);
  p.next_bit[0] = {0, 1};        // Alice announces x
  p.next_bit[1] = {0, 0, 0, 0};  // Bob pads a constant bit
  p.alice_output.assign(2 * 1 * 4, 0);
  p.bob_output.resize(2 * 1 * 4);
  for (int y = 0; y < 2; ++y)
    for (int transcript = 0; transcript < 4; ++transcript)
      p.bob_output[static_cast<std::size_t>(y) * 4 + transcript] =
          (transcript & 1) & y;
  return p;
}

}  // namespace nonlocal
