#include "nonlocal/protocol.hpp"

namespace nonlocal {
namespace {

std::string count_of(int n, const char* unit) {
  return std::to_string(n) + " " + unit + (n == 1 ? "" : "s");
}

const char* kind_name(const ProtocolVariant& v) {
  if (std::holds_alternative<ClassicalProtocol>(v)) return "classical";
  if (std::holds_alternative<QuantumProtocol>(v)) return "quantum";
  if (std::holds_alternative<TeleportedProtocol>(v)) return "teleported";
  return "zerocomm";
}

PipelineStage row_for(const std::string& name, const ProtocolVariant& v,
                      const Game& g) {
  PipelineStage row;
  row.name = name;
  if (const auto* c = std::get_if<ClassicalProtocol>(&v)) {
    ClassicalRunResult r = run_protocol(*c, g);
    row.communication = count_of(c->bits(), "bit");
    row.epr_pairs = 0;
    row.success = to_double(r.success);
    row.abort_mass = to_double(r.abort_mass);
  } else if (const auto* q = std::get_if<QuantumProtocol>(&v)) {
    QuantumRunResult r = run_protocol(*q, g);
    row.communication = count_of(q->qubit_budget, "qubit");
    row.epr_pairs = q->epr_pairs;
    row.success = r.success;
  } else if (const auto* t = std::get_if<TeleportedProtocol>(&v)) {
    QuantumRunResult r = run_protocol(*t, g);
    row.communication = count_of(t->classical_bits, "bit");
    row.epr_pairs = t->epr_pairs;
    row.success = r.success;
  } else {
    const auto& z = std::get<ZeroCommProtocol>(v);
    ZeroCommRunResult r = run_protocol(z, g);
    row.communication = "0 bits";
    row.epr_pairs = z.epr_pairs;
    row.success = r.success;
    row.abort_mass = r.abort_mass;
  }
  return row;
}

[[noreturn]] void reject_stage(const std::string& stage,
                               const ProtocolVariant& current) {
  fail(ErrorCode::InvalidArgument,
       "stage '" + stage + "' cannot follow a " + kind_name(current) +
           " protocol");
}

}  // namespace

std::vector<PipelineStage> run_reduction_pipeline(
    const ProtocolVariant& start, const Game& g,
    const std::vector<std::string>& stages) {
  std::vector<PipelineStage> rows;
  ProtocolVariant current = start;
  rows.push_back(row_for("initial", current, g));
  bool finished = false;
  for (const std::string& stage : stages) {
    if (finished) {
      fail(ErrorCode::InvalidArgument,
           "no stage can follow the deterministic rounding");
    }
    if (stage == "teleport") {
      const auto* q = std::get_if<QuantumProtocol>(&current);
      if (!q) reject_stage(stage, current);
      current = teleport_transform(*q);
      rows.push_back(row_for(stage, current, g));
    } else if (stage == "guess") {
      if (const auto* c = std::get_if<ClassicalProtocol>(&current)) {
        current = transcript_guess_transform(*c);
      } else if (const auto* t = std::get_if<TeleportedProtocol>(&current)) {
        current = guess_transform(*t);
      } else {
        reject_stage(stage, current);
      }
      rows.push_back(row_for(stage, current, g));
    } else if (stage == "depolarize") {
      const auto* z = std::get_if<ZeroCommProtocol>(&current);
      if (!z) reject_stage(stage, current);
      current = depolarize_entanglement(*z).protocol;
      rows.push_back(row_for(stage, current, g));
      rows.back().epr_pairs = 0;  // product states: nothing entangled left
    } else if (stage == "argmax") {
      const auto* z = std::get_if<ZeroCommProtocol>(&current);
      if (!z) reject_stage(stage, current);
      ArgmaxSimulationResult r = argmax_function_simulation(*z, g);
      PipelineStage row;
      row.name = stage;
      row.communication = "0 bits";
      row.epr_pairs = 0;
      row.success = r.success;
      rows.push_back(std::move(row));
      finished = true;
    } else {
      fail(ErrorCode::InvalidArgument, "unknown pipeline stage '" + stage +
                                           "' (teleport, guess, depolarize, "
                                           "argmax)");
    }
  }
  return rows;
}

}  // namespace nonlocal
