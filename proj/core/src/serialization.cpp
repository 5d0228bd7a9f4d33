#include "eepc/serialization.hpp"

#include <charconv>
#include <cmath>

#include "json_io.hpp"

namespace eepc {

namespace {

detail::json with_version(detail::json body) {
  detail::json j;
  j["format_version"] = kFormatVersion;
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

void check_version(const detail::json& j) {
  if (!j.is_object()) throw ValidationError("<document>", "expected an object");
  if (!j.contains("format_version")) throw ValidationError("format_version", "is required");
  const auto& v = j.at("format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    throw ValidationError("format_version", "unsupported version");
  }
}

detail::json without_version(detail::json j) {
  j.erase("format_version");
  return j;
}

}  // namespace

std::string scenario_to_json(const NetworkScenario& scn, int indent) {
  return detail::to_json(scn).dump(indent);
}

NetworkScenario scenario_from_json(std::string_view text) {
  return detail::scenario_from_json(detail::parse(text), "");
}

std::string diagnostics_to_json(const SolverDiagnostics& diag, int indent) {
  return with_version(detail::to_json(diag)).dump(indent);
}

SolverDiagnostics diagnostics_from_json(std::string_view text) {
  auto j = detail::parse(text);
  check_version(j);
  return detail::diagnostics_from_json(without_version(std::move(j)), "");
}

std::string trace_to_json(const GameTrace& trace, int indent) {
  return with_version(detail::to_json(trace)).dump(indent);
}

GameTrace trace_from_json(std::string_view text) {
  auto j = detail::parse(text);
  check_version(j);
  return detail::trace_from_json(without_version(std::move(j)), "");
}

void write_trace_csv(std::ostream& out, const GameTrace& trace) {
  out << "round,k,u_k,beta\n";
  auto emit = [&](const GameRound& g) {
    for (std::size_t k = 0; k < g.utilities.size(); ++k) {
      out << g.round << ',' << k << ',' << format_number(g.utilities[k]) << ',' << format_number(g.beta)
          << '\n';
    }
  };
  emit(trace.initial);
  for (const auto& g : trace.rounds) emit(g);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace eepc
