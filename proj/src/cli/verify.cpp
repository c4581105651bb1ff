#include "claims.hpp"

#include <sstream>

namespace condbb::cli {

namespace {

template <class T>
std::vector<std::string> verify_typed(const std::string& command, const ProblemDocument& doc, const Settings& settings,
                                      const Json& report) {
  const auto ctx = make_context<T>(doc, settings);
  const auto& outputs = field(report, "outputs", "report");
  const auto& checks = field(report, "checks", "report");
  const auto recomputed = detail::claims(command, doc, ctx, outputs);
  const T eps = detail::slack(ctx);
  std::vector<std::string> failures;
  if (!checks.is_array() || checks.size() != recomputed.size()) {
    failures.push_back("report lists " + std::to_string(checks.is_array() ? checks.size() : 0) + " checks, expected " +
                       std::to_string(recomputed.size()));
    return failures;
  }
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    const auto& claim = recomputed[i];
    const auto& check = checks[i];
    const auto where = "check '" + claim.name + "'";
    if (field(check, "name", where) != claim.name) {
      failures.push_back(where + ": name mismatch");
      continue;
    }
    const auto lhs = block_rows<T>(field(check, "lhs", where), claim.lhs.rows(), claim.lhs.dim(), where + ".lhs");
    const auto rhs = block_rows<T>(field(check, "rhs", where), claim.rhs.rows(), claim.rhs.dim(), where + ".rhs");
    const T deviation = Number::parse(field(check, "max_deviation", where), where).template as<T>();
    const T bound = Number::parse(field(check, "bound", where), where).template as<T>();
    const T actual = max_abs_difference(claim.lhs, claim.rhs);
    if (max_abs_difference(lhs, claim.lhs) > eps) failures.push_back(where + ": left side does not recompute");
    if (max_abs_difference(rhs, claim.rhs) > eps) failures.push_back(where + ": right side does not recompute");
    if (abs_value(deviation - actual) > eps) failures.push_back(where + ": reported deviation does not recompute");
    if (bound != claim.bound) failures.push_back(where + ": reported bound differs from the outputs");
    if (actual > claim.bound + eps) failures.push_back(where + ": deviation exceeds the certified bound");
  }
  auto structural = detail::structural_failures(command, doc, ctx, outputs, recomputed);
  failures.insert(failures.end(), structural.begin(), structural.end());
  return failures;
}

std::string string_at(const Json& report, const char* key) {
  const auto& j = field(report, key, "report");
  if (!j.is_string()) throw InvalidArgument(std::string("report.") + key + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

void verify(const Json& problem, const Json& report) {
  // The problem must be sound on its own; its errors keep their exit codes.
  const auto doc = ProblemDocument::parse(problem);
  std::vector<std::string> failures;
  try {
    const auto command = string_at(report, "command");
    if (!detail::is_command(command)) throw InvalidArgument("report names unknown command '" + command + "'");
    if (string_at(report, "version") != version) failures.push_back("report was written by another version");
    if (string_at(report, "input_digest") != digest(problem))
      failures.push_back("input digest does not match the problem document");
    const auto arithmetic = string_at(report, "arithmetic");
    if (arithmetic != "exact" && arithmetic != "float") throw InvalidArgument("unknown arithmetic '" + arithmetic + "'");
    Settings settings;
    settings.exact = arithmetic == "exact";
    settings.mode = parse_space_mode(string_at(report, "mode"));
    settings.tolerance = Number::parse(field(report, "tolerance", "report"), "report.tolerance");
    settings.diagonal_only = flag(report, "diagonal_only", "report");
    auto typed = settings.exact ? verify_typed<Rational>(command, doc, settings, report)
                                : verify_typed<double>(command, doc, settings, report);
    failures.insert(failures.end(), typed.begin(), typed.end());
  } catch (const VerificationError&) {
    throw;
  } catch (const std::exception& e) {
    failures.push_back(std::string("report cannot be checked: ") + e.what());
  }
  if (!failures.empty()) {
    std::ostringstream message;
    message << failures.size() << " verification failure(s)";
    for (const auto& f : failures) message << "\n  " << f;
    throw VerificationError(message.str());
  }
}

}  // namespace condbb::cli
