#include "claims.hpp"

#include "condbb/bangbang.hpp"
#include "condbb/condexp.hpp"
#include "condbb/lyapunov.hpp"
#include "condbb/spaces.hpp"

#include <chrono>

namespace condbb::cli {

namespace {

using detail::table_of;

template <class T>
Json pieces_json(const std::vector<RefinedSet<T>>& pieces) {
  Json out = Json::array();
  for (const auto& p : pieces) out.push_back(set_json(p));
  return out;
}

template <class T>
Json partition_outputs(const ProblemDocument& doc, const Context<T>& ctx) {
  const auto alpha = table_of(doc.alpha, ctx, "alpha");
  Json out;
  if (doc.measures) {
    auto r = lyapunov_partition_multi(detail::measures_of(doc, ctx), table_of(doc.functions, ctx, "functions"), alpha,
                                      ctx.partition, ctx.grid, ctx.tol);
    out["pieces"] = pieces_json(r.pieces);
    out["max_residual"] = to_json(r.max_residual);
    out["residual_bound"] = to_json(r.residual_bound);
    out["seed_residual"] = to_json(r.seed_residual);
    out["fractional_cells"] = r.fractional_cells;
  } else {
    auto r = lyapunov_partition(table_of(doc.function, ctx, "function"), alpha, ctx.partition, ctx.grid, ctx.tol);
    out["pieces"] = pieces_json(r.pieces);
    out["max_residual"] = to_json(r.max_residual);
    out["residual_bound"] = to_json(r.residual_bound);
    out["seed_residual"] = to_json(r.seed_residual);
    out["pivot_residual"] = to_json(r.pivot_residual);
    out["fractional_cells"] = r.fractional_cells;
  }
  return out;
}

template <class T>
Json outputs_for(const std::string& command, const ProblemDocument& doc, const Context<T>& ctx) {
  const auto& grid = ctx.grid;
  const auto& C = ctx.partition;
  Json out = Json::object();
  if (command == "cond-exp") {
    out["value"] = rows_json(cond_exp(table_of(doc.function, ctx, "function"), C, grid));
  } else if (command == "ce-measure") {
    const auto E = detail::set_of(doc, ctx);
    out["value"] = rows_json(doc.function ? weighted_ce_measure(table_of(doc.function, ctx, "function"), E, C, grid)
                                          : ce_measure(E, C, grid));
  } else if (command == "partition") {
    out = partition_outputs(doc, ctx);
  } else if (command == "half-set") {
    auto r = half_set(table_of(doc.function, ctx, "function"), detail::set_of(doc, ctx), C, grid, ctx.tol);
    out["half"] = set_json(r.half);
    out["rest"] = set_json(r.rest);
    out["max_residual"] = to_json(r.max_residual);
    out["residual_bound"] = to_json(r.residual_bound);
    out["fractional_cells"] = r.fractional_cells;
  } else if (command == "annihilator") {
    auto w = annihilator_witness(table_of(doc.function, ctx, "function"), detail::set_of(doc, ctx), C, grid, ctx.tol);
    Json parts = Json::array();
    for (std::size_t c = 0; c < w.split.grid.size(); ++c) {
      if (w.g(c, 0) == T(0)) continue;
      parts.push_back(Json::array({w.split.parent[c], to_json(w.split.start[c]), to_json(w.split.grid.weight(c)),
                                   to_json(w.g(c, 0))}));
    }
    out["g"] = std::move(parts);
    out["norm_inf"] = to_json(w.norm_inf);
    out["zero_integrand"] = w.zero_integrand;
  } else if (command == "bang-bang" || command == "pointset-bang-bang") {
    const auto h = table_of(doc.selection, ctx, "selection");
    const auto map = detail::polytope_of(doc, ctx, h.dim());
    auto r = bang_bang(map, h, C, grid, ctx.tol, ctx.diagonal_only);
    Json selection = Json::array();
    for (std::size_t i = 0; i < r.selection.pieces.size(); ++i)
      selection.push_back(Json{{"set", set_json(r.selection.pieces[i])},
                               {"values", rows_json(r.selection.values[i])},
                               {"vertices", r.selection.vertex[i]}});
    out["selection"] = std::move(selection);
    out["max_deviation"] = to_json(r.max_deviation);
    out["bound"] = to_json(r.bound);
    out["partition_residual"] = to_json(r.partition.max_residual);
    out["fractional_cells"] = r.partition.fractional_cells;
  } else if (command == "purify" || command == "density-step") {
    const auto delta = detail::young_of(doc, ctx);
    const auto V = detail::integrands_of(doc, ctx, command);
    auto r = purify(delta, V, C, grid, ctx.tol, ctx.diagonal_only);
    Json strategy = Json::array();
    for (std::size_t i = 0; i < r.strategy.pieces.size(); ++i) {
      Json labels = Json::array();
      for (auto a : r.strategy.action[i]) labels.push_back(delta.actions()[a]);
      strategy.push_back(Json{{"set", set_json(r.strategy.pieces[i])}, {"actions", std::move(labels)}});
    }
    out["strategy"] = std::move(strategy);
    out["max_deviation"] = to_json(r.max_deviation);
    out["bound"] = to_json(r.bound);
  } else if (command == "coarseness") {
    std::optional<RefinedSet<T>> queried;
    if (doc.set) queried = detail::set_of(doc, ctx);
    auto v = coarseness_check(grid, C, queried);
    out["is_coarser"] = v.is_coarser;
    out["witness"] = set_json(v.witness);
    out["witness_conditional"] = rows_json(v.witness_conditional);
    out["queried_conditional"] = rows_json(v.queried_conditional);
    if (doc.witness)
      out["user_witness_valid"] =
          validate_witness(grid, C, v.queried, refined_set(*doc.witness, grid), ctx.tol);
  } else {
    throw InvalidArgument("unknown command '" + command + "'");
  }
  return out;
}

template <class T>
Json run_typed(const std::string& command, const ProblemDocument& doc, const Settings& settings, Json report) {
  const auto ctx = make_context<T>(doc, settings);
  report["tolerance"] = to_json(ctx.tol);
  const auto outputs = outputs_for(command, doc, ctx);
  Json checks = Json::array();
  for (const auto& c : detail::claims(command, doc, ctx, outputs))
    checks.push_back(Json{{"name", c.name},
                          {"lhs", rows_json(c.lhs)},
                          {"rhs", rows_json(c.rhs)},
                          {"max_deviation", to_json(max_abs_difference(c.lhs, c.rhs))},
                          {"bound", to_json(c.bound)}});
  report["outputs"] = outputs;
  report["checks"] = std::move(checks);
  return report;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"cond-exp",    "ce-measure", "partition", "half-set",
                                              "annihilator", "bang-bang",  "pointset-bang-bang",
                                              "purify",      "density-step", "coarseness"};
  return names;
}

Json run(const Options& options, const Json& problem) {
  const auto started = std::chrono::steady_clock::now();
  if (!detail::is_command(options.command)) throw InvalidArgument("unknown command '" + options.command + "'");
  const auto doc = ProblemDocument::parse(problem);
  const auto settings = detail::resolve(doc, options);
  Json report{{"command", options.command},
              {"version", version},
              {"input_digest", digest(problem)},
              {"arithmetic", settings.exact ? "exact" : "float"},
              {"mode", std::string(to_string(settings.mode))},
              {"diagonal_only", settings.diagonal_only}};
  report = settings.exact ? run_typed<Rational>(options.command, doc, settings, std::move(report))
                          : run_typed<double>(options.command, doc, settings, std::move(report));
  if (options.timing)
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const VerificationError*>(&e)) return 4;
  if (dynamic_cast<const PreconditionError*>(&e)) return 3;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const Json::exception*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e))
    return 2;
  return 1;
}

Json error_json(const std::exception& e) {
  static const char* kinds[] = {"ok", "internal", "schema", "precondition", "verification"};
  Json out{{"error", kinds[exit_code(e)]}, {"message", e.what()}};
  if (const auto* p = dynamic_cast<const PreconditionError*>(&e); p && p->cell()) out["cell"] = *p->cell();
  if (const auto* h = dynamic_cast<const HullMembershipError*>(&e)) {
    out["point"] = h->point();
    out["separating_direction"] = h->separating_direction();
  }
  return out;
}

}  // namespace condbb::cli
