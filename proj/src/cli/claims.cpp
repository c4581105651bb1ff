#include "claims.hpp"

#include "condbb/oracle.hpp"
#include "condbb/spaces.hpp"

#include <algorithm>

namespace condbb::cli::detail {

namespace {

template <class T>
T number_at(const Json& outputs, const char* key) {
  return Number::parse(field(outputs, key, "outputs"), std::string("outputs.") + key).as<T>();
}

template <class T>
std::vector<RefinedSet<T>> sets_at(const Json& list, const Context<T>& ctx, const std::string& where) {
  if (!list.is_array() || list.empty()) throw InvalidArgument(where + ": expected a nonempty list of sets");
  std::vector<RefinedSet<T>> out;
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(refined_set(parse_set(list[i], where + "[" + std::to_string(i) + "]"), ctx.grid));
  return out;
}

template <class T>
RefinedSet<T> set_at(const Json& outputs, const char* key, const Context<T>& ctx) {
  return refined_set(parse_set(field(outputs, key, "outputs"), std::string("outputs.") + key), ctx.grid);
}

// Bang-bang style outputs: one entry per piece with its set and the value
// function taken there.
template <class T>
struct Selection {
  std::vector<RefinedSet<T>> pieces;
  std::vector<SimpleFunction<T>> values;
  std::vector<std::vector<std::size_t>> vertex;
};

template <class T>
Selection<T> selection_at(const Json& outputs, const Context<T>& ctx, std::size_t dim) {
  const auto& list = field(outputs, "selection", "outputs");
  if (!list.is_array() || list.empty()) throw InvalidArgument("outputs.selection: expected a nonempty list");
  Selection<T> s;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto where = "outputs.selection[" + std::to_string(i) + "]";
    s.pieces.push_back(refined_set(parse_set(field(list[i], "set", where), where + ".set"), ctx.grid));
    const auto values = block_rows<T>(field(list[i], "values", where), ctx.grid.size(), dim, where + ".values");
    s.values.push_back(SimpleFunction<T>(values.rows(), values.dim(), {values.data().begin(), values.data().end()}));
    const auto& vertices = field(list[i], "vertices", where);
    if (!vertices.is_array() || vertices.size() != ctx.grid.size())
      throw InvalidArgument(where + ".vertices: one index per cell expected");
    std::vector<std::size_t> idx;
    for (const auto& v : vertices) idx.push_back(index_value(v, where + ".vertices"));
    s.vertex.push_back(std::move(idx));
  }
  return s;
}

template <class T>
struct Strategy {
  std::vector<RefinedSet<T>> pieces;
  std::vector<std::vector<std::size_t>> action;
};

template <class T>
Strategy<T> strategy_at(const Json& outputs, const Context<T>& ctx, const YoungMeasure<T>& delta) {
  const auto& list = field(outputs, "strategy", "outputs");
  if (!list.is_array() || list.empty()) throw InvalidArgument("outputs.strategy: expected a nonempty list");
  Strategy<T> s;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto where = "outputs.strategy[" + std::to_string(i) + "]";
    s.pieces.push_back(refined_set(parse_set(field(list[i], "set", where), where + ".set"), ctx.grid));
    const auto& labels = field(list[i], "actions", where);
    if (!labels.is_array() || labels.size() != ctx.grid.size())
      throw InvalidArgument(where + ".actions: one label per cell expected");
    std::vector<std::size_t> choice;
    for (const auto& label : labels) {
      if (!label.is_string()) throw InvalidArgument(where + ".actions: labels must be strings");
      const auto& actions = delta.actions();
      const auto it = std::find(actions.begin(), actions.end(), label.get<std::string>());
      if (it == actions.end()) throw InvalidArgument(where + ".actions: unknown action '" + label.get<std::string>() + "'");
      choice.push_back(static_cast<std::size_t>(it - actions.begin()));
    }
    s.action.push_back(std::move(choice));
  }
  return s;
}

// μ_i-conditional moments of the pieces, recomputed from raw interval
// masses and normalized measures.
template <class T>
std::vector<Claim<T>> multi_claims(const ProblemDocument& doc, const Context<T>& ctx, const Json& outputs) {
  const auto measures = measures_of(doc, ctx);
  const auto f = table_of(doc.functions, ctx, "functions");
  const auto alpha = table_of(doc.alpha, ctx, "alpha");
  if (f.dim() != measures.size()) throw InvalidArgument("functions: one column per measure expected");
  const auto pieces = sets_at(field(outputs, "pieces", "outputs"), ctx, "outputs.pieces");
  if (pieces.size() != alpha.dim()) throw InvalidArgument("outputs.pieces: one set per column of alpha expected");
  const T bound = number_at<T>(outputs, "residual_bound");
  const auto& C = ctx.partition;
  std::vector<Claim<T>> out;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    T total(0);
    for (std::size_t k = ctx.grid.size(); k-- > 0;) total += measures[i][k];
    if (!(total > T(0))) throw PreconditionError("measure " + std::to_string(i) + " has zero total mass");
    std::vector<T> mass(C.block_count(), T(0));
    for (std::size_t k = ctx.grid.size(); k-- > 0;) mass[C.block_of(k)] += measures[i][k] / total;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      auto lhs = BlockFunction<T>::zeros(C.block_count(), 1);
      auto rhs = BlockFunction<T>::zeros(C.block_count(), 1);
      for (std::size_t k = ctx.grid.size(); k-- > 0;) {
        const std::size_t b = C.block_of(k);
        if (!(mass[b] > T(0))) continue;
        const T density = f(k, i) * (measures[i][k] / total) / mass[b];
        lhs(b, 0) += density * (pieces[j].mass_in(k) / ctx.grid.weight(k));
        rhs(b, 0) += density * alpha(k, j);
      }
      out.push_back({"measure_" + std::to_string(i) + "_piece_" + std::to_string(j), lhs, rhs, bound});
    }
  }
  return out;
}

template <class T>
void check_cover(const std::vector<RefinedSet<T>>& pieces, const RefinedSet<T>& base, const Context<T>& ctx,
                 const std::string& what, std::vector<std::string>& failures) {
  const T eps = slack(ctx);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!base.contains(pieces[i], eps)) failures.push_back(what + ": piece " + std::to_string(i) + " leaves its base set");
    for (std::size_t q = 0; q < i; ++q)
      if (pieces[i].intersect(pieces[q]).total_mass() > eps)
        failures.push_back(what + ": pieces " + std::to_string(q) + " and " + std::to_string(i) + " overlap");
  }
  for (std::size_t k = 0; k < ctx.grid.size(); ++k) {
    T covered(0);
    for (const auto& p : pieces) covered += p.mass_in(k);
    if (abs_value(covered - base.mass_in(k)) > eps * T(static_cast<int>(pieces.size() + 1)))
      failures.push_back(what + ": pieces do not cover cell " + std::to_string(k));
  }
}

template <class T>
void check_summary(const Json& outputs, const char* key, const std::vector<Claim<T>>& claims, const Context<T>& ctx,
                   std::vector<std::string>& failures) {
  T worst(0);
  for (const auto& c : claims) worst = std::max(worst, max_abs_difference(c.lhs, c.rhs));
  if (abs_value(number_at<T>(outputs, key) - worst) > slack(ctx))
    failures.push_back(std::string("outputs.") + key + " does not match the recomputed deviation");
}

}  // namespace

bool is_command(const std::string& name) {
  const auto& names = command_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Settings resolve(const ProblemDocument& doc, const Options& options) {
  Settings s;
  const auto params = doc.parameters.value_or(Parameters{});
  s.exact = options.exact || params.exact.value_or(false);
  s.mode = parse_space_mode(options.mode ? *options.mode : doc.mode.value_or("splittable"));
  if (options.tolerance) {
    Json parsed;
    try {
      parsed = Json::parse(*options.tolerance);
    } catch (const Json::exception&) {
      throw InvalidArgument("--tol: '" + *options.tolerance + "' is not a number");
    }
    s.tolerance = Number::parse(parsed, "--tol");
  } else {
    s.tolerance = params.tolerance;
  }
  s.diagonal_only = options.diagonal_only || params.diagonal_only.value_or(false);
  return s;
}

template <class T>
SimpleFunction<T> table_of(const std::optional<Table>& table, const Context<T>& ctx, const char* name) {
  if (!table) throw InvalidArgument(std::string("problem needs '") + name + "'");
  return cell_function<T>(*table, ctx.grid.size(), name);
}

template <class T>
RefinedSet<T> set_of(const ProblemDocument& doc, const Context<T>& ctx) {
  if (!doc.set) throw InvalidArgument("problem needs 'set'");
  return refined_set(*doc.set, ctx.grid);
}

template <class T>
PolytopeMap<T> polytope_of(const ProblemDocument& doc, const Context<T>& ctx, std::size_t dim) {
  if (!doc.polytope_map) throw InvalidArgument("problem needs 'polytope_map'");
  if (doc.polytope_map->size() != ctx.grid.size()) throw InvalidArgument("polytope_map: one point list per cell expected");
  std::vector<std::vector<Point<T>>> points;
  for (const auto& cell : *doc.polytope_map) {
    std::vector<Point<T>> pts;
    for (const auto& row : cell) pts.push_back(numbers<T>(row));
    points.push_back(std::move(pts));
  }
  return PolytopeMap<T>(dim, std::move(points));
}

template <class T>
YoungMeasure<T> young_of(const ProblemDocument& doc, const Context<T>& ctx) {
  if (!doc.young_measure) throw InvalidArgument("problem needs 'young_measure'");
  return YoungMeasure<T>(doc.young_measure->actions,
                         cell_function<T>(doc.young_measure->probabilities, ctx.grid.size(), "young_measure.probabilities"),
                         NumTraits<T>::exact ? T(0) : std::max(ctx.tol, NumTraits<T>::default_tolerance()));
}

template <class T>
IntegrandFamily<T> integrands_of(const ProblemDocument& doc, const Context<T>& ctx, const std::string& command) {
  if (!doc.integrands) throw InvalidArgument("problem needs 'integrands'");
  const auto& raw = *doc.integrands;
  if (command == "density-step") {
    // a list of scalar integrands, each cells × actions
    std::vector<SimpleFunction<T>> phis;
    for (std::size_t i = 0; i < raw.size(); ++i)
      phis.push_back(cell_function<T>(Table{raw[i], false}, ctx.grid.size(), "integrands[" + std::to_string(i) + "]"));
    return IntegrandFamily<T>::stack(phis);
  }
  // cells × actions × n
  if (raw.size() != ctx.grid.size()) throw InvalidArgument("integrands: one entry per cell expected");
  std::vector<std::vector<Point<T>>> values;
  for (const auto& cell : raw) {
    std::vector<Point<T>> row;
    for (const auto& v : cell) row.push_back(numbers<T>(v));
    values.push_back(std::move(row));
  }
  if (values.front().empty()) throw InvalidArgument("integrands: every cell needs a value per action");
  const auto dim = values.front().front().size();
  return IntegrandFamily<T>(dim, std::move(values));
}

template <class T>
std::vector<std::vector<T>> measures_of(const ProblemDocument& doc, const Context<T>& ctx) {
  if (!doc.measures) throw InvalidArgument("problem needs 'measures'");
  std::vector<std::vector<T>> out;
  for (std::size_t i = 0; i < doc.measures->size(); ++i) {
    if ((*doc.measures)[i].size() != ctx.grid.size())
      throw InvalidArgument("measures[" + std::to_string(i) + "]: one mass per cell expected");
    out.push_back(numbers<T>((*doc.measures)[i]));
  }
  return out;
}

template <class T>
std::vector<Claim<T>> claims(const std::string& command, const ProblemDocument& doc, const Context<T>& ctx,
                             const Json& outputs) {
  using oracle::direct_integrate;
  const auto& grid = ctx.grid;
  const auto& C = ctx.partition;
  const auto whole = RefinedSet<T>::whole(grid);
  const auto ones = SimpleFunction<T>::constant(grid.size(), {T(1)});
  std::vector<Claim<T>> out;

  if (command == "cond-exp") {
    const auto f = table_of(doc.function, ctx, "function");
    out.push_back({"cond_exp", block_rows<T>(field(outputs, "value", "outputs"), C.block_count(), f.dim(), "outputs.value"),
                   direct_integrate(f, whole, C, grid), ctx.tol});
  } else if (command == "ce-measure") {
    const auto f = doc.function ? table_of(doc.function, ctx, "function") : ones;
    out.push_back({"ce_measure",
                   block_rows<T>(field(outputs, "value", "outputs"), C.block_count(), f.dim(), "outputs.value"),
                   direct_integrate(f, set_of(doc, ctx), C, grid), ctx.tol});
  } else if (command == "partition") {
    if (doc.measures) return multi_claims(doc, ctx, outputs);
    const auto h = table_of(doc.function, ctx, "function");
    const auto alpha = table_of(doc.alpha, ctx, "alpha");
    const auto pieces = sets_at(field(outputs, "pieces", "outputs"), ctx, "outputs.pieces");
    if (pieces.size() != alpha.dim()) throw InvalidArgument("outputs.pieces: one set per column of alpha expected");
    const T bound = number_at<T>(outputs, "residual_bound");
    for (std::size_t i = 0; i < pieces.size(); ++i)
      out.push_back({"piece_" + std::to_string(i), direct_integrate(h, pieces[i], C, grid),
                     direct_integrate(scale_by(alpha.component(i), h), whole, C, grid), bound});
  } else if (command == "half-set") {
    const auto h = table_of(doc.function, ctx, "function");
    auto target = direct_integrate(h, set_of(doc, ctx), C, grid);
    target *= T(1) / T(2);
    out.push_back({"half", direct_integrate(h, set_at(outputs, "half", ctx), C, grid), target,
                   number_at<T>(outputs, "residual_bound")});
  } else if (command == "annihilator") {
    const auto f = table_of(doc.function, ctx, "function");
    const auto E = set_of(doc, ctx);
    const auto& parts = field(outputs, "g", "outputs");
    if (!parts.is_array()) throw InvalidArgument("outputs.g: expected [cell, offset, mass, value] entries");
    auto lhs = BlockFunction<T>::zeros(C.block_count(), f.dim());
    for (std::size_t n = parts.size(); n-- > 0;) {
      const auto where = "outputs.g[" + std::to_string(n) + "]";
      if (!parts[n].is_array() || parts[n].size() != 4) throw InvalidArgument(where + ": expected 4 entries");
      SetSpec one{{{index_value(parts[n][0], where), Number::parse(parts[n][1], where), Number::parse(parts[n][2], where)}}};
      const T value = Number::parse(parts[n][3], where).as<T>();
      lhs += direct_integrate(value * f, refined_set(one, grid).intersect(E), C, grid);
    }
    out.push_back({"duality", lhs, BlockFunction<T>::zeros(C.block_count(), f.dim()), ctx.tol});
  } else if (command == "bang-bang" || command == "pointset-bang-bang") {
    const auto h = table_of(doc.selection, ctx, "selection");
    const auto s = selection_at(outputs, ctx, h.dim());
    out.push_back({"selection", direct_integrate(s.values, s.pieces, C, grid), direct_integrate(h, whole, C, grid),
                   number_at<T>(outputs, "bound")});
  } else if (command == "purify" || command == "density-step") {
    const auto delta = young_of(doc, ctx);
    const auto V = integrands_of(doc, ctx, command);
    const auto s = strategy_at(outputs, ctx, delta);
    std::vector<SimpleFunction<T>> values;
    for (const auto& choice : s.action) values.push_back(V.along(choice));
    auto mean = SimpleFunction<T>::zeros(grid.size(), V.dim());
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (std::size_t a = delta.action_count(); a-- > 0;)
        for (std::size_t j = 0; j < V.dim(); ++j) mean(k, j) += delta(k, a) * V(k, a)[j];
    out.push_back({"payoff", direct_integrate(values, s.pieces, C, grid), direct_integrate(mean, whole, C, grid),
                   number_at<T>(outputs, "bound")});
  } else if (command == "coarseness") {
    const auto queried = doc.set ? set_of(doc, ctx) : whole;
    const auto witness = set_at(outputs, "witness", ctx);
    const auto w_cond = direct_integrate(ones, witness, C, grid);
    const auto q_cond = direct_integrate(ones, queried, C, grid);
    out.push_back({"witness_conditional",
                   block_rows<T>(field(outputs, "witness_conditional", "outputs"), C.block_count(), 1,
                                 "outputs.witness_conditional"),
                   w_cond, ctx.tol});
    out.push_back({"queried_conditional",
                   block_rows<T>(field(outputs, "queried_conditional", "outputs"), C.block_count(), 1,
                                 "outputs.queried_conditional"),
                   q_cond, ctx.tol});
    if (flag(outputs, "is_coarser", "outputs")) {
      auto half = q_cond;
      half *= T(1) / T(2);
      out.push_back({"halving", w_cond, half, ctx.tol});
    }
  } else {
    throw InvalidArgument("unknown command '" + command + "'");
  }
  return out;
}

template <class T>
std::vector<std::string> structural_failures(const std::string& command, const ProblemDocument& doc,
                                             const Context<T>& ctx, const Json& outputs,
                                             const std::vector<Claim<T>>& recomputed) {
  std::vector<std::string> failures;
  const auto whole = RefinedSet<T>::whole(ctx.grid);
  const T eps = slack(ctx);
  if (command == "partition") {
    check_cover(sets_at(field(outputs, "pieces", "outputs"), ctx, "outputs.pieces"), whole, ctx, "partition", failures);
    check_summary(outputs, "max_residual", recomputed, ctx, failures);
  } else if (command == "half-set") {
    const auto E = set_of(doc, ctx);
    check_cover({set_at(outputs, "half", ctx), set_at(outputs, "rest", ctx)}, E, ctx, "half-set", failures);
    check_summary(outputs, "max_residual", recomputed, ctx, failures);
  } else if (command == "annihilator") {
    const auto E = set_of(doc, ctx);
    T norm(0);
    for (const auto& part : field(outputs, "g", "outputs")) {
      SetSpec one{{{index_value(part[0], "outputs.g"), Number::parse(part[1], "outputs.g"),
                    Number::parse(part[2], "outputs.g")}}};
      const T value = Number::parse(part[3], "outputs.g").as<T>();
      if (value != T(0) && !E.contains(refined_set(one, ctx.grid), eps))
        failures.push_back("annihilator: g is nonzero outside the set");
      norm = std::max(norm, abs_value(value));
    }
    if (!(norm > T(0))) failures.push_back("annihilator: g vanishes");
    if (abs_value(norm - number_at<T>(outputs, "norm_inf")) > eps)
      failures.push_back("annihilator: outputs.norm_inf does not match g");
  } else if (command == "bang-bang" || command == "pointset-bang-bang") {
    const auto h = table_of(doc.selection, ctx, "selection");
    const auto map = polytope_of(doc, ctx, h.dim());
    const auto s = selection_at(outputs, ctx, h.dim());
    check_cover(s.pieces, whole, ctx, command, failures);
    check_summary(outputs, "max_deviation", recomputed, ctx, failures);
    for (std::size_t k = 0; k < ctx.grid.size(); ++k) {
      const auto& vertices = map.vertices(k);
      const auto extreme = extreme_point_indices(vertices);
      for (std::size_t i = 0; i < s.pieces.size(); ++i) {
        if (!(s.pieces[i].mass_in(k) > eps)) continue;
        const auto v = s.vertex[i][k];
        const auto where = "piece " + std::to_string(i) + " in cell " + std::to_string(k);
        if (v >= vertices.size()) {
          failures.push_back(where + ": vertex index out of range");
          continue;
        }
        if (std::find(extreme.begin(), extreme.end(), v) == extreme.end())
          failures.push_back(where + ": value is not an extreme point");
        for (std::size_t j = 0; j < h.dim(); ++j)
          if (abs_value(s.values[i](k, j) - vertices[v][j]) > eps)
            failures.push_back(where + ": value differs from its vertex");
      }
    }
  } else if (command == "purify" || command == "density-step") {
    const auto delta = young_of(doc, ctx);
    const auto s = strategy_at(outputs, ctx, delta);
    check_cover(s.pieces, whole, ctx, command, failures);
    check_summary(outputs, "max_deviation", recomputed, ctx, failures);
    for (std::size_t i = 0; i < s.pieces.size(); ++i)
      for (std::size_t k = 0; k < ctx.grid.size(); ++k)
        if (s.pieces[i].mass_in(k) > eps && !delta.supports(k, s.action[i][k]))
          failures.push_back("piece " + std::to_string(i) + " in cell " + std::to_string(k) +
                             " plays an action outside the support");
  } else if (command == "coarseness") {
    const auto queried = doc.set ? set_of(doc, ctx) : whole;
    const auto witness = set_at(outputs, "witness", ctx);
    const bool coarser = flag(outputs, "is_coarser", "outputs");
    if (coarser != (ctx.grid.mode() == SpaceMode::Splittable))
      failures.push_back("coarseness: verdict contradicts the space mode");
    if (!queried.contains(witness, eps) && coarser) failures.push_back("coarseness: witness leaves the queried set");
    if (!coarser && (witness.empty() || !witness.is_cell_aligned(ctx.grid)))
      failures.push_back("coarseness: atomic witness must be a whole cell");
    if (doc.witness) {
      const bool valid = validate_witness(ctx.grid, ctx.partition, queried, refined_set(*doc.witness, ctx.grid), ctx.tol);
      if (flag(outputs, "user_witness_valid", "outputs") != valid)
        failures.push_back("coarseness: user witness verdict does not match");
    }
  }
  return failures;
}

#define CONDBB_INSTANTIATE(T)                                                                                       \
  template SimpleFunction<T> table_of<T>(const std::optional<Table>&, const Context<T>&, const char*);             \
  template RefinedSet<T> set_of<T>(const ProblemDocument&, const Context<T>&);                                      \
  template PolytopeMap<T> polytope_of<T>(const ProblemDocument&, const Context<T>&, std::size_t);                   \
  template YoungMeasure<T> young_of<T>(const ProblemDocument&, const Context<T>&);                                  \
  template IntegrandFamily<T> integrands_of<T>(const ProblemDocument&, const Context<T>&, const std::string&);       \
  template std::vector<std::vector<T>> measures_of<T>(const ProblemDocument&, const Context<T>&);                   \
  template std::vector<Claim<T>> claims<T>(const std::string&, const ProblemDocument&, const Context<T>&,           \
                                           const Json&);                                                            \
  template std::vector<std::string> structural_failures<T>(const std::string&, const ProblemDocument&,              \
                                                           const Context<T>&, const Json&,                          \
                                                           const std::vector<Claim<T>>&);

CONDBB_INSTANTIATE(double)
CONDBB_INSTANTIATE(Rational)
#undef CONDBB_INSTANTIATE

}  // namespace condbb::cli::detail
