#pragma once

// Shared between report generation and verification: how each command's
// payload is read, and which equalities its report claims.

#include "condbb/cli/app.hpp"
#include "condbb/polytope.hpp"
#include "condbb/purify.hpp"

#include <string>
#include <vector>

namespace condbb::cli::detail {

template <class T>
struct Claim {
  std::string name;
  BlockFunction<T> lhs;
  BlockFunction<T> rhs;
  T bound;
};

Settings resolve(const ProblemDocument& doc, const Options& options);
bool is_command(const std::string& name);

template <class T>
SimpleFunction<T> table_of(const std::optional<Table>& table, const Context<T>& ctx, const char* name);

template <class T>
RefinedSet<T> set_of(const ProblemDocument& doc, const Context<T>& ctx);

template <class T>
PolytopeMap<T> polytope_of(const ProblemDocument& doc, const Context<T>& ctx, std::size_t dim);

template <class T>
YoungMeasure<T> young_of(const ProblemDocument& doc, const Context<T>& ctx);

template <class T>
IntegrandFamily<T> integrands_of(const ProblemDocument& doc, const Context<T>& ctx, const std::string& command);

template <class T>
std::vector<std::vector<T>> measures_of(const ProblemDocument& doc, const Context<T>& ctx);

/// The equalities a report for `command` asserts, evaluated with the oracle
/// from the problem and the report's outputs.
template <class T>
std::vector<Claim<T>> claims(const std::string& command, const ProblemDocument& doc, const Context<T>& ctx,
                             const Json& outputs);

/// Everything else a report promises: pieces partition their base set,
/// values are extreme points, chosen actions are supported, reported
/// summaries match the recomputed claims.
template <class T>
std::vector<std::string> structural_failures(const std::string& command, const ProblemDocument& doc,
                                             const Context<T>& ctx, const Json& outputs,
                                             const std::vector<Claim<T>>& recomputed);

template <class T>
T slack(const Context<T>& ctx) {
  if constexpr (NumTraits<T>::exact)
    return T(0);
  else
    return ctx.tol + 1e-12;
}

}  // namespace condbb::cli::detail
