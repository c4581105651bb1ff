#pragma once

#include "condbb/grid.hpp"
#include "condbb/partition.hpp"
#include "condbb/refined_set.hpp"
#include "condbb/scalar.hpp"
#include "condbb/simple_function.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace condbb::cli {

using Json = nlohmann::json;

/// A JSON number as written: an integer, a float, or {"num", "den"} with
/// integer or digit-string parts. The literal is kept so documents
/// re-serialize byte for byte.
class Number {
 public:
  static Number parse(const Json& j, const std::string& where);

  template <class T>
  T as() const;

  const Json& raw() const { return raw_; }

 private:
  enum class Kind { Integer, Float, Ratio };
  Json raw_;
  Kind kind_ = Kind::Integer;
  BigInt num_ = 0;
  BigInt den_ = 1;
  double float_ = 0.0;
};

template <>
double Number::as<double>() const;
template <>
Rational Number::as<Rational>() const;

Json to_json(double x);
Json to_json(const Rational& x);

using Row = std::vector<Number>;

/// A cell-indexed table. A flat list of numbers is a scalar function.
struct Table {
  std::vector<Row> rows;
  bool flat = false;
};

struct SetSpec {
  struct Part {
    std::size_t cell;
    Number offset;
    Number mass;
  };
  std::vector<Part> parts;
};

struct YoungSpec {
  std::vector<std::string> actions;
  Table probabilities;
};

struct Parameters {
  std::optional<Number> tolerance;
  std::optional<bool> exact;
  std::optional<bool> diagonal_only;
};

struct ProblemDocument {
  std::vector<Number> weights;
  std::optional<std::string> mode;
  std::optional<std::vector<std::size_t>> block_of;
  std::optional<Table> function;
  std::optional<SetSpec> set;
  std::optional<SetSpec> witness;
  std::optional<Table> alpha;
  std::optional<std::vector<std::vector<Row>>> polytope_map;  // cells × points × n
  std::optional<Table> selection;
  std::optional<YoungSpec> young_measure;
  std::optional<std::vector<std::vector<Row>>> integrands;  // see commands
  std::optional<std::vector<Row>> measures;
  std::optional<Table> functions;
  std::optional<Parameters> parameters;

  static ProblemDocument parse(const Json& j);
  Json to_json() const;
};

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string digest(const Json& j);

/// Resolved run settings: command-line flags over document parameters over
/// defaults.
struct Settings {
  bool exact = false;
  SpaceMode mode = SpaceMode::Splittable;
  std::optional<Number> tolerance;  // default 1e-9 (0 in exact mode)
  bool diagonal_only = false;
};

template <class T>
struct Context {
  Grid<T> grid;
  BlockPartition partition;
  T tol;
  bool diagonal_only = false;
};

template <class T>
Context<T> make_context(const ProblemDocument& doc, const Settings& settings);

template <class T>
std::vector<T> numbers(const Row& row);

template <class T>
SimpleFunction<T> cell_function(const Table& table, std::size_t cells, const std::string& name);

template <class T>
RefinedSet<T> refined_set(const SetSpec& spec, const Grid<T>& grid);

template <class T>
Json set_json(const RefinedSet<T>& set);

template <class T, class Tag>
Json rows_json(const PiecewiseConstant<T, Tag>& f) {
  Json out = Json::array();
  for (std::size_t r = 0; r < f.rows(); ++r) {
    Json row = Json::array();
    for (const auto& v : f.at(r)) row.push_back(to_json(v));
    out.push_back(std::move(row));
  }
  return out;
}

/// Reads rows written by rows_json (or any numbers) back; `rows`/`dim` of 0
/// skip the shape check.
template <class T>
BlockFunction<T> block_rows(const Json& j, std::size_t rows, std::size_t dim, const std::string& name);

// Field access with schema errors (exit code 2) instead of JSON exceptions.
const Json& field(const Json& object, const char* key, const std::string& where);
bool flag(const Json& object, const char* key, const std::string& where);
std::size_t index_value(const Json& j, const std::string& where);
SetSpec parse_set(const Json& j, const std::string& where);

}  // namespace condbb::cli
