#include "condbb/cli/problem.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <set>

namespace condbb::cli {

namespace {

BigInt integer_part(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::size_t start = !s.empty() && s[0] == '-' ? 1 : 0;
    if (start == s.size()) throw InvalidArgument(where + ": empty integer string");
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw InvalidArgument(where + ": '" + s + "' is not an integer");
    // strip leading zeros: GMP would take them as an octal prefix
    const auto first = std::min(s.find_first_not_of('0', start), s.size() - 1);
    BigInt v(s.substr(first));
    return start ? BigInt(-v) : v;
  }
  throw InvalidArgument(where + ": rational parts must be integers or digit strings");
}

Json integer_json(const BigInt& v) {
  if (v >= BigInt(std::numeric_limits<std::int64_t>::min()) && v <= BigInt(std::numeric_limits<std::int64_t>::max()))
    return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

Row parse_row(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected an array of numbers");
  Row row;
  for (std::size_t i = 0; i < j.size(); ++i) row.push_back(Number::parse(j[i], where + "[" + std::to_string(i) + "]"));
  return row;
}

Json row_json(const Row& row) {
  Json out = Json::array();
  for (const auto& x : row) out.push_back(x.raw());
  return out;
}

Table parse_table(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(where + ": expected a nonempty array");
  Table t;
  t.flat = !j[0].is_array();
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto at = where + "[" + std::to_string(k) + "]";
    if (t.flat) {
      if (j[k].is_array()) throw InvalidArgument(at + ": mixes rows and numbers");
      t.rows.push_back({Number::parse(j[k], at)});
    } else {
      t.rows.push_back(parse_row(j[k], at));
    }
  }
  return t;
}

Json table_json(const Table& t) {
  Json out = Json::array();
  for (const auto& row : t.rows) out.push_back(t.flat ? row.front().raw() : row_json(row));
  return out;
}

std::vector<std::vector<Row>> parse_nested(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(where + ": expected a nonempty array");
  std::vector<std::vector<Row>> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto at = where + "[" + std::to_string(k) + "]";
    if (!j[k].is_array()) throw InvalidArgument(at + ": expected an array of rows");
    std::vector<Row> rows;
    for (std::size_t i = 0; i < j[k].size(); ++i) rows.push_back(parse_row(j[k][i], at + "[" + std::to_string(i) + "]"));
    out.push_back(std::move(rows));
  }
  return out;
}

Json nested_json(const std::vector<std::vector<Row>>& v) {
  Json out = Json::array();
  for (const auto& rows : v) {
    Json inner = Json::array();
    for (const auto& row : rows) inner.push_back(row_json(row));
    out.push_back(std::move(inner));
  }
  return out;
}

Json set_spec_json(const SetSpec& s) {
  Json out = Json::array();
  for (const auto& p : s.parts) out.push_back(Json::array({p.cell, p.offset.raw(), p.mass.raw()}));
  return out;
}

void only_keys(const Json& object, std::initializer_list<const char*> keys, const std::string& where) {
  if (!object.is_object()) throw InvalidArgument(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : object.items())
    if (!allowed.count(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
}

}  // namespace

Number Number::parse(const Json& j, const std::string& where) {
  Number n;
  n.raw_ = j;
  if (j.is_number_integer()) {
    n.kind_ = Kind::Integer;
    n.num_ = integer_part(j, where);
  } else if (j.is_number_float()) {
    n.kind_ = Kind::Float;
    n.float_ = j.get<double>();
    if (!std::isfinite(n.float_)) throw InvalidArgument(where + ": non-finite number");
  } else if (j.is_object()) {
    only_keys(j, {"num", "den"}, where);
    if (!j.contains("num") || !j.contains("den")) throw InvalidArgument(where + ": rational needs num and den");
    n.kind_ = Kind::Ratio;
    n.num_ = integer_part(j["num"], where + ".num");
    n.den_ = integer_part(j["den"], where + ".den");
    if (n.den_ == 0) throw InvalidArgument(where + ": zero denominator");
  } else {
    throw InvalidArgument(where + ": expected a number");
  }
  return n;
}

template <>
double Number::as<double>() const {
  switch (kind_) {
    case Kind::Integer: return num_.convert_to<double>();
    case Kind::Float: return float_;
    case Kind::Ratio: return Rational(num_, den_).convert_to<double>();
  }
  return 0.0;
}

template <>
Rational Number::as<Rational>() const {
  switch (kind_) {
    case Kind::Integer: return Rational(num_);
    case Kind::Float: return rational_from_double(float_);
    case Kind::Ratio: return Rational(num_, den_);
  }
  return Rational(0);
}

Json to_json(double x) { return Json(x); }

Json to_json(const Rational& x) {
  return Json{{"num", integer_json(boost::multiprecision::numerator(x))},
              {"den", integer_json(boost::multiprecision::denominator(x))}};
}

const Json& field(const Json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key))
    throw InvalidArgument(where + ": missing '" + std::string(key) + "'");
  return object[key];
}

bool flag(const Json& object, const char* key, const std::string& where) {
  const auto& j = field(object, key, where);
  if (!j.is_boolean()) throw InvalidArgument(where + "." + key + ": expected true or false");
  return j.get<bool>();
}

std::size_t index_value(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::size_t>(j.get<std::int64_t>());
  throw InvalidArgument(where + ": expected a nonnegative integer");
}

SetSpec parse_set(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected an array of [cell, offset, mass]");
  SetSpec s;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 3) throw InvalidArgument(at + ": expected [cell, offset, mass]");
    s.parts.push_back({index_value(j[i][0], at + "[0]"), Number::parse(j[i][1], at + "[1]"),
                       Number::parse(j[i][2], at + "[2]")});
  }
  return s;
}

ProblemDocument ProblemDocument::parse(const Json& j) {
  only_keys(j,
            {"space", "partition", "function", "set", "witness", "alpha", "polytope_map", "selection",
             "young_measure", "integrands", "measures", "functions", "parameters"},
            "problem");
  ProblemDocument doc;
  const auto& space = field(j, "space", "problem");
  only_keys(space, {"weights", "mode"}, "space");
  const auto weights = parse_table(field(space, "weights", "space"), "space.weights");
  if (!weights.flat) throw InvalidArgument("space.weights: expected a flat array of numbers");
  for (const auto& row : weights.rows) doc.weights.push_back(row.front());
  if (space.contains("mode")) {
    if (!space["mode"].is_string()) throw InvalidArgument("space.mode: expected a string");
    doc.mode = space["mode"].get<std::string>();
    parse_space_mode(*doc.mode);
  }
  if (j.contains("partition")) {
    const auto& p = j["partition"];
    only_keys(p, {"block_of"}, "partition");
    const auto& labels = field(p, "block_of", "partition");
    if (!labels.is_array()) throw InvalidArgument("partition.block_of: expected an array");
    std::vector<std::size_t> block_of;
    for (std::size_t k = 0; k < labels.size(); ++k)
      block_of.push_back(index_value(labels[k], "partition.block_of[" + std::to_string(k) + "]"));
    doc.block_of = std::move(block_of);
  }
  if (j.contains("function")) doc.function = parse_table(j["function"], "function");
  if (j.contains("set")) doc.set = parse_set(j["set"], "set");
  if (j.contains("witness")) doc.witness = parse_set(j["witness"], "witness");
  if (j.contains("alpha")) doc.alpha = parse_table(j["alpha"], "alpha");
  if (j.contains("polytope_map")) doc.polytope_map = parse_nested(j["polytope_map"], "polytope_map");
  if (j.contains("selection")) doc.selection = parse_table(j["selection"], "selection");
  if (j.contains("young_measure")) {
    const auto& y = j["young_measure"];
    only_keys(y, {"actions", "probabilities"}, "young_measure");
    YoungSpec spec;
    const auto& actions = field(y, "actions", "young_measure");
    if (!actions.is_array()) throw InvalidArgument("young_measure.actions: expected an array of labels");
    for (const auto& a : actions) {
      if (!a.is_string()) throw InvalidArgument("young_measure.actions: labels must be strings");
      spec.actions.push_back(a.get<std::string>());
    }
    spec.probabilities = parse_table(field(y, "probabilities", "young_measure"), "young_measure.probabilities");
    doc.young_measure = std::move(spec);
  }
  if (j.contains("integrands")) doc.integrands = parse_nested(j["integrands"], "integrands");
  if (j.contains("measures")) {
    const auto& m = j["measures"];
    if (!m.is_array() || m.empty()) throw InvalidArgument("measures: expected a nonempty array");
    std::vector<Row> rows;
    for (std::size_t i = 0; i < m.size(); ++i) rows.push_back(parse_row(m[i], "measures[" + std::to_string(i) + "]"));
    doc.measures = std::move(rows);
  }
  if (j.contains("functions")) doc.functions = parse_table(j["functions"], "functions");
  if (j.contains("parameters")) {
    const auto& p = j["parameters"];
    only_keys(p, {"tolerance", "exact", "diagonal_only"}, "parameters");
    Parameters params;
    if (p.contains("tolerance")) params.tolerance = Number::parse(p["tolerance"], "parameters.tolerance");
    if (p.contains("exact")) params.exact = flag(p, "exact", "parameters");
    if (p.contains("diagonal_only")) params.diagonal_only = flag(p, "diagonal_only", "parameters");
    doc.parameters = std::move(params);
  }
  return doc;
}

Json ProblemDocument::to_json() const {
  Json j = Json::object();
  Json space = Json::object();
  space["weights"] = row_json(weights);
  if (mode) space["mode"] = *mode;
  j["space"] = std::move(space);
  if (block_of) j["partition"] = Json{{"block_of", *block_of}};
  if (function) j["function"] = table_json(*function);
  if (set) j["set"] = set_spec_json(*set);
  if (witness) j["witness"] = set_spec_json(*witness);
  if (alpha) j["alpha"] = table_json(*alpha);
  if (polytope_map) j["polytope_map"] = nested_json(*polytope_map);
  if (selection) j["selection"] = table_json(*selection);
  if (young_measure)
    j["young_measure"] = Json{{"actions", young_measure->actions},
                              {"probabilities", table_json(young_measure->probabilities)}};
  if (integrands) j["integrands"] = nested_json(*integrands);
  if (measures) {
    Json m = Json::array();
    for (const auto& row : *measures) m.push_back(row_json(row));
    j["measures"] = std::move(m);
  }
  if (functions) j["functions"] = table_json(*functions);
  if (parameters) {
    Json p = Json::object();
    if (parameters->tolerance) p["tolerance"] = parameters->tolerance->raw();
    if (parameters->exact) p["exact"] = *parameters->exact;
    if (parameters->diagonal_only) p["diagonal_only"] = *parameters->diagonal_only;
    j["parameters"] = std::move(p);
  }
  return j;
}

std::string digest(const Json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

template <class T>
std::vector<T> numbers(const Row& row) {
  std::vector<T> out;
  out.reserve(row.size());
  for (const auto& x : row) out.push_back(x.as<T>());
  return out;
}

template <class T>
Context<T> make_context(const ProblemDocument& doc, const Settings& settings) {
  Context<T> ctx{Grid<T>::build(numbers<T>(doc.weights), settings.mode), BlockPartition(), T(0),
                 settings.diagonal_only};
  ctx.partition = doc.block_of ? BlockPartition(*doc.block_of) : BlockPartition::trivial(ctx.grid.size());
  require_compatible(ctx.grid, ctx.partition);
  if (!NumTraits<T>::exact) {
    ctx.tol = settings.tolerance ? settings.tolerance->as<T>() : NumTraits<T>::default_tolerance();
    if (ctx.tol < T(0)) throw InvalidArgument("tolerance must be nonnegative");
  }
  return ctx;
}

template <class T>
SimpleFunction<T> cell_function(const Table& table, std::size_t cells, const std::string& name) {
  if (table.rows.size() != cells)
    throw InvalidArgument(name + ": expected " + std::to_string(cells) + " rows, got " +
                          std::to_string(table.rows.size()));
  std::vector<std::vector<T>> rows;
  for (const auto& row : table.rows) {
    if (row.size() != table.rows.front().size() || row.empty())
      throw InvalidArgument(name + ": rows must be nonempty and of equal length");
    rows.push_back(numbers<T>(row));
  }
  return SimpleFunction<T>::from_rows(rows);
}

template <class T>
RefinedSet<T> refined_set(const SetSpec& spec, const Grid<T>& grid) {
  std::vector<Interval<T>> parts;
  for (const auto& p : spec.parts) parts.push_back(Interval<T>::sized(p.cell, p.offset.as<T>(), p.mass.as<T>()));
  return RefinedSet<T>::from_intervals(grid, std::move(parts));
}

template <class T>
Json set_json(const RefinedSet<T>& set) {
  Json out = Json::array();
  for (const auto& iv : set.intervals()) out.push_back(Json::array({iv.cell, to_json(iv.offset), to_json(iv.length())}));
  return out;
}

template <class T>
BlockFunction<T> block_rows(const Json& j, std::size_t rows, std::size_t dim, const std::string& name) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(name + ": expected rows");
  std::vector<std::vector<T>> values;
  for (std::size_t r = 0; r < j.size(); ++r) values.push_back(numbers<T>(parse_row(j[r], name)));
  auto f = BlockFunction<T>::from_rows(values);
  if ((rows && f.rows() != rows) || (dim && f.dim() != dim)) throw InvalidArgument(name + ": wrong shape");
  return f;
}

#define CONDBB_INSTANTIATE(T)                                                                    \
  template std::vector<T> numbers<T>(const Row&);                                                \
  template Context<T> make_context<T>(const ProblemDocument&, const Settings&);                  \
  template SimpleFunction<T> cell_function<T>(const Table&, std::size_t, const std::string&);    \
  template RefinedSet<T> refined_set<T>(const SetSpec&, const Grid<T>&);                         \
  template Json set_json<T>(const RefinedSet<T>&);                                               \
  template BlockFunction<T> block_rows<T>(const Json&, std::size_t, std::size_t, const std::string&);

CONDBB_INSTANTIATE(double)
CONDBB_INSTANTIATE(Rational)
#undef CONDBB_INSTANTIATE

}  // namespace condbb::cli
