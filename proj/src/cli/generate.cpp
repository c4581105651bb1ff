#include "condbb/cli/app.hpp"

#include <algorithm>
#include <random>

namespace condbb::cli {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // multiples of 1/4 in [lo, hi]
  double quarter(int lo, int hi) { return integer(4 * lo, 4 * hi) / 4.0; }

  // p nonnegative multiples of 1/8 summing to one
  std::vector<double> simplex(std::size_t p) {
    std::vector<int> cuts{0, 8};
    for (std::size_t i = 1; i < p; ++i) cuts.push_back(integer(0, 8));
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out;
    for (std::size_t i = 1; i < cuts.size(); ++i) out.push_back((cuts[i] - cuts[i - 1]) / 8.0);
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

Json rows(std::size_t cells, std::size_t dim, Draw& d, int lo = -2, int hi = 2) {
  Json out = Json::array();
  for (std::size_t k = 0; k < cells; ++k) {
    Json row = Json::array();
    for (std::size_t j = 0; j < dim; ++j) row.push_back(d.quarter(lo, hi));
    out.push_back(std::move(row));
  }
  return out;
}

Json ratio(long num, long den) { return Json{{"num", num}, {"den", den}}; }

// Whole cells on atomic grids, eighths of cells otherwise; never empty.
// Written as exact rationals so both arithmetics read the same set.
Json random_set(const std::vector<int>& weights, int total, SpaceMode mode, Draw& d) {
  Json out = Json::array();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const int kind = d.integer(0, 2);
    if (kind == 0 && !(k + 1 == weights.size() && out.empty())) continue;
    if (mode == SpaceMode::Atomic || kind == 1) {
      out.push_back(Json::array({k, 0, ratio(weights[k], total)}));
    } else {
      const int a = d.integer(0, 6);
      const int b = d.integer(a + 1, 8);
      out.push_back(Json::array({k, ratio(weights[k] * a, 8L * total), ratio(weights[k] * (b - a), 8L * total)}));
    }
  }
  return out;
}

Json polytope(std::size_t cells, std::size_t dim, Draw& d, Json& selection) {
  Json map = Json::array();
  selection = Json::array();
  for (std::size_t k = 0; k < cells; ++k) {
    const auto count = static_cast<std::size_t>(d.integer(1, 5));
    Json points = Json::array();
    std::vector<std::vector<double>> pts;
    for (std::size_t v = 0; v < count; ++v) {
      std::vector<double> p;
      for (std::size_t j = 0; j < dim; ++j) p.push_back(d.quarter(-2, 2));
      points.push_back(p);
      pts.push_back(std::move(p));
    }
    const auto weights = d.simplex(count);
    std::vector<double> s(dim, 0.0);
    for (std::size_t v = 0; v < count; ++v)
      for (std::size_t j = 0; j < dim; ++j) s[j] += weights[v] * pts[v][j];
    map.push_back(std::move(points));
    selection.push_back(s);
  }
  return map;
}

}  // namespace

Json generate(const std::string& command, std::uint64_t seed, std::size_t cells, SpaceMode mode) {
  if (cells == 0) throw InvalidArgument("generate: at least one cell");
  Draw d(seed);
  std::vector<int> weights;
  int total = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    weights.push_back(d.integer(1, 9));
    total += weights.back();
  }
  const auto blocks = static_cast<std::size_t>(d.integer(1, static_cast<int>(std::min<std::size_t>(cells, 4))));
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < cells; ++k)
    labels.push_back(k < blocks ? k : static_cast<std::size_t>(d.integer(0, static_cast<int>(blocks) - 1)));
  std::shuffle(labels.begin(), labels.end(), d.engine());

  Json doc{{"space", {{"weights", weights}, {"mode", std::string(to_string(mode))}}},
           {"partition", {{"block_of", labels}}}};
  const auto dim = static_cast<std::size_t>(d.integer(1, 2));
  if (command == "cond-exp") {
    doc["function"] = rows(cells, dim, d);
  } else if (command == "ce-measure") {
    doc["set"] = random_set(weights, total, mode, d);
    if (d.integer(0, 1)) doc["function"] = rows(cells, dim, d);
  } else if (command == "partition" || command == "partition-multi") {
    const auto p = static_cast<std::size_t>(d.integer(2, 3));
    Json alpha = Json::array();
    for (std::size_t k = 0; k < cells; ++k) alpha.push_back(d.simplex(p));
    doc["alpha"] = std::move(alpha);
    if (command == "partition") {
      doc["function"] = rows(cells, dim, d);
    } else {
      Json measures = Json::array();
      for (int i = 0; i < 2; ++i) {
        Json m = Json::array();
        for (std::size_t k = 0; k < cells; ++k) m.push_back(d.integer(1, 6));
        measures.push_back(std::move(m));
      }
      doc["measures"] = std::move(measures);
      doc["functions"] = rows(cells, 2, d);
    }
  } else if (command == "half-set") {
    doc["function"] = rows(cells, dim, d);
    doc["set"] = random_set(weights, total, mode, d);
  } else if (command == "annihilator") {
    Json f = Json::array();
    for (std::size_t k = 0; k < cells; ++k) f.push_back(d.integer(0, 1) ? d.quarter(1, 3) : -d.quarter(1, 3));
    doc["function"] = std::move(f);
    doc["set"] = random_set(weights, total, SpaceMode::Splittable, d);
  } else if (command == "bang-bang" || command == "pointset-bang-bang") {
    Json selection;
    doc["polytope_map"] = polytope(cells, dim, d, selection);
    doc["selection"] = std::move(selection);
  } else if (command == "purify" || command == "density-step") {
    const auto actions = static_cast<std::size_t>(d.integer(1, 4));
    Json labels = Json::array();
    for (std::size_t a = 0; a < actions; ++a) labels.push_back("a" + std::to_string(a));
    Json probs = Json::array();
    for (std::size_t k = 0; k < cells; ++k) probs.push_back(d.simplex(actions));
    doc["young_measure"] = {{"actions", labels}, {"probabilities", probs}};
    Json integrands = Json::array();
    if (command == "purify") {
      for (std::size_t k = 0; k < cells; ++k) integrands.push_back(rows(actions, dim, d));
    } else {
      for (std::size_t i = 0; i < dim; ++i) integrands.push_back(rows(cells, actions, d));
    }
    doc["integrands"] = std::move(integrands);
  } else if (command == "coarseness") {
    if (d.integer(0, 1)) doc["set"] = random_set(weights, total, mode, d);
  } else {
    throw InvalidArgument("generate: unknown command '" + command + "'");
  }
  return doc;
}

}  // namespace condbb::cli
