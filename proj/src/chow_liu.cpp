#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <tuple>

#include "medeq/errors.hpp"
#include "medeq/generators.hpp"
#include "medeq/rng.hpp"

namespace medeq {

double mutual_information(const Dataset& d, std::size_t col_a, std::size_t col_b,
                          double smoothing) {
  const auto& schema = d.schema();
  if (col_a >= schema.size() || col_b >= schema.size())
    throw DataError("mutual information over unknown column");
  if (smoothing < 0.0) throw DataError("smoothing must be non-negative");
  const std::size_t ka = schema.column(col_a).cardinality();
  const std::size_t kb = schema.column(col_b).cardinality();
  std::vector<double> joint(ka * kb, smoothing);
  for (const auto& r : d.rows()) joint[r[col_a] * kb + r[col_b]] += 1.0;
  const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  if (!(total > 0.0)) throw DataError("mutual information of an empty dataset without smoothing");
  std::vector<double> pa(ka, 0.0), pb(kb, 0.0);
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) {
      joint[i * kb + j] /= total;
      pa[i] += joint[i * kb + j];
      pb[j] += joint[i * kb + j];
    }
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) {
      const double p = joint[i * kb + j];
      if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
    }
  return std::max(0.0, mi);
}

double mutual_information(const Dataset& d, const std::string& col_a, const std::string& col_b,
                          double smoothing) {
  return mutual_information(d, d.schema().index_of(col_a), d.schema().index_of(col_b), smoothing);
}

double ChowLiuModel::joint(const Record& r) const {
  double p = 1.0;
  for (std::size_t c : order) {
    const std::size_t row = parent[c] < 0 ? 0 : r[static_cast<std::size_t>(parent[c])];
    p *= cpt[c][row][r[c]];
  }
  return p;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> up;
  explicit DisjointSets(std::size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  std::size_t find(std::size_t x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::vector<double> smoothed_row(const std::vector<double>& counts, double smoothing) {
  std::vector<double> row(counts.size());
  double total = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    row[v] = counts[v] + smoothing;
    total += row[v];
  }
  if (total > 0.0) {
    for (double& p : row) p /= total;
  } else {
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
  }
  return row;
}

}  // namespace

ChowLiuModel build_chow_liu_tree(const Dataset& d, double smoothing) {
  if (d.empty()) throw DataError("cannot fit generator on an empty dataset");
  if (smoothing < 0.0) throw DataError("smoothing must be non-negative");
  const auto& schema = d.schema();
  const std::size_t m = schema.size();

  std::vector<TreeEdge> candidates;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      candidates.push_back({a, b, mutual_information(d, a, b, smoothing)});
  std::stable_sort(candidates.begin(), candidates.end(), [](const TreeEdge& x, const TreeEdge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  ChowLiuModel model;
  model.smoothing = smoothing;
  DisjointSets sets(m);
  for (const auto& e : candidates)
    if (sets.unite(e.a, e.b)) model.edges.push_back(e);

  std::vector<std::vector<std::size_t>> adj(m);
  for (const auto& e : model.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  model.root = 0;
  model.parent.assign(m, -1);
  model.children.assign(m, {});
  std::vector<bool> seen(m, false);
  std::deque<std::size_t> queue{model.root};
  seen[model.root] = true;
  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    model.order.push_back(c);
    for (auto nb : adj[c]) {
      if (seen[nb]) continue;
      seen[nb] = true;
      model.parent[nb] = static_cast<std::ptrdiff_t>(c);
      model.children[c].push_back(nb);
      queue.push_back(nb);
    }
  }

  model.cpt.assign(m, {});
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t k = schema.column(c).cardinality();
    if (model.parent[c] < 0) {
      std::vector<double> counts(k, 0.0);
      for (const auto& r : d.rows()) counts[r[c]] += 1.0;
      model.cpt[c] = {smoothed_row(counts, smoothing)};
      continue;
    }
    const auto p = static_cast<std::size_t>(model.parent[c]);
    const std::size_t kp = schema.column(p).cardinality();
    std::vector<std::vector<double>> counts(kp, std::vector<double>(k, 0.0));
    for (const auto& r : d.rows()) counts[r[p]][r[c]] += 1.0;
    for (std::size_t pv = 0; pv < kp; ++pv) model.cpt[c].push_back(smoothed_row(counts[pv], smoothing));
  }
  return model;
}

void ChowLiuGenerator::fit(const Dataset& d) {
  model_ = build_chow_liu_tree(d, smoothing_);
  set_schema(d.schema());
  fitted_ = true;
}

std::unique_ptr<Generator> ChowLiuGenerator::fresh() const {
  return std::make_unique<ChowLiuGenerator>(smoothing_);
}

std::vector<Record> ChowLiuGenerator::draw(std::size_t n, std::uint64_t seed,
                                           const Pattern& cond) const {
  const auto& m = model_;
  const std::size_t width = m.parent.size();

  // lambda[c][x]: evidence likelihood of c's subtree given x_c.
  // message[c][pv]: the same, seen from c's parent taking value pv.
  std::vector<std::vector<double>> lambda(width), message(width);
  for (std::size_t idx = width; idx-- > 0;) {
    const std::size_t c = m.order[idx];
    const std::size_t k = m.cpt[c].front().size();
    auto& lam = lambda[c];
    lam.assign(k, 1.0);
    if (auto v = cond.bound(c))
      for (std::size_t x = 0; x < k; ++x) lam[x] = (x == *v) ? 1.0 : 0.0;
    for (auto ch : m.children[c])
      for (std::size_t x = 0; x < k; ++x) lam[x] *= message[ch][x];
    if (m.parent[c] >= 0) {
      const auto& table = m.cpt[c];
      message[c].assign(table.size(), 0.0);
      for (std::size_t pv = 0; pv < table.size(); ++pv)
        for (std::size_t x = 0; x < k; ++x) message[c][pv] += table[pv][x] * lam[x];
    }
  }

  {
    double z = 0.0;
    for (std::size_t x = 0; x < lambda[m.root].size(); ++x) z += m.cpt[m.root][0][x] * lambda[m.root][x];
    if (!(z > 0.0))
      throw DataError("condition " + cond.to_string(schema()) + " has zero probability under the model");
  }

  Engine eng(seed);
  std::vector<Record> out(n, Record(width));
  std::vector<double> w;
  for (auto& r : out) {
    for (std::size_t c : m.order) {
      const std::size_t row = m.parent[c] < 0 ? 0 : r[static_cast<std::size_t>(m.parent[c])];
      const auto& probs = m.cpt[c][row];
      w.resize(probs.size());
      for (std::size_t x = 0; x < probs.size(); ++x) w[x] = probs[x] * lambda[c][x];
      r[c] = static_cast<std::uint32_t>(sample_index(eng, w));
    }
  }
  return out;
}

}  // namespace medeq
