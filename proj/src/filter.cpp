#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "medeq/errors.hpp"
#include "medeq/filter.hpp"

namespace medeq {

double compute_auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw DataError("AUC needs scores on both sides");
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.push_back({s, true});
  for (double s : neg) all.push_back({s, false});
  for (const auto& s : all)
    if (std::isnan(s.score)) throw DataError("AUC scores contain NaN");
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // twice the Mann-Whitney count, kept integral
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::uint64_t p = 0, n = 0;
    while (j < all.size() && all[j].score == all[i].score) {
      (all[j].positive ? p : n) += 1;
      ++j;
    }
    twice_u += 2 * p * neg_below + p * n;
    neg_below += n;
    i = j;
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

HoldoutSplit holdout_split(std::size_t n, Engine& eng) {
  HoldoutSplit split;
  if (n == 0) return split;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(eng, i)]);
  if (n == 1) {
    split.train = idx;
    split.test = idx;
    return split;
  }
  const auto wanted = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
  const std::size_t n_train = std::clamp<std::size_t>(wanted, 1, n - 1);
  split.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return split;
}

BatchVerdict evaluate_batch(const Dataset& real_sub, const SampleBatch& batch,
                            const OcsvmModel& ocsvm, double alpha, const Encoder& enc,
                            std::uint64_t seed, const LogisticParams& params) {
  if (real_sub.empty()) throw DataError("batch evaluation needs real reference rows");
  BatchVerdict v;
  v.alpha = alpha;
  v.s_valid = ocsvm_filter(ocsvm, batch, enc);
  if (v.s_valid.empty()) return v;

  Engine eng(seed);
  const auto real_split = holdout_split(real_sub.size(), eng);
  const auto synth_split = holdout_split(v.s_valid.size(), eng);

  std::vector<Record> train_real, train_synth;
  for (auto i : real_split.train) train_real.push_back(real_sub.rows()[i]);
  for (auto i : synth_split.train) train_synth.push_back(v.s_valid[i]);
  const auto clf = train_discriminator(train_real, train_synth, enc, params);

  std::vector<double> pos, neg;
  for (auto i : real_split.test) pos.push_back(clf.score(enc.encode(real_sub.rows()[i])));
  for (auto i : synth_split.test) neg.push_back(clf.score(enc.encode(v.s_valid[i])));
  v.auc = compute_auc(pos, neg);
  v.accepted = *v.auc <= alpha;
  return v;
}

}  // namespace medeq
