// Serial reference vs OpenMP kernels: wall time and result agreement.
//   bench_kernels [rows]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "medeq/dataset.hpp"
#include "medeq/encode.hpp"
#include "medeq/kernels.hpp"

using namespace medeq;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-18s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx   %s\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  std::printf("rows %zu, threads %d\n", rows, omp_get_max_threads());

  const Dataset d = generate_demo_cohort(demo_cohort_spec(rows, 1));
  const auto key = d.schema().protected_columns();
  std::vector<std::size_t> gs, gp;
  const double g_serial = best_of(5, [&] { gs = kernels::group_counts_serial(d, key); });
  const double g_par = best_of(5, [&] { gp = kernels::group_counts(d, key); });
  report("group_counts", g_serial, g_par, gs == gp);

  const Encoder enc(d.schema());
  const auto x = enc.encode_all(d.rows());
  const double gamma = 1.0 / static_cast<double>(enc.dimension());
  std::vector<double> ks(x.rows), kp(x.rows);
  const double k_serial = best_of(5, [&] { kernels::kernel_row_serial(x, 7, gamma, ks); });
  const double k_par = best_of(5, [&] { kernels::kernel_row(x, 7, gamma, kp); });
  report("kernel_row", k_serial, k_par, ks == kp);

  const std::size_t n_sv = std::min<std::size_t>(1000, x.rows);
  FeatureMatrix sv(n_sv, x.cols);
  std::copy(x.data.begin(), x.data.begin() + static_cast<std::ptrdiff_t>(n_sv * x.cols), sv.data.begin());
  const std::vector<double> coef(n_sv, 1.0 / static_cast<double>(n_sv));
  const std::size_t n_q = std::min<std::size_t>(20000, x.rows);
  FeatureMatrix q(n_q, x.cols);
  std::copy(x.data.begin(), x.data.begin() + static_cast<std::ptrdiff_t>(n_q * x.cols), q.data.begin());
  std::vector<double> ds, dp;
  const double d_serial = best_of(3, [&] { ds = kernels::decision_values_serial(sv, coef, 0.5, gamma, q); });
  const double d_par = best_of(3, [&] { dp = kernels::decision_values(sv, coef, 0.5, gamma, q); });
  report("decision_values", d_serial, d_par, ds == dp);
  return gs == gp && ks == kp && ds == dp ? 0 : 1;
}
