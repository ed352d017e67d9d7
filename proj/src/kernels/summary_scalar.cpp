#include "summary_kernel.hpp"

#include <vector>

namespace grip::detail {

void run_summary_scalar(const KernelArgs &args) {
  const TableView t(*args.table);
  const int K = t.K;
  std::vector<double> scratch(size_t(t.U) * 3);
  double *cum = scratch.data();
  double *lv = cum + t.U;
  double *rv = lv + t.U;
  double p[kNumSurfaceStates], pn[kNumSurfaceStates];

  for (size_t i = 0; i < args.n_pixels; ++i) {
    const float *px = args.probs + i * size_t(K);
    for (int c = 0; c < K; ++c)
      p[c] = double(px[c]);
    normalize_probs(p, K, pn);
    summarize_one(t, pn, args.targets5, cum, lv, rv, &args.out[i]);
  }
}

} // namespace grip::detail
