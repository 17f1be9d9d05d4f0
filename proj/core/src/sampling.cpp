#include "nlea/sampling.hpp"

#include <cmath>

namespace nlea {

std::vector<std::vector<double>> sample_grid(const SamplingBox& box, int grid) {
  if (box.lo.size() != box.hi.size()) throw DimensionError("sampling box lo/hi length mismatch");
  if (grid < 1) throw PreconditionError("grid must be positive");
  const int dim = static_cast<int>(box.lo.size());

  std::vector<std::vector<double>> axes(dim);
  for (int i = 0; i < dim; ++i) {
    if (grid == 1) {
      axes[i] = {0.5 * (box.lo[i] + box.hi[i])};
    } else {
      for (int j = 0; j < grid; ++j)
        axes[i].push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * j / (grid - 1));
    }
  }

  std::vector<std::vector<double>> points;
  std::vector<int> idx(dim, 0);
  while (true) {
    std::vector<double> pt(dim);
    for (int i = 0; i < dim; ++i) pt[i] = axes[i][idx[i]];
    bool ok = true;
    for (const Polynomial& c : box.constraints) {
      if (c.eval_real(pt) < -1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) points.push_back(std::move(pt));
    int axis = dim - 1;
    while (axis >= 0 && ++idx[axis] == grid) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return points;
}

}  // namespace nlea
