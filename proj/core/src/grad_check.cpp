#include "spoofprint/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spoofprint/rng.hpp"

namespace spoofprint {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport compare_gradients(const std::function<double(std::span<const double>)>& loss,
                                  std::vector<double>& params, std::span<const double> analytic,
                                  double eps, std::span<const std::size_t> indices) {
  GradCheckReport report;
  for (std::size_t i : indices) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double up = loss(params);
    params[i] = saved - eps;
    const double down = loss(params);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = relative_error(analytic[i], numeric);
    if (report.checked == 0 || err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_index = i;
      report.worst_analytic = analytic[i];
      report.worst_numeric = numeric;
    }
    ++report.checked;
  }
  return report;
}

std::vector<std::size_t> grad_check_indices(std::size_t n_params, std::size_t sample, std::uint64_t seed) {
  std::vector<std::size_t> idx(n_params);
  std::iota(idx.begin(), idx.end(), 0);
  if (sample == 0 || sample >= n_params) return idx;
  Rng rng(seed);
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(sample);
  std::sort(idx.begin(), idx.end());
  return idx;
}

GradCheckReport grad_check(const EmbeddingNetworkParams& p, const Batch& batch, double eps,
                           std::size_t sample, std::uint64_t seed) {
  const LossAndGradient lg = batch_gradient(p, batch);
  EmbeddingNetworkParams work = p;
  auto loss = [&](std::span<const double> values) {
    std::copy(values.begin(), values.end(), work.values.begin());
    return batch_loss(work, batch);
  };
  std::vector<double> values = p.values;
  const auto indices = grad_check_indices(values.size(), sample, seed);
  GradCheckReport report = compare_gradients(loss, values, lg.grad, eps, indices);
  report.worst_name = p.layout().describe(report.worst_index);
  return report;
}

Batch random_batch(int input_dim, int n_classes, int n_per_class, int frames, std::uint64_t seed) {
  Rng rng(seed);
  Batch b;
  b.n_classes = n_classes;
  b.n_per_class = n_per_class;
  for (int i = 0; i < n_classes * n_per_class; ++i) {
    FrameMatrix f(frames, input_dim);
    for (Eigen::Index k = 0; k < f.size(); ++k) f.data()[k] = rng.normal();
    b.sequences.push_back(std::move(f));
  }
  return b;
}

}  // namespace spoofprint
