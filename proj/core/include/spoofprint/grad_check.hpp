#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spoofprint/trainer.hpp"

namespace spoofprint {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::string worst_name;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// |ga - gn| / max(|ga|, |gn|, 1e-8).
double relative_error(double analytic, double numeric);

/// Compares `analytic` against central differences (f(x + eps) - f(x - eps)) / (2 eps) of
/// `loss` at each index. `params` is perturbed in place and restored.
GradCheckReport compare_gradients(const std::function<double(std::span<const double>)>& loss,
                                  std::vector<double>& params, std::span<const double> analytic,
                                  double eps, std::span<const std::size_t> indices);

/// Every parameter when sample == 0, otherwise a seeded sample of that many distinct indices.
std::vector<std::size_t> grad_check_indices(std::size_t n_params, std::size_t sample, std::uint64_t seed);

/// Full-loss gradient check of the embedder on one batch.
GradCheckReport grad_check(const EmbeddingNetworkParams& p, const Batch& batch, double eps,
                           std::size_t sample = 0, std::uint64_t seed = 0);

/// Tiny random batch of N classes x M sequences with `frames` rows of width input_dim.
Batch random_batch(int input_dim, int n_classes, int n_per_class, int frames, std::uint64_t seed);

}  // namespace spoofprint
