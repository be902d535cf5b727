#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoofprint/manifest.hpp"

namespace spoofprint {

struct Standardized {
  Eigen::MatrixXd X;                          // [n x d]
  Eigen::VectorXd mean;                       // per dimension
  Eigen::VectorXd std;                        // population std per dimension
  std::vector<Eigen::Index> zero_variance;    // dimensions with std < 1e-12, zeroed in X
};

/// Shifts each column to mean 0 and scales it to population std 1. Requires n >= 2.
Standardized standard_normalize(const Eigen::MatrixXd& X);

/// How a d-dimensional squared deviation is reduced to one number.
enum class VarianceConvention {
  mean_over_dims,  // ||x - centroid||^2 / d (default; 1-dim and d-dim results share a scale)
  sum_over_dims,   // ||x - centroid||^2
};

/// Bessel-corrected spread of class c around its centroid: sum_i ||mean_c - x_i||^2 / (N_c - 1),
/// reduced over dimensions per `convention`. Throws ContractError when N_c < 2.
double class_variance(const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y,
                      const AttackerLabel& c,
                      VarianceConvention convention = VarianceConvention::mean_over_dims);

struct ClassVariance {
  AttackerLabel label;
  std::size_t count = 0;
  double variance = 0.0;
  Eigen::VectorXd per_dimension;  // Bessel-corrected variance of each dimension
};

struct ClusterReport {
  std::vector<ClassVariance> classes;  // sorted by label
  double average = 0.0;                // uniform mean over classes
  Eigen::VectorXd per_dimension;       // uniform class mean of per-dimension variances
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<Eigen::Index> zero_variance;
};

/// Standard-normalizes X, then averages class_variance uniformly over the classes present in y.
ClusterReport avg_class_conditional_variance(
    const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y,
    VarianceConvention convention = VarianceConvention::mean_over_dims);

/// Rows (class, N_c, variance) then (AVERAGE, n, var_C).
std::string cluster_report_csv(const ClusterReport& r);
void write_cluster_report_csv(const ClusterReport& r, const std::filesystem::path& path);

/// Rows (feature, var_C) for each named dimension then (AVERAGE, var_C).
std::string dimension_report_csv(const ClusterReport& r, const std::vector<std::string>& names);

struct Projection2D {
  Eigen::MatrixXd coordinates;  // [n x 2]
  Eigen::MatrixXd components;   // [2 x d], orthonormal rows
  Eigen::Vector2d explained_ratio;
};

/// Top-2 principal components of the centered data; each component's largest-magnitude
/// entry is made positive. Requires n >= 3, d >= 2 and rank >= 2.
Projection2D pca_2d(const Eigen::MatrixXd& X);

/// CSV (x, y, label) and an SVG scatter colored by sorted label order.
void scatter_export(const Projection2D& p, const std::vector<AttackerLabel>& y,
                    const std::filesystem::path& csv_path, const std::filesystem::path& svg_path);
std::string scatter_csv(const Projection2D& p, const std::vector<AttackerLabel>& y);
std::string scatter_svg(const Projection2D& p, const std::vector<AttackerLabel>& y);

}  // namespace spoofprint
