#include "spoofprint/cluster_metrics.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "spoofprint/csv.hpp"
#include "spoofprint/errors.hpp"

namespace spoofprint {
namespace {

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

// Bessel-corrected per-dimension variance of the given rows.
Eigen::VectorXd class_spread(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(X.cols());
  for (auto r : rows) centroid += X.row(r).transpose();
  centroid /= static_cast<double>(rows.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(X.cols());
  for (auto r : rows) acc += (X.row(r).transpose() - centroid).cwiseAbs2();
  return acc / static_cast<double>(rows.size() - 1);
}

double reduce(const Eigen::VectorXd& per_dim, VarianceConvention convention) {
  const double total = per_dim.sum();
  return convention == VarianceConvention::mean_over_dims ? total / static_cast<double>(per_dim.size())
                                                          : total;
}

}  // namespace

Standardized standard_normalize(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) throw ContractError("standard_normalize: need at least 2 rows");
  Standardized s;
  const double n = static_cast<double>(X.rows());
  s.mean = X.colwise().mean().transpose();
  s.X = X.rowwise() - s.mean.transpose();
  s.std = (s.X.colwise().squaredNorm().transpose() / n).cwiseSqrt();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (s.std(j) < 1e-12) {
      s.X.col(j).setZero();
      s.zero_variance.push_back(j);
    } else {
      s.X.col(j) /= s.std(j);
    }
  }
  return s;
}

double class_variance(const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y,
                      const AttackerLabel& c, VarianceConvention convention) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("class_variance: one label per row required");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.size() < 2) {
    throw ContractError("class_variance: class '" + c.str() + "' has fewer than 2 members");
  }
  return reduce(class_spread(X, rows), convention);
}

ClusterReport avg_class_conditional_variance(const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y,
                                             VarianceConvention convention) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ShapeError("avg_class_conditional_variance: one label per row required");
  }
  const Standardized s = standard_normalize(X);
  std::map<AttackerLabel, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(static_cast<Eigen::Index>(i));

  ClusterReport r;
  r.n = static_cast<std::size_t>(X.rows());
  r.d = static_cast<std::size_t>(X.cols());
  r.zero_variance = s.zero_variance;
  r.per_dimension = Eigen::VectorXd::Zero(X.cols());
  for (const auto& [label, rows] : groups) {
    if (rows.size() < 2) {
      throw ContractError("class_variance: class '" + label.str() + "' has fewer than 2 members");
    }
    ClassVariance cv;
    cv.label = label;
    cv.count = rows.size();
    cv.per_dimension = class_spread(s.X, rows);
    cv.variance = reduce(cv.per_dimension, convention);
    r.per_dimension += cv.per_dimension;
    r.average += cv.variance;
    r.classes.push_back(std::move(cv));
  }
  const double k = static_cast<double>(r.classes.size());
  r.average /= k;
  r.per_dimension /= k;
  return r;
}

std::string cluster_report_csv(const ClusterReport& r) {
  std::ostringstream out;
  out << "class,count,variance\r\n";
  for (const auto& c : r.classes) {
    out << csv::quote(c.label.str()) << ',' << c.count << ',' << csv::number(c.variance) << "\r\n";
  }
  out << "AVERAGE," << r.n << ',' << csv::number(r.average) << "\r\n";
  return out.str();
}

void write_cluster_report_csv(const ClusterReport& r, const std::filesystem::path& path) {
  write_text(cluster_report_csv(r), path);
}

std::string dimension_report_csv(const ClusterReport& r, const std::vector<std::string>& names) {
  if (names.size() != static_cast<std::size_t>(r.per_dimension.size())) {
    throw ShapeError("dimension_report_csv: one name per dimension required");
  }
  std::ostringstream out;
  out << "feature,variance\r\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << csv::quote(names[j]) << ',' << csv::number(r.per_dimension(static_cast<Eigen::Index>(j))) << "\r\n";
  }
  out << "AVERAGE," << csv::number(r.average) << "\r\n";
  return out.str();
}

}  // namespace spoofprint
