#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spoofprint/cluster_metrics.hpp"
#include "spoofprint/csv.hpp"
#include "spoofprint/errors.hpp"

namespace spoofprint {
namespace {

// Tableau-like categorical palette; cycles past 20 labels.
constexpr const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
    "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace

Projection2D pca_2d(const Eigen::MatrixXd& X) {
  if (X.rows() < 3 || X.cols() < 2) throw ContractError("pca_2d: need n >= 3 and d >= 2");
  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw ContractError("pca_2d: eigendecomposition failed");

  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);  // ascending
  const Eigen::Index d = X.cols();
  const double total = values.sum();
  const double first = values(d - 1);
  const double second = values(d - 2);
  if (!(first > 0.0) || second <= 1e-12 * first) throw ContractError("pca_2d: data has rank < 2");

  Projection2D p;
  p.components.resize(2, d);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    p.components.row(k) = v.transpose();
  }
  p.explained_ratio = Eigen::Vector2d(first / total, second / total);
  p.coordinates = centered * p.components.transpose();
  return p;
}

std::string scatter_csv(const Projection2D& p, const std::vector<AttackerLabel>& y) {
  if (static_cast<std::size_t>(p.coordinates.rows()) != y.size()) throw ShapeError("scatter: one label per point required");
  std::ostringstream out;
  out << "x,y,label\r\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << csv::number(p.coordinates(r, 0)) << ',' << csv::number(p.coordinates(r, 1)) << ','
        << csv::quote(y[i].str()) << "\r\n";
  }
  return out.str();
}

std::string scatter_svg(const Projection2D& p, const std::vector<AttackerLabel>& y) {
  if (static_cast<std::size_t>(p.coordinates.rows()) != y.size()) throw ShapeError("scatter: one label per point required");
  const std::set<AttackerLabel> sorted(y.begin(), y.end());
  std::map<AttackerLabel, std::string> color;
  std::size_t k = 0;
  for (const auto& l : sorted) color[l] = kPalette[k++ % std::size(kPalette)];

  constexpr double width = 640.0;
  constexpr double height = 480.0;
  constexpr double margin = 30.0;
  constexpr double legend = 120.0;
  const double x_lo = p.coordinates.col(0).minCoeff();
  const double x_hi = p.coordinates.col(0).maxCoeff();
  const double y_lo = p.coordinates.col(1).minCoeff();
  const double y_hi = p.coordinates.col(1).maxCoeff();
  const double sx = (width - legend - 2 * margin) / std::max(x_hi - x_lo, 1e-12);
  const double sy = (height - 2 * margin) / std::max(y_hi - y_lo, 1e-12);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double cx = margin + (p.coordinates(r, 0) - x_lo) * sx;
    const double cy = height - margin - (p.coordinates(r, 1) - y_lo) * sy;
    out << "<circle cx=\"" << fmt("%.2f", cx) << "\" cy=\"" << fmt("%.2f", cy) << "\" r=\"3\" fill=\""
        << color[y[i]] << "\" fill-opacity=\"0.8\"/>\n";
  }
  double ly = margin;
  for (const auto& l : sorted) {
    const double lx = width - legend + 10.0;
    out << "<circle cx=\"" << fmt("%.2f", lx) << "\" cy=\"" << fmt("%.2f", ly) << "\" r=\"5\" fill=\""
        << color[l] << "\"/>\n";
    out << "<text x=\"" << fmt("%.2f", lx + 10.0) << "\" y=\"" << fmt("%.2f", ly + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(l.str()) << "</text>\n";
    ly += 18.0;
  }
  out << "</svg>\n";
  return out.str();
}

void scatter_export(const Projection2D& p, const std::vector<AttackerLabel>& y,
                    const std::filesystem::path& csv_path, const std::filesystem::path& svg_path) {
  write_text(scatter_csv(p, y), csv_path);
  write_text(scatter_svg(p, y), svg_path);
}

}  // namespace spoofprint
