#include "spoofprint/angular_loss.hpp"

#include <cmath>
#include <string>

#include "spoofprint/errors.hpp"

namespace spoofprint {

AngularLossResult angular_proto_loss(const Eigen::MatrixXd& E, int n_classes, int n_per_class,
                                     double scale, double bias, bool with_gradient) {
  const int N = n_classes;
  const int M = n_per_class;
  if (N < 2 || M < 2) throw ContractError("angular_proto_loss: need N >= 2 and M >= 2");
  if (E.rows() != static_cast<Eigen::Index>(N) * M) {
    throw ShapeError("angular_proto_loss: expected " + std::to_string(N * M) + " rows, got " +
                     std::to_string(E.rows()));
  }
  for (Eigen::Index r = 0; r < E.rows(); ++r) {
    if (std::abs(E.row(r).norm() - 1.0) > 1e-4) {
      throw ContractError("angular_proto_loss: row " + std::to_string(r) + " is not unit norm");
    }
  }
  const Eigen::Index d = E.cols();

  Eigen::MatrixXd queries(N, d);
  Eigen::MatrixXd protos = Eigen::MatrixXd::Zero(N, d);
  for (int j = 0; j < N; ++j) {
    queries.row(j) = E.row(j * M + M - 1);
    for (int m = 0; m < M - 1; ++m) protos.row(j) += E.row(j * M + m);
    protos.row(j) /= static_cast<double>(M - 1);
  }
  const Eigen::VectorXd q_norm = queries.rowwise().norm().cwiseMax(1e-12);
  const Eigen::VectorXd c_norm = protos.rowwise().norm().cwiseMax(1e-12);
  const Eigen::MatrixXd q_hat = q_norm.cwiseInverse().asDiagonal() * queries;
  const Eigen::MatrixXd c_hat = c_norm.cwiseInverse().asDiagonal() * protos;
  const Eigen::MatrixXd cosine = q_hat * c_hat.transpose();

  AngularLossResult out;
  out.similarity = (scale * cosine).array() + bias;

  Eigen::MatrixXd softmax(N, N);
  double total = 0.0;
  for (int j = 0; j < N; ++j) {
    const double mx = out.similarity.row(j).maxCoeff();
    const Eigen::ArrayXd ex = (out.similarity.row(j).array() - mx).exp();
    const double z = ex.sum();
    softmax.row(j) = ex / z;
    total += (mx + std::log(z)) - out.similarity(j, j);
  }
  out.loss = total / N;
  if (!with_gradient) return out;

  Eigen::MatrixXd dS = softmax;
  dS.diagonal().array() -= 1.0;
  dS /= static_cast<double>(N);
  out.d_scale = (dS.array() * cosine.array()).sum();
  out.d_bias = dS.sum();
  const Eigen::MatrixXd dcos = scale * dS;

  // d cos(q, c) / dq = (c_hat - cos q_hat) / |q|, symmetric in c.
  Eigen::MatrixXd dq(N, d);
  Eigen::MatrixXd dc(N, d);
  for (int j = 0; j < N; ++j) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (int k = 0; k < N; ++k) acc += dcos(j, k) * (c_hat.row(k) - cosine(j, k) * q_hat.row(j));
    dq.row(j) = acc / q_norm(j);
  }
  for (int k = 0; k < N; ++k) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (int j = 0; j < N; ++j) acc += dcos(j, k) * (q_hat.row(j) - cosine(j, k) * c_hat.row(k));
    dc.row(k) = acc / c_norm(k);
  }
  out.d_embeddings.resize(E.rows(), d);
  for (int j = 0; j < N; ++j) {
    out.d_embeddings.row(j * M + M - 1) = dq.row(j);
    for (int m = 0; m < M - 1; ++m) out.d_embeddings.row(j * M + m) = dc.row(j) / static_cast<double>(M - 1);
  }
  return out;
}

}  // namespace spoofprint
