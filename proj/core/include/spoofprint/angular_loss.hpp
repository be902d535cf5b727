#pragma once

#include <Eigen/Dense>

namespace spoofprint {

struct AngularLossResult {
  double loss = 0.0;
  Eigen::MatrixXd similarity;    // [N x N], S[j,k] = w cos(query_j, prototype_k) + b
  Eigen::MatrixXd d_embeddings;  // [N*M x d], filled when gradients are requested
  double d_scale = 0.0;
  double d_bias = 0.0;
};

/// Angular prototypical loss over a batch of N classes x M utterances.
/// Row j*M + m of `embeddings` is utterance m of class j; rows must be unit norm (+/-1e-4).
/// The last utterance of each class is its query; the mean of the others is its prototype.
/// loss = -(1/N) sum_j log softmax_k(S[j,k]) at k = j.
AngularLossResult angular_proto_loss(const Eigen::MatrixXd& embeddings, int n_classes,
                                     int n_per_class, double scale, double bias,
                                     bool with_gradient = false);

}  // namespace spoofprint
