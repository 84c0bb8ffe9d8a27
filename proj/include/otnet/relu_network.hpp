#pragma once

#include "otnet/max_affine.hpp"

#include <string>
#include <utility>
#include <vector>

namespace otnet {

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weights;
  VectorX<Scalar> bias;
};

/// Fully connected feed-forward network with ReLU on every hidden layer and
/// an affine scalar output. depth() counts hidden layers.
template <typename Scalar>
class ReluNetwork {
 public:
  ReluNetwork(Index input_dim, std::vector<DenseLayer<Scalar>> layers)
      : input_dim_(input_dim), layers_(std::move(layers)) {
    if (layers_.empty()) throw ValidationError("ReluNetwork: no layers");
    Index width = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      if (layer.weights.cols() != width || layer.bias.size() != layer.weights.rows()) {
        throw ValidationError("ReluNetwork: layer " + std::to_string(l) + " does not compose with its input");
      }
      width = layer.weights.rows();
    }
    if (width != 1) throw ValidationError("ReluNetwork: output layer must have one row");
  }

  Index input_dim() const { return input_dim_; }
  Index depth() const { return static_cast<Index>(layers_.size()) - 1; }
  const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }

  std::vector<Index> hidden_widths() const {
    std::vector<Index> widths;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) widths.push_back(layers_[l].weights.rows());
    return widths;
  }

  template <typename Derived>
  Scalar forward(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != input_dim_) throw ValidationError("forward: input dimension mismatch");
    VectorX<Scalar> z = x.derived().template cast<Scalar>();
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      z = (layers_[l].weights * z + layers_[l].bias).cwiseMax(Scalar(0));
    }
    return (layers_.back().weights * z + layers_.back().bias)(0);
  }

  /// Row-wise forward pass over a point set.
  VectorX<Scalar> forward_batch(const PointsX<Scalar>& x) const {
    if (x.cols() != input_dim_) throw ValidationError("forward: input dimension mismatch");
    MatrixX<Scalar> z = x.transpose();
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      z = ((layers_[l].weights * z).colwise() + layers_[l].bias).cwiseMax(Scalar(0));
    }
    return ((layers_.back().weights * z).colwise() + layers_.back().bias).transpose();
  }

 private:
  Index input_dim_;
  std::vector<DenseLayer<Scalar>> layers_;
};

/// Smallest power of two >= n.
inline Index padded_size(Index n) {
  Index p = 1;
  while (p < n) p *= 2;
  return p;
}

/// Repeats the last piece until the count is a power of two. Duplicated
/// pieces never change a maximum, so the function is unchanged everywhere.
template <typename Scalar>
MaxAffine<Scalar> pad_atoms(const MaxAffine<Scalar>& phi) {
  if (phi.size() < 1) throw ValidationError("pad_atoms: empty coefficient list");
  const Index n = phi.size();
  const Index n_pad = padded_size(n);
  MaxAffine<Scalar> out;
  out.slopes.resize(n_pad, phi.dim());
  out.offsets.resize(n_pad);
  out.slopes.topRows(n) = phi.slopes;
  out.offsets.head(n) = phi.offsets;
  for (Index j = n; j < n_pad; ++j) {
    out.slopes.row(j) = phi.slopes.row(n - 1);
    out.offsets(j) = phi.offsets(n - 1);
  }
  return out;
}

/// Exact ReLU realisation of a max-affine function by a balanced tree of
/// pairwise maxima, max(a, b) = ReLU(a - b) + ReLU(b) - ReLU(-b).
///
/// With P = 2^L padded pieces the network has L hidden layers of widths
/// 3P/2, 3P/4, ..., 3. Hidden layer l holds one gadget triple
/// (a - b, b, -b) per pair; contracting a triple with h = (1, 1, -1) yields
/// max(a, b). Layer weights are:
///   W^0 = (A (+) ... (+) A) Y,   b^0 = (A (+) ... (+) A) m
///   W^l = (A (+) ... (+) A)(h^T (+) ... (+) h^T),   b^l = 0
///   W^L = h^T
/// with A = [[1, -1], [0, 1], [0, -1]]. A single piece compiles to the affine
/// map x . y_1 + m_1 with no hidden layer.
template <typename Scalar>
ReluNetwork<Scalar> compile_max_affine(const MaxAffine<Scalar>& phi) {
  if (phi.size() < 1) throw ValidationError("compile_max_affine: empty coefficient list");
  if (phi.offsets.size() != phi.size()) throw ValidationError("compile_max_affine: slopes/offsets length mismatch");
  const Index d = phi.dim();
  std::vector<DenseLayer<Scalar>> layers;

  if (phi.size() == 1) {
    layers.push_back({phi.slopes.row(0), phi.offsets.head(1)});
    return ReluNetwork<Scalar>(d, std::move(layers));
  }

  const MaxAffine<Scalar> padded = pad_atoms(phi);
  const Index n = padded.size();

  {
    DenseLayer<Scalar> first{MatrixX<Scalar>::Zero(3 * n / 2, d), VectorX<Scalar>::Zero(3 * n / 2)};
    for (Index p = 0; p < n / 2; ++p) {
      const Index a = 2 * p, b = 2 * p + 1;
      first.weights.row(3 * p) = padded.slopes.row(a) - padded.slopes.row(b);
      first.weights.row(3 * p + 1) = padded.slopes.row(b);
      first.weights.row(3 * p + 2) = -padded.slopes.row(b);
      first.bias(3 * p) = padded.offsets(a) - padded.offsets(b);
      first.bias(3 * p + 1) = padded.offsets(b);
      first.bias(3 * p + 2) = -padded.offsets(b);
    }
    layers.push_back(std::move(first));
  }

  const Scalar h[3] = {Scalar(1), Scalar(1), Scalar(-1)};
  for (Index values = n / 2; values > 1; values /= 2) {
    DenseLayer<Scalar> layer{MatrixX<Scalar>::Zero(3 * values / 2, 3 * values), VectorX<Scalar>::Zero(3 * values / 2)};
    for (Index p = 0; p < values / 2; ++p) {
      const Index a = 2 * p, b = 2 * p + 1;
      for (int k = 0; k < 3; ++k) {
        layer.weights(3 * p, 3 * a + k) = h[k];
        layer.weights(3 * p, 3 * b + k) = -h[k];
        layer.weights(3 * p + 1, 3 * b + k) = h[k];
        layer.weights(3 * p + 2, 3 * b + k) = -h[k];
      }
    }
    layers.push_back(std::move(layer));
  }

  DenseLayer<Scalar> out{MatrixX<Scalar>(1, 3), VectorX<Scalar>::Zero(1)};
  out.weights << h[0], h[1], h[2];
  layers.push_back(std::move(out));
  return ReluNetwork<Scalar>(d, std::move(layers));
}

/// Compiled Brenier potential: the network together with the coefficients it
/// was built from (the gradient map is read off the coefficients).
struct BrenierNetwork {
  MaxAffine<double> coeffs;
  ReluNetwork<double> net;

  explicit BrenierNetwork(MaxAffine<double> c) : coeffs(std::move(c)), net(compile_max_affine(coeffs)) {}
  BrenierNetwork(MaxAffine<double> c, ReluNetwork<double> n) : coeffs(std::move(c)), net(std::move(n)) {}
};

}  // namespace otnet
