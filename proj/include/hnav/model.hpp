#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hnav/errors.hpp"
#include "hnav/halluc.hpp"
#include "hnav/rng.hpp"
#include "hnav/sim.hpp"

namespace hnav {

constexpr int kScanDim = 720;
constexpr int kHiddenDim = 256;
constexpr double kVScale = 1.0;      // decoded v = logistic(raw) * kVScale
constexpr double kOmegaScale = 1.57;  // decoded omega = tanh(raw) * kOmegaScale

struct Hyper {
  double learning_rate = 1e-3;
  int batch_size = 128;
  int epochs = 50;
  uint64_t seed = 0;
  double beta1 = 0.9;   // adaptive-moment decay
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  bool use_vel_input = true;
};

/// Three ReLU hidden layers plus a squashed two-unit output head.
/// Weight matrices are stored input-major (in x out) so a batch forward is
/// X * W. Templated on the scalar so tests can run the same math in double.
template <typename T>
struct MlpT {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

  Mat w1, w2, w3, w4;
  RowVec b1, b2, b3, b4;
  bool use_vel_input = true;

  int input_dim() const { return kScanDim + (use_vel_input ? 4 : 2); }

  static MlpT random_init(uint64_t seed, bool use_vel_input = true) {
    MlpT net;
    net.use_vel_input = use_vel_input;
    Rng rng(mix_seed(seed, 0x90de1ULL));
    const int in = net.input_dim();
    net.w1 = he_matrix(rng, in, kHiddenDim);
    net.w2 = he_matrix(rng, kHiddenDim, kHiddenDim);
    net.w3 = he_matrix(rng, kHiddenDim, kHiddenDim);
    net.w4 = he_matrix(rng, kHiddenDim, 2);
    net.b1 = RowVec::Zero(kHiddenDim);
    net.b2 = RowVec::Zero(kHiddenDim);
    net.b3 = RowVec::Zero(kHiddenDim);
    net.b4 = RowVec::Zero(2);
    return net;
  }

  static MlpT zeros(bool use_vel_input = true) {
    MlpT net;
    net.use_vel_input = use_vel_input;
    const int in = net.input_dim();
    net.w1 = Mat::Zero(in, kHiddenDim);
    net.w2 = Mat::Zero(kHiddenDim, kHiddenDim);
    net.w3 = Mat::Zero(kHiddenDim, kHiddenDim);
    net.w4 = Mat::Zero(kHiddenDim, 2);
    net.b1 = RowVec::Zero(kHiddenDim);
    net.b2 = RowVec::Zero(kHiddenDim);
    net.b3 = RowVec::Zero(kHiddenDim);
    net.b4 = RowVec::Zero(2);
    return net;
  }

 private:
  static Mat he_matrix(Rng& rng, int in, int out) {
    Mat m(in, out);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = static_cast<T>(rng.normal() * scale);
    }
    return m;
  }
};

template <typename T>
struct MlpGrads {
  typename MlpT<T>::Mat w1, w2, w3, w4;
  typename MlpT<T>::RowVec b1, b2, b3, b4;
};

template <typename T>
inline T logistic(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

/// Batched forward pass; X is (B x input_dim), returns decoded (v, omega)
/// rows. Optionally fills the raw pre-squash outputs.
template <typename T>
typename MlpT<T>::Mat forward_batch(const MlpT<T>& net,
                                    const Eigen::Ref<const typename MlpT<T>::Mat>& X,
                                    typename MlpT<T>::Mat* raw_out = nullptr) {
  using Mat = typename MlpT<T>::Mat;
  if (X.cols() != net.input_dim()) {
    throw DimensionMismatch("forward: feature dimension mismatch");
  }
  Mat a1 = ((X * net.w1).rowwise() + net.b1).cwiseMax(T(0));
  Mat a2 = ((a1 * net.w2).rowwise() + net.b2).cwiseMax(T(0));
  Mat a3 = ((a2 * net.w3).rowwise() + net.b3).cwiseMax(T(0));
  Mat raw = (a3 * net.w4).rowwise() + net.b4;
  Mat decoded(X.rows(), 2);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    decoded(r, 0) = T(kVScale) * logistic(raw(r, 0));
    decoded(r, 1) = T(kOmegaScale) * std::tanh(raw(r, 1));
  }
  if (raw_out != nullptr) *raw_out = std::move(raw);
  return decoded;
}

/// Mean squared error between decoded commands and labels (mean over all
/// 2B scalar errors) plus full gradients. The decode squash is part of the
/// differentiated path.
template <typename T>
double loss_and_gradients(const MlpT<T>& net,
                          const Eigen::Ref<const typename MlpT<T>::Mat>& X,
                          const Eigen::Ref<const typename MlpT<T>::Mat>& Y,
                          MlpGrads<T>* grads) {
  using Mat = typename MlpT<T>::Mat;
  if (X.cols() != net.input_dim()) {
    throw DimensionMismatch("loss: feature dimension mismatch");
  }
  const Eigen::Index batch = X.rows();
  Mat a1 = ((X * net.w1).rowwise() + net.b1).cwiseMax(T(0));
  Mat a2 = ((a1 * net.w2).rowwise() + net.b2).cwiseMax(T(0));
  Mat a3 = ((a2 * net.w3).rowwise() + net.b3).cwiseMax(T(0));
  Mat raw = (a3 * net.w4).rowwise() + net.b4;

  Mat d_raw(batch, 2);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < batch; ++r) {
    const T sig = logistic(raw(r, 0));
    const T th = std::tanh(raw(r, 1));
    const T ev = T(kVScale) * sig - Y(r, 0);
    const T ew = T(kOmegaScale) * th - Y(r, 1);
    loss += 0.5 * (double(ev) * double(ev) + double(ew) * double(ew));
    // dL/draw with L = (1/2B) sum e^2 per scalar -> e/B * d(decode)/draw.
    d_raw(r, 0) = ev * T(kVScale) * sig * (T(1) - sig) / T(batch);
    d_raw(r, 1) = ew * T(kOmegaScale) * (T(1) - th * th) / T(batch);
  }
  loss /= static_cast<double>(batch);

  if (grads != nullptr) {
    grads->w4 = a3.transpose() * d_raw;
    grads->b4 = d_raw.colwise().sum();
    Mat d3 = (d_raw * net.w4.transpose()).cwiseProduct((a3.array() > T(0)).template cast<T>().matrix());
    grads->w3 = a2.transpose() * d3;
    grads->b3 = d3.colwise().sum();
    Mat d2 = (d3 * net.w3.transpose()).cwiseProduct((a2.array() > T(0)).template cast<T>().matrix());
    grads->w2 = a1.transpose() * d2;
    grads->b2 = d2.colwise().sum();
    Mat d1 = (d2 * net.w2.transpose()).cwiseProduct((a1.array() > T(0)).template cast<T>().matrix());
    grads->w1 = X.transpose() * d1;
    grads->b1 = d1.colwise().sum();
  }
  return loss;
}

using Mlp = MlpT<float>;

struct RawOutput {
  double v_raw = 0.0;
  double omega_raw = 0.0;
  Command command;
};

/// Single-vector forward. Feature layout:
/// [720 scan ranges clipped to 1 m, goal dx, goal dy, (v_in, omega_in)].
RawOutput forward(const Mlp& net, const std::vector<double>& features);

struct TrainResult {
  Mlp net;
  std::vector<double> epoch_loss;
};

/// Adam on shuffled mini-batches, deterministic under hyper.seed.
/// Throws NonFiniteLoss with diagnostics if the loss leaves the reals.
TrainResult train(const std::vector<TrainSample>& data, const Hyper& hyper);

/// Assemble features from live perception and run the net.
Command predict_action(const Mlp& net, const Scan& scan, Vec2 goal_rel,
                       const Command& vel_in);

std::vector<double> assemble_features(const Scan& scan, Vec2 goal_rel,
                                      const Command& vel_in, bool use_vel_input);

/// Self-describing container: magic, JSON header (architecture tag, hyper
/// echo, source digest), then raw little-endian f32 payload.
std::string weights_to_bytes(const Mlp& net, const Hyper& hyper,
                             const std::string& dataset_digest);
Mlp weights_from_bytes(const std::string& bytes);

}  // namespace hnav
