#include "hnav/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "hnav/io.hpp"

namespace hnav {

namespace {

using Mat = Mlp::Mat;
using RowVec = Mlp::RowVec;
using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

float clip_range(double r) {
  if (r < 0.0) return 0.0f;
  if (r > 1.0) return 1.0f;
  return static_cast<float>(r);
}

struct AdamState {
  Mat m, v;
  RowVec mb, vb;
  void init(const Mat& w, const RowVec& b) {
    m = Mat::Zero(w.rows(), w.cols());
    v = Mat::Zero(w.rows(), w.cols());
    mb = RowVec::Zero(b.cols());
    vb = RowVec::Zero(b.cols());
  }
};

void adam_step(Mat& w, RowVec& b, const Mat& dw, const RowVec& db, AdamState& st,
               const Hyper& h, double bias1, double bias2) {
  const float b1 = static_cast<float>(h.beta1);
  const float b2 = static_cast<float>(h.beta2);
  const float lr = static_cast<float>(h.learning_rate);
  const float eps = static_cast<float>(h.adam_eps);
  const float c1 = static_cast<float>(1.0 / bias1);
  const float c2 = static_cast<float>(1.0 / bias2);
  st.m = b1 * st.m + (1.0f - b1) * dw;
  st.v = b2 * st.v + (1.0f - b2) * dw.cwiseProduct(dw);
  w.array() -= lr * (st.m.array() * c1) / ((st.v.array() * c2).sqrt() + eps);
  st.mb = b1 * st.mb + (1.0f - b1) * db;
  st.vb = b2 * st.vb + (1.0f - b2) * db.cwiseProduct(db);
  b.array() -= lr * (st.mb.array() * c1) / ((st.vb.array() * c2).sqrt() + eps);
}

void append_raw(std::string& out, const Mat& m) {
  out.append(reinterpret_cast<const char*>(m.data()), sizeof(float) * m.size());
}
void append_raw(std::string& out, const RowVec& v) {
  out.append(reinterpret_cast<const char*>(v.data()), sizeof(float) * v.size());
}

void read_raw(const std::string& bytes, size_t& pos, Mat& m) {
  const size_t n = sizeof(float) * m.size();
  if (pos + n > bytes.size()) throw ConfigError("weights file: truncated payload");
  std::memcpy(m.data(), bytes.data() + pos, n);
  pos += n;
}
void read_raw(const std::string& bytes, size_t& pos, RowVec& v) {
  const size_t n = sizeof(float) * v.size();
  if (pos + n > bytes.size()) throw ConfigError("weights file: truncated payload");
  std::memcpy(v.data(), bytes.data() + pos, n);
  pos += n;
}

constexpr char kMagic[8] = {'H', 'N', 'A', 'V', 'M', 'L', 'P', '1'};

}  // namespace

std::vector<double> assemble_features(const Scan& scan, Vec2 goal_rel,
                                      const Command& vel_in, bool use_vel_input) {
  if (scan.ranges.size() != static_cast<size_t>(kScanDim)) {
    throw DimensionMismatch("assemble_features: scan must have 720 beams");
  }
  std::vector<double> f;
  f.reserve(kScanDim + 4);
  for (double r : scan.ranges) f.push_back(static_cast<double>(clip_range(r)));
  f.push_back(goal_rel.x);
  f.push_back(goal_rel.y);
  if (use_vel_input) {
    f.push_back(vel_in.v);
    f.push_back(vel_in.omega);
  }
  return f;
}

RawOutput forward(const Mlp& net, const std::vector<double>& features) {
  if (features.size() != static_cast<size_t>(net.input_dim())) {
    throw DimensionMismatch("forward: expected " + std::to_string(net.input_dim()) +
                            " features, got " + std::to_string(features.size()));
  }
  Mat x(1, net.input_dim());
  for (size_t i = 0; i < features.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = static_cast<float>(features[i]);
  Mat raw;
  forward_batch(net, x, &raw);
  RawOutput out;
  out.v_raw = raw(0, 0);
  out.omega_raw = raw(0, 1);
  // Decode in double so a saturated squash lands exactly on the command
  // bounds instead of a float ulp past them.
  out.command = Command{kVScale * logistic(out.v_raw),
                        kOmegaScale * std::tanh(out.omega_raw)};
  return out;
}

Command predict_action(const Mlp& net, const Scan& scan, Vec2 goal_rel,
                       const Command& vel_in) {
  const auto features = assemble_features(scan, goal_rel, vel_in, net.use_vel_input);
  return forward(net, features).command;
}

TrainResult train(const std::vector<TrainSample>& data, const Hyper& hyper) {
  if (data.empty()) throw ConfigError("train: empty dataset");
  if (hyper.batch_size < 1 || hyper.epochs < 1 || !(hyper.learning_rate > 0.0)) {
    throw ConfigError("train: bad hyperparameters");
  }
  Mlp net = Mlp::random_init(hyper.seed, hyper.use_vel_input);
  const int in_dim = net.input_dim();
  const auto n = static_cast<Eigen::Index>(data.size());

  MatRM X(n, in_dim);
  Mat Y(n, 2);
  for (Eigen::Index r = 0; r < n; ++r) {
    const TrainSample& s = data[static_cast<size_t>(r)];
    if (s.scan.size() != static_cast<size_t>(kScanDim)) {
      throw DimensionMismatch("train: sample scan must have 720 beams");
    }
    for (int c = 0; c < kScanDim; ++c) X(r, c) = clip_range(s.scan[static_cast<size_t>(c)]);
    X(r, kScanDim) = static_cast<float>(s.goal_dx);
    X(r, kScanDim + 1) = static_cast<float>(s.goal_dy);
    if (hyper.use_vel_input) {
      X(r, kScanDim + 2) = static_cast<float>(s.v_in);
      X(r, kScanDim + 3) = static_cast<float>(s.omega_in);
    }
    Y(r, 0) = static_cast<float>(s.label_v);
    Y(r, 1) = static_cast<float>(s.label_omega);
  }

  AdamState s1, s2, s3, s4;
  s1.init(net.w1, net.b1);
  s2.init(net.w2, net.b2);
  s3.init(net.w3, net.b3);
  s4.init(net.w4, net.b4);

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  Rng shuffle_rng(mix_seed(hyper.seed, 0x5bff1eULL));

  TrainResult result;
  result.epoch_loss.reserve(static_cast<size_t>(hyper.epochs));
  MlpGrads<float> grads;
  long step = 0;
  double bias1 = 1.0, bias2 = 1.0;
  const Eigen::Index bs = hyper.batch_size;
  Mat xb, yb;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream.
    for (size_t i = static_cast<size_t>(n) - 1; i > 0; --i) {
      const size_t j = static_cast<size_t>(shuffle_rng.uniform_index(i + 1));
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    for (Eigen::Index begin = 0; begin < n; begin += bs) {
      const Eigen::Index size = std::min(bs, n - begin);
      xb.resize(size, in_dim);
      yb.resize(size, 2);
      for (Eigen::Index r = 0; r < size; ++r) {
        xb.row(r) = X.row(order[static_cast<size_t>(begin + r)]);
        yb.row(r) = Y.row(order[static_cast<size_t>(begin + r)]);
      }
      const double loss = loss_and_gradients(net, xb, yb, &grads);
      if (!std::isfinite(loss)) {
        throw NonFiniteLoss("train: non-finite loss at epoch " + std::to_string(epoch) +
                            ", step " + std::to_string(step));
      }
      ++step;
      bias1 *= hyper.beta1;
      bias2 *= hyper.beta2;
      adam_step(net.w1, net.b1, grads.w1, grads.b1, s1, hyper, 1.0 - bias1, 1.0 - bias2);
      adam_step(net.w2, net.b2, grads.w2, grads.b2, s2, hyper, 1.0 - bias1, 1.0 - bias2);
      adam_step(net.w3, net.b3, grads.w3, grads.b3, s3, hyper, 1.0 - bias1, 1.0 - bias2);
      adam_step(net.w4, net.b4, grads.w4, grads.b4, s4, hyper, 1.0 - bias1, 1.0 - bias2);
      epoch_loss += loss * static_cast<double>(size);
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  result.net = std::move(net);
  return result;
}

std::string weights_to_bytes(const Mlp& net, const Hyper& hyper,
                             const std::string& dataset_digest) {
  nlohmann::json header;
  header["arch"] = {{"kind", "mlp-relu3"},
                    {"input_dim", net.input_dim()},
                    {"hidden", {kHiddenDim, kHiddenDim, kHiddenDim}},
                    {"output", 2},
                    {"use_vel_input", net.use_vel_input},
                    {"v_scale", kVScale},
                    {"omega_scale", kOmegaScale},
                    {"dtype", "f32"}};
  header["hyper"] = {{"learning_rate", hyper.learning_rate},
                     {"batch_size", hyper.batch_size},
                     {"epochs", hyper.epochs},
                     {"seed", hyper.seed}};
  header["dataset_digest"] = dataset_digest;
  const std::string h = header.dump();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  const auto len = static_cast<uint32_t>(h.size());
  char lenbuf[4] = {static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
                    static_cast<char>((len >> 16) & 0xff),
                    static_cast<char>((len >> 24) & 0xff)};
  out.append(lenbuf, 4);
  out += h;
  append_raw(out, net.w1);
  append_raw(out, net.b1);
  append_raw(out, net.w2);
  append_raw(out, net.b2);
  append_raw(out, net.w3);
  append_raw(out, net.b3);
  append_raw(out, net.w4);
  append_raw(out, net.b4);
  return out;
}

Mlp weights_from_bytes(const std::string& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("weights file: bad magic");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + 8);
  const uint32_t len = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
                       (static_cast<uint32_t>(p[2]) << 16) |
                       (static_cast<uint32_t>(p[3]) << 24);
  if (bytes.size() < 12 + len) throw ConfigError("weights file: truncated header");
  const auto header = nlohmann::json::parse(bytes.substr(12, len));
  const auto& arch = header.at("arch");
  if (arch.at("kind") != "mlp-relu3" || arch.at("dtype") != "f32") {
    throw ConfigError("weights file: unsupported architecture");
  }
  Mlp net = Mlp::zeros(arch.at("use_vel_input").get<bool>());
  if (arch.at("input_dim").get<int>() != net.input_dim()) {
    throw ConfigError("weights file: inconsistent input_dim");
  }
  size_t pos = 12 + len;
  read_raw(bytes, pos, net.w1);
  read_raw(bytes, pos, net.b1);
  read_raw(bytes, pos, net.w2);
  read_raw(bytes, pos, net.b2);
  read_raw(bytes, pos, net.w3);
  read_raw(bytes, pos, net.b3);
  read_raw(bytes, pos, net.w4);
  read_raw(bytes, pos, net.b4);
  if (pos != bytes.size()) throw ConfigError("weights file: trailing bytes");
  return net;
}

}  // namespace hnav
