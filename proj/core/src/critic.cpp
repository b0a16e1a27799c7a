#include "advreg/critic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "advreg/error.hpp"

namespace advreg {

namespace {

using Matrix = Eigen::MatrixXd;

// Activations kept from one batched forward pass. acts[k] is the input of
// layer k (acts[0] is the batch itself); masks[k] marks positive
// pre-activations of hidden layer k.
struct ForwardCache {
  std::vector<Matrix> acts;
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> masks;
  Eigen::RowVectorXd out;
};

ForwardCache run_forward(const CriticNet& net, const Points& batch) {
  const std::size_t depth = net.depth();
  ForwardCache cache;
  cache.acts.reserve(depth);
  cache.masks.reserve(depth - 1);
  cache.acts.emplace_back(batch);
  for (std::size_t k = 0; k + 1 < depth; ++k) {
    const auto& layer = net.layers[k];
    Matrix z = layer.weight.transpose() * cache.acts.back();
    z.colwise() += layer.bias;
    cache.masks.emplace_back(z.array() > 0.0);
    cache.acts.emplace_back(z.cwiseMax(0.0));
  }
  const auto& last = net.layers.back();
  cache.out = (last.weight.transpose() * cache.acts.back()).row(0);
  cache.out.array() += last.bias(0);
  return cache;
}

// Reverse sweep of d f / d x. adj[k] is df/dz_k for hidden layer k.
std::vector<Matrix> run_adjoint(const CriticNet& net, const ForwardCache& cache) {
  const std::size_t depth = net.depth();
  const Eigen::Index batch = cache.acts[0].cols();
  std::vector<Matrix> adj(depth - 1);
  Matrix upstream = net.layers.back().weight.col(0).replicate(1, batch);
  for (std::size_t k = depth - 1; k-- > 0;) {
    adj[k] = cache.masks[k].select(upstream, 0.0);
    if (k > 0) upstream = net.layers[k].weight * adj[k];
  }
  return adj;
}

void check_net(const CriticNet& net) {
  if (net.depth() < 2) throw InvalidArgument("critic must have at least 2 layers");
}

}  // namespace

std::size_t CriticNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd CriticNet::parameters() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  for (const auto& l : layers) {
    flat.segment(pos, l.weight.size()) = l.weight.reshaped();
    pos += l.weight.size();
    flat.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return flat;
}

void CriticNet::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
    throw InvalidArgument("set_parameters: size mismatch");
  Eigen::Index pos = 0;
  for (auto& l : layers) {
    l.weight.reshaped() = flat.segment(pos, l.weight.size());
    pos += l.weight.size();
    l.bias = flat.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

CriticGradients CriticGradients::zeros_like(const CriticNet& net) {
  CriticGradients g;
  g.layers.reserve(net.depth());
  for (const auto& l : net.layers)
    g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  return g;
}

Eigen::VectorXd CriticGradients::flatten() const {
  CriticNet shim{layers};
  return shim.parameters();
}

CriticGradients& CriticGradients::operator+=(const CriticGradients& other) {
  if (other.layers.size() != layers.size()) throw InvalidArgument("gradient shape mismatch");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    layers[k].weight += other.layers[k].weight;
    layers[k].bias += other.layers[k].bias;
  }
  return *this;
}

CriticGradients& CriticGradients::operator*=(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

CriticNet init_critic(std::size_t width, std::size_t depth, RandomStream& rng) {
  if (width < 1 || depth < 2) throw InvalidArgument("init_critic: need width >= 1 and depth >= 2");
  CriticNet net;
  net.layers.reserve(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    const Eigen::Index fan_in = k == 0 ? 3 : static_cast<Eigen::Index>(width);
    const Eigen::Index fan_out = k + 1 == depth ? 1 : static_cast<Eigen::Index>(width);
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    DenseLayer layer{Eigen::MatrixXd(fan_in, fan_out), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index j = 0; j < fan_out; ++j)
      for (Eigen::Index i = 0; i < fan_in; ++i) layer.weight(i, j) = stddev * rng.normal();
    net.layers.push_back(std::move(layer));
  }
  return net;
}

double forward(const CriticNet& net, const Vec3& x) {
  Points batch = x;
  return forward(net, batch)(0);
}

Eigen::RowVectorXd forward(const CriticNet& net, const Points& batch) {
  check_net(net);
  return run_forward(net, batch).out;
}

CriticGradients backward_params(const CriticNet& net, const Points& batch,
                                std::span<const double> cotangents) {
  check_net(net);
  if (batch.cols() == 0) throw InvalidArgument("backward_params: empty batch");
  if (static_cast<Eigen::Index>(cotangents.size()) != batch.cols())
    throw InvalidArgument("backward_params: cotangent count does not match batch size");
  const Eigen::Map<const Eigen::VectorXd> c(cotangents.data(), static_cast<Eigen::Index>(cotangents.size()));
  const auto cache = run_forward(net, batch);
  const auto adj = run_adjoint(net, cache);

  CriticGradients g;
  g.layers.resize(net.depth());
  const std::size_t last = net.depth() - 1;
  g.layers[last].weight = cache.acts[last] * c;
  g.layers[last].bias = Eigen::VectorXd::Constant(1, c.sum());
  for (std::size_t k = 0; k < last; ++k) {
    const Matrix delta = adj[k] * c.asDiagonal();
    g.layers[k].weight = cache.acts[k] * delta.transpose();
    g.layers[k].bias = delta.rowwise().sum();
  }
  return g;
}

Vec3 grad_input(const CriticNet& net, const Vec3& x) {
  Points batch = x;
  return grad_input(net, batch).col(0);
}

Points grad_input(const CriticNet& net, const Points& batch) {
  check_net(net);
  const auto cache = run_forward(net, batch);
  const auto adj = run_adjoint(net, cache);
  return net.layers[0].weight * adj[0];
}

PenaltyEvaluation penalty_with_gradients(const CriticNet& net, const Points& batch, double weight) {
  check_net(net);
  const Eigen::Index n = batch.cols();
  if (n == 0) throw InvalidArgument("gradient penalty: empty batch");
  const auto cache = run_forward(net, batch);
  const auto adj = run_adjoint(net, cache);
  const Points g = net.layers[0].weight * adj[0];

  // Per-point seed direction gamma_i = w/n * 2(|g_i| - 1)/|g_i| * g_i.
  PenaltyEvaluation eval;
  Points gamma(3, n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = g.col(i).norm();
    sum += (norm - 1.0) * (norm - 1.0);
    gamma.col(i) = norm < 1e-12 ? Vec3::Zero() : Vec3(g.col(i) * (2.0 * (norm - 1.0) / norm));
  }
  const double scale = weight / static_cast<double>(n);
  eval.value = scale * sum;
  gamma *= scale;

  // gamma . grad_x f is the directional derivative of f along gamma. With the
  // ReLU pattern frozen it only depends on the weights; its weight gradient at
  // layer k is tangent_k * adj_k^T, and biases receive nothing.
  const std::size_t depth = net.depth();
  eval.gradients.layers.resize(depth);
  Matrix tangent = gamma;
  for (std::size_t k = 0; k + 1 < depth; ++k) {
    eval.gradients.layers[k].weight = tangent * adj[k].transpose();
    eval.gradients.layers[k].bias = Eigen::VectorXd::Zero(net.layers[k].bias.size());
    Matrix next = net.layers[k].weight.transpose() * tangent;
    tangent = cache.masks[k].select(next, 0.0);
  }
  eval.gradients.layers[depth - 1].weight = tangent.rowwise().sum();
  eval.gradients.layers[depth - 1].bias = Eigen::VectorXd::Zero(1);
  return eval;
}

CriticGradients backward_gp(const CriticNet& net, const Vec3& x_hat) {
  Points batch = x_hat;
  return penalty_with_gradients(net, batch, 1.0).gradients;
}

namespace {

constexpr char kMagic[4] = {'A', 'D', 'V', 'C'};
constexpr std::uint8_t kCheckpointVersion = 1;

template <typename T>
void put_le(std::string& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > in.size()) throw MalformedFile("truncated critic checkpoint: " + path, path);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

void save_critic(const std::string& path, const CriticNet& net) {
  check_net(net);
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kCheckpointVersion));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.depth() + 1));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers.front().weight.rows()));
  for (const auto& l : net.layers) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.weight.cols()));
  for (const auto& l : net.layers) {
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) put_le<double>(out, l.weight(i, j));
    for (Eigen::Index j = 0; j < l.bias.size(); ++j) put_le<double>(out, l.bias(j));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path, path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path, path);
}

CriticNet load_critic(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile("cannot open " + path, path);
  const std::string in{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  if (in.size() < 5 || std::memcmp(in.data(), kMagic, 4) != 0)
    throw MalformedFile("not a critic checkpoint: " + path, path);
  if (static_cast<std::uint8_t>(in[4]) != kCheckpointVersion)
    throw UnsupportedFormat("unsupported checkpoint version in " + path, path);
  std::size_t pos = 5;
  const auto ndims = get_le<std::uint32_t>(in, pos, path);
  if (ndims < 3 || ndims > 1024) throw MalformedFile("bad layer count in " + path, path);
  std::vector<std::uint32_t> dims(ndims);
  for (auto& d : dims) d = get_le<std::uint32_t>(in, pos, path);
  if (dims.front() != 3 || dims.back() != 1) throw MalformedFile("critic must map R^3 -> R: " + path, path);
  CriticNet net;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    DenseLayer l{Eigen::MatrixXd(dims[k], dims[k + 1]), Eigen::VectorXd(dims[k + 1])};
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = get_le<double>(in, pos, path);
    for (Eigen::Index j = 0; j < l.bias.size(); ++j) l.bias(j) = get_le<double>(in, pos, path);
    net.layers.push_back(std::move(l));
  }
  if (pos != in.size()) throw MalformedFile("trailing bytes in critic checkpoint: " + path, path);
  return net;
}

}  // namespace advreg
