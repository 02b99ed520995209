#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "disto/rng.hpp"
#include "disto/text.hpp"

namespace disto::nn {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
inline Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

// tanh approximation of the gaussian error linear unit
template <typename Scalar>
inline Scalar gelu(Scalar x) {
  const Scalar c = Scalar(0.7978845608028654);  // sqrt(2/pi)
  const Scalar u = c * (x + Scalar(0.044715) * x * x * x);
  return Scalar(0.5) * x * (Scalar(1) + std::tanh(u));
}

template <typename Scalar>
inline Scalar gelu_grad(Scalar x) {
  const Scalar c = Scalar(0.7978845608028654);
  const Scalar u = c * (x + Scalar(0.044715) * x * x * x);
  const Scalar t = std::tanh(u);
  const Scalar du = c * (Scalar(1) + Scalar(3) * Scalar(0.044715) * x * x);
  return Scalar(0.5) * (Scalar(1) + t) + Scalar(0.5) * x * (Scalar(1) - t * t) * du;
}

// A weight matrix with its gradient and Adam moment buffers.
template <typename Scalar>
struct Param {
  std::string name;
  Mat<Scalar> w, g, m, v;

  void init(std::string param_name, Eigen::Index rows, Eigen::Index cols) {
    name = std::move(param_name);
    w = Mat<Scalar>::Zero(rows, cols);
    g = Mat<Scalar>::Zero(rows, cols);
    m = Mat<Scalar>::Zero(rows, cols);
    v = Mat<Scalar>::Zero(rows, cols);
  }

  void fill_gaussian(Rng& rng, double stddev) {
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = static_cast<Scalar>(rng.gaussian() * stddev);
  }
};

template <typename Scalar>
inline void zero_grads(const std::vector<Param<Scalar>*>& params) {
  for (auto* p : params) p->g.setZero();
}

template <typename Scalar>
struct Adam {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long steps = 0;

  void step(const std::vector<Param<Scalar>*>& params) {
    ++steps;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
    for (auto* p : params) {
      p->m = Scalar(beta1) * p->m + Scalar(1.0 - beta1) * p->g;
      p->v = Scalar(beta2) * p->v + Scalar(1.0 - beta2) * p->g.cwiseProduct(p->g);
      const Mat<Scalar> mhat = p->m / Scalar(bc1);
      const Mat<Scalar> vhat = p->v / Scalar(bc2);
      p->w.array() -= Scalar(lr) * mhat.array() / (vhat.array().sqrt() + Scalar(eps));
    }
  }
};

template <typename Scalar>
struct LayerNorm {
  Param<Scalar> gamma, beta;

  struct Cache {
    Mat<Scalar> xhat;
    Vec<Scalar> invstd;
  };

  void init(const std::string& prefix, Eigen::Index d) {
    gamma.init(prefix + ".gamma", 1, d);
    gamma.w.setOnes();
    beta.init(prefix + ".beta", 1, d);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache& c) const {
    const Eigen::Index n = x.rows(), d = x.cols();
    c.xhat.resize(n, d);
    c.invstd.resize(n);
    Mat<Scalar> y(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar mu = x.row(i).mean();
      const Scalar var = (x.row(i).array() - mu).square().mean();
      const Scalar inv = Scalar(1) / std::sqrt(var + Scalar(1e-5));
      c.invstd[i] = inv;
      c.xhat.row(i) = ((x.row(i).array() - mu) * inv).matrix();
      y.row(i) = c.xhat.row(i).cwiseProduct(gamma.w.row(0)) + beta.w.row(0);
    }
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, const Cache& c) {
    const Eigen::Index n = dy.rows(), d = dy.cols();
    gamma.g.row(0) += dy.cwiseProduct(c.xhat).colwise().sum();
    beta.g.row(0) += dy.colwise().sum();
    Mat<Scalar> dx(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const RowVec<Scalar> dxhat = dy.row(i).cwiseProduct(gamma.w.row(0));
      const Scalar m1 = dxhat.mean();
      const Scalar m2 = dxhat.cwiseProduct(c.xhat.row(i)).mean();
      dx.row(i) = (c.invstd[i] * (dxhat.array() - m1 - c.xhat.row(i).array() * m2)).matrix();
    }
    return dx;
  }

  void collect(std::vector<Param<Scalar>*>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }
};

template <typename Scalar>
struct MultiHeadAttention {
  int heads = 0, d_model = 0, d_head = 0;
  Param<Scalar> wq, bq, wk, bk, wv, bv, wo, bo;

  struct Cache {
    Mat<Scalar> x, q, k, v, ctx;
    std::vector<Mat<Scalar>> attn;  // per head, rows softmax-normalized
  };

  void init(const std::string& prefix, int d, int h, Rng& rng) {
    if (d % h != 0) throw std::invalid_argument("attention: heads must divide model width");
    heads = h;
    d_model = d;
    d_head = d / h;
    const double s = std::sqrt(2.0 / (2.0 * d));
    const std::pair<Param<Scalar>*, const char*> mats[] = {
        {&wq, "wq"}, {&wk, "wk"}, {&wv, "wv"}, {&wo, "wo"}};
    for (const auto& [p, n] : mats) {
      p->init(prefix + "." + n, d, d);
      p->fill_gaussian(rng, s);
    }
    bq.init(prefix + ".bq", 1, d);
    bk.init(prefix + ".bk", 1, d);
    bv.init(prefix + ".bv", 1, d);
    bo.init(prefix + ".bo", 1, d);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache& c) const {
    const Eigen::Index n = x.rows();
    c.x = x;
    c.q = (x * wq.w).rowwise() + bq.w.row(0);
    c.k = (x * wk.w).rowwise() + bk.w.row(0);
    c.v = (x * wv.w).rowwise() + bv.w.row(0);
    c.ctx.resize(n, d_model);
    c.attn.assign(static_cast<std::size_t>(heads), {});
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(d_head));
    for (int h = 0; h < heads; ++h) {
      const auto qh = c.q.middleCols(h * d_head, d_head);
      const auto kh = c.k.middleCols(h * d_head, d_head);
      const auto vh = c.v.middleCols(h * d_head, d_head);
      Mat<Scalar> scores = qh * kh.transpose() * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar mx = scores.row(i).maxCoeff();
        scores.row(i) = (scores.row(i).array() - mx).exp().matrix();
        scores.row(i) /= scores.row(i).sum();
      }
      c.attn[static_cast<std::size_t>(h)] = scores;
      c.ctx.middleCols(h * d_head, d_head) = scores * vh;
    }
    return (c.ctx * wo.w).rowwise() + bo.w.row(0);
  }

  Mat<Scalar> backward(const Mat<Scalar>& dout, const Cache& c) {
    const Eigen::Index n = dout.rows();
    wo.g += c.ctx.transpose() * dout;
    bo.g.row(0) += dout.colwise().sum();
    const Mat<Scalar> dctx = dout * wo.w.transpose();

    Mat<Scalar> dq = Mat<Scalar>::Zero(n, d_model);
    Mat<Scalar> dk = Mat<Scalar>::Zero(n, d_model);
    Mat<Scalar> dv = Mat<Scalar>::Zero(n, d_model);
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(d_head));
    for (int h = 0; h < heads; ++h) {
      const auto qh = c.q.middleCols(h * d_head, d_head);
      const auto kh = c.k.middleCols(h * d_head, d_head);
      const auto vh = c.v.middleCols(h * d_head, d_head);
      const auto& a = c.attn[static_cast<std::size_t>(h)];
      const auto dch = dctx.middleCols(h * d_head, d_head);
      const Mat<Scalar> da = dch * vh.transpose();
      dv.middleCols(h * d_head, d_head) = a.transpose() * dch;
      Mat<Scalar> ds(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar dot = da.row(i).dot(a.row(i));
        ds.row(i) = (a.row(i).array() * (da.row(i).array() - dot)).matrix();
      }
      dq.middleCols(h * d_head, d_head) = ds * kh * scale;
      dk.middleCols(h * d_head, d_head) = ds.transpose() * qh * scale;
    }

    wq.g += c.x.transpose() * dq;
    bq.g.row(0) += dq.colwise().sum();
    wk.g += c.x.transpose() * dk;
    bk.g.row(0) += dk.colwise().sum();
    wv.g += c.x.transpose() * dv;
    bv.g.row(0) += dv.colwise().sum();
    return dq * wq.w.transpose() + dk * wk.w.transpose() + dv * wv.w.transpose();
  }

  void collect(std::vector<Param<Scalar>*>& out) {
    for (auto* p : {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo}) out.push_back(p);
  }
};

template <typename Scalar>
struct FeedForward {
  Param<Scalar> w1, b1, w2, b2;

  struct Cache {
    Mat<Scalar> x, pre;
  };

  void init(const std::string& prefix, int d, int f, Rng& rng) {
    w1.init(prefix + ".w1", d, f);
    w1.fill_gaussian(rng, std::sqrt(2.0 / (d + f)));
    b1.init(prefix + ".b1", 1, f);
    w2.init(prefix + ".w2", f, d);
    w2.fill_gaussian(rng, std::sqrt(2.0 / (d + f)));
    b2.init(prefix + ".b2", 1, d);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache& c) const {
    c.x = x;
    c.pre = (x * w1.w).rowwise() + b1.w.row(0);
    Mat<Scalar> act = c.pre.unaryExpr([](Scalar t) { return gelu(t); });
    return (act * w2.w).rowwise() + b2.w.row(0);
  }

  Mat<Scalar> backward(const Mat<Scalar>& dout, const Cache& c) {
    const Mat<Scalar> act = c.pre.unaryExpr([](Scalar t) { return gelu(t); });
    w2.g += act.transpose() * dout;
    b2.g.row(0) += dout.colwise().sum();
    const Mat<Scalar> dact = dout * w2.w.transpose();
    const Mat<Scalar> dpre =
        dact.cwiseProduct(c.pre.unaryExpr([](Scalar t) { return gelu_grad(t); }));
    w1.g += c.x.transpose() * dpre;
    b1.g.row(0) += dpre.colwise().sum();
    return dpre * w1.w.transpose();
  }

  void collect(std::vector<Param<Scalar>*>& out) {
    for (auto* p : {&w1, &b1, &w2, &b2}) out.push_back(p);
  }
};

// Pre-normalization transformer block: x + attn(ln(x)), then x + ffn(ln(x)).
template <typename Scalar>
struct EncoderLayer {
  LayerNorm<Scalar> ln1, ln2;
  MultiHeadAttention<Scalar> attn;
  FeedForward<Scalar> ffn;

  struct Cache {
    typename LayerNorm<Scalar>::Cache ln1c, ln2c;
    typename MultiHeadAttention<Scalar>::Cache attnc;
    typename FeedForward<Scalar>::Cache ffnc;
  };

  void init(const std::string& prefix, int d, int h, int f, Rng& rng) {
    ln1.init(prefix + ".ln1", d);
    attn.init(prefix + ".attn", d, h, rng);
    ln2.init(prefix + ".ln2", d);
    ffn.init(prefix + ".ffn", d, f, rng);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache& c) const {
    Mat<Scalar> mid = x + attn.forward(ln1.forward(x, c.ln1c), c.attnc);
    return mid + ffn.forward(ln2.forward(mid, c.ln2c), c.ffnc);
  }

  Mat<Scalar> backward(const Mat<Scalar>& dout, Cache& c) {
    Mat<Scalar> dmid = dout + ln2.backward(ffn.backward(dout, c.ffnc), c.ln2c);
    return dmid + ln1.backward(attn.backward(dmid, c.attnc), c.ln1c);
  }

  void collect(std::vector<Param<Scalar>*>& out) {
    ln1.collect(out);
    attn.collect(out);
    ln2.collect(out);
    ffn.collect(out);
  }
};

struct EncoderConfig {
  int vocab = 0;
  int d_model = 48;
  int heads = 2;
  int layers = 2;
  int d_ff = 96;
  int max_positions = 512;
};

// Token + learned position embeddings, a pre-LN block stack, a final norm,
// summarized by the representation at position 0.
template <typename Scalar>
class TransformerEncoder {
 public:
  struct Cache {
    std::vector<int> ids;
    std::vector<typename EncoderLayer<Scalar>::Cache> layer_caches;
    typename LayerNorm<Scalar>::Cache finalc;
  };

  void init(const EncoderConfig& cfg, Rng& rng) {
    cfg_ = cfg;
    tok_.init("tok_embed", cfg.vocab, cfg.d_model);
    tok_.fill_gaussian(rng, 0.02);
    pos_.init("pos_embed", cfg.max_positions, cfg.d_model);
    pos_.fill_gaussian(rng, 0.02);
    layers_.resize(static_cast<std::size_t>(cfg.layers));
    for (int l = 0; l < cfg.layers; ++l)
      layers_[static_cast<std::size_t>(l)].init("layer" + std::to_string(l), cfg.d_model,
                                                cfg.heads, cfg.d_ff, rng);
    final_ln_.init("final_ln", cfg.d_model);
  }

  Vec<Scalar> forward(const std::vector<int>& ids, Cache& c) const {
    if (ids.empty()) throw std::invalid_argument("encoder: empty input");
    if (static_cast<int>(ids.size()) > cfg_.max_positions)
      throw std::invalid_argument("encoder: input exceeds position budget");
    const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
    c.ids = ids;
    Mat<Scalar> x(n, cfg_.d_model);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int id = ids[static_cast<std::size_t>(i)];
      if (id < 0 || id >= cfg_.vocab) throw std::out_of_range("encoder: token id out of range");
      x.row(i) = tok_.w.row(id) + pos_.w.row(i);
    }
    c.layer_caches.resize(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l)
      x = layers_[l].forward(x, c.layer_caches[l]);
    x = final_ln_.forward(x, c.finalc);
    return x.row(0).transpose();
  }

  void backward(Cache& c, const Vec<Scalar>& dsummary) {
    const Eigen::Index n = static_cast<Eigen::Index>(c.ids.size());
    Mat<Scalar> dx = Mat<Scalar>::Zero(n, cfg_.d_model);
    dx.row(0) = dsummary.transpose();
    dx = final_ln_.backward(dx, c.finalc);
    for (std::size_t l = layers_.size(); l-- > 0;)
      dx = layers_[l].backward(dx, c.layer_caches[l]);
    for (Eigen::Index i = 0; i < n; ++i) {
      tok_.g.row(c.ids[static_cast<std::size_t>(i)]) += dx.row(i);
      pos_.g.row(i) += dx.row(i);
    }
  }

  std::vector<Param<Scalar>*> params() {
    std::vector<Param<Scalar>*> out{&tok_, &pos_};
    for (auto& layer : layers_) layer.collect(out);
    final_ln_.collect(out);
    return out;
  }

  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  Param<Scalar> tok_, pos_;
  std::vector<EncoderLayer<Scalar>> layers_;
  LayerNorm<Scalar> final_ln_;
};

// Single-encoder model: sigmoid of a linear read-out of the summary token.
template <typename Scalar>
class SeptModel {
 public:
  struct State {
    typename TransformerEncoder<Scalar>::Cache enc;
    Vec<Scalar> h;
    Scalar s = 0;
  };

  void init(const EncoderConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    encoder_.init(cfg, rng);
    head_w_.init("head.w", cfg.d_model, 1);
    head_w_.fill_gaussian(rng, std::sqrt(2.0 / (cfg.d_model + 1)));
    head_b_.init("head.b", 1, 1);
  }

  Scalar forward(const std::vector<int>& ids, State& st) const {
    st.h = encoder_.forward(ids, st.enc);
    const Scalar z = head_w_.w.col(0).dot(st.h) + head_b_.w(0, 0);
    st.s = sigmoid(z);
    return st.s;
  }

  Scalar score(const std::vector<int>& ids) const {
    State st;
    return forward(ids, st);
  }

  void backward(State& st, Scalar dscore) {
    const Scalar dz = dscore * st.s * (Scalar(1) - st.s);
    head_w_.g.col(0) += dz * st.h;
    head_b_.g(0, 0) += dz;
    const Vec<Scalar> dh = dz * head_w_.w.col(0);
    encoder_.backward(st.enc, dh);
  }

  std::vector<Param<Scalar>*> params() {
    auto out = encoder_.params();
    out.push_back(&head_w_);
    out.push_back(&head_b_);
    return out;
  }

  TransformerEncoder<Scalar>& encoder() { return encoder_; }
  const TransformerEncoder<Scalar>& encoder() const { return encoder_; }

 private:
  TransformerEncoder<Scalar> encoder_;
  Param<Scalar> head_w_, head_b_;
};

// Shared-encoder two-branch model scored by the sigmoid of (optionally
// affine-rescaled) cosine similarity between branch summaries.
template <typename Scalar>
class SiameseModel {
 public:
  struct State {
    typename TransformerEncoder<Scalar>::Cache enc_u, enc_v;
    Vec<Scalar> u, v;
    Scalar nu = 0, nv = 0, cos = 0, s = 0;
  };

  void init(const EncoderConfig& cfg, std::uint64_t seed, bool affine_head) {
    Rng rng(seed);
    encoder_.init(cfg, rng);
    affine_ = affine_head;
    alpha_.init("head.alpha", 1, 1);
    alpha_.w(0, 0) = Scalar(1);
    beta_.init("head.beta", 1, 1);
  }

  Scalar forward(const std::vector<int>& ctx_ids, const std::vector<int>& dis_ids,
                 State& st) const {
    st.u = encoder_.forward(ctx_ids, st.enc_u);
    st.v = encoder_.forward(dis_ids, st.enc_v);
    st.nu = std::max(st.u.norm(), Scalar(1e-8));
    st.nv = std::max(st.v.norm(), Scalar(1e-8));
    st.cos = st.u.dot(st.v) / (st.nu * st.nv);
    const Scalar z = affine_ ? alpha_.w(0, 0) * st.cos + beta_.w(0, 0) : st.cos;
    st.s = sigmoid(z);
    return st.s;
  }

  Scalar score(const std::vector<int>& ctx_ids, const std::vector<int>& dis_ids) const {
    State st;
    return forward(ctx_ids, dis_ids, st);
  }

  void backward(State& st, Scalar dscore) {
    const Scalar dz = dscore * st.s * (Scalar(1) - st.s);
    Scalar dcos;
    if (affine_) {
      alpha_.g(0, 0) += dz * st.cos;
      beta_.g(0, 0) += dz;
      dcos = dz * alpha_.w(0, 0);
    } else {
      dcos = dz;
    }
    const Vec<Scalar> du = dcos * (st.v / (st.nu * st.nv) - st.cos * st.u / (st.nu * st.nu));
    const Vec<Scalar> dv = dcos * (st.u / (st.nu * st.nv) - st.cos * st.v / (st.nv * st.nv));
    encoder_.backward(st.enc_u, du);
    encoder_.backward(st.enc_v, dv);
  }

  std::vector<Param<Scalar>*> params() {
    auto out = encoder_.params();
    if (affine_) {
      out.push_back(&alpha_);
      out.push_back(&beta_);
    }
    return out;
  }

  bool affine_head() const { return affine_; }
  TransformerEncoder<Scalar>& encoder() { return encoder_; }

 private:
  TransformerEncoder<Scalar> encoder_;
  Param<Scalar> alpha_, beta_;
  bool affine_ = true;
};

// ---------------------------------------------------------------------------
// Named-tensor serialization (float32 on disk regardless of Scalar)
// ---------------------------------------------------------------------------

namespace detail {
inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}
inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace detail

template <typename Scalar>
void save_params(std::ostream& out, const std::vector<Param<Scalar>*>& params) {
  out.write("DSTW", 4);
  detail::write_u32(out, 1);
  detail::write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    detail::write_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    detail::write_u32(out, static_cast<std::uint32_t>(p->w.rows()));
    detail::write_u32(out, static_cast<std::uint32_t>(p->w.cols()));
    for (Eigen::Index i = 0; i < p->w.rows(); ++i)
      for (Eigen::Index j = 0; j < p->w.cols(); ++j) {
        const float f = static_cast<float>(p->w(i, j));
        out.write(reinterpret_cast<const char*>(&f), sizeof(f));
      }
  }
}

template <typename Scalar>
void save_params(const std::string& path, const std::vector<Param<Scalar>*>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("weights: cannot write " + path);
  save_params(out, params);
}

template <typename Scalar>
void load_params(std::istream& in, const std::vector<Param<Scalar>*>& params) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "DSTW") throw std::runtime_error("weights: bad magic");
  if (detail::read_u32(in) != 1) throw std::runtime_error("weights: unsupported version");
  const std::uint32_t count = detail::read_u32(in);
  if (count != params.size()) throw std::runtime_error("weights: tensor count mismatch");
  for (auto* p : params) {
    const std::uint32_t name_len = detail::read_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (name != p->name) throw std::runtime_error("weights: expected tensor " + p->name);
    const auto rows = static_cast<Eigen::Index>(detail::read_u32(in));
    const auto cols = static_cast<Eigen::Index>(detail::read_u32(in));
    if (rows != p->w.rows() || cols != p->w.cols())
      throw std::runtime_error("weights: shape mismatch for " + p->name);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        float f;
        in.read(reinterpret_cast<char*>(&f), sizeof(f));
        p->w(i, j) = static_cast<Scalar>(f);
      }
    if (!in) throw std::runtime_error("weights: truncated stream at " + p->name);
  }
}

template <typename Scalar>
void load_params(const std::string& path, const std::vector<Param<Scalar>*>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("weights: cannot read " + path);
  load_params(in, params);
}

template <typename Scalar>
std::uint64_t fingerprint_params(const std::vector<Param<Scalar>*>& params) {
  std::ostringstream buf;
  save_params(buf, params);
  return text::fnv1a64(buf.str());
}

}  // namespace disto::nn
