#ifndef CDRKIT_NEURAL_HPP
#define CDRKIT_NEURAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cdrkit/linalg.hpp"
#include "cdrkit/rng.hpp"
#include "cdrkit/types.hpp"

namespace cdrkit {

inline Vec one_hot(std::size_t index, std::size_t size) {
  if (index >= size)
    throw std::out_of_range("one_hot: index " + std::to_string(index) + " >= size " +
                            std::to_string(size));
  Vec v(size, 0.0);
  v[index] = 1.0;
  return v;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Softmax with max-subtraction so huge logits cannot overflow.
inline Vec softmax(const Vec& logits) {
  if (logits.empty()) throw Error("softmax: empty input");
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  Vec out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

inline constexpr double kProbClamp = 1e-12;  // keeps log() away from zero

inline double cross_entropy(const Vec& probs, const Vec& target_one_hot) {
  if (probs.size() != target_one_hot.size()) throw Error("cross_entropy: dimension mismatch");
  double ce = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (target_one_hot[i] != 0.0)
      ce -= target_one_hot[i] * std::log(std::max(probs[i], kProbClamp));
  return ce;
}

enum class LossKind { Mse, Mae };

inline const char* to_string(LossKind k) { return k == LossKind::Mse ? "mse" : "mae"; }

/// MSE = mean squared component error; MAE = mean absolute component error.
inline double loss_regression(const Vec& pred, const Vec& target, LossKind kind) {
  if (pred.size() != target.size() || pred.empty())
    throw Error("loss_regression: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    acc += kind == LossKind::Mse ? e * e : std::abs(e);
  }
  return acc / static_cast<double>(pred.size());
}

// ---------------------------------------------------------------------------
// LSTM cell

/// Per-gate weights of one LSTM layer: input weights (hidden x input),
/// recurrent weights (hidden x hidden) and bias per gate in {input, forget,
/// cell-candidate, output}.
struct LstmParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Mat wi, wf, wg, wo;
  Mat ui, uf, ug, uo;
  Vec bi, bf, bg, bo;

  LstmParams() = default;
  LstmParams(std::size_t in, std::size_t hidden)
      : input_size(in),
        hidden_size(hidden),
        wi(hidden, in), wf(hidden, in), wg(hidden, in), wo(hidden, in),
        ui(hidden, hidden), uf(hidden, hidden), ug(hidden, hidden), uo(hidden, hidden),
        bi(hidden, 0.0), bf(hidden, 0.0), bg(hidden, 0.0), bo(hidden, 0.0) {}

  void init_random(Rng& rng) {
    const double ws = 1.0 / std::sqrt(static_cast<double>(input_size));
    const double us = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    for (Mat* m : {&wi, &wf, &wg, &wo})
      for (double& v : m->a) v = rng.uniform(-ws, ws);
    for (Mat* m : {&ui, &uf, &ug, &uo})
      for (double& v : m->a) v = rng.uniform(-us, us);
    // forget gate starts open so early training retains memory
    std::fill(bf.begin(), bf.end(), 1.0);
  }

  void collect(std::vector<std::span<double>>& out) {
    for (Mat* m : {&wi, &wf, &wg, &wo, &ui, &uf, &ug, &uo}) out.emplace_back(m->a);
    for (Vec* v : {&bi, &bf, &bg, &bo}) out.emplace_back(*v);
  }
};

struct LstmState {
  Vec h, c;
  explicit LstmState(std::size_t hidden = 0) : h(hidden, 0.0), c(hidden, 0.0) {}
  void reset() {
    std::fill(h.begin(), h.end(), 0.0);
    std::fill(c.begin(), c.end(), 0.0);
  }
};

struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, g, o, c, tc;
};

/// One cell update:
///   i = sig(Wi x + Ui h + bi)   f = sig(Wf x + Uf h + bf)
///   g = tanh(Wg x + Ug h + bg)  o = sig(Wo x + Uo h + bo)
///   c' = f.c + i.g              h' = o.tanh(c')
/// `state` advances in place; the returned vector is the new hidden output.
inline Vec lstm_step(const Vec& x, LstmState& state, const LstmParams& p,
                     LstmStepCache* cache = nullptr) {
  if (x.size() != p.input_size || state.h.size() != p.hidden_size ||
      state.c.size() != p.hidden_size)
    throw Error("lstm_step: shape mismatch");
  const std::size_t H = p.hidden_size;
  Vec pi = p.bi, pf = p.bf, pg = p.bg, po = p.bo;
  matvec_add(p.wi, x, pi);
  matvec_add(p.ui, state.h, pi);
  matvec_add(p.wf, x, pf);
  matvec_add(p.uf, state.h, pf);
  matvec_add(p.wg, x, pg);
  matvec_add(p.ug, state.h, pg);
  matvec_add(p.wo, x, po);
  matvec_add(p.uo, state.h, po);

  Vec i(H), f(H), g(H), o(H), c(H), tc(H), h(H);
  for (std::size_t k = 0; k < H; ++k) {
    i[k] = sigmoid(pi[k]);
    f[k] = sigmoid(pf[k]);
    g[k] = std::tanh(pg[k]);
    o[k] = sigmoid(po[k]);
    c[k] = f[k] * state.c[k] + i[k] * g[k];
    tc[k] = std::tanh(c[k]);
    h[k] = o[k] * tc[k];
  }
  if (cache) {
    cache->x = x;
    cache->h_prev = state.h;
    cache->c_prev = state.c;
    cache->i = i;
    cache->f = f;
    cache->g = g;
    cache->o = o;
    cache->c = c;
    cache->tc = tc;
  }
  state.c = std::move(c);
  state.h = h;
  return h;
}

/// Backpropagation through time over one recorded forward pass. dh_ext[t] is
/// the loss gradient on step t's hidden output (empty vector = zero).
/// Parameter gradients accumulate into `grads`; per-step input gradients land
/// in dx_out when given. The initial state is treated as a constant, so
/// gradients never cross a sample boundary even in stateful training.
inline void lstm_backward(const LstmParams& p, const std::vector<LstmStepCache>& steps,
                          const std::vector<Vec>& dh_ext, LstmParams& grads,
                          std::vector<Vec>* dx_out = nullptr) {
  const std::size_t H = p.hidden_size;
  Vec dh_carry(H, 0.0), dc_carry(H, 0.0);
  if (dx_out) dx_out->assign(steps.size(), Vec(p.input_size, 0.0));
  Vec dpi(H), dpf(H), dpg(H), dpo(H);
  for (std::size_t t = steps.size(); t-- > 0;) {
    const auto& s = steps[t];
    Vec dh = dh_carry;
    if (t < dh_ext.size() && !dh_ext[t].empty()) axpy(1.0, dh_ext[t], dh);
    Vec dc(H);
    for (std::size_t k = 0; k < H; ++k) {
      const double dck = dc_carry[k] + dh[k] * s.o[k] * (1.0 - s.tc[k] * s.tc[k]);
      dpo[k] = dh[k] * s.tc[k] * s.o[k] * (1.0 - s.o[k]);
      dpi[k] = dck * s.g[k] * s.i[k] * (1.0 - s.i[k]);
      dpf[k] = dck * s.c_prev[k] * s.f[k] * (1.0 - s.f[k]);
      dpg[k] = dck * s.i[k] * (1.0 - s.g[k] * s.g[k]);
      dc[k] = dck;
    }
    outer_add(grads.wi, dpi, s.x);
    outer_add(grads.wf, dpf, s.x);
    outer_add(grads.wg, dpg, s.x);
    outer_add(grads.wo, dpo, s.x);
    outer_add(grads.ui, dpi, s.h_prev);
    outer_add(grads.uf, dpf, s.h_prev);
    outer_add(grads.ug, dpg, s.h_prev);
    outer_add(grads.uo, dpo, s.h_prev);
    axpy(1.0, dpi, grads.bi);
    axpy(1.0, dpf, grads.bf);
    axpy(1.0, dpg, grads.bg);
    axpy(1.0, dpo, grads.bo);

    std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
    matvec_tadd(p.ui, dpi, dh_carry);
    matvec_tadd(p.uf, dpf, dh_carry);
    matvec_tadd(p.ug, dpg, dh_carry);
    matvec_tadd(p.uo, dpo, dh_carry);
    for (std::size_t k = 0; k < H; ++k) dc_carry[k] = dc[k] * s.f[k];
    if (dx_out) {
      Vec& dx = (*dx_out)[t];
      matvec_tadd(p.wi, dpi, dx);
      matvec_tadd(p.wf, dpf, dx);
      matvec_tadd(p.wg, dpg, dx);
      matvec_tadd(p.wo, dpo, dx);
    }
  }
}

// ---------------------------------------------------------------------------
// Embedding and dense layers

struct EmbeddingParams {
  Mat table;  // vocab x dim

  EmbeddingParams() = default;
  EmbeddingParams(std::size_t vocab, std::size_t dim) : table(vocab, dim) {}

  void init_random(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(table.rows));
    for (double& v : table.a) v = rng.uniform(-s, s);
  }

  Vec row(std::size_t cls) const {
    if (cls >= table.rows) throw std::out_of_range("embedding: class out of range");
    return Vec(table.a.begin() + cls * table.cols, table.a.begin() + (cls + 1) * table.cols);
  }

  void collect(std::vector<std::span<double>>& out) { out.emplace_back(table.a); }
};

enum class Activation { Softmax, Relu, Linear };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::Softmax: return "softmax";
    case Activation::Relu: return "relu";
    case Activation::Linear: return "linear";
  }
  return "?";
}

struct DenseParams {
  Mat w;  // out x in
  Vec b;
  Activation act = Activation::Linear;

  DenseParams() = default;
  DenseParams(std::size_t out, std::size_t in, Activation a) : w(out, in), b(out, 0.0), act(a) {}

  void init_random(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(w.cols));
    for (double& v : w.a) v = rng.uniform(-s, s);
  }

  void collect(std::vector<std::span<double>>& out) {
    out.emplace_back(w.a);
    out.emplace_back(b);
  }
};

inline Vec dense_forward(const DenseParams& d, const Vec& x, Vec* pre_out = nullptr) {
  Vec pre = d.b;
  matvec_add(d.w, x, pre);
  if (pre_out) *pre_out = pre;
  switch (d.act) {
    case Activation::Softmax: return softmax(pre);
    case Activation::Relu:
      for (double& v : pre) v = std::max(0.0, v);
      return pre;
    case Activation::Linear: return pre;
  }
  return pre;
}

// ---------------------------------------------------------------------------
// Networks

/// Label classifier: one-hot class -> embedding -> LSTM -> dense softmax over
/// the known-location vocabulary.
struct ClassifierNet {
  EmbeddingParams emb;
  LstmParams lstm;
  DenseParams out;

  ClassifierNet() = default;
  ClassifierNet(std::size_t vocab, std::size_t embed_dim, std::size_t hidden)
      : emb(vocab, embed_dim), lstm(embed_dim, hidden), out(vocab, hidden, Activation::Softmax) {}

  std::size_t vocab_size() const { return emb.table.rows; }
  std::size_t hidden_size() const { return lstm.hidden_size; }
  std::size_t embed_dim() const { return emb.table.cols; }

  void init_random(Rng& rng) {
    emb.init_random(rng);
    lstm.init_random(rng);
    out.init_random(rng);
  }

  void collect(std::vector<std::span<double>>& o) {
    emb.collect(o);
    lstm.collect(o);
    out.collect(o);
  }
};

/// Class probabilities for a label-index sequence. `state` carries across
/// calls when supplied (stateful training); otherwise each call starts from
/// the zero state.
inline Vec classifier_forward(const ClassifierNet& net, std::span<const std::size_t> input,
                              LstmState* state = nullptr,
                              std::vector<LstmStepCache>* tape = nullptr) {
  if (input.empty()) throw InsufficientDataError("classifier_forward: empty input");
  LstmState local(net.lstm.hidden_size);
  LstmState& st = state ? *state : local;
  if (tape) tape->resize(input.size());
  Vec h;
  for (std::size_t t = 0; t < input.size(); ++t) {
    if (input[t] >= net.vocab_size()) throw VocabularyError("classifier_forward: class out of range");
    h = lstm_step(net.emb.row(input[t]), st, net.lstm, tape ? &(*tape)[t] : nullptr);
  }
  return dense_forward(net.out, h);
}

/// Cross-entropy loss of one sample plus gradients for every parameter,
/// accumulated into `grads` (same shape as the net) scaled by `scale`.
inline double classifier_loss_grad(const ClassifierNet& net, std::span<const std::size_t> input,
                                   std::size_t target, LstmState* state, ClassifierNet& grads,
                                   double scale = 1.0) {
  std::vector<LstmStepCache> tape;
  const Vec probs = classifier_forward(net, input, state, &tape);
  if (target >= net.vocab_size()) throw VocabularyError("classifier_loss_grad: target out of range");
  const double loss = -std::log(std::max(probs[target], kProbClamp));

  // softmax + cross entropy: dlogits = probs - onehot
  Vec dlogits = probs;
  dlogits[target] -= 1.0;
  for (double& v : dlogits) v *= scale;

  // final hidden output reconstructed from the last step's gates
  Vec h(net.lstm.hidden_size);
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = tape.back().o[k] * tape.back().tc[k];

  outer_add(grads.out.w, dlogits, h);
  axpy(1.0, dlogits, grads.out.b);
  Vec dh(net.lstm.hidden_size, 0.0);
  matvec_tadd(net.out.w, dlogits, dh);

  std::vector<Vec> dh_ext(input.size());
  dh_ext.back() = std::move(dh);
  std::vector<Vec> dx;
  lstm_backward(net.lstm, tape, dh_ext, grads.lstm, &dx);
  for (std::size_t t = 0; t < input.size(); ++t) {
    double* row = grads.emb.table.a.data() + input[t] * grads.emb.table.cols;
    for (std::size_t j = 0; j < grads.emb.table.cols; ++j) row[j] += dx[t][j];
  }
  return loss;
}

/// Coordinate regressor: 2-vector inputs -> LSTM layer 1 (hidden sequence) ->
/// LSTM layer 2 -> dense head of width 2. The head is ReLU under min-max
/// normalization and linear under variance scaling.
struct RegressorNet {
  LstmParams l1, l2;
  DenseParams out;

  RegressorNet() = default;
  RegressorNet(std::size_t hidden1, std::size_t hidden2, Activation act)
      : l1(2, hidden1), l2(hidden1, hidden2), out(2, hidden2, act) {}

  void init_random(Rng& rng) {
    l1.init_random(rng);
    l2.init_random(rng);
    out.init_random(rng);
    // a rectified head starts at the center of the unit box; otherwise the
    // pre-activation hovers around zero and units whose output is clamped
    // receive no gradient at all
    if (out.act == Activation::Relu) std::fill(out.b.begin(), out.b.end(), 0.5);
  }

  void collect(std::vector<std::span<double>>& o) {
    l1.collect(o);
    l2.collect(o);
    out.collect(o);
  }
};

inline Vec regressor_forward(const RegressorNet& net, std::span<const Vec> input,
                             LstmState* s1 = nullptr, LstmState* s2 = nullptr,
                             std::vector<LstmStepCache>* tape1 = nullptr,
                             std::vector<LstmStepCache>* tape2 = nullptr) {
  if (input.empty()) throw InsufficientDataError("regressor_forward: empty input");
  LstmState local1(net.l1.hidden_size), local2(net.l2.hidden_size);
  LstmState& st1 = s1 ? *s1 : local1;
  LstmState& st2 = s2 ? *s2 : local2;
  if (tape1) tape1->resize(input.size());
  if (tape2) tape2->resize(input.size());
  Vec h2;
  for (std::size_t t = 0; t < input.size(); ++t) {
    const Vec h1 = lstm_step(input[t], st1, net.l1, tape1 ? &(*tape1)[t] : nullptr);
    h2 = lstm_step(h1, st2, net.l2, tape2 ? &(*tape2)[t] : nullptr);
  }
  return dense_forward(net.out, h2);
}

/// Regression loss of one sample plus gradients, accumulated into `grads`
/// scaled by `scale`.
inline double regressor_loss_grad(const RegressorNet& net, std::span<const Vec> input,
                                  const Vec& target, LossKind kind, LstmState* s1, LstmState* s2,
                                  RegressorNet& grads, double scale = 1.0) {
  std::vector<LstmStepCache> tape1, tape2;
  LstmState local1(net.l1.hidden_size), local2(net.l2.hidden_size);
  LstmState& st1 = s1 ? *s1 : local1;
  LstmState& st2 = s2 ? *s2 : local2;
  Vec pre;
  Vec h2;
  {
    if (input.empty()) throw InsufficientDataError("regressor_loss_grad: empty input");
    tape1.resize(input.size());
    tape2.resize(input.size());
    for (std::size_t t = 0; t < input.size(); ++t) {
      const Vec h1 = lstm_step(input[t], st1, net.l1, &tape1[t]);
      h2 = lstm_step(h1, st2, net.l2, &tape2[t]);
    }
  }
  const Vec pred = dense_forward(net.out, h2, &pre);
  const double loss = loss_regression(pred, target, kind);

  const double n = static_cast<double>(pred.size());
  Vec dpre(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double e = pred[k] - target[k];
    double d = kind == LossKind::Mse ? 2.0 * e / n : (e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0)) / n;
    if (net.out.act == Activation::Relu && pre[k] <= 0.0) d = 0.0;
    dpre[k] = d * scale;
  }
  outer_add(grads.out.w, dpre, h2);
  axpy(1.0, dpre, grads.out.b);

  Vec dh2(net.l2.hidden_size, 0.0);
  matvec_tadd(net.out.w, dpre, dh2);
  std::vector<Vec> dh2_ext(input.size());
  dh2_ext.back() = std::move(dh2);
  std::vector<Vec> dh1_ext;
  lstm_backward(net.l2, tape2, dh2_ext, grads.l2, &dh1_ext);
  lstm_backward(net.l1, tape1, dh1_ext, grads.l1, nullptr);
  return loss;
}

/// Scale gradients down when their global L2 norm exceeds `max_norm`.
/// Returns the pre-clip norm.
inline double clip_global_norm(const std::vector<std::span<double>>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (const auto& g : grads)
      for (double& v : g) v *= s;
  }
  return norm;
}

}  // namespace cdrkit

#endif  // CDRKIT_NEURAL_HPP
