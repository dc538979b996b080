#ifndef CDRKIT_OPTIMIZER_HPP
#define CDRKIT_OPTIMIZER_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdrkit/types.hpp"

namespace cdrkit {

enum class OptKind { Sgd, AdaGrad, RmsProp, Adam };

inline const char* to_string(OptKind k) {
  switch (k) {
    case OptKind::Sgd: return "sgd";
    case OptKind::AdaGrad: return "adagrad";
    case OptKind::RmsProp: return "rmsprop";
    case OptKind::Adam: return "adam";
  }
  return "?";
}

/// Gradient-descent configuration. Adam defaults follow its original
/// recommendation (beta1 0.9, beta2 0.999, eps 1e-8) with learning rate 1e-3;
/// rho is RMSProp's squared-gradient decay.
struct OptimizerConfig {
  OptKind kind = OptKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double rho = 0.9;

  void validate() const {
    if (!(lr > 0.0)) throw Error("optimizer: learning rate must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw Error("optimizer: betas must be in [0, 1)");
    if (!(eps > 0.0)) throw Error("optimizer: eps must be > 0");
    if (rho < 0.0 || rho >= 1.0) throw Error("optimizer: rho must be in [0, 1)");
  }
};

/// In-place parameter updates with per-parameter accumulator state.
///   sgd      p -= lr * g
///   adagrad  acc += g^2;                 p -= lr * g / sqrt(acc)
///   rmsprop  acc = rho*acc + (1-rho)g^2; p -= lr * g / (sqrt(acc) + eps)
///   adam     bias-corrected first/second moments, p -= lr * m^ / (sqrt(v^) + eps)
/// AdaGrad's eps only guards an all-zero accumulator so the 1/sqrt(sum g^2)
/// schedule stays exact.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  const OptimizerConfig& config() const { return cfg_; }
  std::int64_t steps() const { return t_; }

  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::span<double>>& grads) {
    if (params.size() != grads.size()) throw Error("optimizer: parameter/gradient count mismatch");
    std::size_t total = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].size() != grads[i].size()) throw Error("optimizer: shape mismatch");
      total += params[i].size();
    }
    if (m_.empty()) {
      m_.assign(total, 0.0);
      if (cfg_.kind == OptKind::Adam) v_.assign(total, 0.0);
    } else if (m_.size() != total) {
      throw Error("optimizer: parameter set changed between steps");
    }

    ++t_;
    if (cfg_.kind == OptKind::Adam) {
      beta1_pow_ *= cfg_.beta1;
      beta2_pow_ *= cfg_.beta2;
    }
    const double m1corr = 1.0 - beta1_pow_;
    const double m2corr = 1.0 - beta2_pow_;

    std::size_t k = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      double* p = params[i].data();
      const double* g = grads[i].data();
      for (std::size_t j = 0; j < params[i].size(); ++j, ++k) {
        switch (cfg_.kind) {
          case OptKind::Sgd:
            p[j] -= cfg_.lr * g[j];
            break;
          case OptKind::AdaGrad: {
            m_[k] += g[j] * g[j];
            const double denom = std::max(std::sqrt(m_[k]), cfg_.eps);
            p[j] -= cfg_.lr * g[j] / denom;
            break;
          }
          case OptKind::RmsProp: {
            m_[k] = cfg_.rho * m_[k] + (1.0 - cfg_.rho) * g[j] * g[j];
            p[j] -= cfg_.lr * g[j] / (std::sqrt(m_[k]) + cfg_.eps);
            break;
          }
          case OptKind::Adam: {
            m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * g[j];
            v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double mhat = m_[k] / m1corr;
            const double vhat = v_[k] / m2corr;
            p[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            break;
          }
        }
      }
    }
  }

 private:
  OptimizerConfig cfg_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
  double beta1_pow_ = 1.0;
  double beta2_pow_ = 1.0;
};

}  // namespace cdrkit

#endif  // CDRKIT_OPTIMIZER_HPP
