#pragma once

#include <cmath>
#include <vector>

#include "holo/layers.hpp"

namespace holo::nets {

/// Adam over a fixed parameter set; moments live in the parameter dtype.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, double lr, double beta1, double beta2,
       double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    for (auto* p : params) {
      if (!p->trainable) continue;
      slots_.push_back({p, std::vector<T>(p->value.size(), T(0)),
                        std::vector<T>(p->value.size(), T(0))});
    }
  }

  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, double(t_));
    const double c2 = 1.0 - std::pow(b2_, double(t_));
    for (auto& s : slots_) {
      T* val = s.p->value.data();
      const T* g = s.p->grad.data();
      for (size_t i = 0; i < s.m.size(); ++i) {
        s.m[i] = T(b1_ * s.m[i] + (1.0 - b1_) * g[i]);
        s.v[i] = T(b2_ * s.v[i] + (1.0 - b2_) * double(g[i]) * double(g[i]));
        const double mhat = s.m[i] / c1;
        const double vhat = s.v[i] / c2;
        val[i] = T(val[i] - lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

 private:
  struct Slot {
    Param<T>* p;
    std::vector<T> m, v;
  };
  std::vector<Slot> slots_;
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
};

}  // namespace holo::nets
