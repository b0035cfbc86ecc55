#pragma once

#include "holo/field.hpp"
#include "holo/mask.hpp"
#include "holo/tensor.hpp"

namespace holo::objective {

/// Tuning weights of the combined generator objective:
/// adversarial + lambda1 * hologram MSE + lambda2 * background TV.
struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.1;
};

double sigmoid(double x);

/// -log(sigmoid(x)), computed without overflow for large |x|.
double neg_log_sigmoid(double x);

/// -log(1 - sigmoid(x)), computed without overflow for large |x|.
double neg_log_one_minus_sigmoid(double x);

// --- tensor-level kernels shared by the trainer (float) and the gradient
// --- oracles (double)

template <typename T>
double mse_flat(const T* a, const T* b, size_t n);

/// d(mean squared error)/d(b), scaled, accumulated into g.
template <typename T>
void mse_grad_flat(const T* a, const T* b, size_t n, double scale, T* g);

/// Squared-difference total variation of a 2-channel field restricted to
/// background pixels; forward differences leaving the grid are skipped and
/// the sum is divided by the background pixel count.
template <typename T>
double tv_background(const Tensor<T>& field2ch, const Mask& mask);

template <typename T>
void tv_background_grad(const Tensor<T>& field2ch, const Mask& mask, double scale,
                        Tensor<T>& grad_acc);

// --- operation surface on the domain types

/// Hologram-consistency term: mean((H - Hhat)^2).
double loss_autoencoder(const Hologram& h, const Hologram& hhat);

/// Background smoothness term on the reconstructed object-plane field.
double loss_background_tv(const ComplexField& field, const Mask& mask);

/// Non-saturating generator loss:
/// -log(sigmoid(score)) + lambda1 * L_auto + lambda2 * L_B.
double loss_generator(double d_score_fake, const Hologram& h, const Hologram& hhat,
                      const ComplexField& field, const Mask& mask,
                      const LossWeights& w);

/// Discriminator loss: -log(sigmoid(s_real)) - log(1 - sigmoid(s_fake)).
double loss_discriminator(double d_score_real, double d_score_fake);

/// Derivatives of the stable log terms (used by both update steps).
double d_neg_log_sigmoid(double x);            // d/dx of -log(sigmoid(x))
double d_neg_log_one_minus_sigmoid(double x);  // d/dx of -log(1-sigmoid(x))

}  // namespace holo::objective
