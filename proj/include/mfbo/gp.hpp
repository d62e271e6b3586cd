#pragma once

#include <span>
#include <vector>

#include "mfbo/linalg.hpp"

namespace mfbo {

// One kernel input z = (action embedding, context embedding, flattened
// conditional distribution). dist_flat is context-major: block c holds
// xi(.|c) over the |A| actions.
struct GpInput {
  std::vector<double> action_vec;
  std::vector<double> context_vec;
  std::vector<double> dist_flat;
};

enum class RbfForm {
  // exp(-||u - u'||^2 / (2 l^2)); smooth, the default.
  SquaredExponential,
  // exp(-||u - u'|| / (2 l)); kept for fidelity experiments, not
  // differentiable at zero distance.
  PaperLiteral,
};

struct KernelParams {
  double lengthscale_action = 1.0;
  double lengthscale_context = 1.0;
  double lengthscale_dist = 1.0;
  double output_scale = 1.0;
  RbfForm rbf_form = RbfForm::SquaredExponential;

  void validate() const;
};

struct NoiseModel {
  double noise_std = 0.0;
};

class ObservationBuffer {
public:
  void append(GpInput input, double target) {
    inputs_.push_back(std::move(input));
    targets_.push_back(target);
  }
  std::size_t size() const { return targets_.size(); }
  bool empty() const { return targets_.empty(); }
  const std::vector<GpInput>& inputs() const { return inputs_; }
  const std::vector<double>& targets() const { return targets_; }

private:
  std::vector<GpInput> inputs_;
  std::vector<double> targets_;
};

struct FitOptions {
  // Shift/scale targets to zero mean, unit deviation inside fit and undo in
  // the posterior queries. Stabilises lengthscale behaviour across
  // environments with very different reward scales.
  bool standardize_targets = true;
};

// Additive kernel: output_scale * [rbf(action) + rbf(context) +
// sum_c rbf(dist block c)]. num_contexts fixes the block structure.
double kernel_eval(const GpInput& a, const GpInput& b, const KernelParams& params,
                   int num_contexts);

struct MeanVar {
  double mean;
  double var;
};

// Gradients of the posterior mean and standard deviation with respect to the
// dist_flat coordinates.
struct DistGradient {
  std::vector<double> dmean;
  std::vector<double> dsigma;
};

// Immutable fitted model: training inputs, Cholesky factor of
// K + noise_std^2 I and the precomputed weight vector. Safe for concurrent
// read-only evaluation.
class GpPosterior {
public:
  MeanVar mean_var(const GpInput& z) const;
  DistGradient grad_dist(const GpInput& z) const;

  std::size_t size() const { return train_inputs_.size(); }
  const std::vector<GpInput>& train_inputs() const { return train_inputs_; }
  const Matrix& chol() const { return chol_; }
  std::span<const double> alpha() const { return alpha_; }
  const KernelParams& kernel_params() const { return params_; }
  const NoiseModel& noise() const { return noise_; }
  int num_contexts() const { return num_contexts_; }
  double target_shift() const { return y_shift_; }
  double target_scale() const { return y_scale_; }
  double jitter_used() const { return jitter_used_; }

  // k(z, z), identical for every input under the additive kernel.
  double prior_variance() const;

private:
  friend GpPosterior fit(const ObservationBuffer&, const KernelParams&,
                         const NoiseModel&, int, const FitOptions&);

  KernelParams params_;
  NoiseModel noise_;
  std::vector<GpInput> train_inputs_;
  Matrix chol_;
  std::vector<double> alpha_;
  int num_contexts_ = 1;
  double y_shift_ = 0.0;
  double y_scale_ = 1.0;
  double jitter_used_ = 0.0;
};

// Exact GP regression: Gram matrix from kernel_eval, Cholesky of
// K + noise_std^2 I with a 1e-8 / 1e-6 / 1e-4 jitter ladder on failure.
GpPosterior fit(const ObservationBuffer& buffer, const KernelParams& params,
                const NoiseModel& noise, int num_contexts,
                const FitOptions& options = {});

inline MeanVar posterior_mean_var(const GpPosterior& post, const GpInput& z) {
  return post.mean_var(z);
}

inline DistGradient posterior_grad_dist(const GpPosterior& post, const GpInput& z) {
  return post.grad_dist(z);
}

}  // namespace mfbo
