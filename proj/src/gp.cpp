#include "mfbo/gp.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "mfbo/errors.hpp"
#include "mfbo/simd/simd.hpp"

namespace mfbo {

namespace {

constexpr double kJitterLadder[] = {1e-8, 1e-6, 1e-4};
constexpr double kDegenerateScale = 1e-12;

double rbf_from_sqdist(double d2, double lengthscale, RbfForm form) {
  if (form == RbfForm::SquaredExponential) {
    return std::exp(-d2 / (2.0 * lengthscale * lengthscale));
  }
  return std::exp(-std::sqrt(d2) / (2.0 * lengthscale));
}

void check_pair_dims(const GpInput& a, const GpInput& b, int num_contexts) {
  if (a.action_vec.size() != b.action_vec.size()) {
    throw DimensionError("kernel_eval: action_vec lengths differ (" +
                         std::to_string(a.action_vec.size()) + " vs " +
                         std::to_string(b.action_vec.size()) + ")");
  }
  if (a.context_vec.size() != b.context_vec.size()) {
    throw DimensionError("kernel_eval: context_vec lengths differ (" +
                         std::to_string(a.context_vec.size()) + " vs " +
                         std::to_string(b.context_vec.size()) + ")");
  }
  if (a.dist_flat.size() != b.dist_flat.size()) {
    throw DimensionError("kernel_eval: dist_flat lengths differ (" +
                         std::to_string(a.dist_flat.size()) + " vs " +
                         std::to_string(b.dist_flat.size()) + ")");
  }
  if (num_contexts < 1 || a.dist_flat.empty() ||
      a.dist_flat.size() % static_cast<std::size_t>(num_contexts) != 0) {
    throw DimensionError("kernel_eval: dist_flat length " +
                         std::to_string(a.dist_flat.size()) +
                         " is not divisible into " + std::to_string(num_contexts) +
                         " context blocks");
  }
}

}  // namespace

void KernelParams::validate() const {
  if (!(lengthscale_action > 0.0 && lengthscale_context > 0.0 &&
        lengthscale_dist > 0.0)) {
    throw std::invalid_argument("KernelParams: lengthscales must be strictly positive");
  }
  if (!(output_scale > 0.0)) {
    throw std::invalid_argument("KernelParams: output_scale must be strictly positive");
  }
}

double kernel_eval(const GpInput& a, const GpInput& b, const KernelParams& params,
                   int num_contexts) {
  check_pair_dims(a, b, num_contexts);
  const std::size_t block = a.dist_flat.size() / num_contexts;
  double acc = rbf_from_sqdist(
      simd::squared_distance(a.action_vec.data(), b.action_vec.data(), a.action_vec.size()),
      params.lengthscale_action, params.rbf_form);
  acc += rbf_from_sqdist(
      simd::squared_distance(a.context_vec.data(), b.context_vec.data(), a.context_vec.size()),
      params.lengthscale_context, params.rbf_form);
  for (int c = 0; c < num_contexts; ++c) {
    acc += rbf_from_sqdist(
        simd::squared_distance(a.dist_flat.data() + c * block, b.dist_flat.data() + c * block, block),
        params.lengthscale_dist, params.rbf_form);
  }
  return params.output_scale * acc;
}

double GpPosterior::prior_variance() const {
  return params_.output_scale * (2.0 + num_contexts_);
}

GpPosterior fit(const ObservationBuffer& buffer, const KernelParams& params,
                const NoiseModel& noise, int num_contexts, const FitOptions& options) {
  if (buffer.empty()) throw std::invalid_argument("fit: empty observation buffer");
  params.validate();
  if (noise.noise_std < 0.0) throw std::invalid_argument("fit: negative noise_std");

  const std::size_t n = buffer.size();
  const auto& ys = buffer.targets();

  double shift = 0.0;
  double scale = 1.0;
  if (options.standardize_targets) {
    shift = simd::sum(ys.data(), n) / static_cast<double>(n);
    double var = 0.0;
    for (double y : ys) var += (y - shift) * (y - shift);
    scale = std::sqrt(var / static_cast<double>(n));
    if (scale < kDegenerateScale) scale = 1.0;
  }

  Matrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double k = kernel_eval(buffer.inputs()[i], buffer.inputs()[j], params, num_contexts);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  const double noise_var = (noise.noise_std / scale) * (noise.noise_std / scale);
  for (std::size_t i = 0; i < n; ++i) gram(i, i) += noise_var;

  Matrix chol;
  double jitter_used = 0.0;
  bool ok = false;
  {
    Matrix attempt = gram;
    ok = cholesky_lower_inplace(attempt);
    if (ok) chol = std::move(attempt);
  }
  for (std::size_t k = 0; !ok && k < std::size(kJitterLadder); ++k) {
    Matrix attempt = gram;
    for (std::size_t i = 0; i < n; ++i) attempt(i, i) += kJitterLadder[k];
    ok = cholesky_lower_inplace(attempt);
    if (ok) {
      chol = std::move(attempt);
      jitter_used = kJitterLadder[k];
    }
  }
  if (!ok) {
    throw FactorizationError(
        "fit: Gram matrix not positive definite after jitters 1e-8, 1e-6, 1e-4",
        {std::begin(kJitterLadder), std::end(kJitterLadder)});
  }

  std::vector<double> y_std(n);
  for (std::size_t i = 0; i < n; ++i) y_std[i] = (ys[i] - shift) / scale;

  GpPosterior post;
  post.params_ = params;
  post.noise_ = noise;
  post.train_inputs_ = buffer.inputs();
  post.chol_ = std::move(chol);
  post.alpha_ = solve_cholesky(post.chol_, y_std);
  post.num_contexts_ = num_contexts;
  post.y_shift_ = shift;
  post.y_scale_ = scale;
  post.jitter_used_ = jitter_used;
  return post;
}

MeanVar GpPosterior::mean_var(const GpInput& z) const {
  const std::size_t n = size();
  std::vector<double> k_star(n);
  for (std::size_t i = 0; i < n; ++i) {
    k_star[i] = kernel_eval(z, train_inputs_[i], params_, num_contexts_);
  }
  const double mean_std = simd::dot(k_star.data(), alpha_.data(), n);
  std::vector<double> v(n);
  solve_lower(chol_, k_star, v);
  double var_std = prior_variance() - simd::dot(v.data(), v.data(), n);
  if (var_std < 0.0) var_std = 0.0;
  return {mean_std * y_scale_ + y_shift_, var_std * y_scale_ * y_scale_};
}

DistGradient GpPosterior::grad_dist(const GpInput& z) const {
  if (params_.rbf_form != RbfForm::SquaredExponential) {
    throw UnsupportedError(
        "grad_dist: analytic gradients require the squared-exponential form");
  }
  const std::size_t n = size();
  check_pair_dims(z, train_inputs_.front(), num_contexts_);

  const std::size_t dist_len = z.dist_flat.size();
  const std::size_t block = dist_len / num_contexts_;
  const double ell = params_.lengthscale_dist;
  const double inv_l2 = 1.0 / (ell * ell);
  const double out_scale = params_.output_scale;

  // Per-training-point distribution-block kernel values; the action/context
  // parts of k_star are needed for sigma but have zero dist-gradient.
  Matrix block_rbf(n, num_contexts_);
  std::vector<double> k_star(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GpInput& ti = train_inputs_[i];
    double acc = rbf_from_sqdist(
        simd::squared_distance(z.action_vec.data(), ti.action_vec.data(), z.action_vec.size()),
        params_.lengthscale_action, params_.rbf_form);
    acc += rbf_from_sqdist(
        simd::squared_distance(z.context_vec.data(), ti.context_vec.data(), z.context_vec.size()),
        params_.lengthscale_context, params_.rbf_form);
    for (int c = 0; c < num_contexts_; ++c) {
      const double e = rbf_from_sqdist(
          simd::squared_distance(z.dist_flat.data() + c * block,
                                 ti.dist_flat.data() + c * block, block),
          ell, params_.rbf_form);
      block_rbf(i, c) = e;
      acc += e;
    }
    k_star[i] = out_scale * acc;
  }

  std::vector<double> v(n);
  solve_lower(chol_, k_star, v);
  double var_std = prior_variance() - simd::dot(v.data(), v.data(), n);
  if (var_std < 0.0) var_std = 0.0;
  const double sigma_std = std::sqrt(var_std);

  std::vector<double> w(n);
  solve_lower_transpose(chol_, v, w);

  // dk(z, z_i)/d dist[j] = -out_scale * e_{i,b(j)} * (z[j] - d_i[j]) / l^2,
  // so both gradients reduce to weighted sums A_b = sum_i c_i e_{i,b} and
  // U_b[j] = sum_i c_i e_{i,b} d_i[j].
  DistGradient grad;
  grad.dmean.assign(dist_len, 0.0);
  grad.dsigma.assign(dist_len, 0.0);

  std::vector<double> a_alpha(num_contexts_, 0.0), a_w(num_contexts_, 0.0);
  std::vector<double> u_alpha(dist_len, 0.0), u_w(dist_len, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* di = train_inputs_[i].dist_flat.data();
    for (int c = 0; c < num_contexts_; ++c) {
      const double e = block_rbf(i, c);
      a_alpha[c] += alpha_[i] * e;
      a_w[c] += w[i] * e;
      simd::axpy(alpha_[i] * e, di + c * block, u_alpha.data() + c * block, block);
      simd::axpy(w[i] * e, di + c * block, u_w.data() + c * block, block);
    }
  }

  const double mean_coef = -out_scale * inv_l2 * y_scale_;
  for (std::size_t j = 0; j < dist_len; ++j) {
    const int c = static_cast<int>(j / block);
    grad.dmean[j] = mean_coef * (z.dist_flat[j] * a_alpha[c] - u_alpha[j]);
  }
  if (sigma_std >= 1e-12) {
    const double sig_coef = out_scale * inv_l2 * y_scale_ / sigma_std;
    for (std::size_t j = 0; j < dist_len; ++j) {
      const int c = static_cast<int>(j / block);
      grad.dsigma[j] = sig_coef * (z.dist_flat[j] * a_w[c] - u_w[j]);
    }
  }
  return grad;
}

}  // namespace mfbo
