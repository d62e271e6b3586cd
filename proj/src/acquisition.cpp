#include "mfbo/acquisition.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mfbo/errors.hpp"
#include "mfbo/simd/simd.hpp"

namespace mfbo {

namespace {
constexpr double kSigmaFloor = 1e-12;
constexpr double kFdStep = 1e-5;
}  // namespace

void BetaScheduleParams::validate() const {
  if (!(a_const > 0.0 && b_const > 0.0)) {
    throw std::invalid_argument("BetaScheduleParams: a and b must be positive");
  }
  if (!(constant_value > 0.0 && log_scale > 0.0)) {
    throw std::invalid_argument("BetaScheduleParams: scale values must be positive");
  }
}

double log_xi_cardinality(int t, int num_actions, int num_contexts, double a, double b) {
  if (t < 1) throw std::invalid_argument("log_xi_cardinality: t must be >= 1");
  const double ac = static_cast<double>(num_actions) * num_contexts;
  const double base =
      b * ac * static_cast<double>(t) * t * (std::log(a * ac) + std::sqrt(std::numbers::pi) / 2.0);
  if (!(base > 1.0)) return 0.0;
  return ac * std::log(base);
}

double beta_value(int t, int num_actions, int num_contexts,
                  const BetaScheduleParams& sched) {
  if (t < 1) throw std::invalid_argument("beta_value: t must be >= 1");
  sched.validate();
  switch (sched.mode) {
    case BetaMode::Constant:
      return sched.constant_value;
    case BetaMode::LogGrowth:
      return sched.log_scale * std::sqrt(std::log(static_cast<double>(t) + 1.0));
    case BetaMode::Theoretical: {
      const double log_xi = log_xi_cardinality(t, num_actions, num_contexts,
                                               sched.a_const, sched.b_const);
      return 2.0 * (std::log(static_cast<double>(num_actions)) +
                    std::log(static_cast<double>(num_contexts)) + log_xi +
                    2.0 * std::log(static_cast<double>(t)) -
                    0.5 * std::log(2.0 * std::numbers::pi));
    }
  }
  throw std::logic_error("beta_value: unknown mode");
}

void AcqOptConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("AcqOptConfig: steps must be >= 1");
  if (restarts < 1) throw std::invalid_argument("AcqOptConfig: restarts must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("AcqOptConfig: learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("AcqOptConfig: adam betas must lie in (0,1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("AcqOptConfig: adam_eps must be > 0");
}

double mf_ucb(const GpPosterior& post, const ConditionalDistribution& xi,
              const ContextMeasure& p, const ActionSet& actions, double beta) {
  if (xi.num_contexts() != p.size() || xi.num_actions() != actions.size()) {
    throw DimensionError("mf_ucb: xi shape does not match action set / context measure");
  }
  const std::vector<double> flat = flatten_distribution(xi);
  double acq = 0.0;
  GpInput z;
  z.dist_flat = flat;
  for (int c = 0; c < p.size(); ++c) {
    z.context_vec = p.embeddings[c];
    for (int x = 0; x < actions.size(); ++x) {
      const double weight = p.probs[c] * xi(c, x);
      z.action_vec = actions.embeddings[x];
      const MeanVar mv = post.mean_var(z);
      acq += weight * (mv.mean + beta * std::sqrt(mv.var));
    }
  }
  return acq;
}

AcquisitionEvaluator::AcquisitionEvaluator(const GpPosterior& post,
                                           const ActionSet& actions,
                                           const ContextMeasure& contexts,
                                           double beta)
    : post_(&post),
      beta_(beta),
      num_actions_(actions.size()),
      num_contexts_(contexts.size()),
      context_probs_(contexts.probs),
      kzz_(post.prior_variance()) {
  if (post.num_contexts() != num_contexts_) {
    throw DimensionError("AcquisitionEvaluator: posterior context count mismatch");
  }
  const std::size_t n = post.size();
  const int nq = num_actions_ * num_contexts_;
  const KernelParams& kp = post.kernel_params();

  base_k_ = Matrix(nq, n);
  base_solve_ = Matrix(nq, n);
  base_mean_.assign(nq, 0.0);
  base_norm_.assign(nq, 0.0);
  train_dist_ = Matrix(n, nq);

  for (std::size_t i = 0; i < n; ++i) {
    const GpInput& ti = post.train_inputs()[i];
    if (static_cast<int>(ti.dist_flat.size()) != nq) {
      throw DimensionError("AcquisitionEvaluator: training dist length mismatch");
    }
    for (int j = 0; j < nq; ++j) train_dist_(i, j) = ti.dist_flat[j];
  }

  const double la = kp.lengthscale_action;
  const double lc = kp.lengthscale_context;
  const bool squared = kp.rbf_form == RbfForm::SquaredExponential;
  for (int c = 0; c < num_contexts_; ++c) {
    const auto& ce = contexts.embeddings[c];
    for (int x = 0; x < num_actions_; ++x) {
      const auto& ae = actions.embeddings[x];
      const int q = c * num_actions_ + x;
      for (std::size_t i = 0; i < n; ++i) {
        const GpInput& ti = post.train_inputs()[i];
        const double da = simd::squared_distance(ae.data(), ti.action_vec.data(), ae.size());
        const double dc = simd::squared_distance(ce.data(), ti.context_vec.data(), ce.size());
        const double ka = squared ? std::exp(-da / (2.0 * la * la))
                                  : std::exp(-std::sqrt(da) / (2.0 * la));
        const double kc = squared ? std::exp(-dc / (2.0 * lc * lc))
                                  : std::exp(-std::sqrt(dc) / (2.0 * lc));
        base_k_(q, i) = ka + kc;
      }
      solve_lower(post.chol(), base_k_.row_span(q), base_solve_.row_span(q));
      base_mean_[q] = simd::dot(base_k_.row(q), post.alpha().data(), n);
      base_norm_[q] = simd::dot(base_solve_.row(q), base_solve_.row(q), n);
    }
  }

  block_rbf_ = Matrix(n, num_contexts_);
  block_sum_.assign(n, 0.0);
  vs_.assign(n, 0.0);
  mu_.assign(nq, 0.0);
  sigma_std_.assign(nq, 0.0);
}

// Distribution-block kernel values against every training point, the shared
// triangular solve, and per-query mean/deviation. All queries share the same
// dist_flat, which is what keeps this independent of |A||C| solves.
void AcquisitionEvaluator::eval_common(const ConditionalDistribution& xi) {
  const std::size_t n = post_->size();
  const int nq = num_actions_ * num_contexts_;
  const KernelParams& kp = post_->kernel_params();
  const double ld = kp.lengthscale_dist;
  const bool squared = kp.rbf_form == RbfForm::SquaredExponential;
  const double out_scale = kp.output_scale;
  const double y_scale = post_->target_scale();
  const double y_shift = post_->target_shift();

  for (std::size_t i = 0; i < n; ++i) {
    const double* di = train_dist_.row(i);
    double total = 0.0;
    for (int c = 0; c < num_contexts_; ++c) {
      const double d2 = simd::squared_distance(xi.row(c).data(), di + c * num_actions_,
                                               num_actions_);
      const double e = squared ? std::exp(-d2 / (2.0 * ld * ld))
                               : std::exp(-std::sqrt(d2) / (2.0 * ld));
      block_rbf_(i, c) = e;
      total += e;
    }
    block_sum_[i] = total;
  }

  solve_lower(post_->chol(), block_sum_, vs_);
  const double alpha_dot_sum = simd::dot(post_->alpha().data(), block_sum_.data(), n);
  const double vs_norm = simd::dot(vs_.data(), vs_.data(), n);

  double acq = 0.0;
  for (int q = 0; q < nq; ++q) {
    const double mean_std = out_scale * (base_mean_[q] + alpha_dot_sum);
    const double cross = simd::dot(base_solve_.row(q), vs_.data(), n);
    double var_std = kzz_ - out_scale * out_scale * (base_norm_[q] + 2.0 * cross + vs_norm);
    if (var_std < 0.0) var_std = 0.0;
    const double sig_std = std::sqrt(var_std);
    sigma_std_[q] = sig_std;
    mu_[q] = mean_std * y_scale + y_shift;
    const int c = q / num_actions_;
    const int x = q % num_actions_;
    acq += context_probs_[c] * xi(c, x) * (mu_[q] + beta_ * sig_std * y_scale);
  }
  value_ = acq;
}

double AcquisitionEvaluator::value(const ConditionalDistribution& xi) {
  eval_common(xi);
  return value_;
}

double AcquisitionEvaluator::value_and_grad(const ConditionalDistribution& xi,
                                            Matrix& grad_theta) {
  eval_common(xi);

  const std::size_t n = post_->size();
  const int nq = num_actions_ * num_contexts_;
  const KernelParams& kp = post_->kernel_params();
  if (kp.rbf_form != RbfForm::SquaredExponential) {
    throw UnsupportedError("value_and_grad: analytic gradient requires squared-exponential form");
  }
  const double inv_l2 = 1.0 / (kp.lengthscale_dist * kp.lengthscale_dist);
  const double out_scale = kp.output_scale;
  const double y_scale = post_->target_scale();
  const std::span<const double> alpha = post_->alpha();

  // Combined sigma weights: wbar = L^{-T} sum_q gamma_q v_q with
  // gamma_q = p(c) xi(q) / sigma_q, folded in solve space.
  std::vector<double> gamma(nq, 0.0);
  double gamma_sum = 0.0;
  double weight_sum = 0.0;
  for (int q = 0; q < nq; ++q) {
    const int c = q / num_actions_;
    const int x = q % num_actions_;
    const double wq = context_probs_[c] * xi(c, x);
    weight_sum += wq;
    if (sigma_std_[q] >= kSigmaFloor) {
      gamma[q] = wq / sigma_std_[q];
      gamma_sum += gamma[q];
    }
  }

  std::vector<double> vbar(n, 0.0);
  for (int q = 0; q < nq; ++q) {
    if (gamma[q] != 0.0) simd::axpy(gamma[q], base_solve_.row(q), vbar.data(), n);
  }
  simd::axpy(gamma_sum, vs_.data(), vbar.data(), n);
  std::vector<double> wbar(n);
  solve_lower_transpose(post_->chol(), vbar, wbar);

  std::vector<double> a_alpha(num_contexts_, 0.0), a_wbar(num_contexts_, 0.0);
  std::vector<double> u_alpha(nq, 0.0), u_wbar(nq, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* di = train_dist_.row(i);
    for (int c = 0; c < num_contexts_; ++c) {
      const double e = block_rbf_(i, c);
      const double ca = alpha[i] * e;
      const double cw = wbar[i] * e;
      a_alpha[c] += ca;
      a_wbar[c] += cw;
      simd::axpy(ca, di + c * num_actions_, u_alpha.data() + c * num_actions_, num_actions_);
      simd::axpy(cw, di + c * num_actions_, u_wbar.data() + c * num_actions_, num_actions_);
    }
  }

  const double mean_coef = -out_scale * inv_l2 * y_scale * weight_sum;
  const double sig_coef = beta_ * out_scale * out_scale * inv_l2 * y_scale;

  if (grad_theta.rows() != static_cast<std::size_t>(num_contexts_) ||
      grad_theta.cols() != static_cast<std::size_t>(num_actions_)) {
    grad_theta = Matrix(num_contexts_, num_actions_);
  }
  for (int c = 0; c < num_contexts_; ++c) {
    // d alpha / d xi for row c, then the softmax Jacobian
    // d xi_j / d theta_i = xi_j (delta_ij - xi_i).
    double inner = 0.0;
    std::vector<double> gxi(num_actions_);
    for (int x = 0; x < num_actions_; ++x) {
      const int q = c * num_actions_ + x;
      const double xq = xi(c, x);
      double g = context_probs_[c] * (mu_[q] + beta_ * sigma_std_[q] * y_scale);
      g += mean_coef * (xq * a_alpha[c] - u_alpha[q]);
      g += sig_coef * (xq * a_wbar[c] - u_wbar[q]);
      gxi[x] = g;
      inner += g * xq;
    }
    for (int x = 0; x < num_actions_; ++x) {
      grad_theta(c, x) = xi(c, x) * (gxi[x] - inner);
    }
  }
  return value_;
}

namespace {

struct AdamState {
  Matrix m, v;
  int step = 0;
};

void adam_ascend(Matrix& theta, const Matrix& grad, AdamState& st, const AcqOptConfig& cfg) {
  ++st.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, st.step);
  const double bc2 = 1.0 - std::pow(b2, st.step);
  for (std::size_t r = 0; r < theta.rows(); ++r) {
    for (std::size_t c = 0; c < theta.cols(); ++c) {
      const double g = grad(r, c);
      st.m(r, c) = b1 * st.m(r, c) + (1.0 - b1) * g;
      st.v(r, c) = b2 * st.v(r, c) + (1.0 - b2) * g * g;
      const double mhat = st.m(r, c) / bc1;
      const double vhat = st.v(r, c) / bc2;
      theta(r, c) += cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

Matrix fd_grad_theta(AcquisitionEvaluator& eval, const Matrix& theta) {
  Matrix grad(theta.rows(), theta.cols());
  Matrix probe = theta;
  for (std::size_t r = 0; r < theta.rows(); ++r) {
    for (std::size_t c = 0; c < theta.cols(); ++c) {
      probe(r, c) = theta(r, c) + kFdStep;
      const double hi = eval.value(softmax_rows(Logits{probe}));
      probe(r, c) = theta(r, c) - kFdStep;
      const double lo = eval.value(softmax_rows(Logits{probe}));
      probe(r, c) = theta(r, c);
      grad(r, c) = (hi - lo) / (2.0 * kFdStep);
    }
  }
  return grad;
}

}  // namespace

ConditionalDistribution optimize_acquisition(const GpPosterior* post, double beta,
                                             const ContextMeasure& p,
                                             const ActionSet& actions,
                                             const AcqOptConfig& cfg, Rng& rng) {
  cfg.validate();
  const int num_contexts = p.size();
  const int num_actions = actions.size();
  if (post == nullptr || post->size() == 0) {
    return ConditionalDistribution::uniform(num_contexts, num_actions);
  }

  AcquisitionEvaluator evaluator(*post, actions, p, beta);

  double best_value = -std::numeric_limits<double>::infinity();
  ConditionalDistribution best_xi = ConditionalDistribution::uniform(num_contexts, num_actions);
  bool have_result = false;
  int abandoned = 0;

  Matrix grad(num_contexts, num_actions);
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Matrix theta(num_contexts, num_actions);
    if (restart > 0) {
      for (std::size_t r = 0; r < theta.rows(); ++r) {
        for (std::size_t c = 0; c < theta.cols(); ++c) theta(r, c) = rng.normal();
      }
    }

    AdamState st;
    st.m = Matrix(num_contexts, num_actions);
    st.v = Matrix(num_contexts, num_actions);

    double restart_best = -std::numeric_limits<double>::infinity();
    ConditionalDistribution restart_xi =
        ConditionalDistribution::uniform(num_contexts, num_actions);
    bool bad = false;

    for (int step = 0; step < cfg.steps; ++step) {
      ConditionalDistribution xi = softmax_rows(Logits{theta});
      double value;
      if (cfg.grad_mode == GradMode::Analytic) {
        value = evaluator.value_and_grad(xi, grad);
      } else {
        value = evaluator.value(xi);
        grad = fd_grad_theta(evaluator, theta);
      }
      if (!std::isfinite(value)) {
        bad = true;
        break;
      }
      if (value > restart_best) {
        restart_best = value;
        restart_xi = xi;
      }
      adam_ascend(theta, grad, st, cfg);
    }
    if (!bad) {
      const ConditionalDistribution xi = softmax_rows(Logits{theta});
      const double value = evaluator.value(xi);
      if (std::isfinite(value) && value > restart_best) {
        restart_best = value;
        restart_xi = xi;
      }
      if (restart_best > best_value) {
        best_value = restart_best;
        best_xi = restart_xi;
      }
      have_result = true;
    } else {
      ++abandoned;
      std::fprintf(stderr, "optimize_acquisition: restart %d abandoned (non-finite objective)\n",
                   restart);
    }
  }
  if (!have_result) {
    throw std::runtime_error("optimize_acquisition: all restarts hit non-finite objectives");
  }
  (void)abandoned;
  return best_xi;
}

}  // namespace mfbo
