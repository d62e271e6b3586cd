#pragma once

#include <vector>

#include "mfbo/gp.hpp"
#include "mfbo/meanfield.hpp"
#include "mfbo/rng.hpp"

namespace mfbo {

enum class BetaMode { Theoretical, Constant, LogGrowth };

struct BetaScheduleParams {
  BetaMode mode = BetaMode::Constant;
  // Smoothness constants behind the theoretical schedule.
  double a_const = 1.0;
  double b_const = 1.0;
  double constant_value = 2.0;
  double log_scale = 2.0;

  void validate() const;
};

// log |Xi_t| for the discretisation size
// |Xi_t| = (b |A||C| t^2 (log(a|A||C|) + sqrt(pi)/2))^{|A||C|},
// floored at |Xi_t| = 1 when the base drops below 1.
double log_xi_cardinality(int t, int num_actions, int num_contexts, double a, double b);

// Theoretical: 2 log(|A||C| |Xi_t| t^2 / sqrt(2 pi)), evaluated in log space.
// Constant: constant_value. LogGrowth: log_scale * sqrt(log(t + 1)).
double beta_value(int t, int num_actions, int num_contexts,
                  const BetaScheduleParams& sched);

enum class GradMode { Analytic, FiniteDifference };

struct AcqOptConfig {
  int steps = 200;
  double learning_rate = 0.01;
  int restarts = 8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  GradMode grad_mode = GradMode::Analytic;

  void validate() const;
};

// Upper-confidence acquisition: the exact finite expectation
// sum_c p(c) sum_x xi(x|c) [mu(z_{x,c,xi}) + beta sigma(z_{x,c,xi})],
// where every query shares dist_flat = flatten(xi).
double mf_ucb(const GpPosterior& post, const ConditionalDistribution& xi,
              const ContextMeasure& p, const ActionSet& actions, double beta);

// Repeated acquisition evaluations against one posterior. The action/context
// kernel columns and their triangular solves never change while xi moves, so
// they are computed once here; each evaluation then costs one solve and a few
// matrix-vector passes instead of |A||C| posterior queries.
//
// Holds a reference to the posterior; not thread safe across concurrent calls
// on one instance (scratch buffers are reused).
class AcquisitionEvaluator {
public:
  AcquisitionEvaluator(const GpPosterior& post, const ActionSet& actions,
                       const ContextMeasure& contexts, double beta);

  double value(const ConditionalDistribution& xi);

  // Acquisition value at xi plus its gradient with respect to the logits
  // that produced xi (softmax Jacobian applied row-wise).
  double value_and_grad(const ConditionalDistribution& xi, Matrix& grad_theta);

  double beta() const { return beta_; }

private:
  void eval_common(const ConditionalDistribution& xi);

  const GpPosterior* post_;
  double beta_;
  int num_actions_;
  int num_contexts_;
  std::vector<double> context_probs_;
  double kzz_;

  // Fixed per posterior: query-major kernel parts and their solves.
  Matrix base_k_;       // (|A||C|) x n: action+context kernel summands
  Matrix base_solve_;   // (|A||C|) x n: L^{-1} applied to each base row
  std::vector<double> base_mean_;   // alpha . base row
  std::vector<double> base_norm_;   // ||base_solve row||^2
  Matrix train_dist_;   // n x (|A||C|)

  // Scratch, refreshed by eval_common.
  Matrix block_rbf_;                 // n x |C|
  std::vector<double> block_sum_;    // n
  std::vector<double> vs_;           // n
  std::vector<double> mu_;           // per query, de-standardised
  std::vector<double> sigma_std_;    // per query, standardised
  double value_;
};

// Gradient-ascent maximisation of mf_ucb over the simplex through softmax
// reparametrisation; Adam restarts with best-iterate tracking. A null or
// empty posterior short-circuits to the uniform distribution (the zero-mean
// prior makes the acquisition constant in xi).
ConditionalDistribution optimize_acquisition(const GpPosterior* post, double beta,
                                             const ContextMeasure& p,
                                             const ActionSet& actions,
                                             const AcqOptConfig& cfg, Rng& rng);

}  // namespace mfbo
