#include <doctest.h>

#include <cmath>

#include "mfbo/errors.hpp"
#include "mfbo/gp.hpp"
#include "mfbo/simd/simd.hpp"
#include "test_util.hpp"

using namespace mfbo;
using namespace mfbo::testutil;

namespace {

GpInput simple_input(double action, double context, std::vector<double> dist) {
  GpInput z;
  z.action_vec = {action};
  z.context_vec = {context};
  z.dist_flat = std::move(dist);
  return z;
}

FitOptions raw_fit() { return FitOptions{false}; }

}  // namespace

TEST_CASE("kernel at zero distance sums one unit per summand") {
  KernelParams params;
  const GpInput z1 = simple_input(0.4, -0.2, {0.5, 0.5});
  CHECK(kernel_eval(z1, z1, params, 1) == doctest::Approx(3.0).epsilon(1e-15));

  GpInput z5 = simple_input(0.4, -0.2, {});
  for (int c = 0; c < 5; ++c) {
    z5.dist_flat.push_back(0.3);
    z5.dist_flat.push_back(0.7);
  }
  CHECK(kernel_eval(z5, z5, params, 5) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("kernel matches hand arithmetic at action distance one") {
  KernelParams params;
  params.lengthscale_action = 1.0;
  const GpInput a = simple_input(0.0, 0.3, {0.2, 0.8});
  const GpInput b = simple_input(1.0, 0.3, {0.2, 0.8});
  CHECK(kernel_eval(a, b, params, 1) ==
        doctest::Approx(2.0 + std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("kernel is symmetric bit-for-bit") {
  Rng rng(17);
  const ProblemShape shape{2, 1, 4, 2};
  KernelParams params;
  params.lengthscale_action = 0.7;
  params.lengthscale_context = 1.3;
  params.lengthscale_dist = 0.4;
  params.output_scale = 1.8;
  for (int trial = 0; trial < 50; ++trial) {
    const GpInput a = random_input(rng, shape);
    const GpInput b = random_input(rng, shape);
    CHECK(kernel_eval(a, b, params, 2) == kernel_eval(b, a, params, 2));
  }
}

TEST_CASE("random Gram matrices are positive semidefinite up to 1e-8") {
  Rng rng(29);
  for (RbfForm form : {RbfForm::SquaredExponential, RbfForm::PaperLiteral}) {
    KernelParams params;
    params.rbf_form = form;
    params.lengthscale_dist = 0.5;
    const ProblemShape shape{1, 1, 3, 2};
    const int n = 20;
    std::vector<GpInput> inputs;
    for (int i = 0; i < n; ++i) inputs.push_back(random_input(rng, shape));
    Matrix gram(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        gram(i, j) = kernel_eval(inputs[i], inputs[j], params, 2);
      }
    }
    for (int i = 0; i < n; ++i) gram(i, i) += 1e-8;
    CHECK(cholesky_lower_inplace(gram));
  }
}

TEST_CASE("kernel rejects mismatched shapes naming the field") {
  KernelParams params;
  const GpInput a = simple_input(0.0, 0.0, {1.0});
  GpInput b = a;
  b.action_vec.push_back(1.0);
  CHECK_THROWS_WITH_AS(kernel_eval(a, b, params, 1),
                       doctest::Contains("action_vec"), DimensionError);
  GpInput c = a;
  c.context_vec.clear();
  CHECK_THROWS_WITH_AS(kernel_eval(a, c, params, 1),
                       doctest::Contains("context_vec"), DimensionError);
  GpInput d = a;
  d.dist_flat.push_back(0.0);
  CHECK_THROWS_WITH_AS(kernel_eval(a, d, params, 1),
                       doctest::Contains("dist_flat"), DimensionError);
}

TEST_CASE("single-observation fit matches the hand-solved 1x1 system") {
  ObservationBuffer buffer;
  buffer.append(simple_input(0.1, 0.0, {0.4, 0.6}), 2.0);
  KernelParams params;
  const GpPosterior post = fit(buffer, params, NoiseModel{0.1}, 1, raw_fit());
  CHECK(post.chol()(0, 0) == doctest::Approx(std::sqrt(3.01)).epsilon(1e-14));
  CHECK(post.alpha()[0] == doctest::Approx(2.0 / 3.01).epsilon(1e-14));

  // posterior at the lone training input
  const MeanVar mv = post.mean_var(buffer.inputs().front());
  CHECK(mv.mean == doctest::Approx(3.0 * 2.0 / 3.01).epsilon(1e-12));
  CHECK(mv.var == doctest::Approx(3.0 - 9.0 / 3.01).epsilon(1e-9));
}

TEST_CASE("empty buffer is rejected") {
  ObservationBuffer buffer;
  CHECK_THROWS_AS(fit(buffer, KernelParams{}, NoiseModel{0.1}, 1), std::invalid_argument);
}

TEST_CASE("posterior matches the dense-inversion oracle") {
  Rng rng(31);
  const ProblemShape shape{1, 1, 4, 2};
  KernelParams params;
  params.lengthscale_action = 0.9;
  params.lengthscale_context = 1.1;
  params.lengthscale_dist = 0.6;
  const NoiseModel noise{0.3};

  ObservationBuffer buffer;
  for (int i = 0; i < 10; ++i) {
    buffer.append(random_input(rng, shape), rng.normal() * 2.0);
  }
  const GpPosterior post = fit(buffer, params, noise, shape.num_contexts, raw_fit());

  const std::size_t n = buffer.size();
  Matrix reg(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      reg(i, j) = kernel_eval(buffer.inputs()[i], buffer.inputs()[j], params,
                              shape.num_contexts);
    }
    reg(i, i) += noise.noise_std * noise.noise_std;
  }
  const Matrix inv = dense_inverse(reg);

  for (int trial = 0; trial < 20; ++trial) {
    const GpInput z = random_input(rng, shape);
    std::vector<double> k_star(n);
    for (std::size_t i = 0; i < n; ++i) {
      k_star[i] = kernel_eval(z, buffer.inputs()[i], params, shape.num_contexts);
    }
    double mean = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += inv(i, j) * k_star[j];
      mean += row * buffer.targets()[i];
      quad += row * k_star[i];
    }
    const double var = kernel_eval(z, z, params, shape.num_contexts) - quad;

    const MeanVar mv = post.mean_var(z);
    CHECK(std::abs(mv.mean - mean) < 1e-8);
    CHECK(std::abs(mv.var - var) < 1e-8);
  }
}

TEST_CASE("standardised fit agrees with a standardised oracle") {
  Rng rng(37);
  const ProblemShape shape{1, 1, 3, 1};
  KernelParams params;
  params.lengthscale_dist = 0.7;
  const NoiseModel noise{0.5};

  ObservationBuffer buffer;
  for (int i = 0; i < 8; ++i) {
    buffer.append(random_input(rng, shape), 50.0 + 10.0 * rng.normal());
  }
  const GpPosterior post = fit(buffer, params, noise, 1, FitOptions{true});

  double shift = 0.0;
  for (double y : buffer.targets()) shift += y;
  shift /= buffer.size();
  double var_y = 0.0;
  for (double y : buffer.targets()) var_y += (y - shift) * (y - shift);
  const double scale = std::sqrt(var_y / buffer.size());

  const std::size_t n = buffer.size();
  Matrix reg(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      reg(i, j) = kernel_eval(buffer.inputs()[i], buffer.inputs()[j], params, 1);
    }
    reg(i, i) += (noise.noise_std / scale) * (noise.noise_std / scale);
  }
  const Matrix inv = dense_inverse(reg);

  const GpInput z = random_input(rng, shape);
  std::vector<double> k_star(n);
  for (std::size_t i = 0; i < n; ++i) {
    k_star[i] = kernel_eval(z, buffer.inputs()[i], params, 1);
  }
  double mean_std = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += inv(i, j) * k_star[j];
    mean_std += row * (buffer.targets()[i] - shift) / scale;
    quad += row * k_star[i];
  }
  const MeanVar mv = post.mean_var(z);
  CHECK(mv.mean == doctest::Approx(mean_std * scale + shift).epsilon(1e-10));
  CHECK(mv.var ==
        doctest::Approx((kernel_eval(z, z, params, 1) - quad) * scale * scale)
            .epsilon(1e-10));
}

TEST_CASE("far queries recover the prior") {
  ObservationBuffer buffer;
  buffer.append(simple_input(100.0, 100.0, {1.0, 0.0}), 5.0);
  buffer.append(simple_input(120.0, 130.0, {0.0, 1.0}), -3.0);
  KernelParams params;
  params.lengthscale_action = 0.05;
  params.lengthscale_context = 0.05;
  params.lengthscale_dist = 0.02;
  const GpPosterior post = fit(buffer, params, NoiseModel{0.1}, 1, raw_fit());

  const GpInput z = simple_input(-50.0, -50.0, {0.5, 0.5});
  const MeanVar mv = post.mean_var(z);
  CHECK(std::abs(mv.mean) < 1e-10);
  CHECK(mv.var == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("variance is nonnegative and bounded by the prior") {
  Rng rng(41);
  const ProblemShape shape{1, 1, 5, 1};
  KernelParams params;
  params.lengthscale_dist = 0.4;
  ObservationBuffer buffer;
  for (int i = 0; i < 25; ++i) buffer.append(random_input(rng, shape), rng.normal());
  const GpPosterior post = fit(buffer, params, NoiseModel{0.05}, 1, raw_fit());
  for (int trial = 0; trial < 100; ++trial) {
    const MeanVar mv = post.mean_var(random_input(rng, shape));
    CHECK(mv.var >= 0.0);
    CHECK(mv.var <= 3.0 + 1e-10);
  }
}

TEST_CASE("posterior mean interpolates targets as noise vanishes") {
  Rng rng(43);
  const ProblemShape shape{1, 1, 3, 1};
  KernelParams params;
  ObservationBuffer buffer;
  for (int i = 0; i < 6; ++i) buffer.append(random_input(rng, shape), rng.uniform(-2.0, 2.0));
  const GpPosterior post = fit(buffer, params, NoiseModel{1e-6}, 1, raw_fit());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const MeanVar mv = post.mean_var(buffer.inputs()[i]);
    CHECK(std::abs(mv.mean - buffer.targets()[i]) < 1e-3);
  }
}

TEST_CASE("duplicate inputs at zero noise engage the jitter ladder") {
  const GpInput z = simple_input(0.2, 0.0, {0.5, 0.5});
  ObservationBuffer buffer;
  buffer.append(z, 1.0);
  buffer.append(z, 1.0);
  const GpPosterior post = fit(buffer, KernelParams{}, NoiseModel{0.0}, 1, raw_fit());
  CHECK(post.jitter_used() > 0.0);
}

TEST_CASE("distribution gradients match central finite differences") {
  Rng rng(47);
  const ProblemShape shape{1, 1, 4, 2};
  KernelParams params;
  params.lengthscale_action = 0.8;
  params.lengthscale_context = 1.2;
  params.lengthscale_dist = 0.5;
  params.output_scale = 1.4;

  for (bool standardize : {false, true}) {
    ObservationBuffer buffer;
    for (int i = 0; i < 5; ++i) {
      buffer.append(random_input(rng, shape), rng.uniform(-4.0, 4.0));
    }
    const GpPosterior post =
        fit(buffer, params, NoiseModel{0.2}, shape.num_contexts, FitOptions{standardize});

    GpInput z = random_input(rng, shape);
    const DistGradient grad = post.grad_dist(z);
    const double h = 1e-5;
    for (std::size_t j = 0; j < z.dist_flat.size(); ++j) {
      GpInput hi = z, lo = z;
      hi.dist_flat[j] += h;
      lo.dist_flat[j] -= h;
      const MeanVar up = post.mean_var(hi);
      const MeanVar dn = post.mean_var(lo);
      const double fd_mean = (up.mean - dn.mean) / (2.0 * h);
      const double fd_sigma = (std::sqrt(up.var) - std::sqrt(dn.var)) / (2.0 * h);
      CHECK(close_rel(grad.dmean[j], fd_mean, 1e-4, 1e-6));
      CHECK(close_rel(grad.dsigma[j], fd_sigma, 1e-4, 1e-6));
    }
  }
}

TEST_CASE("gradients vanish far from the data and stay finite on duplicates") {
  KernelParams params;
  params.lengthscale_action = 0.05;
  params.lengthscale_context = 0.05;
  params.lengthscale_dist = 0.02;
  ObservationBuffer buffer;
  buffer.append(simple_input(100.0, 100.0, {1.0, 0.0}), 5.0);
  const GpPosterior post = fit(buffer, params, NoiseModel{0.1}, 1, raw_fit());

  const GpInput far = simple_input(-50.0, -50.0, {0.5, 0.5});
  const DistGradient grad = post.grad_dist(far);
  for (double g : grad.dmean) CHECK(std::abs(g) < 1e-8);

  const DistGradient at_train = post.grad_dist(buffer.inputs().front());
  for (double g : at_train.dmean) CHECK(std::isfinite(g));
  for (double g : at_train.dsigma) CHECK(std::isfinite(g));
}

TEST_CASE("paper-literal form refuses analytic gradients") {
  KernelParams params;
  params.rbf_form = RbfForm::PaperLiteral;
  ObservationBuffer buffer;
  buffer.append(simple_input(0.0, 0.0, {0.5, 0.5}), 1.0);
  const GpPosterior post = fit(buffer, params, NoiseModel{0.1}, 1, raw_fit());
  CHECK_THROWS_AS(post.grad_dist(buffer.inputs().front()), UnsupportedError);
}
