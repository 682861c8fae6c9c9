// Copyright 2026 The mmids Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmids/error.hpp"
#include "mmids/finite_difference.hpp"
#include "mmids/gradcheck.hpp"
#include "mmids/layers.hpp"
#include "mmids/lstm.hpp"
#include "mmids/matrix.hpp"
#include "mmids/model.hpp"
#include "mmids/optimizer.hpp"
#include "mmids/rng.hpp"
#include "oracles/lstm_reference.hpp"

namespace mmids {
namespace {

TEST(Relu, ClipsNegatives) {
  EXPECT_EQ(relu(Matrix::from_rows({{-3, 0, 2}})), Matrix::from_rows({{0, 0, 2}}));
}

TEST(Relu, AllNegativeGivesZero) {
  EXPECT_EQ(relu(Matrix::from_rows({{-1, -0.5}, {-7, -1e-300}})), Matrix(2, 2));
}

TEST(Relu, NonnegativeUnchangedAndIdempotent) {
  const Matrix x = Matrix::from_rows({{0, 1.5, 3}});
  EXPECT_EQ(relu(x), x);
  const Matrix mixed = Matrix::from_rows({{-2, 4}, {0.25, -0.1}});
  EXPECT_EQ(relu(relu(mixed)), relu(mixed));
}

TEST(Softmax, Symmetric) {
  const Vector p = softmax(std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Softmax, LogTwo) {
  const Vector p = softmax(std::vector<double>{std::numbers::ln2, 0});
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  const Vector p = softmax(std::vector<double>{1000, 0});
  EXPECT_TRUE(std::isfinite(p[0]) && std::isfinite(p[1]));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
}

TEST(Softmax, SumsToOne) {
  SeededRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(2 + trial % 5);
    for (double& v : s) v = rng.uniform(-1000.0, 1000.0);
    const Vector p = softmax(s);
    double total = 0.0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Softmax, EmptyThrows) { EXPECT_THROW(softmax(std::vector<double>{}), InvalidArgument); }

TEST(BceLoss, HalfIsLogTwo) {
  EXPECT_NEAR(bce_loss(std::vector<int>{1}, std::vector<double>{0.5}), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(bce_loss(std::vector<int>{1, 0}, std::vector<double>{0.5, 0.5}), std::numbers::ln2, 1e-15);
}

TEST(BceLoss, PerfectPredictionIsNearZero) {
  const double loss = bce_loss(std::vector<int>{1, 0}, std::vector<double>{1.0, 0.0});
  EXPECT_GE(loss, 0.0);
  EXPECT_LE(loss, 1e-11);
}

TEST(BceLoss, ClampedAtZeroProbability) {
  const double loss = bce_loss(std::vector<int>{1}, std::vector<double>{0.0});
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, -std::log(kLogClamp), 1e-9);
}

TEST(BceLoss, RejectsBadInput) {
  EXPECT_THROW(bce_loss(std::vector<int>{1, 0}, std::vector<double>{0.5}), InvalidArgument);
  EXPECT_THROW(bce_loss(std::vector<int>{2}, std::vector<double>{0.5}), InvalidArgument);
  EXPECT_THROW(bce_loss(std::vector<int>{1}, std::vector<double>{1.5}), InvalidArgument);
  EXPECT_THROW(bce_loss(std::vector<int>{}, std::vector<double>{}), InvalidArgument);
}

TEST(DenseForward, IdentityWeights) {
  const ParamTensor w(Matrix::from_rows({{1, 0}, {0, 1}}));
  const ParamTensor b(Matrix(2, 1));
  const Matrix x = Matrix::column(std::vector<double>{2, -3});
  EXPECT_EQ(dense_forward(w, b, x, Activation::none), x);
}

TEST(DenseForward, SumAndClip) {
  const ParamTensor b(Matrix(1, 1));
  const Matrix x = Matrix::column(std::vector<double>{2, 3});
  EXPECT_EQ(dense_forward(ParamTensor(Matrix::from_rows({{1, 1}})), b, x, Activation::relu),
            Matrix::from_rows({{5}}));
  EXPECT_EQ(dense_forward(ParamTensor(Matrix::from_rows({{-1, 0}})), b, x, Activation::relu),
            Matrix::from_rows({{0}}));
}

TEST(DenseForward, ShapeMismatchNamesBothShapes) {
  const ParamTensor w(Matrix(3, 2));
  const ParamTensor b(Matrix(3, 1));
  try {
    dense_forward(w, b, Matrix(4, 1), Activation::none);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("3x2"), std::string::npos) << what;
    EXPECT_NE(what.find("4x1"), std::string::npos) << what;
  }
}

TEST(LstmCellStep, ZeroParamsZeroState) {
  const LstmCellParams p(3, 2);
  const auto s = lstm_cell_step(p, std::vector<double>{1, -2, 3}, Vector(2, 0.0), Vector(2, 0.0));
  EXPECT_EQ(s.h, Vector(2, 0.0));
  EXPECT_EQ(s.c, Vector(2, 0.0));
}

TEST(LstmCellStep, ZeroParamsHalveCell) {
  const LstmCellParams p(1, 1);
  const auto s = lstm_cell_step(p, std::vector<double>{5}, Vector{0.0}, Vector{2.0});
  EXPECT_DOUBLE_EQ(s.c[0], 1.0);
  EXPECT_NEAR(s.h[0], 0.380797, 1e-6);
  EXPECT_DOUBLE_EQ(s.h[0], 0.5 * std::tanh(1.0));
}

TEST(LstmCellStep, ZeroParamsAnyInput) {
  const LstmCellParams p(4, 3);
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(4), c(3);
    for (double& v : x) v = rng.uniform(-10.0, 10.0);
    for (double& v : c) v = rng.uniform(-3.0, 3.0);
    const auto s = lstm_cell_step(p, x, Vector(3, 0.0), c);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_DOUBLE_EQ(s.c[k], 0.5 * c[k]);
      EXPECT_DOUBLE_EQ(s.h[k], 0.5 * std::tanh(s.c[k]));
    }
  }
}

TEST(LstmCellStep, MatchesReferenceStep) {
  SeededRng rng(0);
  LstmCellParams p(3, 2);
  for (ParamTensor* t : {&p.input_weights, &p.recurrent_weights, &p.bias}) {
    for (double& v : t->value.values()) v = rng.uniform(-0.5, 0.5);
  }
  Vector x(3), h(2), c(2);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  for (double& v : h) v = rng.uniform(-1.0, 1.0);
  for (double& v : c) v = rng.uniform(-1.0, 1.0);

  oracle::LstmLayerWeights ref{3, 2, {}, {}, {}};
  ref.u.assign(p.input_weights.value.values().begin(), p.input_weights.value.values().end());
  ref.w.assign(p.recurrent_weights.value.values().begin(), p.recurrent_weights.value.values().end());
  ref.b.assign(p.bias.value.values().begin(), p.bias.value.values().end());
  std::vector<double> rh = h, rc = c;
  oracle::reference_step(ref, x, rh, rc);

  const auto s = lstm_cell_step(p, x, h, c);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(s.h[k], rh[k], 1e-12);
    EXPECT_NEAR(s.c[k], rc[k], 1e-12);
  }
}

TEST(LstmCellStep, ShapeMismatchThrows) {
  const LstmCellParams p(3, 2);
  EXPECT_THROW(lstm_cell_step(p, Vector(2), Vector(2), Vector(2)), ShapeError);
  EXPECT_THROW(lstm_cell_step(p, Vector(3), Vector(3), Vector(2)), ShapeError);
}

TEST(FiniteDifference, Square) {
  const auto g = finite_difference_gradient([](std::span<const double> t) { return t[0] * t[0]; }, {3.0}, 1e-5);
  EXPECT_NEAR(g[0], 6.0, 1e-8);
}

TEST(FiniteDifference, LinearIsExactForAnyEps) {
  const auto f = [](std::span<const double> t) { return 2.0 * t[0] - 0.5 * t[1] + 1.0; };
  for (double eps : {1e-6, 1e-3, 0.5, 4.0}) {
    const auto g = finite_difference_gradient(f, {1.0, -2.0}, eps);
    EXPECT_NEAR(g[0], 2.0, 1e-9);
    EXPECT_NEAR(g[1], -0.5, 1e-9);
  }
}

TEST(FiniteDifference, NonpositiveEpsThrows) {
  const auto f = [](std::span<const double> t) { return t[0]; };
  EXPECT_THROW(finite_difference_gradient(f, {1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(finite_difference_gradient(f, {1.0}, -1e-5), InvalidArgument);
}

TEST(RelativeError, FloorsTheDenominator) {
  EXPECT_DOUBLE_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(1e-9, 0.0), 1e-9 / 1e-8);
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
}

TEST(Optimizer, SgdStep) {
  ParamTensor t(Matrix::from_rows({{1.0}}));
  t.grad(0, 0) = 0.5;
  Optimizer opt({OptimizerKind::sgd, 0.1});
  std::vector<ParamTensor*> ts{&t};
  opt.step(ts);
  EXPECT_DOUBLE_EQ(t.value(0, 0), 0.95);
}

TEST(Optimizer, SgdZeroGradLeavesValue) {
  ParamTensor t(Matrix::from_rows({{1.25, -3.0}}));
  Optimizer opt({OptimizerKind::sgd, 0.1});
  std::vector<ParamTensor*> ts{&t};
  opt.step(ts);
  EXPECT_EQ(t.value, Matrix::from_rows({{1.25, -3.0}}));
}

TEST(Optimizer, AdamFirstStepIsLearningRate) {
  for (double g : {1e-3, 0.5, -7.0}) {
    ParamTensor t(Matrix::from_rows({{2.0}}));
    t.grad(0, 0) = g;
    Optimizer opt(OptimizerConfig{});
    std::vector<ParamTensor*> ts{&t};
    opt.step(ts);
    EXPECT_NEAR(std::abs(2.0 - t.value(0, 0)), 1e-3, 1e-6);
    EXPECT_EQ(std::signbit(2.0 - t.value(0, 0)), std::signbit(g));
  }
}

TEST(Optimizer, RejectsNonpositiveLearningRate) {
  EXPECT_THROW(Optimizer({OptimizerKind::sgd, 0.0}), InvalidArgument);
  EXPECT_THROW(Optimizer({OptimizerKind::adam, -1e-3}), InvalidArgument);
}

TEST(SeededRng, SameSeedSameSequence) {
  SeededRng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(SeededRng, KnownFirstDraw) {
  // mt19937_64 with the default seed 5489 yields 14514284786278117030 first.
  SeededRng rng(5489);
  EXPECT_EQ(rng.next_u64(), 14514284786278117030ULL);
}

// Gradient of the classifier alone: (p - onehot(y)) h^T for the weight.
TEST(Backprop, ClassifierGradientIsAnalytic) {
  TinyProblem p = make_tiny_problem(2, 3, 1);
  const AlignedSample& s = p.batch.front();
  const ForwardResult fwd = forward(p.params, s);
  compute_gradients(p.params, p.batch, BranchMode::multi);
  const Matrix& gw = p.params.classifier.weight.grad;
  const Matrix& gb = p.params.classifier.bias.grad;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    const double delta = fwd.probabilities[k] - (static_cast<int>(k) == s.label ? 1.0 : 0.0);
    EXPECT_NEAR(gb(k, 0), delta, 1e-12);
    for (std::size_t j = 0; j < fwd.latents.joint.size(); ++j) {
      EXPECT_NEAR(gw(k, j), delta * fwd.latents.joint[j], 1e-12);
    }
  }
}

TEST(Backprop, DuplicatedBatchGivesSameGradient) {
  TinyProblem p = make_tiny_problem(1, 3, 1);
  ModelParams single = p.params;
  compute_gradients(single, p.batch, BranchMode::multi);
  std::vector<AlignedSample> doubled{p.batch.front(), p.batch.front()};
  ModelParams twice = p.params;
  compute_gradients(twice, doubled, BranchMode::multi);
  const auto a = single.flatten_grads();
  const auto b = twice.flatten_grads();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-15 + 1e-12 * std::abs(a[i]));
}

TEST(Backprop, WithoutForwardPassThrows) {
  TinyProblem p = make_tiny_problem(0);
  EXPECT_THROW(backward(p.params, ForwardTrace{}, 1, 1.0), InvalidArgument);
}

TEST(Backprop, GradsStartFromZero) {
  TinyProblem p = make_tiny_problem(0);
  for (auto& [name, t] : p.params.tensors()) t->grad.fill(123.0);
  ModelParams fresh = p.params;
  fresh.zero_grads();
  compute_gradients(p.params, p.batch, BranchMode::multi);
  compute_gradients(fresh, p.batch, BranchMode::multi);
  EXPECT_EQ(p.params.flatten_grads(), fresh.flatten_grads());
}

TEST(GradCheck, TinyModelPassesForSeedsZeroToFour) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TinyProblem p = make_tiny_problem(seed);
    EXPECT_LE(p.params.parameter_count(), 500u);
    const auto r = gradient_check(p.params, p.batch, BranchMode::multi, 1e-5, 1e-4);
    EXPECT_TRUE(r.passed()) << "seed " << seed << ": " << r.worst().name << " " << r.worst().max_relative_error;
  }
}

// With one latent zeroed some LSTM gradient entries drop to ~1e-8, where a
// 1e-5 step is dominated by cancellation; a 1e-4 step resolves them.
TEST(GradCheck, SingleModalityModesPass) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TinyProblem p = make_tiny_problem(seed);
    for (BranchMode mode : {BranchMode::sensor_only, BranchMode::network_only}) {
      const auto r = gradient_check(p.params, p.batch, mode, 1e-4, 1e-4);
      EXPECT_TRUE(r.passed()) << "seed " << seed << " " << to_string(mode) << ": " << r.worst().name;
    }
  }
}

TEST(GradCheck, CorruptedGradientIsNamed) {
  const TinyProblem p = make_tiny_problem(0);
  const auto r = gradient_check(p.params, p.batch, BranchMode::multi, 1e-5, 1e-4, [](ModelParams& m) {
    m.lstm[1].recurrent_weights.grad(2, 1) *= 1.5;
    m.lstm[1].recurrent_weights.grad(2, 1) += 1e-3;
  });
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.worst().name, "lstm.1.recurrent_weights");
}

TEST(GradCheck, ListsEveryParameterGroup) {
  const TinyProblem p = make_tiny_problem(0);
  const auto r = gradient_check(p.params, p.batch, BranchMode::multi, 1e-5, 1e-4);
  const auto tensors = p.params.tensors();
  ASSERT_EQ(r.groups.size(), tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) EXPECT_EQ(r.groups[i].name, tensors[i].name);
}

TEST(Determinism, ForwardAndGradientsAreBitwiseRepeatable) {
  const TinyProblem p = make_tiny_problem(3);
  ModelParams a = p.params, b = p.params;
  EXPECT_EQ(compute_gradients(a, p.batch, BranchMode::multi), compute_gradients(b, p.batch, BranchMode::multi));
  EXPECT_EQ(a.flatten_grads(), b.flatten_grads());
}

}  // namespace
}  // namespace mmids
