#include "oracles.hpp"

#include "spectest/projection.hpp"
#include "spectest/stats.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spectest;

namespace {

Matrix random_matrix(Index n, Index m, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  Matrix A(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) A(i, j) = z(rng);
  return A;
}

}  // namespace

TEST(Projector, OnesColumnKeepsOrthogonalVector) {
  const Projector p(Matrix::Ones(2, 1));
  Vector v(2);
  v << 1, -1;
  EXPECT_LT((project(p, v) - v).norm(), 1e-15);
}

TEST(Projector, OnesColumnKillsConstant) {
  const Projector p(Matrix::Ones(2, 1));
  EXPECT_LT(project(p, Vector::Ones(2)).norm(), 1e-15);
}

TEST(Projector, MatchesDenseOracle) {
  const Matrix G = random_matrix(20, 3, 1);
  const Vector v = random_matrix(20, 1, 2).col(0);
  const Matrix P = oracle::dense_projector(G);
  EXPECT_LT((build_projector(G).apply(v) - P * v).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Projector, Idempotent) {
  const Projector p(random_matrix(40, 5, 3));
  const Vector v = random_matrix(40, 1, 4).col(0);
  const Vector once = p.apply(v);
  EXPECT_LT((p.apply(once) - once).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Projector, Annihilates) {
  const Matrix G = random_matrix(40, 5, 5);
  const Projector p(G);
  const Vector v = random_matrix(40, 1, 6).col(0);
  EXPECT_LT((G.transpose() * p.apply(v)).cwiseAbs().maxCoeff(), 1e-8 * v.norm());
}

TEST(Projector, SymmetricOperator) {
  const Projector p(random_matrix(30, 4, 7));
  const Vector u = random_matrix(30, 1, 8).col(0), v = random_matrix(30, 1, 9).col(0);
  EXPECT_NEAR(u.dot(p.apply(v)), v.dot(p.apply(u)), 1e-10);
}

TEST(Projector, SignInvariant) {
  const Matrix G = random_matrix(25, 3, 10);
  const Matrix K = random_matrix(25, 6, 11);
  const Matrix a = Projector(G).apply_columns(K), b = Projector(-G).apply_columns(K);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projector, RejectsDegenerateShapes) {
  EXPECT_THROW(Projector(Matrix::Ones(3, 3)), DegenerateData);
  EXPECT_THROW(Projector(Matrix::Zero(10, 2)), DegenerateData);
  EXPECT_THROW(Projector(random_matrix(5, 1, 1)).apply(Vector::Zero(4)), InvalidArgument);
}

TEST(Projector, EmptyScoresGiveIdentity) {
  const Projector p(Matrix(6, 0));
  const Vector v = random_matrix(6, 1, 12).col(0);
  EXPECT_EQ(p.apply(v), v);
  EXPECT_EQ(p.d_effective(), 0);
}

TEST(Projector, RidgeOnIllConditionedScores) {
  Matrix G = random_matrix(50, 3, 13);
  G.col(2) = G.col(0) + 1e-9 * G.col(1);
  const Projector p(G);
  EXPECT_GT(p.ridge(), 0.0);
  EXPECT_GT(p.condition_estimate(), 1e12);
  const Projector q(random_matrix(50, 3, 14));
  EXPECT_EQ(q.ridge(), 0.0);
}

TEST(ProjectKernel, ColumnsInSpanVanish) {
  const Matrix G = random_matrix(15, 2, 15);
  Matrix K(15, 3);
  for (Index j = 0; j < 3; ++j) K.col(j) = G.col(0) * (j + 1.0);
  EXPECT_LT(project_kernel_columns(Projector(G), K).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProjectKernel, RowConstantWithOnesProjector) {
  Matrix K(8, 4);
  for (Index j = 0; j < 4; ++j) K.col(j).setConstant(0.1 * (j + 1));
  EXPECT_LT(project_kernel_columns(Projector(Matrix::Ones(8, 1)), K).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectKernel, DualPathEquality) {
  const Matrix G = random_matrix(30, 4, 16);
  const Matrix K = random_matrix(30, 7, 17);
  const Vector e = random_matrix(30, 1, 18).col(0);
  const Projector p(G);
  const Vector lhs = (e.transpose() * project_kernel_columns(p, K)).transpose();
  const Vector rhs = (p.apply(e).transpose() * K).transpose();
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
}
