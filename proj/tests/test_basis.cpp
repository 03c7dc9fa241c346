#include <gtest/gtest.h>

#include "wbdg/basis.hpp"

using namespace wbdg;

template <int Dim>
void check_mass(int degree) {
  const Basis<Dim> b(degree);
  const int nm = b.modes();
  for (int i = 0; i < nm; ++i) {
    for (int j = 0; j < nm; ++j) {
      double m = 0.0;
      for (int q = 0; q < b.volume_points(); ++q) m += b.phi()[q * nm + i] * b.phi()[q * nm + j] * b.volume_weights()[q];
      EXPECT_NEAR(m, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Basis, MassIdentity1D) {
  for (int d = 0; d <= 4; ++d) check_mass<1>(d);
}

TEST(Basis, MassIdentity2D) {
  for (int d = 0; d <= 4; ++d) check_mass<2>(d);
}

TEST(Basis, FaceTablesMatchPointEvaluation) {
  const Basis<2> b(2);
  const int nm = b.modes();
  for (int axis = 0; axis < 2; ++axis) {
    for (int side = 0; side < 2; ++side) {
      for (int p = 0; p < b.face_points(); ++p) {
        const auto v = b.evaluate(b.face_node(axis, side, p));
        for (int m = 0; m < nm; ++m) EXPECT_NEAR(b.face_phi(axis, side)[p * nm + m], v[m], 1e-15);
      }
    }
  }
}

TEST(Basis, AverageFactor) {
  EXPECT_NEAR(Basis<1>(1).average_factor(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(Basis<2>(1).average_factor(), 0.5, 1e-16);
}

TEST(Basis, GradientOfLinearMode) {
  // psi_1 = sqrt(3/2) x, derivative sqrt(3/2) everywhere; in 2D mode (1,0) has
  // d/dx = sqrt(3/2) * psi_0(y) = sqrt(3/4).
  const Basis<1> b1(1);
  for (int q = 0; q < b1.volume_points(); ++q) EXPECT_NEAR(b1.grad(0)[q * 2 + 1], std::sqrt(1.5), 1e-14);
  const Basis<2> b2(1);
  const int m10 = 1 * 2 + 0;
  for (int q = 0; q < b2.volume_points(); ++q) {
    EXPECT_NEAR(b2.grad(0)[q * 4 + m10], std::sqrt(0.75), 1e-14);
    EXPECT_NEAR(b2.grad(1)[q * 4 + m10], 0.0, 1e-14);
  }
}
