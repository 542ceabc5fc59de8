// Copyright 2026 The myolab Authors
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

#include "myolab/chain.h"

#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "myolab/tasks.h"
#include "myolab/util.h"

namespace {

using namespace myolab;

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double lo,
                              double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

TEST_CASE("pendulum forward kinematics at rest") {
  const Morphology m = make_pendulum(1.0, 1.0);
  Kinematics kin;
  forward_kinematics(m, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), kin);
  const Eigen::Vector2d tip = point_position(kin, 0, m.links[0].tip);
  CHECK(tip.x() == doctest::Approx(0.0));
  CHECK(tip.y() == doctest::Approx(-1.0));
  CHECK(kin.com.y() == doctest::Approx(-0.5));
}

TEST_CASE("mass matrix of the 3-link preset: symmetric and positive definite") {
  const Morphology m = make_arm();
  std::mt19937_64 rng(11);
  Kinematics kin;
  Eigen::MatrixXd M;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_vector(3, rng, -1.5, 1.5);
    forward_kinematics(m, q, Eigen::VectorXd::Zero(3), kin);
    mass_matrix(m, kin, M);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("mass matrix reproduces the kinetic energy") {
  // independent route: T = sum of per-link translational + rotational energy
  const Morphology m = make_walker();
  std::mt19937_64 rng(5);
  Kinematics kin;
  Eigen::MatrixXd M;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = random_vector(m.dof(), rng, -0.8, 0.8);
    const Eigen::VectorXd qdot = random_vector(m.dof(), rng, -2.0, 2.0);
    forward_kinematics(m, q, qdot, kin);
    mass_matrix(m, kin, M);
    double t_direct = 0.0;
    for (int i = 0; i < m.dof(); ++i) {
      const LinkSpec& link = m.links[static_cast<size_t>(i)];
      t_direct += 0.5 * link.mass *
                      kin.com_vel[static_cast<size_t>(i)].squaredNorm() +
                  0.5 * link.inertia * kin.omega[static_cast<size_t>(i)] *
                      kin.omega[static_cast<size_t>(i)];
    }
    const double t_matrix = 0.5 * qdot.dot(M * qdot);
    CHECK(t_matrix == doctest::Approx(t_direct).epsilon(1e-10));
  }
}

TEST_CASE("point jacobian matches finite differences") {
  const Morphology m = make_walker();
  std::mt19937_64 rng(23);
  const Eigen::VectorXd q = random_vector(m.dof(), rng, -0.5, 0.5);
  Kinematics kin;
  forward_kinematics(m, q, Eigen::VectorXd::Zero(m.dof()), kin);
  const int link = 5;  // left foot
  const Eigen::Vector2d local(0.1, -0.05);
  Eigen::MatrixXd jac;
  point_jacobian(m, kin, link, local, jac);

  const double eps = 1e-7;
  Kinematics kp;
  for (int j = 0; j < m.dof(); ++j) {
    Eigen::VectorXd qp = q;
    qp[j] += eps;
    forward_kinematics(m, qp, Eigen::VectorXd::Zero(m.dof()), kp);
    const Eigen::Vector2d fd =
        (point_position(kp, link, local) - point_position(kin, link, local)) /
        eps;
    CHECK(jac(0, j) == doctest::Approx(fd.x()).epsilon(1e-5));
    CHECK(jac(1, j) == doctest::Approx(fd.y()).epsilon(1e-5));
  }
}

TEST_CASE("muscle geometry is the affine length map") {
  const Morphology m = make_walker();
  Eigen::VectorXd l, v;
  muscle_geometry(m, Eigen::VectorXd::Zero(m.dof()),
                  Eigen::VectorXd::Zero(m.dof()), l, v);
  CHECK((l - m.rest_lengths).cwiseAbs().maxCoeff() == 0.0);

  // single-muscle arithmetic: rho=0.05, q=0.2, l0=0.30 -> 0.29
  Morphology tiny = make_pendulum(1.0, 1.0);
  tiny.moment_arms = Eigen::MatrixXd::Constant(1, 1, 0.05);
  tiny.rest_lengths = Eigen::VectorXd::Constant(1, 0.30);
  tiny.muscle_params.assign(1, MuscleParams{});
  tiny.muscle_names = {"m0"};
  Eigen::VectorXd q1(1), l1, v1;
  q1 << 0.2;
  muscle_geometry(tiny, q1, Eigen::VectorXd::Zero(1), l1, v1);
  CHECK(l1[0] == doctest::Approx(0.29).epsilon(1e-15));
}

TEST_CASE("length map finite differences recover the moment arms") {
  const Morphology m = make_walker();
  std::mt19937_64 rng(31);
  const Eigen::VectorXd q = random_vector(m.dof(), rng, -0.5, 0.5);
  const double eps = 1e-6;
  Eigen::VectorXd l0, l1, v;
  muscle_geometry(m, q, Eigen::VectorXd::Zero(m.dof()), l0, v);
  for (int j = 0; j < m.dof(); ++j) {
    Eigen::VectorXd qp = q;
    qp[j] += eps;
    muscle_geometry(m, qp, Eigen::VectorXd::Zero(m.dof()), l1, v);
    for (int i = 0; i < m.muscle_count(); ++i) {
      CHECK(std::abs((l1[i] - l0[i]) / eps - (-m.moment_arms(i, j))) < 1e-8);
    }
  }
}

TEST_CASE("length map linearity") {
  // exact identity on binary-exact inputs
  Morphology m = make_pendulum(1.0, 1.0);
  m.links.push_back(m.links[0]);
  m.links[1].parent = 0;
  m.links[1].attach = Eigen::Vector2d(0, -1);
  m.moment_arms = Eigen::MatrixXd(2, 2);
  m.moment_arms << 0.0625, 0.125, -0.25, 0.03125;
  m.rest_lengths = Eigen::VectorXd::Constant(2, 0.5);
  m.muscle_params.assign(2, MuscleParams{});
  m.muscle_names = {"m0", "m1"};

  Eigen::VectorXd q1(2), q2(2), sum(2), l1, l2, l12, v;
  q1 << 0.25, -0.5;
  q2 << 0.125, 1.0;
  sum = q1 + q2;
  muscle_geometry(m, q1, Eigen::VectorXd::Zero(2), l1, v);
  muscle_geometry(m, q2, Eigen::VectorXd::Zero(2), l2, v);
  muscle_geometry(m, sum, Eigen::VectorXd::Zero(2), l12, v);
  CHECK(((l1 + l2 - m.rest_lengths) - l12).cwiseAbs().maxCoeff() == 0.0);

  // and within float tolerance on the walker with arbitrary reals
  const Morphology w = make_walker();
  std::mt19937_64 rng(9);
  const Eigen::VectorXd a = random_vector(w.dof(), rng, -0.7, 0.7);
  const Eigen::VectorXd b = random_vector(w.dof(), rng, -0.7, 0.7);
  Eigen::VectorXd la, lb, lab;
  muscle_geometry(w, a, Eigen::VectorXd::Zero(w.dof()), la, v);
  muscle_geometry(w, b, Eigen::VectorXd::Zero(w.dof()), lb, v);
  muscle_geometry(w, a + b, Eigen::VectorXd::Zero(w.dof()), lab, v);
  CHECK(((la + lb - w.rest_lengths) - lab).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dimension mismatches are rejected") {
  const Morphology m = make_walker();
  Eigen::VectorXd l, v;
  CHECK_THROWS_AS(muscle_geometry(m, Eigen::VectorXd::Zero(3),
                                  Eigen::VectorXd::Zero(3), l, v),
                  SimError);
}

}  // namespace
