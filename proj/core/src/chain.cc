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

#include <cmath>

#include "myolab/util.h"

namespace myolab {

namespace {

inline Eigen::Vector2d perp(const Eigen::Vector2d& v) {
  return Eigen::Vector2d(-v.y(), v.x());
}

inline Eigen::Vector2d rot(double ang, const Eigen::Vector2d& v) {
  const double c = std::cos(ang), s = std::sin(ang);
  return Eigen::Vector2d(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

}  // namespace

void Morphology::validate() const {
  const int n = dof();
  const int nu = muscle_count();
  if (moment_arms.rows() != nu || moment_arms.cols() != n) {
    throw SimError("morphology '" + name + "': moment_arms must be d_u x d_q");
  }
  if (rest_lengths.size() != nu) {
    throw SimError("morphology '" + name + "': rest_lengths dimension");
  }
  for (int i = 0; i < nu; ++i) {
    if (!muscle_params[static_cast<size_t>(i)].valid()) {
      throw SimError("morphology '" + name + "': invalid muscle params at " +
                     std::to_string(i));
    }
    if (moment_arms.row(i).cwiseAbs().maxCoeff() == 0.0) {
      throw SimError("morphology '" + name + "': muscle " + std::to_string(i) +
                     " spans no joint");
    }
  }
  for (const auto& link : links) {
    if (link.parent >= static_cast<int>(links.size()) ||
        (link.parent >= 0 && &links[static_cast<size_t>(link.parent)] >= &link)) {
      throw SimError("morphology '" + name + "': links must be parent-ordered");
    }
  }
  for (int iz : posture_indices) {
    if (iz < 0 || iz >= n) {
      throw SimError("morphology '" + name + "': posture index out of range");
    }
  }
  for (const auto& cp : contacts) {
    if (cp.link < 0 || cp.link >= n) {
      throw SimError("morphology '" + name + "': contact link out of range");
    }
  }
  if (torso_link < 0 || torso_link >= n) {
    throw SimError("morphology '" + name + "': torso link out of range");
  }
}

void Kinematics::resize(int n) {
  const size_t sn = static_cast<size_t>(n);
  ang.assign(sn, 0.0);
  omega.assign(sn, 0.0);
  pos.assign(sn, Eigen::Vector2d::Zero());
  vel.assign(sn, Eigen::Vector2d::Zero());
  acc0.assign(sn, Eigen::Vector2d::Zero());
  com_pos.assign(sn, Eigen::Vector2d::Zero());
  com_vel.assign(sn, Eigen::Vector2d::Zero());
  com_acc0.assign(sn, Eigen::Vector2d::Zero());
  total_mass = 0.0;
  com.setZero();
  com_vel_total.setZero();
}

// Recursive planar Newton-Euler kinematics. With qddot = 0 every link's
// angular acceleration is zero in the plane, so acc0 carries only the
// centripetal and Coriolis terms.
void forward_kinematics(const Morphology& m, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& qdot, Kinematics& kin) {
  const int n = m.dof();
  if (q.size() != n || qdot.size() != n) {
    throw SimError("forward_kinematics: dimension mismatch");
  }
  kin.resize(n);
  for (int i = 0; i < n; ++i) {
    const LinkSpec& link = m.links[static_cast<size_t>(i)];
    double p_ang = 0.0, p_omega = 0.0;
    Eigen::Vector2d p_pos = Eigen::Vector2d::Zero();
    Eigen::Vector2d p_vel = Eigen::Vector2d::Zero();
    Eigen::Vector2d p_acc = Eigen::Vector2d::Zero();
    if (link.parent >= 0) {
      const size_t p = static_cast<size_t>(link.parent);
      p_ang = kin.ang[p];
      p_omega = kin.omega[p];
      p_pos = kin.pos[p];
      p_vel = kin.vel[p];
      p_acc = kin.acc0[p];
    }

    const size_t si = static_cast<size_t>(i);
    switch (link.joint) {
      case JointType::kRevolute: {
        const Eigen::Vector2d r = rot(p_ang, link.attach);
        kin.ang[si] = p_ang + q[i];
        kin.omega[si] = p_omega + qdot[i];
        kin.pos[si] = p_pos + r;
        kin.vel[si] = p_vel + p_omega * perp(r);
        kin.acc0[si] = p_acc - p_omega * p_omega * r;
        break;
      }
      case JointType::kPrismaticX:
      case JointType::kPrismaticY: {
        const Eigen::Vector2d axis_local =
            link.joint == JointType::kPrismaticX ? Eigen::Vector2d(1, 0)
                                                 : Eigen::Vector2d(0, 1);
        const Eigen::Vector2d offset = link.attach + q[i] * axis_local;
        const Eigen::Vector2d r = rot(p_ang, offset);
        const Eigen::Vector2d axis_world = rot(p_ang, axis_local);
        kin.ang[si] = p_ang;
        kin.omega[si] = p_omega;
        kin.pos[si] = p_pos + r;
        kin.vel[si] = p_vel + p_omega * perp(r) + qdot[i] * axis_world;
        kin.acc0[si] = p_acc - p_omega * p_omega * r +
                       2.0 * p_omega * qdot[i] * perp(axis_world);
        break;
      }
    }

    const Eigen::Vector2d rc = rot(kin.ang[si], link.com);
    kin.com_pos[si] = kin.pos[si] + rc;
    kin.com_vel[si] = kin.vel[si] + kin.omega[si] * perp(rc);
    kin.com_acc0[si] = kin.acc0[si] - kin.omega[si] * kin.omega[si] * rc;

    if (link.mass > 0.0) {
      kin.total_mass += link.mass;
      kin.com += link.mass * kin.com_pos[si];
      kin.com_vel_total += link.mass * kin.com_vel[si];
    }
  }
  if (kin.total_mass > 0.0) {
    kin.com /= kin.total_mass;
    kin.com_vel_total /= kin.total_mass;
  }
}

Eigen::Vector2d point_position(const Kinematics& kin, int link,
                               const Eigen::Vector2d& local) {
  const size_t si = static_cast<size_t>(link);
  return kin.pos[si] + rot(kin.ang[si], local);
}

Eigen::Vector2d point_velocity(const Kinematics& kin, int link,
                               const Eigen::Vector2d& local) {
  const size_t si = static_cast<size_t>(link);
  const Eigen::Vector2d r = rot(kin.ang[si], local);
  return kin.vel[si] + kin.omega[si] * perp(r);
}

void point_jacobian(const Morphology& m, const Kinematics& kin, int link,
                    const Eigen::Vector2d& local, Eigen::MatrixXd& jac) {
  const int n = m.dof();
  jac.setZero(2, n);
  const Eigen::Vector2d p = point_position(kin, link, local);
  for (int j = link; j >= 0; j = m.links[static_cast<size_t>(j)].parent) {
    const LinkSpec& lj = m.links[static_cast<size_t>(j)];
    const size_t sj = static_cast<size_t>(j);
    switch (lj.joint) {
      case JointType::kRevolute:
        jac.col(j) = perp(p - kin.pos[sj]);
        break;
      case JointType::kPrismaticX: {
        const double p_ang = lj.parent >= 0
                                 ? kin.ang[static_cast<size_t>(lj.parent)]
                                 : 0.0;
        jac.col(j) = rot(p_ang, Eigen::Vector2d(1, 0));
        break;
      }
      case JointType::kPrismaticY: {
        const double p_ang = lj.parent >= 0
                                 ? kin.ang[static_cast<size_t>(lj.parent)]
                                 : 0.0;
        jac.col(j) = rot(p_ang, Eigen::Vector2d(0, 1));
        break;
      }
    }
  }
}

namespace {

// Fills the ancestor joint list of `link` (including itself), root last.
void ancestors(const Morphology& m, int link, std::vector<int>& out) {
  out.clear();
  for (int j = link; j >= 0; j = m.links[static_cast<size_t>(j)].parent) {
    out.push_back(j);
  }
}

}  // namespace

void mass_matrix(const Morphology& m, const Kinematics& kin,
                 Eigen::MatrixXd& M) {
  const int n = m.dof();
  M.setZero(n, n);
  Eigen::MatrixXd jac(2, n);
  std::vector<int> anc;
  for (int b = 0; b < n; ++b) {
    const LinkSpec& link = m.links[static_cast<size_t>(b)];
    if (link.mass <= 0.0 && link.inertia <= 0.0) continue;
    point_jacobian(m, kin, b, link.com, jac);
    ancestors(m, b, anc);
    for (size_t ii = 0; ii < anc.size(); ++ii) {
      const int i = anc[ii];
      const bool i_rev =
          m.links[static_cast<size_t>(i)].joint == JointType::kRevolute;
      for (size_t jj = ii; jj < anc.size(); ++jj) {
        const int j = anc[jj];
        double v = link.mass * jac.col(i).dot(jac.col(j));
        if (i_rev &&
            m.links[static_cast<size_t>(j)].joint == JointType::kRevolute) {
          v += link.inertia;
        }
        const int r = std::min(i, j), c = std::max(i, j);
        M(r, c) += v;
      }
    }
  }
  // mirror the upper triangle: exact symmetry
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) M(c, r) = M(r, c);
  }
}

void bias_forces(const Morphology& m, const Kinematics& kin, double gravity,
                 Eigen::VectorXd& c) {
  const int n = m.dof();
  c.setZero(n);
  const Eigen::Vector2d g(0.0, -gravity);
  Eigen::MatrixXd jac(2, n);
  std::vector<int> anc;
  for (int b = 0; b < n; ++b) {
    const LinkSpec& link = m.links[static_cast<size_t>(b)];
    if (link.mass <= 0.0) continue;
    point_jacobian(m, kin, b, link.com, jac);
    const Eigen::Vector2d f =
        link.mass * (kin.com_acc0[static_cast<size_t>(b)] - g);
    ancestors(m, b, anc);
    for (int j : anc) c[j] += jac.col(j).dot(f);
  }
}

void muscle_geometry(const Morphology& m, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& qdot, Eigen::VectorXd& l,
                     Eigen::VectorXd& v) {
  if (q.size() != m.dof() || qdot.size() != m.dof()) {
    throw SimError("muscle_geometry: dimension mismatch");
  }
  l.noalias() = m.rest_lengths - m.moment_arms * q;
  v.noalias() = -(m.moment_arms * qdot);
}

}  // namespace myolab
