#include "catqec/hilbert.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace catqec {

JointState JointState::pure(StateVector psi, double time_us) {
  JointState s;
  s.pure_ = true;
  s.psi_ = std::move(psi);
  s.time_us = time_us;
  return s;
}

JointState JointState::density(Eigen::MatrixXcd rho, double time_us) {
  JointState s;
  s.pure_ = false;
  s.rho_ = std::move(rho);
  s.time_us = time_us;
  return s;
}

const StateVector& JointState::vector() const {
  if (!pure_) throw DimensionError("state is not in the pure representation");
  return psi_;
}

const Eigen::MatrixXcd& JointState::matrix() const {
  if (pure_) throw DimensionError("state is not in the density representation");
  return rho_;
}

Eigen::MatrixXcd JointState::to_density_matrix() const {
  if (pure_) return psi_ * psi_.adjoint();
  return rho_;
}

void JointState::promote_to_density() {
  if (!pure_) return;
  rho_ = psi_ * psi_.adjoint();
  psi_.resize(0);
  pure_ = false;
}

double JointState::norm() const {
  if (pure_) return psi_.norm();
  return rho_.trace().real();
}

double JointState::purity() const {
  if (pure_) {
    const double n = psi_.squaredNorm();
    return n * n;
  }
  return (rho_ * rho_).trace().real();
}

void JointState::validate() const {
  if (pure_) {
    if (std::abs(psi_.norm() - 1.0) > 1e-9)
      throw StateInvariantError("pure state norm deviates from 1 by more than 1e-9");
    return;
  }
  const double herm_defect = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > 1e-10)
    throw StateInvariantError("density matrix Hermiticity defect exceeds 1e-10");
  if (std::abs(rho_.trace().real() - 1.0) > 1e-8 || std::abs(rho_.trace().imag()) > 1e-8)
    throw StateInvariantError("density matrix trace deviates from 1 by more than 1e-8");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho_ + rho_.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw StateInvariantError("density matrix has an eigenvalue below -1e-8");
}

Operator annihilation(const HilbertConfig& cfg) {
  cfg.validate();
  Operator a = Operator::Zero(cfg.fock_dim, cfg.fock_dim);
  for (int n = 1; n < cfg.fock_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator number_operator(const HilbertConfig& cfg) {
  cfg.validate();
  Operator n = Operator::Zero(cfg.fock_dim, cfg.fock_dim);
  for (int k = 0; k < cfg.fock_dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Operator parity_operator(const HilbertConfig& cfg) {
  cfg.validate();
  Operator p = Operator::Zero(cfg.fock_dim, cfg.fock_dim);
  for (int k = 0; k < cfg.fock_dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

Operator displacement_operator(Complex alpha, const HilbertConfig& cfg) {
  cfg.validate();
  if (!truncation_safe(alpha, cfg))
    throw TruncationError("displacement amplitude violates |a|^2 + 6|a| <= fock_dim");
  const Operator a = annihilation(cfg);
  Operator gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return exp_antihermitian(gen);
}

Operator qubit_identity() { return Operator::Identity(2, 2); }

Operator sigma_z() {
  Operator s = Operator::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return s;
}

Operator sigma_minus() {
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

Operator qubit_projector_g() {
  Operator p = Operator::Zero(2, 2);
  p(0, 0) = 1.0;
  return p;
}

Operator qubit_projector_e() {
  Operator p = Operator::Zero(2, 2);
  p(1, 1) = 1.0;
  return p;
}

Operator cavity_identity(const HilbertConfig& cfg) {
  return Operator::Identity(cfg.fock_dim, cfg.fock_dim);
}

Operator joint_identity(const HilbertConfig& cfg) {
  return Operator::Identity(cfg.joint_dim(), cfg.joint_dim());
}

Operator tensor(const Operator& qubit_op, const Operator& cavity_op) {
  if (qubit_op.rows() != qubit_op.cols() || cavity_op.rows() != cavity_op.cols())
    throw DimensionError("tensor factors must be square");
  if (qubit_op.rows() != 2) throw DimensionError("qubit factor must be 2x2");
  const int nf = static_cast<int>(cavity_op.rows());
  Operator out(2 * nf, 2 * nf);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block(i * nf, j * nf, nf, nf) = qubit_op(i, j) * cavity_op;
  return out;
}

StateVector tensor_state(const Eigen::Vector2cd& qubit, const StateVector& cavity) {
  const int nf = static_cast<int>(cavity.size());
  StateVector out(2 * nf);
  out.segment(0, nf) = qubit(0) * cavity;
  out.segment(nf, nf) = qubit(1) * cavity;
  return out;
}

Eigen::MatrixXcd partial_trace(const JointState& state, Keep keep) {
  const Eigen::MatrixXcd rho = state.to_density_matrix();
  if (rho.rows() % 2 != 0) throw DimensionError("joint dimension must be even");
  const int nf = static_cast<int>(rho.rows()) / 2;
  if (keep == Keep::cavity) {
    return rho.block(0, 0, nf, nf) + rho.block(nf, nf, nf, nf);
  }
  Eigen::MatrixXcd q(2, 2);
  q(0, 0) = rho.block(0, 0, nf, nf).trace();
  q(0, 1) = rho.block(0, nf, nf, nf).trace();
  q(1, 0) = rho.block(nf, 0, nf, nf).trace();
  q(1, 1) = rho.block(nf, nf, nf, nf).trace();
  return q;
}

double fidelity(const JointState& state, const StateVector& target) {
  if (state.dim() != target.size()) throw DimensionError("fidelity dimension mismatch");
  if (state.is_pure()) {
    const Complex ov = target.dot(state.vector());
    return std::norm(ov);
  }
  return (target.dot(state.matrix() * target)).real();
}

double fidelity(const JointState& state, const JointState& target) {
  if (!target.is_pure()) throw DimensionError("fidelity target must be pure");
  return fidelity(state, target.vector());
}

double state_overlap_sq(const StateVector& a, const StateVector& b) {
  return std::norm(a.dot(b));
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd d = a - b;
  d = 0.5 * (d + d.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double expectation(const JointState& state, const Operator& op) {
  if (state.is_pure()) return (state.vector().dot(op * state.vector())).real();
  return (op * state.matrix()).trace().real();
}

Operator exp_antihermitian(const Operator& generator) {
  // iG is Hermitian, so exp(G) = V exp(-i lambda) V^dag is exactly unitary.
  Eigen::MatrixXcd h = kImag * generator;
  h = 0.5 * (h + h.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (int k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace catqec
