#include "catqec/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace catqec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (exp(z t) - 1) / z, stable for small |z t|.
Complex expm1_over(Complex z, double t) {
  const Complex zt = z * t;
  if (std::abs(zt) < 1e-5) {
    return t * (1.0 + zt * (0.5 + zt * (1.0 / 6.0 + zt / 24.0)));
  }
  return (std::exp(zt) - 1.0) / z;
}

// Jump actions of the standard collapse channels on a joint pure state.
void apply_collapse_jump(StateVector& psi, int channel, int nf) {
  switch (channel) {
    case 0:  // cavity annihilation
      for (int q = 0; q < 2; ++q) {
        for (int n = 0; n + 1 < nf; ++n)
          psi(q * nf + n) = std::sqrt(static_cast<double>(n + 1)) * psi(q * nf + n + 1);
        psi(q * nf + nf - 1) = 0.0;
      }
      break;
    case 1:  // sigma-
      psi.segment(0, nf) = psi.segment(nf, nf);
      psi.segment(nf, nf).setZero();
      break;
    default:  // sigma_z
      psi.segment(0, nf) *= -1.0;
      break;
  }
  const double n = psi.norm();
  if (n == 0.0) throw StateInvariantError("jump annihilated the state");
  psi /= n;
}

// out(m,n) = sum_k c_k in(m+k, n+k) with c_0 = 1 and
// c_k = c_{k-1} * S * sqrt((m+k)(n+k)) / k: the exact Fock-ladder cascade of
// pure cavity loss in a transformed time variable S.
Eigen::MatrixXcd loss_cascade(const Eigen::MatrixXcd& in, Complex s) {
  const int n_f = static_cast<int>(in.rows());
  Eigen::MatrixXcd out(n_f, n_f);
  if (std::abs(s) == 0.0) {
    out = in;
    return out;
  }
  const double bmax = in.cwiseAbs().maxCoeff();
  const double cut = 1e-18;
  const double smag = std::abs(s);
  for (int m = 0; m < n_f; ++m) {
    for (int n = 0; n < n_f; ++n) {
      Complex acc = in(m, n);
      Complex c = 1.0;
      for (int k = 1; m + k < n_f && n + k < n_f; ++k) {
        c *= s * std::sqrt(static_cast<double>(m + k) * static_cast<double>(n + k)) /
             static_cast<double>(k);
        acc += c * in(m + k, n + k);
        if (std::abs(c) * bmax < cut &&
            smag * std::sqrt(static_cast<double>(m + k + 1) * static_cast<double>(n + k + 1)) <
                0.9 * static_cast<double>(k + 1))
          break;
      }
      out(m, n) = acc;
    }
  }
  return out;
}

}  // namespace

NoiseModel NoiseModel::from_times(double tcav_us, double t1_us, double t2_us) {
  NoiseModel m;
  m.kappa = std::isinf(tcav_us) ? 0.0 : 1.0 / tcav_us;
  m.t1_us = t1_us;
  m.t2_us = t2_us;
  if (m.kappa < 0.0 || t1_us <= 0.0 || t2_us <= 0.0)
    throw std::invalid_argument("noise times must be positive");
  if (t2_us > 2.0 * t1_us * (1.0 + 1e-12))
    throw std::invalid_argument("T2 must not exceed 2 T1");
  return m;
}

double NoiseModel::tphi_us() const {
  if (std::isinf(t2_us)) return kInf;
  const double inv = 1.0 / t2_us - 0.5 * gamma1();
  if (inv <= 0.0) return kInf;
  return 1.0 / inv;
}

double NoiseModel::gamma_phi() const {
  const double tphi = tphi_us();
  return std::isinf(tphi) ? 0.0 : 0.5 / tphi;
}

bool NoiseModel::is_zero() const {
  return kappa == 0.0 && gamma1() == 0.0 && gamma_phi() == 0.0;
}

std::vector<Operator> NoiseModel::collapse_operators(const HilbertConfig& cfg) const {
  std::vector<Operator> ops;
  if (kappa > 0.0)
    ops.push_back(std::sqrt(kappa) * tensor(qubit_identity(), annihilation(cfg)));
  if (gamma1() > 0.0)
    ops.push_back(std::sqrt(gamma1()) * tensor(sigma_minus(), cavity_identity(cfg)));
  if (gamma_phi() > 0.0)
    ops.push_back(std::sqrt(gamma_phi()) * tensor(sigma_z(), cavity_identity(cfg)));
  return ops;
}

int JumpRecord::count(int channel) const {
  int c = 0;
  for (const auto& e : events)
    if (e.channel == channel) ++c;
  return c;
}

Operator dispersive_hamiltonian(double chi, const HilbertConfig& cfg) {
  if (chi <= 0.0) throw std::invalid_argument("chi must be positive");
  cfg.validate();
  const int nf = cfg.fock_dim;
  Operator h = Operator::Zero(2 * nf, 2 * nf);
  for (int n = 0; n < nf; ++n) h(nf + n, nf + n) = -chi * static_cast<double>(n);
  return h;
}

// ---------------------------------------------------------------------------
// Generic Lindblad integrator
// ---------------------------------------------------------------------------

namespace {

struct RhsContext {
  bool h_diagonal = false;
  Eigen::VectorXd hdiag;  // real diagonal (the Hamiltonians here are real-diagonal)
  const Operator* hamiltonian = nullptr;
  double kappa = 0.0;
  double gamma1 = 0.0;
  double gamma_phi = 0.0;
  int nf = 0;
};

RhsContext make_rhs_context(const Operator& h, const NoiseModel& noise,
                            const HilbertConfig& cfg) {
  RhsContext ctx;
  ctx.hamiltonian = &h;
  ctx.kappa = noise.kappa;
  ctx.gamma1 = noise.gamma1();
  ctx.gamma_phi = noise.gamma_phi();
  ctx.nf = cfg.fock_dim;
  const int dim = cfg.joint_dim();
  if (h.rows() != dim || h.cols() != dim)
    throw DimensionError("hamiltonian dimension does not match the configured space");
  double offdiag = 0.0;
  double imagdiag = 0.0;
  for (int i = 0; i < dim && offdiag == 0.0; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(h(i, j)));
  for (int i = 0; i < dim; ++i) imagdiag = std::max(imagdiag, std::abs(h(i, i).imag()));
  if (offdiag == 0.0 && imagdiag == 0.0) {
    ctx.h_diagonal = true;
    ctx.hdiag = h.diagonal().real();
  }
  return ctx;
}

void lindblad_rhs(Eigen::MatrixXcd& out, const Eigen::MatrixXcd& rho, const RhsContext& ctx) {
  const int nf = ctx.nf;
  const int dim = 2 * nf;
  if (ctx.h_diagonal) {
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i)
        out(i, j) = Complex(0.0, -(ctx.hdiag(i) - ctx.hdiag(j))) * rho(i, j);
  } else {
    out.noalias() = Complex(0.0, -1.0) * (*ctx.hamiltonian * rho);
    out.noalias() += Complex(0.0, 1.0) * (rho * *ctx.hamiltonian);
  }
  if (ctx.kappa > 0.0) {
    // kappa [ a rho a^dag - (m+n)/2 rho ] acting inside each qubit block
    for (int qi = 0; qi < 2; ++qi)
      for (int qj = 0; qj < 2; ++qj) {
        auto dst = out.block(qi * nf, qj * nf, nf, nf);
        const auto src = rho.block(qi * nf, qj * nf, nf, nf);
        for (int m = 0; m < nf; ++m)
          for (int n = 0; n < nf; ++n) {
            Complex v = -0.5 * ctx.kappa * static_cast<double>(m + n) * src(m, n);
            if (m + 1 < nf && n + 1 < nf)
              v += ctx.kappa *
                   std::sqrt(static_cast<double>(m + 1) * static_cast<double>(n + 1)) *
                   src(m + 1, n + 1);
            dst(m, n) += v;
          }
      }
  }
  if (ctx.gamma1 > 0.0) {
    out.block(0, 0, nf, nf) += ctx.gamma1 * rho.block(nf, nf, nf, nf);
    out.block(nf, nf, nf, nf) -= ctx.gamma1 * rho.block(nf, nf, nf, nf);
    out.block(0, nf, nf, nf) -= 0.5 * ctx.gamma1 * rho.block(0, nf, nf, nf);
    out.block(nf, 0, nf, nf) -= 0.5 * ctx.gamma1 * rho.block(nf, 0, nf, nf);
  }
  if (ctx.gamma_phi > 0.0) {
    out.block(0, nf, nf, nf) -= 2.0 * ctx.gamma_phi * rho.block(0, nf, nf, nf);
    out.block(nf, 0, nf, nf) -= 2.0 * ctx.gamma_phi * rho.block(nf, 0, nf, nf);
  }
}

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

}  // namespace

JointState evolve_master(const JointState& state, const Operator& hamiltonian,
                         const NoiseModel& noise, double duration_us,
                         const IntegratorSettings& settings, const HilbertConfig& cfg) {
  if (duration_us < 0.0) throw std::invalid_argument("duration must be non-negative");
  const RhsContext ctx = make_rhs_context(hamiltonian, noise, cfg);
  Eigen::MatrixXcd rho = state.to_density_matrix();
  const int dim = cfg.joint_dim();
  if (rho.rows() != dim) throw DimensionError("state dimension mismatch");
  if (duration_us == 0.0) return JointState::density(std::move(rho), state.time_us);

  Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), k5(dim, dim),
      k6(dim, dim), k7(dim, dim), ytmp(dim, dim), ynew(dim, dim), err(dim, dim);

  if (settings.method == IntegratorSettings::Method::fixed_rk4) {
    const int steps = std::max(1, static_cast<int>(std::ceil(duration_us / settings.max_step_us)));
    const double h = duration_us / steps;
    for (int s = 0; s < steps; ++s) {
      lindblad_rhs(k1, rho, ctx);
      ytmp = rho + 0.5 * h * k1;
      lindblad_rhs(k2, ytmp, ctx);
      ytmp = rho + 0.5 * h * k2;
      lindblad_rhs(k3, ytmp, ctx);
      ytmp = rho + h * k3;
      lindblad_rhs(k4, ytmp, ctx);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      rho = 0.5 * (rho + rho.adjoint().eval());
    }
    JointState out = JointState::density(std::move(rho), state.time_us + duration_us);
    out.validate();
    return out;
  }

  double t = 0.0;
  double h = std::min(settings.max_step_us, duration_us);
  const double h_min = std::max(duration_us * 1e-14, 1e-300);
  bool have_k1 = false;
  while (t < duration_us) {
    h = std::min(h, duration_us - t);
    if (!have_k1) lindblad_rhs(k1, rho, ctx);
    ytmp = rho + (h * kA21) * k1;
    lindblad_rhs(k2, ytmp, ctx);
    ytmp = rho + h * (kA31 * k1 + kA32 * k2);
    lindblad_rhs(k3, ytmp, ctx);
    ytmp = rho + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    lindblad_rhs(k4, ytmp, ctx);
    ytmp = rho + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    lindblad_rhs(k5, ytmp, ctx);
    ytmp = rho + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    lindblad_rhs(k6, ytmp, ctx);
    ynew = rho + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    lindblad_rhs(k7, ynew, ctx);
    err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    const double scale =
        settings.abs_tol + settings.rel_tol * std::max(rho.cwiseAbs().maxCoeff(),
                                                       ynew.cwiseAbs().maxCoeff());
    const double err_norm = err.cwiseAbs().maxCoeff() / scale;
    if (err_norm <= 1.0) {
      t += h;
      rho = 0.5 * (ynew + ynew.adjoint().eval());
      k1 = k7;  // FSAL; symmetrization perturbs this at rounding level only
      have_k1 = true;
    } else {
      have_k1 = false;
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err_norm, 1e-12), -0.2), 0.2, 5.0);
    h = std::min(h * factor, settings.max_step_us);
    if (h < h_min && t < duration_us)
      throw StepSizeUnderflow("adaptive step size underflow in evolve_master");
  }

  JointState out = JointState::density(std::move(rho), state.time_us + duration_us);
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form damping of coherent superpositions
// ---------------------------------------------------------------------------

std::vector<CoherentComponent> damp_superposition_closed_form(
    std::vector<CoherentComponent> components, double t_us, double kappa) {
  if (t_us < 0.0) throw std::invalid_argument("duration must be non-negative");
  const double loss = -std::expm1(-kappa * t_us);  // 1 - e^{-kappa t}
  const double damp = std::exp(-0.5 * kappa * t_us);
  for (auto& c : components) {
    const Complex decoh =
        (c.ket_amp * std::conj(c.bra_amp) -
         0.5 * (std::norm(c.ket_amp) + std::norm(c.bra_amp))) *
        loss;
    c.weight *= std::exp(decoh);
    c.ket_amp *= damp;
    c.bra_amp *= damp;
  }
  return components;
}

Eigen::MatrixXcd components_to_density(const std::vector<CoherentComponent>& components,
                                       const HilbertConfig& cfg) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cfg.fock_dim, cfg.fock_dim);
  for (const auto& c : components) {
    // |a_j><a_k| with un-normalized coherent vectors so the weights carry the
    // physical overlap factors.
    StateVector ket(cfg.fock_dim), bra(cfg.fock_dim);
    ket(0) = std::exp(-0.5 * std::norm(c.ket_amp));
    bra(0) = std::exp(-0.5 * std::norm(c.bra_amp));
    for (int n = 1; n < cfg.fock_dim; ++n) {
      ket(n) = ket(n - 1) * c.ket_amp / std::sqrt(static_cast<double>(n));
      bra(n) = bra(n - 1) * c.bra_amp / std::sqrt(static_cast<double>(n));
    }
    rho += c.weight * (ket * bra.adjoint());
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Exact dispersive propagator
// ---------------------------------------------------------------------------

DispersivePropagator::DispersivePropagator(double chi, const NoiseModel& noise,
                                           const HilbertConfig& cfg)
    : chi_(chi), noise_(noise), cfg_(cfg) {
  if (chi <= 0.0) throw std::invalid_argument("chi must be positive");
  cfg.validate();
}

Eigen::MatrixXcd DispersivePropagator::apply(const Eigen::MatrixXcd& rho, double t,
                                             bool hamiltonian_on) const {
  if (t < 0.0) throw std::invalid_argument("duration must be non-negative");
  const int nf = cfg_.fock_dim;
  if (rho.rows() != 2 * nf) throw DimensionError("state dimension mismatch");
  if (t == 0.0) return rho;

  const double kappa = noise_.kappa;
  const double gamma1 = noise_.gamma1();
  const double gamma_phi = noise_.gamma_phi();
  const double chi = hamiltonian_on ? chi_ : 0.0;
  const double s_loss = -std::expm1(-kappa * t);  // 1 - e^{-kappa t}

  const auto b_gg = rho.block(0, 0, nf, nf);
  const auto b_ge = rho.block(0, nf, nf, nf);
  const auto b_eg = rho.block(nf, 0, nf, nf);
  const auto b_ee = rho.block(nf, nf, nf, nf);

  Eigen::MatrixXcd out(2 * nf, 2 * nf);

  // e->g feed from qubit relaxation: per ladder d = m - n the ee flow is a
  // scalar exp((i chi d - gamma1) tau) times the pure-loss flow, and loss
  // flows compose, so the Duhamel integral collapses to one scalar per ladder.
  Eigen::MatrixXcd gg_in = b_gg;
  if (gamma1 > 0.0) {
    std::vector<Complex> feed(2 * nf - 1);
    for (int d = -(nf - 1); d <= nf - 1; ++d)
      feed[d + nf - 1] =
          gamma1 * expm1_over(Complex(-gamma1, chi * static_cast<double>(d)), t);
    for (int m = 0; m < nf; ++m)
      for (int n = 0; n < nf; ++n) gg_in(m, n) += feed[m - n + nf - 1] * b_ee(m, n);
  }
  Eigen::MatrixXcd gg = loss_cascade(gg_in, s_loss);
  Eigen::MatrixXcd ee = loss_cascade(b_ee, s_loss);

  // S_ge = kappa (1 - e^{-(kappa + i chi) t}) / (kappa + i chi)
  const Complex z_ge = Complex(kappa, chi);
  const Complex s_ge = kappa * expm1_over(-z_ge, t);
  Eigen::MatrixXcd ge = loss_cascade(b_ge, s_ge);
  Eigen::MatrixXcd eg = loss_cascade(b_eg, std::conj(s_ge));

  const double gamma_ge = 0.5 * gamma1 + 2.0 * gamma_phi;
  const double ee_decay = std::exp(-gamma1 * t);
  const double ge_decay = std::exp(-gamma_ge * t);

  Eigen::VectorXd half_damp(nf);
  for (int n = 0; n < nf; ++n)
    half_damp(n) = std::exp(-0.5 * kappa * static_cast<double>(n) * t);
  Eigen::VectorXcd e_phase(nf);
  for (int n = 0; n < nf; ++n)
    e_phase(n) = std::exp(Complex(0.0, chi * static_cast<double>(n) * t));

  for (int m = 0; m < nf; ++m)
    for (int n = 0; n < nf; ++n) {
      const double damp = half_damp(m) * half_damp(n);
      gg(m, n) *= damp;
      ee(m, n) *= damp * ee_decay * e_phase(m) * std::conj(e_phase(n));
      ge(m, n) *= damp * ge_decay * std::conj(e_phase(n));
      eg(m, n) *= damp * ge_decay * e_phase(m);
    }

  out.block(0, 0, nf, nf) = gg;
  out.block(0, nf, nf, nf) = ge;
  out.block(nf, 0, nf, nf) = eg;
  out.block(nf, nf, nf, nf) = ee;
  return out;
}

void DispersivePropagator::advance(JointState& state, double duration_us,
                                   bool hamiltonian_on) const {
  state.promote_to_density();
  Eigen::MatrixXcd rho = apply(state.matrix(), duration_us, hamiltonian_on);
  state = JointState::density(std::move(rho), state.time_us + duration_us);
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

DiagonalTrajectoryStepper::DiagonalTrajectoryStepper(double chi, const NoiseModel& noise,
                                                     const HilbertConfig& cfg)
    : chi_(chi), noise_(noise), cfg_(cfg) {
  cfg.validate();
}

void DiagonalTrajectoryStepper::apply_jump(StateVector& psi, int channel) const {
  apply_collapse_jump(psi, channel, cfg_.fock_dim);
}

void DiagonalTrajectoryStepper::advance(StateVector& psi, double duration_us,
                                        bool hamiltonian_on, Rng& rng, JumpRecord* record,
                                        double time_origin_us) const {
  const int nf = cfg_.fock_dim;
  const double kappa = noise_.kappa;
  const double gamma1 = noise_.gamma1();
  const double gamma_phi = noise_.gamma_phi();
  const double chi = hamiltonian_on ? chi_ : 0.0;

  auto decay_rate = [&](int j) {
    const int q = j / nf;
    const int n = j % nf;
    return kappa * n + (q == 1 ? gamma1 : 0.0) + gamma_phi;
  };
  auto phase_rate = [&](int j) {
    const int q = j / nf;
    const int n = j % nf;
    return q == 1 ? chi * static_cast<double>(n) : 0.0;
  };

  double t = 0.0;
  const int dim = 2 * nf;
  while (t < duration_us) {
    const double remain = duration_us - t;
    psi.normalize();
    if (noise_.is_zero()) {
      for (int j = 0; j < dim; ++j)
        psi(j) *= std::exp(Complex(0.0, phase_rate(j) * remain));
      t = duration_us;
      break;
    }
    const double r = rng.uniform_pos();
    // squared norm after tau: sum_j w_j e^{-r_j tau}
    auto norm_sq = [&](double tau) {
      double s = 0.0;
      for (int j = 0; j < dim; ++j) s += std::norm(psi(j)) * std::exp(-decay_rate(j) * tau);
      return s;
    };
    double tau;
    if (norm_sq(remain) > r) {
      tau = remain;
    } else {
      // bisection on the monotone survival probability
      double lo = 0.0, hi = remain;
      for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(remain, 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (norm_sq(mid) > r)
          lo = mid;
        else
          hi = mid;
      }
      tau = 0.5 * (lo + hi);
    }
    for (int j = 0; j < dim; ++j)
      psi(j) *= std::exp(Complex(-0.5 * decay_rate(j), phase_rate(j)) * tau);
    t += tau;
    if (tau >= remain) break;

    // jump channel by Born weights
    double w_cav = 0.0, w_sm = 0.0, w_sz = 0.0;
    for (int j = 0; j < dim; ++j) {
      const int q = j / nf;
      const int n = j % nf;
      const double p = std::norm(psi(j));
      w_cav += kappa * n * p;
      if (q == 1) w_sm += gamma1 * p;
      w_sz += gamma_phi * p;
    }
    const double w_tot = w_cav + w_sm + w_sz;
    if (w_tot <= 0.0) throw StateInvariantError("vanishing jump weight at sampled jump time");
    const double u = rng.uniform() * w_tot;
    const int channel = (u < w_cav) ? 0 : (u < w_cav + w_sm ? 1 : 2);
    apply_jump(psi, channel);
    if (record) record->events.push_back({time_origin_us + t, channel});
  }
  psi.normalize();
}

std::pair<JointState, JumpRecord> evolve_trajectory(const JointState& state,
                                                    const Operator& hamiltonian,
                                                    const NoiseModel& noise,
                                                    double duration_us, uint64_t seed,
                                                    const HilbertConfig& cfg) {
  if (!state.is_pure()) throw DimensionError("evolve_trajectory requires a pure state");
  const RhsContext ctx = make_rhs_context(hamiltonian, noise, cfg);
  StateVector psi = state.vector();
  JumpRecord record;
  Rng rng(seed);
  const int nf = cfg.fock_dim;
  const int dim = 2 * nf;

  if (ctx.h_diagonal) {
    // Same machinery as the dispersive stepper, but with the supplied
    // diagonal. Rates are identical; only the coherent phases differ.
    const double kappa = noise.kappa;
    const double gamma1 = noise.gamma1();
    const double gamma_phi = noise.gamma_phi();
    auto decay_rate = [&](int j) {
      const int q = j / nf;
      const int n = j % nf;
      return kappa * n + (q == 1 ? gamma1 : 0.0) + gamma_phi;
    };
    double t = 0.0;
    while (t < duration_us) {
      const double remain = duration_us - t;
      psi.normalize();
      double tau = remain;
      bool jumped = false;
      if (!noise.is_zero()) {
        const double r = rng.uniform_pos();
        auto norm_sq = [&](double s) {
          double acc = 0.0;
          for (int j = 0; j < dim; ++j)
            acc += std::norm(psi(j)) * std::exp(-decay_rate(j) * s);
          return acc;
        };
        if (norm_sq(remain) <= r) {
          double lo = 0.0, hi = remain;
          for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(remain, 1.0); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (norm_sq(mid) > r)
              lo = mid;
            else
              hi = mid;
          }
          tau = 0.5 * (lo + hi);
          jumped = true;
        }
      }
      for (int j = 0; j < dim; ++j)
        psi(j) *= std::exp(Complex(-0.5 * decay_rate(j), -ctx.hdiag(j)) * tau);
      t += tau;
      if (!jumped) break;
      double w_cav = 0.0, w_sm = 0.0, w_sz = 0.0;
      for (int j = 0; j < dim; ++j) {
        const int q = j / nf;
        const int n = j % nf;
        const double p = std::norm(psi(j));
        w_cav += kappa * n * p;
        if (q == 1) w_sm += gamma1 * p;
        w_sz += gamma_phi * p;
      }
      const double w_tot = w_cav + w_sm + w_sz;
      if (w_tot <= 0.0) throw StateInvariantError("vanishing jump weight at sampled jump time");
      const double u = rng.uniform() * w_tot;
      const int channel = (u < w_cav) ? 0 : (u < w_cav + w_sm ? 1 : 2);
      apply_collapse_jump(psi, channel, nf);
      record.events.push_back({state.time_us + t, channel});
    }
    psi.normalize();
    return {JointState::pure(std::move(psi), state.time_us + duration_us), record};
  }

  // Dense effective Hamiltonian fallback: fixed-step RK4 on the unnormalized
  // drift with bisected jump localization.
  Eigen::MatrixXcd h_eff = hamiltonian;
  for (const auto& l : noise.collapse_operators(cfg))
    h_eff -= Complex(0.0, 0.5) * (l.adjoint() * l);
  const auto collapse = noise.collapse_operators(cfg);
  auto drift = [&](const StateVector& v) { return (Complex(0.0, -1.0) * (h_eff * v)).eval(); };
  double hscale = h_eff.cwiseAbs().maxCoeff();
  double h = std::min(duration_us, 0.05 / std::max(hscale, 1e-9));
  double t = 0.0;
  double r = rng.uniform_pos();
  while (t < duration_us) {
    const double step = std::min(h, duration_us - t);
    StateVector k1 = drift(psi);
    StateVector k2 = drift((psi + 0.5 * step * k1).eval());
    StateVector k3 = drift((psi + 0.5 * step * k2).eval());
    StateVector k4 = drift((psi + step * k3).eval());
    StateVector next = psi + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next.squaredNorm() > r) {
      psi = next;
      t += step;
      continue;
    }
    // jump inside the step: shrink until localized, then fire
    double lo = 0.0, hi = step;
    StateVector at_lo = psi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      StateVector k1m = drift(at_lo);
      StateVector k2m = drift((at_lo + 0.5 * (mid - lo) * k1m).eval());
      StateVector k3m = drift((at_lo + 0.5 * (mid - lo) * k2m).eval());
      StateVector k4m = drift((at_lo + (mid - lo) * k3m).eval());
      StateVector at_mid = at_lo + ((mid - lo) / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
      if (at_mid.squaredNorm() > r) {
        lo = mid;
        at_lo = at_mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-12 * std::max(duration_us, 1.0)) break;
    }
    psi = at_lo;
    t += lo;
    std::vector<double> weights(collapse.size());
    double w_tot = 0.0;
    for (size_t k = 0; k < collapse.size(); ++k) {
      weights[k] = (collapse[k] * psi).squaredNorm();
      w_tot += weights[k];
    }
    if (w_tot <= 0.0) throw StateInvariantError("vanishing jump weight at sampled jump time");
    double u = rng.uniform() * w_tot;
    size_t channel = 0;
    for (; channel + 1 < weights.size(); ++channel) {
      if (u < weights[channel]) break;
      u -= weights[channel];
    }
    psi = collapse[channel] * psi;
    psi.normalize();
    record.events.push_back({state.time_us + t, static_cast<int>(channel)});
    r = rng.uniform_pos();
  }
  psi.normalize();
  return {JointState::pure(std::move(psi), state.time_us + duration_us), record};
}

}  // namespace catqec
