#include <doctest.h>

#include "catqec/gates.hpp"
#include "catqec/states.hpp"

using namespace catqec;

namespace {
const double kChi = 2.0 * kPi * 40.0;
const HilbertConfig kCfg{40};
}  // namespace

TEST_CASE("conditional phase unitary") {
  const StateVector a = coherent_state(1.4, kCfg);

  SUBCASE("pi/chi wait flips the excited branch") {
    const Operator u = conditional_phase_unitary(kPi / kChi, kChi, kCfg);
    const StateVector out_e = u * tensor_state({0.0, 1.0}, a);
    CHECK(std::norm(tensor_state({0.0, 1.0}, coherent_state(-1.4, kCfg)).dot(out_e)) >=
          1.0 - 1e-10);
    const StateVector in_g = tensor_state({1.0, 0.0}, a);
    CHECK((u * in_g - in_g).norm() == 0.0);
  }

  SUBCASE("pi/(2 chi) wait rotates by i") {
    const Operator u = conditional_phase_unitary(kPi / (2.0 * kChi), kChi, kCfg);
    const StateVector out_e = u * tensor_state({0.0, 1.0}, a);
    CHECK(std::norm(tensor_state({0.0, 1.0}, coherent_state(Complex(0.0, 1.4), kCfg))
                        .dot(out_e)) >= 1.0 - 1e-10);
  }

  SUBCASE("t = 0 is the identity") {
    CHECK((conditional_phase_unitary(0.0, kChi, kCfg) - joint_identity(kCfg))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  SUBCASE("additive in time") {
    const Operator u1 = conditional_phase_unitary(0.003, kChi, kCfg);
    const Operator u2 = conditional_phase_unitary(0.0045, kChi, kCfg);
    const Operator u12 = conditional_phase_unitary(0.0075, kChi, kCfg);
    CHECK((u1 * u2 - u12).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("selective rotation unitary") {
  SUBCASE("half turn on the vacuum block") {
    const Operator u = selective_rotation_unitary(kPi, 0.0, kCfg);
    StateVector g0 = StateVector::Zero(kCfg.joint_dim());
    g0(0) = 1.0;
    const StateVector out = u * g0;
    StateVector e0 = StateVector::Zero(kCfg.joint_dim());
    e0(kCfg.fock_dim) = 1.0;
    CHECK(std::norm(e0.dot(out)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("non-vacuum Fock states are untouched") {
    const Operator u = selective_rotation_unitary(1.234, 0.77, kCfg);
    StateVector g3 = StateVector::Zero(kCfg.joint_dim());
    g3(3) = 1.0;
    CHECK((u * g3 - g3).norm() == 0.0);
  }

  SUBCASE("2 pi rotation is -1 on the vacuum block only") {
    const Operator u = selective_rotation_unitary(2.0 * kPi, 0.4, kCfg);
    StateVector g0 = StateVector::Zero(kCfg.joint_dim());
    g0(0) = 1.0;
    CHECK((u * g0 + g0).norm() < 1e-12);
    StateVector e5 = StateVector::Zero(kCfg.joint_dim());
    e5(kCfg.fock_dim + 5) = 1.0;
    CHECK((u * e5 - e5).norm() == 0.0);
  }

  SUBCASE("unitary and inverse") {
    const Operator u = selective_rotation_unitary(0.9, -1.3, kCfg);
    CHECK((u.adjoint() * u - joint_identity(kCfg)).cwiseAbs().maxCoeff() < 1e-12);
    const Operator v = selective_rotation_unitary(-0.9, -1.3, kCfg);
    CHECK((u * v - joint_identity(kCfg)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reset channel") {
  const HilbertConfig cfg{20};
  const StateVector ca = coherent_state(1.0, cfg);

  SUBCASE("excited product state") {
    JointState s = JointState::pure(tensor_state({0.0, 1.0}, ca));
    const JointState out = reset_channel(s);
    const Eigen::MatrixXcd rq = partial_trace(out, Keep::qubit);
    CHECK(rq(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::MatrixXcd rc = partial_trace(out, Keep::cavity);
    CHECK((rc - ca * ca.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("idempotent") {
    JointState s = JointState::pure(
        (tensor_state({1.0, 0.0}, ca) + tensor_state({0.0, 1.0}, coherent_state(-1.0, cfg))) /
        std::sqrt(2.0));
    const JointState once = reset_channel(s);
    const JointState twice = reset_channel(once);
    CHECK(trace_distance(once.matrix(), twice.matrix()) < 1e-13);
  }

  SUBCASE("entangled input leaves the cavity mixture") {
    const StateVector cb = coherent_state(Complex(0.0, 1.0), cfg);
    JointState s = JointState::pure(
        (tensor_state({1.0, 0.0}, ca) + tensor_state({0.0, 1.0}, cb)) / std::sqrt(2.0));
    const JointState out = reset_channel(s);
    const Eigen::MatrixXcd expect =
        0.5 * (ca * ca.adjoint()) + 0.5 * (cb * cb.adjoint());
    CHECK(trace_distance(partial_trace(out, Keep::cavity), expect) < 1e-12);
    CHECK(partial_trace(out, Keep::qubit)(0, 0).real() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("imperfect reset leaves weight in |e>") {
    JointState s = JointState::pure(tensor_state({0.0, 1.0}, ca));
    const JointState out = reset_channel(s, 0.25);
    CHECK(partial_trace(out, Keep::qubit)(1, 1).real() ==
          doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("sequence execution") {
  const HilbertConfig cfg{40};
  GateModel noiseless;
  noiseless.mode = GateModel::Mode::noiseless_ideal;

  SUBCASE("empty sequence is the identity") {
    const JointState s = JointState::pure(tensor_state({1.0, 0.0}, coherent_state(0.8, cfg)));
    const JointState out =
        execute_sequence(s, PulseSequence{}, NoiseModel::none(), kChi, noiseless, cfg);
    CHECK(fidelity(out, s.vector()) == doctest::Approx(1.0));
  }

  SUBCASE("displacement and its inverse") {
    PulseSequence seq;
    seq.steps = {GateStep::displace(Complex(1.1, -0.4)),
                 GateStep::displace(Complex(-1.1, 0.4))};
    const StateVector in = tensor_state({0.6, 0.8}, coherent_state(0.5, cfg));
    const JointState out =
        execute_sequence(JointState::pure(in), seq, NoiseModel::none(), kChi, noiseless, cfg);
    CHECK(fidelity(out, in) >= 1.0 - 1e-10);
  }

  SUBCASE("unitary-only sequences preserve purity") {
    PulseSequence seq;
    seq.steps = {GateStep::displace(Complex(0.9, 0.0)),
                 GateStep::conditional_wait(kPi / (2.0 * kChi)),
                 GateStep::selective_rotation(kPi / 2.0, 0.3, 0.054)};
    const StateVector in = tensor_state({0.6, 0.8}, coherent_state(0.0, cfg));
    const JointState out =
        execute_sequence(JointState::pure(in), seq, NoiseModel::none(), kChi, noiseless, cfg);
    CHECK(out.is_pure());
    CHECK(out.purity() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.time_us == doctest::Approx(kPi / (2.0 * kChi) + 0.054));
  }

  SUBCASE("zero-noise ideal_with_noise equals noiseless_ideal") {
    PulseSequence seq;
    seq.steps = {GateStep::displace(Complex(0.7, 0.2)),
                 GateStep::conditional_wait(kPi / kChi),
                 GateStep::selective_rotation(-kPi / 2.0, 1.1, 0.054),
                 GateStep::displace(Complex(-0.3, 0.6)),
                 GateStep::reset()};
    GateModel with_noise;
    with_noise.mode = GateModel::Mode::ideal_with_noise;
    const StateVector in = tensor_state({0.8, 0.6}, coherent_state(0.4, cfg));
    const JointState a =
        execute_sequence(JointState::pure(in), seq, NoiseModel::none(), kChi, noiseless, cfg);
    const JointState b =
        execute_sequence(JointState::pure(in), seq, NoiseModel::none(), kChi, with_noise, cfg);
    CHECK(trace_distance(a.to_density_matrix(), b.to_density_matrix()) < 1e-10);
  }

  SUBCASE("exact propagator and integrator agree through the executor") {
    PulseSequence seq;
    seq.steps = {GateStep::displace(Complex(0.8, 0.0)),
                 GateStep::conditional_wait(kPi / (2.0 * kChi)),
                 GateStep::selective_rotation(kPi, 0.5, 0.054)};
    const NoiseModel noise = NoiseModel::from_times(2000.0, 100.0, 100.0);
    GateModel model;
    const HilbertConfig small{14};
    const StateVector in = tensor_state({0.6, 0.8}, coherent_state(0.5, small));
    ExecutionOptions exact;
    exact.use_exact_dispersive = true;
    ExecutionOptions generic;
    generic.use_exact_dispersive = false;
    generic.integrator.rel_tol = 1e-11;
    generic.integrator.abs_tol = 1e-13;
    const JointState a =
        execute_sequence(JointState::pure(in), seq, noise, kChi, model, small, exact);
    const JointState b =
        execute_sequence(JointState::pure(in), seq, noise, kChi, model, small, generic);
    CHECK(trace_distance(a.matrix(), b.matrix()) < 1e-8);
  }

  SUBCASE("trajectory executor matches the density executor for unitary steps") {
    PulseSequence seq;
    seq.steps = {GateStep::displace(Complex(0.5, 0.5)),
                 GateStep::conditional_wait(kPi / (2.0 * kChi)),
                 GateStep::selective_rotation(kPi / 2.0, 0.0, 0.054)};
    const StateVector in = tensor_state({1.0, 0.0}, coherent_state(0.0, cfg));
    const JointState a =
        execute_sequence(JointState::pure(in), seq, NoiseModel::none(), kChi, noiseless, cfg);
    Rng rng(5);
    const StateVector b = execute_sequence_trajectory(in, seq, NoiseModel::none(), kChi,
                                                      noiseless, cfg, rng);
    CHECK(std::norm(a.vector().dot(b)) >= 1.0 - 1e-12);
  }
}

TEST_CASE("pulse sequence text form") {
  PulseSequence seq;
  seq.steps = {GateStep::displace(Complex(2.0, -1.5)), GateStep::conditional_wait(0.00625),
               GateStep::selective_rotation(-kPi, 8.0, 0.054), GateStep::reset()};
  const std::string text = seq.to_text();
  CHECK(text == "D 2,-1.5\nWAIT 0.00625\nX0 -3.14159265359,8,0.054\nRESET\n");

  const PulseSequence back = PulseSequence::from_text(text);
  REQUIRE(back.steps.size() == 4);
  CHECK(back.steps[0].amplitude == Complex(2.0, -1.5));
  CHECK(back.steps[1].duration_us == doctest::Approx(0.00625));
  CHECK(back.steps[2].eta == doctest::Approx(8.0));
  CHECK(back.steps[3].kind == GateStep::Kind::reset);

  CHECK_THROWS(PulseSequence::from_text("FROB 1,2\n"));
  CHECK_THROWS(PulseSequence::from_text("D xyz\n"));
}
