#include <doctest.h>

#include "catqec/rng.hpp"
#include "catqec/states.hpp"

using namespace catqec;

namespace {

const HilbertConfig kCfg{70};

LogicalQubit random_logical(Rng& rng) {
  const double theta = std::acos(2.0 * rng.uniform() - 1.0);
  const double phi = 2.0 * kPi * rng.uniform();
  return LogicalQubit::from_bloch(theta, phi);
}

double mean_photon(const StateVector& v) {
  double n = 0.0;
  for (int k = 0; k < v.size(); ++k) n += k * std::norm(v(k));
  return n;
}

}  // namespace

TEST_CASE("coherent states") {
  SUBCASE("alpha = 0 is the vacuum") {
    const StateVector v = coherent_state(0.0, kCfg);
    CHECK(std::abs(v(0) - 1.0) < 1e-15);
    CHECK(v.tail(kCfg.fock_dim - 1).norm() == 0.0);
  }

  SUBCASE("mean photon number equals |alpha|^2") {
    CHECK(mean_photon(coherent_state(2.0, kCfg)) == doctest::Approx(4.0).epsilon(1e-8));
  }

  SUBCASE("overlaps match the closed form") {
    const StateVector p = coherent_state(2.0, kCfg);
    const StateVector m = coherent_state(-2.0, kCfg);
    CHECK(std::abs(p.dot(m)) == doctest::Approx(std::exp(-8.0)).epsilon(1e-7));
    CHECK(std::abs(std::abs(coherent_overlap(2.0, -2.0)) - std::exp(-8.0)) < 1e-18);
  }
}

TEST_CASE("cat states") {
  SUBCASE("even cat lives on even Fock states") {
    const StateVector c = cat_state(2.0, +1, kCfg);
    for (int n = 1; n < kCfg.fock_dim; n += 2) CHECK(std::abs(c(n)) == 0.0);
  }
  SUBCASE("odd cat lives on odd Fock states") {
    const StateVector c = cat_state(2.0, -1, kCfg);
    for (int n = 0; n < kCfg.fock_dim; n += 2) CHECK(std::abs(c(n)) == 0.0);
  }
  SUBCASE("opposite-parity cats are orthogonal") {
    CHECK(std::abs(cat_state(2.0, +1, kCfg).dot(cat_state(2.0, -1, kCfg))) == 0.0);
  }
  SUBCASE("odd cat degenerates at alpha = 0") {
    CHECK_THROWS_AS(cat_state(0.0, -1, kCfg), DegenerateCat);
  }
}

TEST_CASE("logical family") {
  const CodeParams code(2.0);

  SUBCASE("n=0 with c_e=0 is the even cat") {
    const StateVector v = logical_state(JumpIndex(0), code, LogicalQubit(1.0, 0.0), kCfg);
    CHECK(std::abs(std::abs(v.dot(cat_state(2.0, +1, kCfg))) - 1.0) < 1e-12);
  }

  SUBCASE("exact parity eigenstates") {
    Rng rng(11);
    for (int n = 0; n < 4; ++n) {
      for (int rep = 0; rep < 4; ++rep) {
        const StateVector v = logical_state(JumpIndex(n), code, random_logical(rng), kCfg);
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        double defect = 0.0;
        for (int k = 0; k < kCfg.fock_dim; ++k) {
          const double pk = (k % 2 == 0) ? 1.0 : -1.0;
          defect = std::max(defect, std::abs(pk * v(k) - sign * v(k)));
        }
        CHECK(defect == 0.0);
      }
    }
  }

  SUBCASE("quasi-orthogonality scale of psi0 and psi2") {
    const LogicalQubit q(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    const StateVector v0 = logical_state(JumpIndex(0), code, q, kCfg);
    const StateVector v2 = logical_state(JumpIndex(2), code, q, kCfg);
    const double overlap = std::abs(v0.dot(v2));
    CHECK(overlap < 0.05);
    CHECK(overlap == doctest::Approx(0.018).epsilon(0.25));
  }
}

TEST_CASE("jump closure") {
  Rng rng(5);
  for (const double a : {1.5, 2.0, 3.0}) {
    const CodeParams code(a);
    for (int rep = 0; rep < 20; ++rep) {
      const LogicalQubit q = random_logical(rng);
      JumpIndex n(rep % 4);
      const auto [state, next] = apply_photon_loss(n, code, q, kCfg);
      CHECK(next.n == (n.n + 1) % 4);
      const StateVector expect = logical_state(next, code, q, kCfg);
      CHECK(std::norm(expect.dot(state)) >= 1.0 - 1e-10);
    }
  }
}

TEST_CASE("four losses cycle back to the start") {
  const CodeParams code(2.0);
  const LogicalQubit q(0.6, 0.8);
  StateVector v = logical_state(JumpIndex(0), code, q, kCfg);
  JumpIndex n(0);
  for (int k = 0; k < 4; ++k) {
    auto [next_state, next] = apply_photon_loss(n, code, q, kCfg);
    v = next_state;
    n = next;
  }
  CHECK(n.n == 0);
  const StateVector orig = logical_state(JumpIndex(0), code, q, kCfg);
  CHECK(std::norm(orig.dot(v)) >= 1.0 - 1e-10);
}

TEST_CASE("photon loss on the plain even cat") {
  // a (|a> + |-a>) ~ a (|a> - |-a>)
  const CodeParams code(2.0);
  const auto [state, next] = apply_photon_loss(JumpIndex(0), code, LogicalQubit(1.0, 0.0), kCfg);
  CHECK(next.n == 1);
  CHECK(std::norm(state.dot(cat_state(2.0, -1, kCfg))) >= 1.0 - 1e-10);
}

TEST_CASE("no-jump damping") {
  const CodeParams code(2.0);
  const LogicalQubit q(0.8, Complex(0.0, 0.6));

  SUBCASE("t = 0 is the identity") {
    const StateVector v = no_jump_damp(JumpIndex(0), code, q, 0.0, 1e-3, kCfg);
    const StateVector ref = logical_state(JumpIndex(0), code, q, kCfg);
    CHECK((v - ref).norm() == 0.0);
  }

  SUBCASE("kappa t = 2 ln 2 halves the amplitude") {
    const double kappa = 5e-4;
    const double t = 2.0 * std::log(2.0) / kappa;
    const StateVector v = no_jump_damp(JumpIndex(0), code, q, t, kappa, kCfg);
    const StateVector ref = logical_state(JumpIndex(0), CodeParams(1.0), q, kCfg);
    CHECK(std::norm(ref.dot(v)) >= 1.0 - 1e-12);
  }

  SUBCASE("matches the non-Hermitian no-jump propagator") {
    const double kappa_t = 0.1;
    for (int n = 0; n < 4; ++n) {
      const StateVector v = logical_state(JumpIndex(n), code, q, kCfg);
      StateVector propagated(kCfg.fock_dim);
      for (int k = 0; k < kCfg.fock_dim; ++k)
        propagated(k) = v(k) * std::exp(-0.5 * kappa_t * k);
      propagated.normalize();
      const StateVector analytic = no_jump_damp(JumpIndex(n), code, q, kappa_t, 1.0, kCfg);
      CHECK(std::norm(analytic.dot(propagated)) >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("damping and jumps commute at the state level") {
  const CodeParams code(2.0);
  Rng rng(23);
  const double kappa = 1.0, t = 0.12;
  for (int rep = 0; rep < 6; ++rep) {
    const LogicalQubit q = random_logical(rng);
    const JumpIndex n(rep % 4);
    // damp then jump
    const CodeParams damped(code.alpha * std::exp(-0.5 * kappa * t));
    const auto [a_then, idx1] = apply_photon_loss(n, damped, q, kCfg);
    // jump then damp
    const StateVector b_then = no_jump_damp(n.next(), code, q, t, kappa, kCfg);
    CHECK(idx1.n == n.next().n);
    CHECK(std::norm(b_then.dot(a_then)) >= 1.0 - 1e-9);
  }
}

TEST_CASE("overlap matrix of the coherent components") {
  const CodeParams code(2.0);
  const Eigen::Matrix4cd g = overlap_matrix(code, kCfg);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(g(i, i) - 1.0) < 1e-15);
  // order (a, -a, ia, -ia)
  CHECK(std::abs(g(0, 1)) == doctest::Approx(std::exp(-8.0)).epsilon(1e-10));
  CHECK(std::abs(g(0, 2)) == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
  CHECK((g - g.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("code parameter bookkeeping") {
  const CodeParams code = CodeParams::from_nbar(4.0);
  CHECK(code.alpha.real() == doctest::Approx(2.0));
  CHECK(code.nbar() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK((code.beta() / code.alpha - Complex(-1.0, 1.0)) == Complex(0.0, 0.0));

  CHECK_THROWS_AS(LogicalQubit(1.0, 1.0), std::invalid_argument);
}
