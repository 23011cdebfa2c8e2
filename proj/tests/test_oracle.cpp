#include <doctest.h>

#include "heom.hpp"
#include "helpers.hpp"
#include "observables.hpp"
#include "oracle.hpp"

using namespace heom2q;
using namespace heom2q::test;

TEST_CASE("unitary propagation matches exact diagonalization for static H") {
  ModelSpec spec = fig2_baseline();
  spec.J = 0.8;
  const CMatrix rho0 = initial_state(state_of(StateKind::phi_plus, 0.3));
  const Trajectory tr = unitary_propagate(spec, rho0, 1e-4, 1.0, 1000);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(hamiltonian_at(spec, 0.0)));
  double worst = 0.0;
  for (const auto& s : tr) {
    const Eigen::VectorXcd ph = (es.eigenvalues() * cplx(0.0, -s.tau)).array().exp();
    const Eigen::MatrixXcd u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    worst = std::max(worst, (u * to_eigen(rho0) * u.adjoint() - to_eigen(s.rho)).cwiseAbs().maxCoeff());
  }
  CHECK(tr.size() == 11);
  CHECK(worst < 1e-10);
}

TEST_CASE("driven unitary propagation conserves purity and concurrence of one-excitation dark states") {
  ModelSpec spec = fig2_baseline();
  spec.drive1.omegaD = 2.0;
  spec.drive2.omegaD = 3.0;
  const Trajectory tr = unitary_propagate(spec, initial_state(state_of(StateKind::phi_plus)), 1e-3, 3.0, 100);
  for (const auto& s : tr) {
    CHECK(purity(s.rho) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(concurrence(s.rho) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("matched pseudomode reproduces the bath correlation function") {
  for (double R : {0.1, 1.0, 5.0}) {
    ModelSpec spec = fig2_baseline();
    spec.bath.R = R;
    const PseudomodeSpec pm = PseudomodeSpec::matched(spec, 16);
    for (double tau : {0.0, 0.3, 1.0, 4.0}) CHECK(std::abs(pm.correlation(tau) - correlation(spec, tau)) < 1e-14);
    // The hierarchy's own effective amplitude gives the same mode.
    const PseudomodeSpec pm2 = PseudomodeSpec::matched(spec, 16, make_space(spec, 4).effective_correlation_amplitude());
    CHECK(pm2.g == doctest::Approx(pm.g));
  }
}

TEST_CASE("partial trace over the mode") {
  std::mt19937_64 rng(8);
  const CMatrix sys = random_density(rng, 4, 2);
  const CMatrix mode = random_density(rng, 5, 3);
  CHECK(max_abs(partial_trace_mode(kron(sys, mode), 5) - sys) < 1e-14);
}

TEST_CASE("HEOM and the pseudomode dilation agree at weak coupling") {
  ModelSpec spec = fig2_baseline();
  spec.bath.R = 0.1;
  const CMatrix rho0 = initial_state(state_of(StateKind::phi_plus));
  const HierarchySpace space = make_space(spec, 10);
  HierarchyState st = init_hierarchy(rho0, space);
  const Trajectory heom = evolve(st, spec, space, 1e-3, 1.0, 100);
  const PseudomodeResult pm =
      pseudomode_propagate(spec, PseudomodeSpec::matched(spec, 8, space.effective_correlation_amplitude()), rho0, 1e-3, 1.0, 100);
  CHECK(pm.cutoff_adequate());
  const ComparisonReport rep = compare(heom, pm.trajectory);
  CHECK(rep.samples == 11);
  CHECK(rep.max_trace_distance < 1e-8);
}

TEST_CASE("pseudomode dilation converges in the Fock cutoff") {
  ModelSpec spec = fig2_baseline();
  const CMatrix rho0 = initial_state(state_of(StateKind::phi_plus));
  const PseudomodeResult a = pseudomode_propagate(spec, PseudomodeSpec::matched(spec, 12), rho0, 1e-3, 1.0, 100);
  const PseudomodeResult b = pseudomode_propagate(spec, PseudomodeSpec::matched(spec, 16), rho0, 1e-3, 1.0, 100);
  CHECK(compare(a.trajectory, b.trajectory).max_trace_distance < 1e-8);
  CHECK(b.max_top_fock_population < a.max_top_fock_population);

  double trace_err = 0.0;
  pseudomode_propagate(spec, PseudomodeSpec::matched(spec, 6), rho0, 1e-3, 0.5, 50,
                       [&](double, const CMatrix& full) { trace_err = std::max(trace_err, std::abs(full.trace() - 1.0)); });
  CHECK(trace_err < 1e-10);
  CHECK_THROWS(pseudomode_propagate(spec, PseudomodeSpec::matched(spec, 1), rho0, 1e-3, 0.5));
}

TEST_CASE("compare rejects mismatched sample grids") {
  const CMatrix rho = initial_state(state_of(StateKind::phi_plus));
  const Trajectory a{{0.0, rho}, {0.1, rho}};
  const Trajectory b{{0.0, rho}, {0.2, rho}};
  CHECK_THROWS_AS(compare(a, b), std::invalid_argument);
  CHECK_THROWS_AS(compare(a, Trajectory{{0.0, rho}}), std::invalid_argument);
  CHECK(compare(a, a).max_trace_distance == 0.0);
}
