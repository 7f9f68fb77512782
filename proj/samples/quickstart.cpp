// Builds a hiding state, compares joint and semilocal fidelities, and
// samples the two-stage protocol.

#include <cstdio>

#include "dirhide/fidelity.hpp"
#include "dirhide/montecarlo.hpp"
#include "dirhide/semilocal.hpp"
#include "dirhide/states.hpp"

int main() {
  using namespace dirhide;
  const int n = 12;
  const double p = states::balanced_p(n);
  const auto rho = states::hiding_state({n, p});
  std::printf("N = %d, p = %.4f, single-spin Bloch length = %.2e\n", n, p, states::single_particle_bloch(rho));
  std::printf("joint:     F = %.6f\n", fidelity::fidelity_from_delta(fidelity::optimal_joint_delta(rho)));

  const auto best = semilocal::optimize_split(n);
  std::printf("semilocal: F = %.6f at N0 = %d, f = %s (p = 1/2)\n", fidelity::fidelity_from_delta(best.delta),
              best.first_stage, best.guess.str().c_str());

  montecarlo::RunConfig cfg{n, best.first_stage, 200000, 7, montecarlo::Protocol::semilocal, 1};
  const auto mc = montecarlo::simulate_semilocal(cfg);
  std::printf("sampled:   F = %.4f +- %.4f, p_S = %.4f\n", mc.fidelity, mc.std_error, mc.p_success);
  return 0;
}
