#include "pbc/particle_problem.hpp"

#include "pbc/errors.hpp"

namespace pbc {

ParticleProblem::ParticleProblem(ParticleField init, TimeGrid grid,
                                 std::function<double(double)> chi,
                                 std::function<double(double)> y_d, double nu, double misfit_lo,
                                 double misfit_hi, double blowup_cap)
    : init_(std::move(init)),
      grid_(grid),
      chi_(std::move(chi)),
      y_d_(std::move(y_d)),
      nu_(nu),
      misfit_lo_(misfit_lo),
      misfit_hi_(misfit_hi),
      blowup_cap_(blowup_cap) {
  init_.validate();
  grid_.validate();
}

double ParticleProblem::misfit(const ControlFunction& u) {
  state_ = solve_forward(init_, u, grid_, chi_, nu_, blowup_cap_);
  return terminal_misfit(state_->final_state(), y_d_, misfit_lo_, misfit_hi_);
}

std::vector<double> ParticleProblem::adjoint_source() {
  const StateTrajectory& traj = state();
  const AdjointTrajectory adj = solve_adjoint(traj, y_d_, blowup_cap_);
  return apply_B_star(adj, traj);
}

const StateTrajectory& ParticleProblem::state() const {
  if (!state_) throw InvalidArgument("no state solved yet");
  return *state_;
}

}  // namespace pbc
