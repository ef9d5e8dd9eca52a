#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pbc/forward.hpp"

namespace pbc {

/// Adjoint amplitudes beta_i(t_k) on the particle paths of a state trajectory.
struct AdjointTrajectory {
  TimeGrid grid;
  std::vector<ParticleField> snapshots;
};

/// Backward march of p_t + y p_x + nu p_xx = 0 with p(T) = y_d - y(T),
/// projected onto the particles of `state`:
///   M^N beta^N = <y_d, delta_j> - M^N alpha^N,
///   (M^k + dt nu S^k) beta^k = M^{k+1} beta^{k+1} + dt r^{k+1},
/// with r_j = <(y_h - y_h(Phi_j)) d_x p_h, delta_j> as in the state step.
AdjointTrajectory solve_adjoint(const StateTrajectory& state,
                                const std::function<double(double)>& y_d,
                                double blowup_cap = kDefaultBlowUpCap);

/// Same march with the terminal right-hand side <p(T), delta_j> given directly.
AdjointTrajectory solve_adjoint_terminal(const StateTrajectory& state,
                                         std::span<const double> terminal_rhs,
                                         double blowup_cap = kDefaultBlowUpCap);

/// w(t_k) = int chi p_h(t_k) dx with chi evaluated on the adjoint's own particles.
std::vector<double> apply_B_star(const AdjointTrajectory& adj,
                                 const std::function<double(double)>& chi);

/// Same quantity from the load vectors stored in the state trajectory.
std::vector<double> apply_B_star(const AdjointTrajectory& adj, const StateTrajectory& state);

}  // namespace pbc
