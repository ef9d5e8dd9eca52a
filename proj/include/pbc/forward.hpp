#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "pbc/control.hpp"
#include "pbc/particles.hpp"

namespace pbc {

inline constexpr double kDefaultBlowUpCap = 1e6;

/// Particle states y_h(t_k), k = 0..N_t, on one set of particle paths.
struct StateTrajectory {
  TimeGrid grid;
  std::vector<ParticleField> snapshots;
  ControlFunction controls_used;
  /// <chi, delta_j>_H at every time node, kept for B* p.
  std::vector<std::vector<double>> loads;
  double nu = 1.0;

  const ParticleField& final_state() const { return snapshots.back(); }
};

/// Integrates y_t + y y_x - nu y_xx = u(t) chi(x) with particles moving along
/// the characteristics dPhi/dt = y_h(Phi).
///
/// Per step: sample y_h at the particles, move them by explicit Euler, update
/// the weights with the Jacobian, reassemble, then solve
///   (M^{k+1} + dt nu S^{k+1}) alpha^{k+1}
///     = M^k alpha^k - dt r^k + dt/2 (u_k b^k + u_{k+1} b^{k+1}),
/// where r^k_j = <(y_h - y_h(Phi_j)) d_x y_h, delta_j> is the convection seen
/// by the moving test functions and b = <chi, delta_j>.
///
/// Throws BlowUp when max |y_h| at the particles exceeds `blowup_cap`, and
/// ParticleCrossing / WeightCollapse / SingularMass from the step.
StateTrajectory solve_forward(const ParticleField& init, const ControlFunction& u,
                              const TimeGrid& grid, const std::function<double(double)>& chi,
                              double nu, double blowup_cap = kDefaultBlowUpCap);

/// int y_h dx = sum_i alpha_i.
double total_mass(const ParticleField& field);

/// |int y_h(T) - int y_h(0) - int_0^T u dt * int chi dx|.
double mass_balance_defect(const StateTrajectory& traj, const ControlFunction& u,
                           const std::function<double(double)>& chi);

/// 1/2 ||y_h(T) - y_d||_H^2, integrated over the particle supports joined with [lo, hi].
double terminal_misfit(const ParticleField& final_state, const std::function<double(double)>& y_d,
                       double lo, double hi);

/// Misfit plus (sigma / 2) ||u||^2_{H1(0,T)}.
double cost(const StateTrajectory& traj, const ControlFunction& u,
            const std::function<double(double)>& y_d, double sigma, double lo, double hi);

/// Snapshot CSV (`t,i,phi,omega,<amplitude_name>`) every `stride` steps plus the last one.
void write_trajectory_csv(std::ostream& out, const TimeGrid& grid,
                          const std::vector<ParticleField>& snapshots, int stride = 1,
                          const char* amplitude_name = "alpha");

}  // namespace pbc
