#pragma once

#include <functional>
#include <optional>

#include "pbc/adjoint.hpp"
#include "pbc/control.hpp"
#include "pbc/forward.hpp"

namespace pbc {

/// Reduced problem solved with the particle state and adjoint.
class ParticleProblem : public ReducedProblem {
 public:
  /// The misfit is integrated over the particle supports joined with [misfit_lo, misfit_hi].
  ParticleProblem(ParticleField init, TimeGrid grid, std::function<double(double)> chi,
                  std::function<double(double)> y_d, double nu, double misfit_lo,
                  double misfit_hi, double blowup_cap = kDefaultBlowUpCap);

  const TimeGrid& grid() const override { return grid_; }
  double misfit(const ControlFunction& u) override;
  std::vector<double> adjoint_source() override;

  /// State for the control last passed to misfit.
  const StateTrajectory& state() const;

 private:
  ParticleField init_;
  TimeGrid grid_;
  std::function<double(double)> chi_, y_d_;
  double nu_;
  double misfit_lo_, misfit_hi_;
  double blowup_cap_;
  std::optional<StateTrajectory> state_;
};

}  // namespace pbc
