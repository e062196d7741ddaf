#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "qembed/qubitmap.hpp"
#include "qembed/shots.hpp"

namespace qembed {

/// Drops shots whose eigenvalue for any symmetry differs from the expected
/// one. Each symmetry must be diagonal in the table's measurement basis.
/// Throws StarvationError when nothing survives.
ShotTable pmsv_filter(const ShotTable& table, const std::vector<Symmetry>& symmetries);

/// Same filter on a probability vector: violating outcomes are zeroed and
/// the rest renormalized. `kept` receives the retained probability mass.
Distribution pmsv_filter(const Distribution& dist, const std::vector<PauliOp>& basis,
                         const std::vector<Symmetry>& symmetries, double* kept = nullptr);

/// Readout transfer matrix over the whole register: M(i, j) = p(measure i |
/// prepare j), columns sum to one.
struct SpamProfile {
  int n_qubits = 0;
  Eigen::MatrixXd transfer;
  Eigen::MatrixXd inverse;  // pseudo-inverse when M is singular
  double condition_number = 1.0;
  std::int64_t shots_per_state = 0;
  bool pseudo_inverse = false;
};

/// Builds the inverse from a given transfer matrix; falls back to the
/// pseudo-inverse with a warning when M is singular.
SpamProfile spam_profile(const Eigen::MatrixXd& transfer, std::int64_t shots_per_state = 0);

/// Prepares every basis state with X gates, measures in Z under `noise` and
/// fills M column by column (k <= 4 qubits).
SpamProfile spam_calibrate(const std::optional<NoiseModel>& noise, int n_qubits,
                           std::int64_t shots_per_state, std::uint64_t seed);

/// p = M^-1 f with negative entries clipped to zero, then renormalized.
Distribution spam_correct(const Distribution& dist, const SpamProfile& profile);
Distribution spam_correct(const ShotTable& table, const SpamProfile& profile);

}  // namespace qembed
