#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qembed/circuit.hpp"
#include "qembed/qubitmap.hpp"

namespace qembed {

/// Independent stream seed from a master seed and a fixed counter path.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

struct ReadoutError {
  double p1_given_0 = 0.0;
  double p0_given_1 = 0.0;
};

/// Readout flips per qubit plus depolarizing noise after every gate: with
/// probability depol_1q (depol_2q for CNOT) a uniformly random non-identity
/// Pauli on the gate's qubits.
struct NoiseModel {
  std::string name = "custom";
  std::vector<ReadoutError> readout;  // one entry broadcasts to all qubits
  double depol_1q = 0.0;
  double depol_2q = 0.0;

  /// "ideal", "nisq-2021", "readout-only" (nisq-2021 readout, no gate noise).
  static NoiseModel preset(std::string_view name);
  static NoiseModel readout_only(double p1_given_0, double p0_given_1);

  ReadoutError readout_for(int qubit) const;
  bool is_ideal() const;
  void validate() const;  // all probabilities in [0, 0.5]
  std::string fingerprint() const;
};

/// Histogram of measured bitstrings. Keys use qubit 0 as least significant
/// bit; text output prints qubit 0 rightmost.
struct ShotTable {
  int group_id = 0;
  int n_qubits = 0;
  std::vector<PauliOp> basis;
  std::map<std::uint64_t, std::int64_t> counts;
  std::int64_t n_requested = 0;
  std::int64_t n_recorded = 0;
  std::uint64_t seed = 0;
  std::string noise = "ideal";
  std::vector<std::string> mitigation;

  double survival_fraction() const;
  void record(std::uint64_t bits, std::int64_t count = 1);

  /// Header lines "# key value" then "bitstring count" records.
  std::string serialize() const;
  static ShotTable parse(std::string_view text);
};

std::string bitstring(std::uint64_t bits, int n_qubits);
std::uint64_t parse_bitstring(std::string_view text);

/// Probability vector over 2^n outcomes plus the shot count it came from.
struct Distribution {
  int n_qubits = 0;
  std::vector<double> probs;
  double shots = 0.0;
};

Distribution to_distribution(const ShotTable& table);

/// Samples `n_shots` measurements of `circ` followed by the group's basis
/// rotation. Gate errors are drawn per shot; the exact noiseless
/// distribution is reused for shots without a gate error.
ShotTable sample_shots(const Circuit& circ, const MeasurementGroup& group, std::int64_t n_shots,
                       const std::optional<NoiseModel>& noise, std::uint64_t seed);

/// Sign of a diagonal string on a measured bitstring.
inline int eigenvalue(std::uint64_t bits, std::uint64_t support) {
  return (std::popcount(bits & support) % 2) ? -1 : 1;
}

/// Sum over members of coefficient * <term> for one group.
double group_expectation(const MeasurementGroup& group, const Distribution& dist);

/// constant + sum of group expectations; one table per group, same order.
/// Throws StarvationError for an empty table.
double expectation_from_shots(const std::vector<ShotTable>& tables,
                              const std::vector<MeasurementGroup>& groups, double constant);
double expectation_from_distributions(const std::vector<Distribution>& dists,
                                      const std::vector<MeasurementGroup>& groups,
                                      double constant);

/// Exact <psi|op|psi>.
Complex expectation(const QubitOperator& op, const Eigen::VectorXcd& state);

}  // namespace qembed
