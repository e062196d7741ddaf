#include "qembed/mitigation.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <limits>
#include <sstream>

#include "qembed/error.hpp"
#include "qembed/log.hpp"

namespace qembed {

namespace {

void check_diagonal(const std::vector<PauliOp>& basis, const Symmetry& s) {
  for (std::size_t q = 0; q < 64; ++q) {
    const auto op = s.string.op(static_cast<int>(q));
    if (op == PauliOp::I) continue;
    if (q >= basis.size() || basis[q] != op)
      throw Error("symmetry " + s.string.to_string() + " is not diagonal in the measurement basis");
  }
}

bool satisfies(std::uint64_t bits, const std::vector<Symmetry>& symmetries) {
  for (const auto& s : symmetries)
    if (eigenvalue(bits, s.string.support()) != s.eigenvalue) return false;
  return true;
}

}  // namespace

ShotTable pmsv_filter(const ShotTable& table, const std::vector<Symmetry>& symmetries) {
  for (const auto& s : symmetries) check_diagonal(table.basis, s);
  ShotTable out = table;
  out.counts.clear();
  out.n_recorded = 0;
  for (const auto& [bits, c] : table.counts)
    if (satisfies(bits, symmetries)) out.record(bits, c);
  out.mitigation.push_back("pmsv");
  if (out.n_recorded == 0)
    throw StarvationError("symmetry verification discarded all " +
                          std::to_string(table.n_recorded) + " shots of group " +
                          std::to_string(table.group_id));
  return out;
}

Distribution pmsv_filter(const Distribution& dist, const std::vector<PauliOp>& basis,
                         const std::vector<Symmetry>& symmetries, double* kept) {
  for (const auto& s : symmetries) check_diagonal(basis, s);
  Distribution out = dist;
  double mass = 0.0;
  for (std::size_t b = 0; b < out.probs.size(); ++b) {
    if (satisfies(b, symmetries))
      mass += out.probs[b];
    else
      out.probs[b] = 0.0;
  }
  if (mass <= 0.0) throw StarvationError("symmetry verification removed all probability mass");
  for (auto& p : out.probs) p /= mass;
  out.shots = dist.shots * mass;
  if (kept) *kept = mass;
  return out;
}

SpamProfile spam_profile(const Eigen::MatrixXd& transfer, std::int64_t shots_per_state) {
  if (transfer.rows() != transfer.cols() || transfer.rows() == 0)
    throw Error("transfer matrix must be square");
  SpamProfile prof;
  prof.n_qubits = 0;
  while ((Eigen::Index{1} << prof.n_qubits) < transfer.rows()) ++prof.n_qubits;
  if ((Eigen::Index{1} << prof.n_qubits) != transfer.rows())
    throw Error("transfer matrix size is not a power of two");
  prof.transfer = transfer;
  prof.shots_per_state = shots_per_state;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(transfer, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  prof.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(transfer);
  if (lu.isInvertible() && prof.condition_number < 1e12) {
    prof.inverse = lu.inverse();
  } else {
    std::ostringstream msg;
    msg << "SPAM transfer matrix is singular (condition number " << prof.condition_number
        << "); using the pseudo-inverse";
    warn(msg.str());
    const double cutoff = 1e-12 * smax;
    Eigen::VectorXd inv = sv;
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    prof.inverse = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    prof.pseudo_inverse = true;
  }
  return prof;
}

SpamProfile spam_calibrate(const std::optional<NoiseModel>& noise, int n_qubits,
                           std::int64_t shots_per_state, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > 4) throw Error("SPAM calibration covers 1 to 4 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  MeasurementGroup z;
  z.n_qubits = n_qubits;
  z.basis.assign(static_cast<std::size_t>(n_qubits), PauliOp::Z);
  for (std::uint64_t prep = 0; prep < dim; ++prep) {
    Circuit c(n_qubits);
    for (int q = 0; q < n_qubits; ++q)
      if ((prep >> q) & 1U) c.x(q);
    const auto t = sample_shots(c, z, shots_per_state, noise, derive_seed(seed, {prep}));
    for (const auto& [bits, cnt] : t.counts)
      m(static_cast<Eigen::Index>(bits), static_cast<Eigen::Index>(prep)) =
          static_cast<double>(cnt) / static_cast<double>(t.n_recorded);
  }
  return spam_profile(m, shots_per_state);
}

Distribution spam_correct(const Distribution& dist, const SpamProfile& profile) {
  if (dist.n_qubits != profile.n_qubits)
    throw Error("SPAM profile covers " + std::to_string(profile.n_qubits) +
                " qubits, distribution has " + std::to_string(dist.n_qubits));
  const Eigen::Map<const Eigen::VectorXd> f(dist.probs.data(),
                                            static_cast<Eigen::Index>(dist.probs.size()));
  Eigen::VectorXd p = profile.inverse * f;
  p = p.cwiseMax(0.0);
  const double total = p.sum();
  if (total <= 0.0) throw StarvationError("SPAM correction left no probability mass");
  p /= total;
  Distribution out = dist;
  out.probs.assign(p.data(), p.data() + p.size());
  return out;
}

Distribution spam_correct(const ShotTable& table, const SpamProfile& profile) {
  return spam_correct(to_distribution(table), profile);
}

}  // namespace qembed
