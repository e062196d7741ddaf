#include "qembed/shots.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "qembed/error.hpp"

namespace qembed {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (auto v : path) s = splitmix64(s ^ splitmix64(v + 0x632be59bd9b4e019ULL));
  return s;
}

NoiseModel NoiseModel::preset(std::string_view name) {
  NoiseModel m;
  m.name = std::string(name);
  if (name == "ideal") return m;
  if (name == "nisq-2021" || name == "readout-only") {
    m.readout = {{0.02, 0.03}};
    if (name == "nisq-2021") {
      m.depol_1q = 1e-3;
      m.depol_2q = 1e-2;
    }
    return m;
  }
  throw Error("unknown noise preset '" + std::string(name) +
              "' (expected ideal, nisq-2021 or readout-only)");
}

NoiseModel NoiseModel::readout_only(double p1_given_0, double p0_given_1) {
  NoiseModel m;
  m.name = "readout";
  m.readout = {{p1_given_0, p0_given_1}};
  m.validate();
  return m;
}

ReadoutError NoiseModel::readout_for(int qubit) const {
  if (readout.empty()) return {};
  if (readout.size() == 1) return readout.front();
  if (qubit < 0 || static_cast<std::size_t>(qubit) >= readout.size())
    throw Error("no readout error given for qubit " + std::to_string(qubit));
  return readout[static_cast<std::size_t>(qubit)];
}

bool NoiseModel::is_ideal() const {
  if (depol_1q != 0.0 || depol_2q != 0.0) return false;
  for (const auto& r : readout)
    if (r.p1_given_0 != 0.0 || r.p0_given_1 != 0.0) return false;
  return true;
}

void NoiseModel::validate() const {
  auto check = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 0.5))
      throw Error(std::string(what) + " probability " + format_double(p) + " outside [0, 0.5]");
  };
  check(depol_1q, "depol_1q");
  check(depol_2q, "depol_2q");
  for (const auto& r : readout) {
    check(r.p1_given_0, "readout p(1|0)");
    check(r.p0_given_1, "readout p(0|1)");
  }
}

std::string NoiseModel::fingerprint() const {
  if (is_ideal()) return "ideal";
  std::string out = name + " depol_1q=" + format_double(depol_1q) +
                    " depol_2q=" + format_double(depol_2q) + " readout=";
  for (std::size_t i = 0; i < readout.size(); ++i) {
    if (i) out += ';';
    out += format_double(readout[i].p1_given_0) + "/" + format_double(readout[i].p0_given_1);
  }
  return out;
}

double ShotTable::survival_fraction() const {
  return n_requested > 0 ? static_cast<double>(n_recorded) / static_cast<double>(n_requested)
                         : 0.0;
}

void ShotTable::record(std::uint64_t bits, std::int64_t count) {
  if (count <= 0) return;
  counts[bits] += count;
  n_recorded += count;
}

std::string bitstring(std::uint64_t bits, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if ((bits >> q) & 1U) s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
  return s;
}

std::uint64_t parse_bitstring(std::string_view text) {
  if (text.empty() || text.size() > 64) throw ParseError("bad bitstring", 0);
  std::uint64_t bits = 0;
  for (char c : text) {
    if (c != '0' && c != '1') throw ParseError("bad bitstring '" + std::string(text) + "'", 0);
    bits = (bits << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return bits;
}

std::string ShotTable::serialize() const {
  std::ostringstream out;
  std::string b;
  for (auto o : basis) b += to_char(o);
  std::string mit;
  for (std::size_t i = 0; i < mitigation.size(); ++i) mit += (i ? "," : "") + mitigation[i];
  out << "# group " << group_id << "\n"
      << "# qubits " << n_qubits << "\n"
      << "# basis " << (b.empty() ? "-" : b) << "\n"
      << "# requested " << n_requested << "\n"
      << "# recorded " << n_recorded << "\n"
      << "# seed " << seed << "\n"
      << "# noise " << noise << "\n"
      << "# mitigation " << (mit.empty() ? "none" : mit) << "\n"
      << "# bit order: qubit 0 rightmost\n";
  for (const auto& [bits, c] : counts) out << bitstring(bits, n_qubits) << ' ' << c << '\n';
  return out.str();
}

ShotTable ShotTable::parse(std::string_view text) {
  ShotTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::int64_t recorded_header = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      std::string value;
      std::getline(ls, value);
      const auto start = value.find_first_not_of(' ');
      value = start == std::string::npos ? "" : value.substr(start);
      try {
        if (key == "group") t.group_id = std::stoi(value);
        else if (key == "qubits") t.n_qubits = std::stoi(value);
        else if (key == "requested") t.n_requested = std::stoll(value);
        else if (key == "recorded") recorded_header = std::stoll(value);
        else if (key == "seed") t.seed = std::stoull(value);
        else if (key == "noise") t.noise = value;
        else if (key == "basis" && value != "-") {
          for (char c : value) {
            switch (c) {
              case 'X': t.basis.push_back(PauliOp::X); break;
              case 'Y': t.basis.push_back(PauliOp::Y); break;
              case 'Z': t.basis.push_back(PauliOp::Z); break;
              default: throw ParseError("bad basis '" + value + "'", line_no);
            }
          }
        } else if (key == "mitigation" && value != "none") {
          std::istringstream ms(value);
          std::string item;
          while (std::getline(ms, item, ',')) t.mitigation.push_back(item);
        }
      } catch (const std::logic_error&) {
        throw ParseError("bad header value for '" + key + "'", line_no);
      }
      continue;
    }
    std::string bits;
    std::int64_t count = -1;
    if (!(ls >> bits >> count) || count < 0) throw ParseError("expected 'bitstring count'", line_no);
    if (static_cast<int>(bits.size()) != t.n_qubits)
      throw ParseError("bitstring width differs from qubit count", line_no);
    try {
      t.record(parse_bitstring(bits), count);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (recorded_header >= 0 && recorded_header != t.n_recorded)
    throw ParseError("recorded count " + std::to_string(recorded_header) +
                         " does not match the records (" + std::to_string(t.n_recorded) + ")",
                     0);
  return t;
}

Distribution to_distribution(const ShotTable& table) {
  if (table.n_recorded <= 0)
    throw StarvationError("shot table for group " + std::to_string(table.group_id) +
                          " is empty");
  Distribution d;
  d.n_qubits = table.n_qubits;
  d.probs.assign(std::size_t{1} << table.n_qubits, 0.0);
  for (const auto& [bits, c] : table.counts)
    d.probs[bits] = static_cast<double>(c) / static_cast<double>(table.n_recorded);
  d.shots = static_cast<double>(table.n_recorded);
  return d;
}

namespace {

// Multinomial draw as a chain of binomials.
void draw_multinomial(const std::vector<double>& probs, std::int64_t n, std::mt19937_64& rng,
                      std::vector<std::int64_t>& out) {
  out.assign(probs.size(), 0);
  double remaining_p = 1.0;
  std::int64_t remaining = n;
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    if (i + 1 == probs.size() || remaining_p <= 0.0) {
      out[i] = remaining;
      remaining = 0;
      break;
    }
    const double p = std::clamp(probs[i] / remaining_p, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> bin(remaining, p);
    out[i] = p > 0.0 ? bin(rng) : 0;
    remaining -= out[i];
    remaining_p -= probs[i];
  }
}

std::vector<double> probabilities(const Eigen::VectorXcd& state) {
  std::vector<double> p(static_cast<std::size_t>(state.size()));
  for (Eigen::Index i = 0; i < state.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(state(i));
  return p;
}

void apply_random_pauli(Eigen::VectorXcd& state, const Gate& g, std::mt19937_64& rng) {
  if (g.two_qubit()) {
    const int k = std::uniform_int_distribution<int>(1, 15)(rng);
    const auto a = static_cast<PauliOp>(k / 4), b = static_cast<PauliOp>(k % 4);
    auto apply = [&](int q, PauliOp op) {
      switch (op) {
        case PauliOp::I: break;
        case PauliOp::X: apply_gate(state, {GateKind::X, q}); break;
        case PauliOp::Y: apply_gate(state, {GateKind::Y, q}); break;
        case PauliOp::Z: apply_gate(state, {GateKind::Z, q}); break;
      }
    };
    apply(g.control, a);
    apply(g.target, b);
  } else {
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    const GateKind kinds[] = {GateKind::X, GateKind::Y, GateKind::Z};
    apply_gate(state, {kinds[k - 1], g.target});
  }
}

}  // namespace

ShotTable sample_shots(const Circuit& circ, const MeasurementGroup& group, std::int64_t n_shots,
                       const std::optional<NoiseModel>& noise, std::uint64_t seed) {
  if (n_shots <= 0) throw Error("n_shots must be positive");
  const int n = circ.n_qubits();
  std::vector<PauliOp> basis = group.basis;
  if (basis.empty()) basis.assign(static_cast<std::size_t>(n), PauliOp::Z);
  if (static_cast<int>(basis.size()) != n)
    throw Error("measurement group width differs from the circuit");

  Circuit full = circ;
  full.append(measurement_rotation(basis));
  const auto ideal = probabilities(simulate_statevector(full));

  ShotTable table;
  table.group_id = group.id;
  table.n_qubits = n;
  table.basis = basis;
  table.n_requested = n_shots;
  table.seed = seed;
  table.noise = noise ? noise->fingerprint() : "ideal";

  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> counts;
  if (noise) noise->validate();

  std::vector<double> p_gate;
  double p_clean = 1.0;
  if (noise) {
    for (const auto& g : full.gates()) {
      p_gate.push_back(g.two_qubit() ? noise->depol_2q : noise->depol_1q);
      p_clean *= 1.0 - p_gate.back();
    }
  }

  std::vector<std::int64_t> outcome_counts(ideal.size(), 0);
  std::int64_t n_clean = n_shots;
  if (p_clean < 1.0) {
    std::binomial_distribution<std::int64_t> bin(n_shots, p_clean);
    n_clean = bin(rng);
  }
  draw_multinomial(ideal, n_clean, rng, counts);
  for (std::size_t i = 0; i < counts.size(); ++i) outcome_counts[i] += counts[i];

  if (n_clean < n_shots) {
    // Location of the first error, conditioned on at least one.
    std::vector<double> first(p_gate.size());
    double survive = 1.0;
    for (std::size_t k = 0; k < p_gate.size(); ++k) {
      first[k] = survive * p_gate[k];
      survive *= 1.0 - p_gate[k];
    }
    std::discrete_distribution<std::size_t> pick_first(first.begin(), first.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& gates = full.gates();
    for (std::int64_t shot = n_clean; shot < n_shots; ++shot) {
      const std::size_t k0 = pick_first(rng);
      Eigen::VectorXcd state = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
      state(0) = 1.0;
      for (std::size_t k = 0; k < gates.size(); ++k) {
        apply_gate(state, gates[k]);
        if (k == k0 || (k > k0 && u(rng) < p_gate[k])) apply_random_pauli(state, gates[k], rng);
      }
      const auto p = probabilities(state);
      std::discrete_distribution<std::size_t> outcome(p.begin(), p.end());
      ++outcome_counts[outcome(rng)];
    }
  }

  const bool readout = noise && !noise->readout.empty();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < outcome_counts.size(); ++i) {
    if (!readout) {
      table.record(i, outcome_counts[i]);
      continue;
    }
    for (std::int64_t s = 0; s < outcome_counts[i]; ++s) {
      std::uint64_t bits = i;
      for (int q = 0; q < n; ++q) {
        const auto r = noise->readout_for(q);
        const bool one = (bits >> q) & 1U;
        if (u(rng) < (one ? r.p0_given_1 : r.p1_given_0)) bits ^= std::uint64_t{1} << q;
      }
      table.record(bits);
    }
  }
  return table;
}

double group_expectation(const MeasurementGroup& group, const Distribution& dist) {
  double total = 0.0;
  for (const auto& [p, c] : group.terms) {
    const auto support = p.support();
    double e = 0.0;
    for (std::size_t b = 0; b < dist.probs.size(); ++b)
      if (dist.probs[b] != 0.0) e += dist.probs[b] * eigenvalue(b, support);
    total += c.real() * e;
  }
  return total;
}

double expectation_from_distributions(const std::vector<Distribution>& dists,
                                      const std::vector<MeasurementGroup>& groups,
                                      double constant) {
  if (dists.size() != groups.size()) throw Error("need one distribution per group");
  double e = constant;
  for (std::size_t g = 0; g < groups.size(); ++g) e += group_expectation(groups[g], dists[g]);
  return e;
}

double expectation_from_shots(const std::vector<ShotTable>& tables,
                              const std::vector<MeasurementGroup>& groups, double constant) {
  if (tables.size() != groups.size()) throw Error("need one shot table per group");
  std::vector<Distribution> dists;
  for (const auto& t : tables) dists.push_back(to_distribution(t));
  return expectation_from_distributions(dists, groups, constant);
}

Complex expectation(const QubitOperator& op, const Eigen::VectorXcd& state) {
  Complex total = 0.0;
  const auto dim = static_cast<std::uint64_t>(state.size());
  constexpr Complex kPhase[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& [p, c] : op.terms()) {
    const Complex base = c * kPhase[std::popcount(p.x_mask() & p.z_mask()) % 4];
    Complex acc = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(b & p.z_mask()) % 2) ? -1.0 : 1.0;
      acc += std::conj(state(static_cast<Eigen::Index>(b ^ p.x_mask()))) * sign *
             state(static_cast<Eigen::Index>(b));
    }
    total += base * acc;
  }
  return total;
}

}  // namespace qembed
