#include "qembed/pauli.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "qembed/error.hpp"

namespace qembed {

char to_char(PauliOp op) {
  constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
  return kNames[static_cast<int>(op)];
}

namespace {

void check_qubit(int q) {
  if (q < 0 || q >= 64) throw Error("qubit index " + std::to_string(q) + " out of range");
}

PauliOp op_from_bits(bool x, bool z) {
  if (x && z) return PauliOp::Y;
  if (x) return PauliOp::X;
  if (z) return PauliOp::Z;
  return PauliOp::I;
}

}  // namespace

PauliString PauliString::single(int qubit, PauliOp op) {
  PauliString p;
  p.set(qubit, op);
  return p;
}

PauliString PauliString::parse(std::string_view text) {
  PauliString p;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    if (tok == "I") continue;
    PauliOp op;
    switch (tok[0]) {
      case 'X': op = PauliOp::X; break;
      case 'Y': op = PauliOp::Y; break;
      case 'Z': op = PauliOp::Z; break;
      default: throw ParseError("bad Pauli factor '" + tok + "'", 0);
    }
    int q = -1;
    auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), q);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.size() < 2)
      throw ParseError("bad Pauli factor '" + tok + "'", 0);
    check_qubit(q);
    if (p.op(q) != PauliOp::I) throw ParseError("qubit " + std::to_string(q) + " repeated", 0);
    p.set(q, op);
  }
  return p;
}

PauliOp PauliString::op(int qubit) const {
  check_qubit(qubit);
  return op_from_bits((x_ >> qubit) & 1U, (z_ >> qubit) & 1U);
}

void PauliString::set(int qubit, PauliOp op) {
  check_qubit(qubit);
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  if (op == PauliOp::X || op == PauliOp::Y) x_ |= bit;
  if (op == PauliOp::Z || op == PauliOp::Y) z_ |= bit;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::max_qubit() const {
  const auto s = support();
  return s == 0 ? -1 : 63 - std::countl_zero(s);
}

bool PauliString::commutes_with(const PauliString& o) const {
  return (std::popcount(x_ & o.z_) + std::popcount(z_ & o.x_)) % 2 == 0;
}

bool PauliString::qubitwise_commutes_with(const PauliString& o) const {
  const auto both = support() & o.support();
  return ((x_ ^ o.x_) & both) == 0 && ((z_ ^ o.z_) & both) == 0;
}

std::string PauliString::to_string() const {
  if (is_identity()) return "I";
  std::string out;
  for (int q = 0; q <= max_qubit(); ++q) {
    const auto o = op(q);
    if (o == PauliOp::I) continue;
    if (!out.empty()) out += ' ';
    out += to_char(o);
    out += std::to_string(q);
  }
  return out;
}

bool operator<(const PauliString& a, const PauliString& b) {
  const auto diff = (a.x_ ^ b.x_) | (a.z_ ^ b.z_);
  if (diff == 0) return false;
  const int q = std::countr_zero(diff);
  return static_cast<int>(a.op(q)) < static_cast<int>(b.op(q));
}

std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b) {
  // Per-qubit phases: XY = iZ, YZ = iX, ZX = iY and the reverses give -i.
  int power = 0;  // of i
  std::uint64_t s = a.support() & b.support();
  while (s) {
    const int q = std::countr_zero(s);
    s &= s - 1;
    const int pa = static_cast<int>(a.op(q)), pb = static_cast<int>(b.op(q));
    if (pa == pb) continue;
    power += ((pb - pa + 3) % 3 == 1) ? 1 : 3;
  }
  constexpr Complex kPhase[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {kPhase[power % 4], PauliString(a.x_mask() ^ b.x_mask(), a.z_mask() ^ b.z_mask())};
}

QubitOperator::QubitOperator(int n_qubits, const PauliString& p, Complex c) : n_qubits_(n_qubits) {
  add(p, c);
}

QubitOperator QubitOperator::identity(int n_qubits, Complex c) {
  return QubitOperator(n_qubits, PauliString{}, c);
}

void QubitOperator::add(const PauliString& p, Complex c) {
  if (p.max_qubit() >= n_qubits_)
    throw Error("Pauli string " + p.to_string() + " exceeds " + std::to_string(n_qubits_) +
                " qubits");
  terms_[p] += c;
}

Complex QubitOperator::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? Complex{} : it->second;
}

QubitOperator& QubitOperator::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
  return *this;
}

QubitOperator QubitOperator::adjoint() const {
  QubitOperator out = *this;
  for (auto& [p, c] : out.terms_) c = std::conj(c);
  return out;
}

bool QubitOperator::is_hermitian(double tol) const { return max_imaginary() < tol; }

double QubitOperator::max_imaginary() const {
  double m = 0.0;
  for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c.imag()));
  return m;
}

QubitOperator& QubitOperator::operator+=(const QubitOperator& other) {
  n_qubits_ = std::max(n_qubits_, other.n_qubits_);
  for (const auto& [p, c] : other.terms_) terms_[p] += c;
  return *this;
}

QubitOperator& QubitOperator::operator-=(const QubitOperator& other) {
  n_qubits_ = std::max(n_qubits_, other.n_qubits_);
  for (const auto& [p, c] : other.terms_) terms_[p] -= c;
  return *this;
}

QubitOperator& QubitOperator::operator*=(Complex s) {
  for (auto& [p, c] : terms_) c *= s;
  return *this;
}

QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
  QubitOperator out(std::max(a.n_qubits_, b.n_qubits_));
  for (const auto& [pa, ca] : a.terms_)
    for (const auto& [pb, cb] : b.terms_) {
      auto [phase, p] = multiply(pa, pb);
      out.terms_[p] += phase * ca * cb;
    }
  return out;
}

Eigen::MatrixXcd QubitOperator::to_matrix() const {
  if (n_qubits_ > 14) throw Error("dense matrix limited to 14 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n_qubits_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (const auto& [p, c] : terms_) {
    // P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>
    const int n_y = std::popcount(p.x_mask() & p.z_mask());
    constexpr Complex kPhase[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex base = c * kPhase[n_y % 4];
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(b & p.z_mask()) % 2) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(b ^ p.x_mask()), static_cast<Eigen::Index>(b)) += sign * base;
    }
  }
  return m;
}

namespace {

std::string format_coefficient(Complex c) {
  char buf[80];
  if (c.imag() == 0.0)
    std::snprintf(buf, sizeof buf, "%+.17g", c.real());
  else
    std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", c.real(), c.imag());
  return buf;
}

}  // namespace

std::string QubitOperator::to_text() const {
  std::string out;
  for (const auto& [p, c] : terms_) {
    out += format_coefficient(c);
    out += ' ';
    out += p.to_string();
    out += '\n';
  }
  return out;
}

QubitOperator QubitOperator::from_text(std::string_view text, int n_qubits) {
  QubitOperator op(n_qubits);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto split = line.find_first_of(" \t", first);
    const std::string coef = line.substr(first, split - first);
    const std::string rest = split == std::string::npos ? "" : line.substr(split);
    Complex c;
    try {
      if (coef.front() == '(') {
        const auto comma = coef.find(',');
        if (comma == std::string::npos || coef.back() != ')') throw std::invalid_argument(coef);
        c = {std::stod(coef.substr(1, comma - 1)),
             std::stod(coef.substr(comma + 1, coef.size() - comma - 2))};
      } else {
        std::size_t used = 0;
        c = std::stod(coef, &used);
        if (used != coef.size()) throw std::invalid_argument(coef);
      }
    } catch (const std::logic_error&) {
      throw ParseError("bad coefficient '" + coef + "'", line_no);
    }
    PauliString p;
    try {
      p = PauliString::parse(rest);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    try {
      op.add(p, c);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return op;
}

}  // namespace qembed
