#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>

namespace qembed {

using Complex = std::complex<double>;

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliOp op);

/// Phase-free tensor product of single-qubit Paulis on up to 64 qubits,
/// stored as X and Z support masks (Y sets both).
class PauliString {
 public:
  PauliString() = default;
  PauliString(std::uint64_t x_mask, std::uint64_t z_mask) : x_(x_mask), z_(z_mask) {}

  static PauliString single(int qubit, PauliOp op);
  /// "Z0 Z1", "X0 Y3", "I" or "" for the identity.
  static PauliString parse(std::string_view text);

  PauliOp op(int qubit) const;
  void set(int qubit, PauliOp op);

  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  std::uint64_t support() const { return x_ | z_; }
  int weight() const;
  bool is_identity() const { return (x_ | z_) == 0; }
  bool is_diagonal() const { return x_ == 0; }
  int max_qubit() const;  // -1 for the identity

  bool commutes_with(const PauliString& other) const;
  bool qubitwise_commutes_with(const PauliString& other) const;

  std::string to_string() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.x_ == b.x_ && a.z_ == b.z_;
  }
  /// Lexicographic with I < X < Y < Z, qubit 0 most significant.
  friend bool operator<(const PauliString& a, const PauliString& b);

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// a * b = phase * P.
std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b);

/// Weighted sum of Pauli strings, kept in canonical (sorted) order.
class QubitOperator {
 public:
  using Terms = std::map<PauliString, Complex>;

  explicit QubitOperator(int n_qubits = 0) : n_qubits_(n_qubits) {}
  QubitOperator(int n_qubits, const PauliString& p, Complex c = 1.0);

  static QubitOperator identity(int n_qubits, Complex c = 1.0);

  int n_qubits() const { return n_qubits_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(const PauliString& p, Complex c);
  Complex coefficient(const PauliString& p) const;
  Complex constant() const { return coefficient(PauliString{}); }

  /// Drops terms with |c| < tol.
  QubitOperator& prune(double tol = 1e-12);
  QubitOperator adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;
  /// Largest |imag| of any coefficient.
  double max_imaginary() const;

  QubitOperator& operator+=(const QubitOperator& other);
  QubitOperator& operator-=(const QubitOperator& other);
  QubitOperator& operator*=(Complex s);
  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
  friend QubitOperator operator-(QubitOperator a, const QubitOperator& b) { return a -= b; }
  friend QubitOperator operator*(QubitOperator a, Complex s) { return a *= s; }
  friend QubitOperator operator*(Complex s, QubitOperator a) { return a *= s; }
  friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b);

  /// Dense 2^n x 2^n matrix; basis index bit q is qubit q.
  Eigen::MatrixXcd to_matrix() const;

  /// One term per line, "+0.5 Z0 Z1" ("+c I" for the identity). Complex
  /// coefficients print as "(re,im)".
  std::string to_text() const;
  static QubitOperator from_text(std::string_view text, int n_qubits);

 private:
  int n_qubits_ = 0;
  Terms terms_;
};

}  // namespace qembed
