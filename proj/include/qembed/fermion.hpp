#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "qembed/pauli.hpp"

namespace qembed {

struct LadderOp {
  int mode = 0;
  bool dagger = false;
  auto operator<=>(const LadderOp&) const = default;
};

using FermionTerm = std::vector<LadderOp>;  // product, applied right to left

/// Sum of products of creation/annihilation operators over spin orbitals.
class FermionOperator {
 public:
  using Terms = std::map<FermionTerm, Complex>;

  FermionOperator() = default;
  FermionOperator(FermionTerm term, Complex c);

  static FermionOperator creation(int mode) { return {{{mode, true}}, 1.0}; }
  static FermionOperator annihilation(int mode) { return {{{mode, false}}, 1.0}; }
  static FermionOperator number(int mode) { return {{{mode, true}, {mode, false}}, 1.0}; }
  static FermionOperator constant(Complex c) { return {{}, c}; }

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  void add(const FermionTerm& term, Complex c) { terms_[term] += c; }
  int max_mode() const;  // -1 when only a constant

  FermionOperator adjoint() const;
  /// Creation operators left of annihilators, each block in descending mode
  /// order; zero terms removed.
  FermionOperator normal_ordered(double tol = 1e-12) const;

  FermionOperator& operator+=(const FermionOperator& other);
  FermionOperator& operator-=(const FermionOperator& other);
  FermionOperator& operator*=(Complex s);
  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
  friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) { return a -= b; }
  friend FermionOperator operator*(FermionOperator a, Complex s) { return a *= s; }
  friend FermionOperator operator*(const FermionOperator& a, const FermionOperator& b);

  std::string to_string() const;

 private:
  Terms terms_;
};

}  // namespace qembed
