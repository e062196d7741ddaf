#include "qembed/fermion.hpp"

#include <cstdio>
#include <utility>

namespace qembed {

FermionOperator::FermionOperator(FermionTerm term, Complex c) { terms_[std::move(term)] = c; }

int FermionOperator::max_mode() const {
  int m = -1;
  for (const auto& [t, c] : terms_)
    for (const auto& op : t) m = std::max(m, op.mode);
  return m;
}

FermionOperator FermionOperator::adjoint() const {
  FermionOperator out;
  for (const auto& [t, c] : terms_) {
    FermionTerm r(t.rbegin(), t.rend());
    for (auto& op : r) op.dagger = !op.dagger;
    out.terms_[r] += std::conj(c);
  }
  return out;
}

namespace {

// Desired position order: creators before annihilators, higher modes first.
bool out_of_order(const LadderOp& left, const LadderOp& right) {
  if (left.dagger != right.dagger) return right.dagger;
  return left.mode < right.mode;
}

}  // namespace

FermionOperator FermionOperator::normal_ordered(double tol) const {
  FermionOperator out;
  std::vector<std::pair<FermionTerm, Complex>> work(terms_.begin(), terms_.end());
  while (!work.empty()) {
    auto [term, c] = std::move(work.back());
    work.pop_back();
    bool zero = false;
    // Bubble sort; each anticommutator with matching modes spawns a shorter term.
    for (std::size_t i = 1; i < term.size() && !zero; ++i) {
      for (std::size_t j = i; j > 0; --j) {
        auto& l = term[j - 1];
        auto& r = term[j];
        if (l.mode == r.mode && l.dagger == r.dagger) {
          zero = true;
          break;
        }
        if (!out_of_order(l, r)) break;
        if (l.mode == r.mode) {
          // a_p a+_p = 1 - a+_p a_p
          FermionTerm shorter;
          shorter.insert(shorter.end(), term.begin(), term.begin() + static_cast<long>(j) - 1);
          shorter.insert(shorter.end(), term.begin() + static_cast<long>(j) + 1, term.end());
          work.emplace_back(std::move(shorter), c);
        }
        std::swap(l, r);
        c = -c;
      }
    }
    if (!zero) out.terms_[term] += c;
  }
  std::erase_if(out.terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
  return out;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& other) {
  for (const auto& [t, c] : other.terms_) terms_[t] += c;
  return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& other) {
  for (const auto& [t, c] : other.terms_) terms_[t] -= c;
  return *this;
}

FermionOperator& FermionOperator::operator*=(Complex s) {
  for (auto& [t, c] : terms_) c *= s;
  return *this;
}

FermionOperator operator*(const FermionOperator& a, const FermionOperator& b) {
  FermionOperator out;
  for (const auto& [ta, ca] : a.terms_)
    for (const auto& [tb, cb] : b.terms_) {
      FermionTerm t = ta;
      t.insert(t.end(), tb.begin(), tb.end());
      out.terms_[t] += ca * cb;
    }
  return out;
}

std::string FermionOperator::to_string() const {
  std::string out;
  char buf[80];
  for (const auto& [t, c] : terms_) {
    std::snprintf(buf, sizeof buf, "(%.12g,%.12g)", c.real(), c.imag());
    out += buf;
    for (const auto& op : t) out += " " + std::to_string(op.mode) + (op.dagger ? "^" : "");
    out += '\n';
  }
  return out;
}

}  // namespace qembed
