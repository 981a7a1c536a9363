#include "hyxc/second_quant.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hyxc {

double RdmPair::pair_trace() const {
  cplx acc(0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) acc += gamma(i, i, k, k);
  return acc.real();
}

// ---------------------------------------------------------------------------
// OccupationVector
// ---------------------------------------------------------------------------

int OccupationVector::particle_count() const {
  int n = 0;
  for (auto b : bits) n += b;
  return n;
}

std::uint64_t OccupationVector::mask() const {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) m |= (1ull << i);
  return m;
}

OccupationVector OccupationVector::from_mask(std::uint64_t mask, int m) {
  OccupationVector v;
  v.bits.resize(m);
  for (int i = 0; i < m; ++i) v.bits[i] = (mask >> i) & 1u;
  return v;
}

OccupationVector OccupationVector::lowest(int n, int m) {
  if (n > m) throw std::invalid_argument("OccupationVector::lowest: n > m");
  OccupationVector v;
  v.bits.assign(m, 0);
  for (int i = 0; i < n; ++i) v.bits[i] = 1;
  return v;
}

std::string OccupationVector::str() const {
  std::string s;
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

// ---------------------------------------------------------------------------
// BigUint
// ---------------------------------------------------------------------------

namespace {
constexpr std::uint64_t kLimbBase = 1000000000ull;
}

BigUint::BigUint(std::uint64_t v) {
  if (v == 0) {
    limbs_ = {0};
    return;
  }
  while (v) {
    limbs_.push_back(static_cast<std::uint32_t>(v % kLimbBase));
    v /= kLimbBase;
  }
}

void BigUint::trim() {
  while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
}

void BigUint::mul_small(std::uint64_t v) {
  std::uint64_t carry = 0;
  for (auto& limb : limbs_) {
    const std::uint64_t cur = static_cast<std::uint64_t>(limb) * v + carry;
    limb = static_cast<std::uint32_t>(cur % kLimbBase);
    carry = cur / kLimbBase;
  }
  while (carry) {
    limbs_.push_back(static_cast<std::uint32_t>(carry % kLimbBase));
    carry /= kLimbBase;
  }
}

void BigUint::div_small(std::uint64_t v) {
  if (v == 0) throw std::invalid_argument("BigUint: division by zero");
  std::uint64_t rem = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    const std::uint64_t cur = rem * kLimbBase + limbs_[i];
    limbs_[i] = static_cast<std::uint32_t>(cur / v);
    rem = cur % v;
  }
  if (rem != 0) throw std::logic_error("BigUint: inexact division");
  trim();
}

bool BigUint::fits_u64() const {
  BigUint copy = *this;
  std::uint64_t acc = 0;
  for (std::size_t i = copy.limbs_.size(); i-- > 0;) {
    if (acc > (UINT64_MAX - copy.limbs_[i]) / kLimbBase) return false;
    acc = acc * kLimbBase + copy.limbs_[i];
  }
  return true;
}

std::uint64_t BigUint::as_u64() const {
  if (!fits_u64()) throw std::overflow_error("BigUint: value exceeds 64 bits");
  std::uint64_t acc = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) acc = acc * kLimbBase + limbs_[i];
  return acc;
}

std::string BigUint::str() const {
  char buf[16];
  std::string s = std::to_string(limbs_.back());
  for (std::size_t i = limbs_.size() - 1; i-- > 0;) {
    std::snprintf(buf, sizeof(buf), "%09u", limbs_[i]);
    s += buf;
  }
  return s;
}

std::string BigUint::scientific(int sig) const {
  const std::string digits = str();
  const int exponent = static_cast<int>(digits.size()) - 1;
  if (static_cast<int>(digits.size()) <= sig) {
    std::string mantissa = digits.substr(0, 1);
    if (sig > 1) mantissa += "." + (digits + std::string(sig, '0')).substr(1, sig - 1);
    return mantissa + "e" + std::to_string(exponent);
  }
  // Round to `sig` digits.
  std::string lead = digits.substr(0, sig);
  if (digits[sig] >= '5') {
    int i = sig - 1;
    while (i >= 0) {
      if (lead[i] != '9') {
        ++lead[i];
        break;
      }
      lead[i] = '0';
      --i;
    }
    if (i < 0) {
      lead.insert(lead.begin(), '1');
      lead.pop_back();
      return lead.substr(0, 1) + "." + lead.substr(1) + "e" + std::to_string(exponent + 1);
    }
  }
  return lead.substr(0, 1) + "." + lead.substr(1) + "e" + std::to_string(exponent);
}

BigUint BigUint::binomial(int m, int n) {
  if (n < 0 || m < 0 || n > m) throw std::invalid_argument("binomial: need 0 <= n <= m");
  if (n > m - n) n = m - n;
  BigUint c(1);
  for (int i = 1; i <= n; ++i) {
    c.mul_small(static_cast<std::uint64_t>(m - n + i));
    c.div_small(static_cast<std::uint64_t>(i));
  }
  return c;
}

BigUint count_configurations(int m, int n) { return BigUint::binomial(m, n); }

// ---------------------------------------------------------------------------
// QubitOperator
// ---------------------------------------------------------------------------

namespace {

/// Single-qubit product table: (a, b) -> (phase, result).
std::pair<cplx, char> pauli_mul(char a, char b) {
  if (a == 'I') return {1.0, b};
  if (b == 'I') return {1.0, a};
  if (a == b) return {1.0, 'I'};
  const cplx i(0.0, 1.0);
  if (a == 'X' && b == 'Y') return {i, 'Z'};
  if (a == 'Y' && b == 'X') return {-i, 'Z'};
  if (a == 'Y' && b == 'Z') return {i, 'X'};
  if (a == 'Z' && b == 'Y') return {-i, 'X'};
  if (a == 'Z' && b == 'X') return {i, 'Y'};
  if (a == 'X' && b == 'Z') return {-i, 'Y'};
  throw std::logic_error("pauli_mul: bad operator characters");
}

}  // namespace

QubitOperator QubitOperator::identity(int n_qubits, cplx coeff) {
  QubitOperator op(n_qubits);
  op.add(std::string(n_qubits, 'I'), coeff);
  return op;
}

bool QubitOperator::is_zero(double tol) const {
  for (const auto& [w, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

void QubitOperator::add(const std::string& word, cplx coeff) {
  if (static_cast<int>(word.size()) != n_)
    throw std::invalid_argument("QubitOperator::add: word length mismatch");
  auto [it, inserted] = terms_.emplace(word, coeff);
  if (!inserted) it->second += coeff;
}

QubitOperator& QubitOperator::operator+=(const QubitOperator& o) {
  if (o.n_ != n_) throw std::invalid_argument("QubitOperator: qubit count mismatch");
  for (const auto& [w, c] : o.terms_) add(w, c);
  return *this;
}

QubitOperator& QubitOperator::operator-=(const QubitOperator& o) {
  if (o.n_ != n_) throw std::invalid_argument("QubitOperator: qubit count mismatch");
  for (const auto& [w, c] : o.terms_) add(w, -c);
  return *this;
}

QubitOperator& QubitOperator::operator*=(cplx scale) {
  for (auto& [w, c] : terms_) c *= scale;
  return *this;
}

QubitOperator QubitOperator::operator*(const QubitOperator& o) const {
  if (o.n_ != n_) throw std::invalid_argument("QubitOperator: qubit count mismatch");
  QubitOperator out(n_);
  std::string word(n_, 'I');
  for (const auto& [wa, ca] : terms_)
    for (const auto& [wb, cb] : o.terms_) {
      cplx phase = ca * cb;
      for (int q = 0; q < n_; ++q) {
        const auto [p, r] = pauli_mul(wa[q], wb[q]);
        phase *= p;
        word[q] = r;
      }
      out.add(word, phase);
    }
  return out;
}

QubitOperator QubitOperator::operator+(const QubitOperator& o) const {
  QubitOperator out = *this;
  out += o;
  return out;
}

QubitOperator QubitOperator::operator-(const QubitOperator& o) const {
  QubitOperator out = *this;
  out -= o;
  return out;
}

QubitOperator QubitOperator::adjoint() const {
  QubitOperator out(n_);
  for (const auto& [w, c] : terms_) out.add(w, std::conj(c));
  return out;
}

bool QubitOperator::is_hermitian(double tol) const {
  for (const auto& [w, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

void QubitOperator::simplify(double drop_threshold) {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = std::abs(it->second) < drop_threshold ? terms_.erase(it) : std::next(it);
}

Eigen::MatrixXcd QubitOperator::dense() const {
  const std::size_t dim = std::size_t{1} << n_;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [word, coeff] : terms_) {
    std::uint64_t flip = 0;
    for (int q = 0; q < n_; ++q)
      if (word[q] == 'X' || word[q] == 'Y') flip |= (1ull << q);
    for (std::uint64_t b = 0; b < dim; ++b) {
      cplx phase = coeff;
      for (int q = 0; q < n_; ++q) {
        const bool set = (b >> q) & 1u;
        if (word[q] == 'Z' && set) phase = -phase;
        if (word[q] == 'Y') phase *= set ? cplx(0, -1) : cplx(0, 1);
      }
      mat(b ^ flip, b) += phase;
    }
  }
  return mat;
}

std::string QubitOperator::dump() const {
  std::string out;
  char buf[96];
  for (const auto& [w, c] : terms_) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g ", c.real(), c.imag());
    out += buf;
    out += w;
    out += '\n';
  }
  return out;
}

QubitOperator QubitOperator::parse(const std::string& text) {
  std::istringstream is(text);
  double re, im;
  std::string word;
  int n = -1;
  QubitOperator op(0);
  while (is >> re >> im >> word) {
    if (n < 0) {
      n = static_cast<int>(word.size());
      op = QubitOperator(n);
    }
    op.add(word, cplx(re, im));
  }
  return op;
}

// ---------------------------------------------------------------------------
// Jordan-Wigner mapping and Hamiltonian assembly
// ---------------------------------------------------------------------------

QubitOperator jordan_wigner(int mode, bool dagger, int m) {
  if (mode < 0 || mode >= m) throw std::out_of_range("jordan_wigner: mode out of range");
  std::string word(m, 'I');
  for (int q = 0; q < mode; ++q) word[q] = 'Z';
  QubitOperator op(m);
  word[mode] = 'X';
  op.add(word, 0.5);
  word[mode] = 'Y';
  op.add(word, dagger ? cplx(0.0, -0.5) : cplx(0.0, 0.5));
  return op;
}

QubitOperator number_operator(int mode, int m) {
  QubitOperator op = QubitOperator::identity(m, 0.5);
  std::string word(m, 'I');
  word[mode] = 'Z';
  op.add(word, -0.5);
  return op;
}

QubitOperator total_number_operator(int m) {
  QubitOperator op(m);
  for (int p = 0; p < m; ++p) op += number_operator(p, m);
  op.simplify();
  return op;
}

QubitOperator build_qubit_hamiltonian(const HamiltonianTensors& tensors) {
  const int m = tensors.m;
  Eigen::MatrixXcd h1 = tensors.t + tensors.v_ext;
  if ((h1 - h1.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("build_qubit_hamiltonian: non-Hermitian one-body tensor");
  if (tensors.has_interaction()) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            if (std::abs(tensors.vee(i, j, k, l) - std::conj(tensors.vee(j, i, l, k))) > 1e-10)
              throw std::invalid_argument("build_qubit_hamiltonian: non-Hermitian two-body tensor");
  }

  std::vector<QubitOperator> a(m, QubitOperator(m)), ad(m, QubitOperator(m));
  for (int p = 0; p < m; ++p) {
    a[p] = jordan_wigner(p, false, m);
    ad[p] = jordan_wigner(p, true, m);
  }

  QubitOperator h(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (std::abs(h1(i, j)) == 0.0) continue;
      QubitOperator hop = ad[i] * a[j];
      hop *= h1(i, j);
      h += hop;
    }
  if (tensors.has_interaction()) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const cplx v = tensors.vee(i, j, k, l);
            if (std::abs(v) == 0.0) continue;
            QubitOperator term = ad[i] * ad[k] * a[l] * a[j];
            term *= 0.5 * v;
            h += term;
          }
  }
  h.simplify();
  return h;
}

std::vector<RdmObservable> rdm_observables(int m) {
  if (m < 1) throw std::invalid_argument("rdm_observables: need m >= 1");
  std::vector<RdmObservable> out;
  std::vector<QubitOperator> a(m, QubitOperator(m)), ad(m, QubitOperator(m));
  for (int p = 0; p < m; ++p) {
    a[p] = jordan_wigner(p, false, m);
    ad[p] = jordan_wigner(p, true, m);
  }
  char label[64];

  auto push = [&](RdmObservable::Target t, std::array<int, 4> idx, QubitOperator op,
                  const std::string& name) {
    op.simplify();
    out.push_back({t, idx, std::move(op), name});
  };

  for (int i = 0; i < m; ++i) {
    std::snprintf(label, sizeof(label), "rho_re[%d][%d]", i, i);
    push(RdmObservable::Target::rho_re, {i, i, -1, -1}, number_operator(i, m), label);
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      QubitOperator x = ad[i] * a[j];
      QubitOperator xc = ad[j] * a[i];
      QubitOperator re = x + xc;
      re *= 0.5;
      std::snprintf(label, sizeof(label), "rho_re[%d][%d]", i, j);
      push(RdmObservable::Target::rho_re, {i, j, -1, -1}, std::move(re), label);
      QubitOperator im = x - xc;
      im *= cplx(0.0, -0.5);
      std::snprintf(label, sizeof(label), "rho_im[%d][%d]", i, j);
      push(RdmObservable::Target::rho_im, {i, j, -1, -1}, std::move(im), label);
    }

  // Independent two-body entries: creation pair (p1<p2), annihilation pair
  // (q1<q2), with the pair indices ordered to use Hermiticity once.
  std::vector<std::pair<int, int>> pairs;
  for (int p1 = 0; p1 < m; ++p1)
    for (int p2 = p1 + 1; p2 < m; ++p2) pairs.push_back({p1, p2});
  for (std::size_t P = 0; P < pairs.size(); ++P)
    for (std::size_t Q = P; Q < pairs.size(); ++Q) {
      const auto [i, k] = pairs[P];   // creations
      const auto [j, l] = pairs[Q];   // annihilations: gamma_ijkl, j<l
      QubitOperator x = ad[i] * ad[k] * a[l] * a[j];
      QubitOperator xc = ad[j] * ad[l] * a[k] * a[i];
      QubitOperator re = x + xc;
      re *= 0.5;
      std::snprintf(label, sizeof(label), "gamma_re[%d][%d][%d][%d]", i, j, k, l);
      push(RdmObservable::Target::gamma_re, {i, j, k, l}, std::move(re), label);
      if (Q != P) {
        QubitOperator im = x - xc;
        im *= cplx(0.0, -0.5);
        std::snprintf(label, sizeof(label), "gamma_im[%d][%d][%d][%d]", i, j, k, l);
        push(RdmObservable::Target::gamma_im, {i, j, k, l}, std::move(im), label);
      }
    }
  return out;
}

}  // namespace hyxc
