#include "hyxc/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hyxc {

Statevector Statevector::basis_state(const OccupationVector& occ) {
  Statevector psi;
  psi.n_qubits = occ.size();
  psi.amps.assign(std::size_t{1} << occ.size(), cplx(0.0));
  psi.amps[occ.mask()] = 1.0;
  return psi;
}

double Statevector::norm() const {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return std::sqrt(s);
}

Ansatz Ansatz::hardware_efficient(int m, int n_electrons, int layers) {
  Ansatz a;
  a.n_qubits = m;
  a.n_layers = layers;
  a.reference = OccupationVector::lowest(n_electrons, m);
  return a;
}

std::vector<std::pair<int, int>> Ansatz::layer_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p + 1 < n_qubits; p += 2) pairs.push_back({p, p + 1});
  for (int p = 1; p + 1 < n_qubits; p += 2) pairs.push_back({p, p + 1});
  return pairs;
}

int Ansatz::n_parameters() const {
  return n_layers * static_cast<int>(layer_pairs().size()) * 3;
}

namespace {

/// Two-mode block on qubits (p,q):
///   |10> -> cos(t)|10> + e^{i phi} sin(t)|01>
///   |01> -> -e^{-i phi} sin(t)|10> + cos(t)|01>
///   |11> -> e^{i gamma}|11>,  |00> -> |00>.
void apply_block(Statevector& psi, int p, int q, double theta, double phi, double gamma) {
  const std::uint64_t bp = std::uint64_t{1} << p;
  const std::uint64_t bq = std::uint64_t{1} << q;
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx eip(std::cos(phi), std::sin(phi));
  const cplx eig(std::cos(gamma), std::sin(gamma));
  const std::uint64_t dim = psi.amps.size();
  for (std::uint64_t b = 0; b < dim; ++b) {
    if ((b & bp) && !(b & bq)) {
      const std::uint64_t partner = (b ^ bp) | bq;
      const cplx a10 = psi.amps[b];
      const cplx a01 = psi.amps[partner];
      psi.amps[b] = c * a10 - std::conj(eip) * s * a01;
      psi.amps[partner] = eip * s * a10 + c * a01;
    } else if ((b & bp) && (b & bq)) {
      psi.amps[b] *= eig;
    }
  }
}

}  // namespace

Statevector prepare_state(const Ansatz& ansatz, std::span<const double> parameters) {
  if (static_cast<int>(parameters.size()) != ansatz.n_parameters())
    throw std::invalid_argument("prepare_state: expected " +
                                std::to_string(ansatz.n_parameters()) + " parameters, got " +
                                std::to_string(parameters.size()));
  Statevector psi = Statevector::basis_state(ansatz.reference);
  const auto pairs = ansatz.layer_pairs();
  std::size_t at = 0;
  for (int layer = 0; layer < ansatz.n_layers; ++layer)
    for (const auto& [p, q] : pairs) {
      apply_block(psi, p, q, parameters[at], parameters[at + 1], parameters[at + 2]);
      at += 3;
    }
  return psi;
}

cplx expectation(const QubitOperator& op, const Statevector& psi) {
  if (op.n_qubits() != psi.n_qubits)
    throw std::invalid_argument("expectation: qubit count mismatch");
  const std::uint64_t dim = psi.amps.size();
  cplx total(0.0);
  for (const auto& [word, coeff] : op.terms()) {
    std::uint64_t flip = 0;
    for (int q = 0; q < op.n_qubits(); ++q)
      if (word[q] == 'X' || word[q] == 'Y') flip |= (std::uint64_t{1} << q);
    cplx acc(0.0);
    for (std::uint64_t b = 0; b < dim; ++b) {
      const cplx amp = psi.amps[b];
      if (amp == cplx(0.0)) continue;
      cplx phase(1.0);
      for (int q = 0; q < op.n_qubits(); ++q) {
        const bool set = (b >> q) & 1u;
        const char w = word[q];
        if (w == 'Z' && set) phase = -phase;
        else if (w == 'Y') phase *= set ? cplx(0, -1) : cplx(0, 1);
      }
      acc += std::conj(psi.amps[b ^ flip]) * phase * amp;
    }
    total += coeff * acc;
  }
  return total;
}

RdmPair measure_rdms(const Statevector& psi, int m) {
  RdmPair rdm;
  rdm.m = m;
  rdm.rho1 = Eigen::MatrixXcd::Zero(m, m);
  rdm.gamma2.assign(static_cast<std::size_t>(m) * m * m * m, cplx(0.0));

  // Collect the independent real numbers first.
  Eigen::MatrixXd re1 = Eigen::MatrixXd::Zero(m, m), im1 = Eigen::MatrixXd::Zero(m, m);
  std::map<std::array<int, 4>, double> re2, im2;
  for (const auto& obs : rdm_observables(m)) {
    const cplx val = expectation(obs.op, psi);
    if (std::abs(val.imag()) > 1e-9)
      throw std::runtime_error("measure_rdms: non-real expectation for " + obs.label);
    switch (obs.target) {
      case RdmObservable::Target::rho_re: re1(obs.index[0], obs.index[1]) = val.real(); break;
      case RdmObservable::Target::rho_im: im1(obs.index[0], obs.index[1]) = val.real(); break;
      case RdmObservable::Target::gamma_re: re2[obs.index] = val.real(); break;
      case RdmObservable::Target::gamma_im: im2[obs.index] = val.real(); break;
    }
  }

  for (int i = 0; i < m; ++i) {
    rdm.rho1(i, i) = re1(i, i);
    for (int j = i + 1; j < m; ++j) {
      rdm.rho1(i, j) = cplx(re1(i, j), im1(i, j));
      rdm.rho1(j, i) = std::conj(rdm.rho1(i, j));
    }
  }

  auto set_images = [&](int i, int j, int k, int l, cplx g) {
    rdm.gamma(i, j, k, l) = g;
    rdm.gamma(k, j, i, l) = -g;
    rdm.gamma(i, l, k, j) = -g;
    rdm.gamma(k, l, i, j) = g;
    const cplx gc = std::conj(g);
    rdm.gamma(j, i, l, k) = gc;
    rdm.gamma(l, i, j, k) = -gc;
    rdm.gamma(j, k, l, i) = -gc;
    rdm.gamma(l, k, j, i) = gc;
  };
  for (const auto& [idx, re] : re2) {
    const auto it = im2.find(idx);
    const double im = it == im2.end() ? 0.0 : it->second;
    set_images(idx[0], idx[1], idx[2], idx[3], cplx(re, im));
  }
  return rdm;
}

double energy_from_rdms(const RdmPair& rdms, const HamiltonianTensors& tensors) {
  if (rdms.m != tensors.m) throw std::invalid_argument("energy_from_rdms: dimension mismatch");
  const int m = tensors.m;
  cplx e(0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) e += (tensors.t(i, j) + tensors.v_ext(i, j)) * rdms.rho1(i, j);
  if (tensors.has_interaction()) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            e += 0.5 * tensors.vee(i, j, k, l) * rdms.gamma(i, j, k, l);
  }
  if (std::abs(e.imag()) > 1e-10)
    throw std::runtime_error("energy_from_rdms: imaginary residue " + std::to_string(e.imag()));
  return e.real();
}

namespace {

class Objective {
 public:
  Objective(const HamiltonianTensors& tensors, const Ansatz& ansatz)
      : ansatz_(ansatz), h_(build_qubit_hamiltonian(tensors)) {
    if (ansatz.n_qubits <= 10) dense_ = h_.dense();
  }

  double operator()(std::span<const double> params) {
    ++evals_;
    const Statevector psi = prepare_state(ansatz_, params);
    if (dense_.size()) {
      Eigen::Map<const Eigen::VectorXcd> v(psi.amps.data(), psi.amps.size());
      return (v.adjoint() * dense_ * v)(0).real();
    }
    return expectation(h_, psi).real();
  }

  int evals() const { return evals_; }
  const QubitOperator& hamiltonian() const { return h_; }

 private:
  const Ansatz& ansatz_;
  QubitOperator h_;
  Eigen::MatrixXcd dense_;
  int evals_ = 0;
};

struct SimplexOutcome {
  std::vector<double> x;
  double energy;
  bool converged;
};

/// Classic Nelder-Mead; records one trace row per iteration.
SimplexOutcome nelder_mead(Objective& f, std::vector<double> x0, double step, double spread_tol,
                           int max_evals, int restart_tag, std::vector<VqeTraceRow>& trace) {
  const int n = static_cast<int>(x0.size());
  std::vector<std::vector<double>> xs(n + 1, x0);
  for (int i = 0; i < n; ++i) xs[i + 1][i] += step;
  std::vector<double> fs(n + 1);
  const int eval_start = f.evals();
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
  };

  int iter = 0;
  bool converged = false;
  while (true) {
    sort_simplex();
    const double spread = fs[order[n]] - fs[order[0]];
    trace.push_back({restart_tag, iter, fs[order[0]], spread});
    if (spread < spread_tol) {
      converged = true;
      break;
    }
    if (f.evals() - eval_start >= max_evals) break;
    ++iter;

    const int worst = order[n];
    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int d = 0; d < n; ++d) centroid[d] += xs[i][d];
    }
    for (int d = 0; d < n; ++d) centroid[d] /= n;

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (int d = 0; d < n; ++d) x[d] = centroid[d] + coef * (xs[worst][d] - centroid[d]);
      return x;
    };

    std::vector<double> xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < fs[order[0]]) {
      std::vector<double> xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        xs[worst] = std::move(xe);
        fs[worst] = fe;
      } else {
        xs[worst] = std::move(xr);
        fs[worst] = fr;
      }
    } else if (fr < fs[order[n - 1]]) {
      xs[worst] = std::move(xr);
      fs[worst] = fr;
    } else {
      std::vector<double> xc = blend(fr < fs[worst] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = std::move(xc);
        fs[worst] = fc;
      } else {
        // Shrink toward the best vertex.
        const auto& best = xs[order[0]];
        for (int i = 0; i <= n; ++i) {
          if (i == order[0]) continue;
          for (int d = 0; d < n; ++d) xs[i][d] = best[d] + 0.5 * (xs[i][d] - best[d]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  sort_simplex();
  return {xs[order[0]], fs[order[0]], converged};
}

}  // namespace

VqeResult minimize_energy(const HamiltonianTensors& tensors, const Ansatz& ansatz,
                          const OptimizerConfig& opt) {
  if (ansatz.reference.particle_count() > ansatz.n_qubits)
    throw std::invalid_argument("minimize_energy: more particles than modes");
  Objective objective(tensors, ansatz);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(-opt.restart_spread, opt.restart_spread);

  VqeResult result;
  result.energy = std::numeric_limits<double>::infinity();
  const int n_params = ansatz.n_parameters();
  if (n_params == 0) {
    // Nothing to vary: the reference determinant is the whole manifold.
    result.parameters.clear();
    result.energy = objective(std::span<const double>{});
    result.converged = true;
    result.evaluations = 1;
    result.trace.push_back({0, 0, result.energy, 0.0});
    const Statevector ref = Statevector::basis_state(ansatz.reference);
    result.rdms = measure_rdms(ref, ansatz.n_qubits);
    result.rdms.basis_id = tensors.basis_id;
    return result;
  }
  for (int restart = 0; restart <= opt.restarts; ++restart) {
    std::vector<double> x0(n_params, 0.0);
    if (restart > 0) {
      x0 = result.parameters;
      for (auto& v : x0) v += jitter(rng);
    }
    SimplexOutcome out = nelder_mead(objective, std::move(x0), opt.initial_step, opt.spread_tol,
                                     opt.budget, restart, result.trace);
    if (out.energy < result.energy) {
      result.energy = out.energy;
      result.parameters = std::move(out.x);
    }
    result.converged = result.converged || out.converged;
  }
  result.evaluations = objective.evals();
  const Statevector best = prepare_state(ansatz, result.parameters);
  result.rdms = measure_rdms(best, ansatz.n_qubits);
  result.rdms.basis_id = tensors.basis_id;
  return result;
}

void write_vqe_trace(const std::string& path, const std::vector<VqeTraceRow>& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "restart,iter,energy,simplex_spread\n";
  char buf[128];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", row.restart, row.iter, row.energy,
                  row.spread);
    os << buf;
  }
}

}  // namespace hyxc
