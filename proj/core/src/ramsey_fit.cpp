#include "qdm/ramsey_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdm/constants.hpp"

namespace qdm::spin {

namespace {

using constants::pi;
using constants::two_pi;

// theta = (T2, f, A, C, p)
constexpr int kDim = 5;

struct Series {
  const std::vector<double>& tau;
  const std::vector<double>& s;
};

double model(const Eigen::VectorXd& th, double tau) {
  const double env = std::exp(-std::pow(tau / th[0], th[4]));
  return th[3] * env * std::cos(two_pi * th[1] * tau) * std::cos(pi * th[2] * tau);
}

void jacobian_row(const Eigen::VectorXd& th, double tau, Eigen::RowVectorXd& row) {
  const double t2 = th[0], f = th[1], a = th[2], c = th[3], p = th[4];
  const double u = tau / t2;
  const double up = std::pow(u, p);
  const double env = std::exp(-up);
  const double cf = std::cos(two_pi * f * tau);
  const double ca = std::cos(pi * a * tau);
  const double s = c * env * cf * ca;
  row[0] = s * p * up / t2;
  row[1] = -c * env * two_pi * tau * std::sin(two_pi * f * tau) * ca;
  row[2] = -c * env * pi * tau * cf * std::sin(pi * a * tau);
  row[3] = env * cf * ca;
  row[4] = (tau > 0.0 && u > 0.0) ? -s * up * std::log(u) : 0.0;
}

double sse(const Series& d, const Eigen::VectorXd& th) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double r = d.s[i] - model(th, d.tau[i]);
    acc += r * r;
  }
  return acc;
}

void clamp(Eigen::VectorXd& th, double t_span) {
  th[0] = std::clamp(th[0], t_span * 1e-3, t_span * 1e3);
  th[1] = std::max(th[1], 0.0);
  th[2] = std::max(th[2], 0.0);
  th[3] = std::clamp(th[3], 1e-9, 0.999);
  th[4] = std::clamp(th[4], 0.2, 4.0);
}

struct LmResult {
  Eigen::VectorXd theta;
  double sse = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

LmResult levenberg_marquardt(const Series& d, Eigen::VectorXd th, double t_span) {
  const int n = static_cast<int>(d.tau.size());
  Eigen::VectorXd residual(n);
  Eigen::MatrixXd jac(n, kDim);
  Eigen::RowVectorXd row(kDim);

  clamp(th, t_span);
  double cost = sse(d, th);
  double lambda = 1e-3;
  LmResult out;
  constexpr int kMaxIter = 200;
  for (int iter = 0; iter < kMaxIter && !out.converged; ++iter) {
    for (int i = 0; i < n; ++i) {
      residual[i] = d.s[i] - model(th, d.tau[i]);
      jacobian_row(th, d.tau[i], row);
      jac.row(i) = row;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * residual;
    bool stepped = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (int k = 0; k < kDim; ++k) {
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-30);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(jtr);
      Eigen::VectorXd trial = th + step;
      clamp(trial, t_span);
      const double trial_cost = sse(d, trial);
      if (trial_cost < cost) {
        const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
        const double step_rel = step.norm() / std::max(th.norm(), 1e-300);
        th = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel < 1e-14 || step_rel < 1e-12) out.converged = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
    out.iterations = iter + 1;
    if (!stepped) out.converged = true;  // no descent direction left: at a minimum
  }
  out.theta = th;
  out.sse = cost;
  return out;
}

/// Magnitude of the zero-padded discrete spectrum on a frequency grid;
/// returns the two strongest separated local maxima (descending magnitude).
std::vector<double> spectrum_peaks(const Series& d) {
  const std::size_t n = d.tau.size();
  const double span = d.tau.back() - d.tau.front();
  const double dt = span / static_cast<double>(n - 1);
  const double f_nyq = 0.5 / dt;
  const std::size_t m = 2048;
  std::vector<double> mag(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double f = f_nyq * static_cast<double>(k) / static_cast<double>(m);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = two_pi * f * d.tau[i];
      re += d.s[i] * std::cos(ph);
      im -= d.s[i] * std::sin(ph);
    }
    mag[k] = std::hypot(re, im);
  }
  std::vector<std::pair<double, double>> peaks;  // (magnitude, frequency)
  for (std::size_t k = 1; k + 1 < m; ++k) {
    if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) {
      peaks.emplace_back(mag[k], f_nyq * static_cast<double>(k) / static_cast<double>(m));
    }
  }
  std::sort(peaks.rbegin(), peaks.rend());
  std::vector<double> out;
  for (const auto& [pm, pf] : peaks) {
    if (out.size() >= 2) break;
    if (out.empty() || std::abs(pf - out[0]) > 2.0 * f_nyq / static_cast<double>(m)) {
      out.push_back(pf);
    }
  }
  if (out.empty()) out.push_back(0.0);
  return out;
}

/// T2 guess from a line fit of log |local fringe maxima| vs tau.
double envelope_t2_guess(const Series& d, double t_span) {
  std::vector<double> xs, ys;
  const std::size_t n = d.tau.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = std::abs(d.s[i]);
    if (a > std::abs(d.s[i - 1]) && a >= std::abs(d.s[i + 1]) && a > 0.0) {
      xs.push_back(d.tau[i]);
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 3) return 0.5 * t_span;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double k = static_cast<double>(xs.size());
  const double denom = k * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return 0.5 * t_span;
  const double slope = (k * sxy - sx * sy) / denom;
  if (slope >= -1e-12) return 0.5 * t_span;
  return std::clamp(-1.0 / slope, t_span * 1e-3, t_span * 1e3);
}

}  // namespace

RamseyFit fit_ramsey(const std::vector<double>& tau_s, const std::vector<double>& signal) {
  if (tau_s.size() != signal.size()) {
    throw std::invalid_argument("fit_ramsey: tau and signal lengths differ");
  }
  if (tau_s.size() < 8) throw std::invalid_argument("fit_ramsey: need at least 8 samples");
  for (std::size_t i = 1; i < tau_s.size(); ++i) {
    if (tau_s[i] <= tau_s[i - 1]) {
      throw std::invalid_argument("fit_ramsey: tau grid must be strictly increasing");
    }
  }
  const double lo = *std::min_element(signal.begin(), signal.end());
  const double hi = *std::max_element(signal.begin(), signal.end());
  if (hi - lo <= 0.0 || hi - lo < 1e-12 * std::max(std::abs(hi), std::abs(lo))) {
    throw std::runtime_error("fit_ramsey: degenerate data (constant samples)");
  }

  const Series d{tau_s, signal};
  const double t_span = tau_s.back() - tau_s.front();
  const double t2_0 = envelope_t2_guess(d, t_span);
  const double c_0 = std::clamp(std::max(std::abs(lo), std::abs(hi)), 1e-6, 0.999);
  const auto peaks = spectrum_peaks(d);

  // Candidate (f, A) starts. Two resolved tones sit at f +- A/2; a single
  // peak can be either an unresolved pair or A ~ 0. The model is invariant
  // under (f, A) -> (A/2, 2f), so try both assignments and keep the best.
  std::vector<std::pair<double, double>> starts;
  if (peaks.size() >= 2) {
    const double fa = std::max(peaks[0], peaks[1]);
    const double fb = std::min(peaks[0], peaks[1]);
    starts.emplace_back(0.5 * (fa + fb), fa - fb);
    starts.emplace_back(0.5 * (fa - fb), fa + fb);
  }
  starts.emplace_back(peaks[0], 0.0);
  starts.emplace_back(0.0, 2.0 * peaks[0]);

  LmResult best;
  for (const auto& [f0, a0] : starts) {
    Eigen::VectorXd th(kDim);
    th << t2_0, f0, a0, c_0, 1.0;
    LmResult r = levenberg_marquardt(d, th, t_span);
    if (r.sse < best.sse) best = r;
  }

  RamseyFit fit;
  fit.t2_star = best.theta[0];
  fit.detuning_hz = best.theta[1];
  fit.a_hf_hz = best.theta[2];
  fit.contrast = best.theta[3];
  fit.decay_p = best.theta[4];
  fit.converged = best.converged;
  fit.iterations = best.iterations;
  const auto n = static_cast<double>(tau_s.size());
  fit.rmse = std::sqrt(best.sse / n);

  // Covariance at the optimum: sigma^2 (J^T J)^-1.
  Eigen::MatrixXd jac(tau_s.size(), kDim);
  Eigen::RowVectorXd row(kDim);
  for (std::size_t i = 0; i < tau_s.size(); ++i) {
    jacobian_row(best.theta, tau_s[i], row);
    jac.row(static_cast<int>(i)) = row;
  }
  const double dof = std::max(n - kDim, 1.0);
  const double var = best.sse / dof;
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const Eigen::MatrixXd cov =
      var * jtj.completeOrthogonalDecomposition().pseudoInverse();
  const auto err = [&cov](int k) { return std::sqrt(std::max(cov(k, k), 0.0)); };
  fit.t2_star_err = err(0);
  fit.detuning_err = err(1);
  fit.a_hf_err = err(2);
  fit.contrast_err = err(3);
  fit.decay_p_err = err(4);
  return fit;
}

}  // namespace qdm::spin
