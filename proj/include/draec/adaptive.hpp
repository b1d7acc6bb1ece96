#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "draec/error.hpp"

namespace draec {

// Hyperparameters of the per-(mic, bin) adaptive filters. The unified filter
// stacks aec_taps playback taps and dr_taps delayed-observation taps per mic.
struct DraecConfig {
  int aec_taps = 5;        // playback filter length, frames
  int dr_taps = 5;         // prediction taps per mic, frames
  int delay = 2;           // prediction delay separating early from late, frames
  int num_mics = 2;
  double transition = 1.0;        // state transition scalar
  double noise_floor = 1e-4;      // additive floor of the process-noise estimate
  double psd_smoothing = 0.8;     // recursive smoothing factor for source PSD
  double forgetting = 0.9995;     // RLS forgetting factor
  double psd_floor = 1e-10;       // lower bound for PSDs and gain denominators
  double init_cov = 1.0;          // initial error covariance scale
  bool adapt_process_noise = true;  // false: process noise fixed at noise_floor
  int bulk_delay = 0;             // playback alignment, samples

  int filter_len() const { return aec_taps + num_mics * dr_taps; }

  bool operator==(const DraecConfig&) const = default;

  void validate() const {
    if (aec_taps < 0) throw ConfigError("filter.aec_taps: must be >= 0");
    if (dr_taps < 0) throw ConfigError("filter.dr_taps: must be >= 0");
    if (num_mics < 1) throw ConfigError("filter.num_mics: must be >= 1");
    if (filter_len() < 1) throw ConfigError("filter.aec_taps/filter.dr_taps: at least one tap required");
    if (delay < 1) throw ConfigError("filter.delay (delta): must be >= 1");
    if (noise_floor < 0) throw ConfigError("filter.noise_floor (eta): must be >= 0");
    if (psd_smoothing <= 0 || psd_smoothing > 1)
      throw ConfigError("filter.psd_smoothing (alpha): must be in (0, 1]");
    if (forgetting <= 0 || forgetting > 1)
      throw ConfigError("filter.forgetting (lambda): must be in (0, 1]");
    if (psd_floor <= 0) throw ConfigError("filter.psd_floor: must be > 0");
    if (init_cov < 0) throw ConfigError("filter.init_cov: must be >= 0");
    if (bulk_delay < 0) throw ConfigError("filter.bulk_delay: must be >= 0");
  }
};

// State of one adaptive filter. w_pred/phi_pred hold the one-step prediction;
// w_prev is the last posterior estimate, kept for the process-noise update.
// For RLS the same struct is reused: w_pred carries the current weights and
// phi_pred the inverse correlation matrix.
struct FilterState {
  Eigen::VectorXcd w_pred;
  Eigen::VectorXcd w_prev;
  Eigen::MatrixXcd phi_pred;
  double phi_s_hat = 1.0;      // smoothed source PSD from the prior error
  double phi_recursive = 1.0;  // posterior-error PSD recursion
  double phi_u = 0.0;          // process-noise variance
};

struct StepOutput {
  std::complex<double> s_hat;    // posterior output estimate
  std::complex<double> s_prior;  // prior prediction error
  Eigen::VectorXcd gain;
};

inline FilterState init_state(const DraecConfig& cfg) {
  cfg.validate();
  const int len = cfg.filter_len();
  FilterState st;
  st.w_pred = Eigen::VectorXcd::Zero(len);
  st.w_prev = Eigen::VectorXcd::Zero(len);
  st.phi_pred = cfg.init_cov * Eigen::MatrixXcd::Identity(len, len);
  st.phi_s_hat = 1.0;
  st.phi_recursive = 1.0;
  st.phi_u = cfg.noise_floor;
  return st;
}

// Strided view of one bin's frame sequence; indices before the first frame
// read as zero so regressors are well defined from t = 0.
struct BinSeries {
  const std::complex<double>* data = nullptr;
  int len = 0;
  int stride = 1;

  std::complex<double> at(int t) const {
    return (data == nullptr || t < 0 || t >= len) ? std::complex<double>(0.0, 0.0)
                                                  : data[static_cast<std::ptrdiff_t>(t) * stride];
  }
};

// Regressor layout: playback block first, then one delayed block per mic:
//   [x(t), ..., x(t-Lx+1), y_1(t-D), ..., y_1(t-D-Ly+1), ..., y_M(t-D), ...]
inline void build_regressor(const BinSeries& playback, std::span<const BinSeries> mics, int t,
                            const DraecConfig& cfg, Eigen::VectorXcd& z) {
  z.resize(cfg.filter_len());
  int i = 0;
  for (int l = 0; l < cfg.aec_taps; ++l) z[i++] = playback.at(t - l);
  for (int n = 0; n < cfg.num_mics; ++n)
    for (int l = 0; l < cfg.dr_taps; ++l) z[i++] = mics[n].at(t - cfg.delay - l);
}

inline Eigen::VectorXcd build_regressor(const BinSeries& playback, std::span<const BinSeries> mics,
                                        int t, const DraecConfig& cfg) {
  Eigen::VectorXcd z;
  build_regressor(playback, mics, t, cfg, z);
  return z;
}

// Process-noise variance from the coefficient change: |w - w_old|^2 / L + floor.
inline double estimate_process_noise(const Eigen::VectorXcd& w_new, const Eigen::VectorXcd& w_old,
                                     const DraecConfig& cfg) {
  if (w_new.size() != w_old.size()) throw Error("estimate_process_noise: length mismatch");
  return (w_new - w_old).squaredNorm() / static_cast<double>(w_new.size()) + cfg.noise_floor;
}

struct PsdEstimate {
  double phi_s_hat;  // smoothed prior-error power, used in the gain denominator
  double phi;        // posterior-error recursion carried to the next frame
};

// Both PSD recursions share the previous posterior value phi_prev:
//   phi_s_hat = a * phi_prev + (1-a) |s_prior|^2
//   phi       = a * phi_prev + (1-a) |s_post|^2
inline PsdEstimate estimate_psd(double phi_prev, std::complex<double> s_prior,
                                std::complex<double> s_post, double alpha, double floor) {
  PsdEstimate p;
  p.phi_s_hat = std::max(alpha * phi_prev + (1.0 - alpha) * std::norm(s_prior), floor);
  p.phi = std::max(alpha * phi_prev + (1.0 - alpha) * std::norm(s_post), floor);
  return p;
}

namespace detail {

inline void check_finite(const Eigen::VectorXcd& z, std::complex<double> y, const char* who) {
  if (!z.allFinite() || !std::isfinite(y.real()) || !std::isfinite(y.imag()))
    throw Error(std::string(who) + ": non-finite input");
}

}  // namespace detail

// One Kalman update + predict for a single bin and mic. The covariance is
// kept exactly Hermitian by symmetrizing after the rank-one update.
inline StepOutput kalman_step(FilterState& st, const Eigen::VectorXcd& z, std::complex<double> y,
                              const DraecConfig& cfg) {
  detail::check_finite(z, y, "kalman_step");

  const double phi_prev = st.phi_recursive;
  const std::complex<double> s_prior = y - st.w_pred.dot(z);
  const double phi_s =
      std::max(cfg.psd_smoothing * phi_prev + (1.0 - cfg.psd_smoothing) * std::norm(s_prior), cfg.psd_floor);

  const Eigen::VectorXcd phi_z = st.phi_pred * z;
  const double denom = std::max(phi_s + std::real(z.dot(phi_z)), cfg.psd_floor);
  const Eigen::VectorXcd gain = phi_z / denom;

  const Eigen::VectorXcd w_hat = st.w_pred + gain * std::conj(s_prior);
  Eigen::MatrixXcd phi_post = st.phi_pred - gain * phi_z.adjoint();  // z^H Phi == (Phi z)^H for Hermitian Phi
  phi_post = 0.5 * (phi_post + phi_post.adjoint()).eval();

  st.phi_u = cfg.adapt_process_noise ? estimate_process_noise(w_hat, st.w_prev, cfg) : cfg.noise_floor;

  const std::complex<double> s_post = y - w_hat.dot(z);

  st.w_pred = cfg.transition * w_hat;
  st.phi_pred = (cfg.transition * cfg.transition) * phi_post;
  st.phi_pred.diagonal().array() += st.phi_u;
  st.w_prev = w_hat;

  const PsdEstimate p = estimate_psd(phi_prev, s_prior, s_post, cfg.psd_smoothing, cfg.psd_floor);
  st.phi_s_hat = p.phi_s_hat;
  st.phi_recursive = p.phi;

  return {s_post, s_prior, gain};
}

// Exponentially weighted RLS on the same state layout.
inline StepOutput rls_step(FilterState& st, const Eigen::VectorXcd& z, std::complex<double> y,
                           const DraecConfig& cfg) {
  detail::check_finite(z, y, "rls_step");

  const std::complex<double> e = y - st.w_pred.dot(z);

  const Eigen::VectorXcd p_z = st.phi_pred * z;
  const double denom = std::max(cfg.forgetting + std::real(z.dot(p_z)), cfg.psd_floor);
  const Eigen::VectorXcd gain = p_z / denom;

  const Eigen::VectorXcd w = st.w_pred + gain * std::conj(e);
  Eigen::MatrixXcd p_new = (st.phi_pred - gain * p_z.adjoint()) / cfg.forgetting;
  p_new = 0.5 * (p_new + p_new.adjoint()).eval();

  const std::complex<double> s_hat = y - w.dot(z);

  st.w_prev = w;
  st.w_pred = w;
  st.phi_pred = std::move(p_new);

  return {s_hat, e, gain};
}

}  // namespace draec
