#include "qdob/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "qdob/errors.hpp"

namespace qdob {

namespace {

constexpr double kPi = std::numbers::pi;

// Durand-Kerner iteration; good enough for the low-degree polynomials a
// plant description carries. Coefficients ascending, leading coefficient
// must be nonzero.
std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs) {
  int degree = static_cast<int>(coeffs.size()) - 1;
  while (degree > 0 && coeffs[static_cast<std::size_t>(degree)] == 0.0) {
    --degree;
  }
  if (degree <= 0) return {};
  const double lead = coeffs[static_cast<std::size_t>(degree)];
  std::vector<std::complex<double>> monic(static_cast<std::size_t>(degree) + 1);
  for (int i = 0; i <= degree; ++i) {
    monic[static_cast<std::size_t>(i)] =
        coeffs[static_cast<std::size_t>(i)] / lead;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc = monic[static_cast<std::size_t>(degree)];
    for (int i = degree - 1; i >= 0; --i) {
      acc = acc * x + monic[static_cast<std::size_t>(i)];
    }
    return acc;
  };
  double radius = 0.0;
  for (int i = 0; i < degree; ++i) {
    radius = std::max(radius, std::abs(monic[static_cast<std::size_t>(i)]));
  }
  radius = 1.0 + radius;
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) {
    const double angle = 2.0 * kPi * i / degree + 0.4;
    roots[static_cast<std::size_t>(i)] = std::polar(0.7 * radius, angle);
  }
  for (int iter = 0; iter < 500; ++iter) {
    double shift = 0.0;
    for (int i = 0; i < degree; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (int j = 0; j < degree; ++j) {
        if (j != i) {
          denom *= roots[static_cast<std::size_t>(i)] -
                   roots[static_cast<std::size_t>(j)];
        }
      }
      const std::complex<double> delta =
          eval(roots[static_cast<std::size_t>(i)]) / denom;
      roots[static_cast<std::size_t>(i)] -= delta;
      shift = std::max(shift, std::abs(delta));
    }
    if (shift < 1e-13 * radius) break;
  }
  return roots;
}

// Polynomial product, ascending coefficients.
std::vector<double> poly_mul(std::span<const double> p,
                             std::span<const double> q) {
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      out[i + j] += p[i] * q[j];
    }
  }
  return out;
}

// Difference-equation state with separate history and feedthrough access so
// the loop can resolve the same-step algebra before committing the input.
class TfState {
 public:
  explicit TfState(DiscreteTf tf)
      : tf_(std::move(tf)),
        u_hist_(tf_.b.size() > 1 ? tf_.b.size() - 1 : 0, 0.0),
        y_hist_(tf_.a.size() > 1 ? tf_.a.size() - 1 : 0, 0.0) {}

  double feedthrough() const { return tf_.feedthrough(); }

  // Contribution of past samples to the next output.
  double history_response() const {
    double acc = 0.0;
    for (std::size_t j = 1; j < tf_.b.size(); ++j) {
      acc += tf_.b[j] * u_hist_[j - 1];
    }
    for (std::size_t j = 1; j < tf_.a.size(); ++j) {
      acc -= tf_.a[j] * y_hist_[j - 1];
    }
    return acc;
  }

  double commit(double input) {
    const double output = tf_.feedthrough() * input + history_response();
    push(u_hist_, input);
    push(y_hist_, output);
    return output;
  }

 private:
  static void push(std::vector<double>& hist, double v) {
    if (hist.empty()) return;
    for (std::size_t j = hist.size(); j-- > 1;) hist[j] = hist[j - 1];
    hist[0] = v;
  }

  DiscreteTf tf_;
  std::vector<double> u_hist_;
  std::vector<double> y_hist_;
};

// Radix-2 FFT when the length allows it, direct DFT otherwise. Only energy
// fractions are consumed, so an unnormalized transform is fine.
void dft_energy(std::span<const std::complex<double>> in,
                std::vector<std::complex<double>>& out) {
  const std::size_t n = in.size();
  out.assign(in.begin(), in.end());
  if (n >= 2 && (n & (n - 1)) == 0) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(out[i], out[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const double angle = -2.0 * kPi / static_cast<double>(len);
      const std::complex<double> wlen = std::polar(1.0, angle);
      for (std::size_t i = 0; i < n; i += len) {
        std::complex<double> w(1.0, 0.0);
        for (std::size_t k = 0; k < len / 2; ++k) {
          const std::complex<double> u = out[i + k];
          const std::complex<double> v = out[i + k + len / 2] * w;
          out[i + k] = u + v;
          out[i + k + len / 2] = u - v;
          w *= wlen;
        }
      }
    }
    return;
  }
  std::vector<std::complex<double>> tmp(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      acc += in[c] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k) *
                                         static_cast<double>(c) /
                                         static_cast<double>(n));
    }
    tmp[k] = acc;
  }
  out = std::move(tmp);
}

// Fourier amplitude of one real sequence at a (not necessarily bin-aligned)
// frequency.
double amplitude_at(std::span<const double> x, double omega, double T) {
  std::complex<double> acc(0.0, 0.0);
  const std::complex<double> rot = std::polar(1.0, -omega * T);
  std::complex<double> phase(1.0, 0.0);
  for (double v : x) {
    acc += v * phase;
    phase *= rot;
  }
  return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

}  // namespace

void NominalPlant::validate() const {
  if (num.empty() || den.empty()) {
    throw config_error("plant: empty coefficient list");
  }
  if (num.back() == 0.0) {
    throw config_error("plant: numerator leading coefficient is zero");
  }
  const int n = numerator_degree();
  const int m = denominator_degree();
  if (n >= m) throw config_error("plant: must be strictly proper (n < m)");
  if (m - n > 1) {
    throw config_error(
        "plant: relative degree must be 1 so the observer path stays proper");
  }
  std::vector<double> monic_den = den;
  monic_den.push_back(1.0);
  for (const auto& root : poly_roots(monic_den)) {
    if (root.real() >= -1e-9) {
      throw config_error("plant: pole in the closed right half-plane");
    }
  }
  for (const auto& root : poly_roots(num)) {
    if (root.real() >= -1e-9) {
      throw config_error("plant: zero in the closed right half-plane");
    }
  }
}

NominalPlant default_plant() { return NominalPlant{{1.0}, {1.0}}; }

DiscreteTf backward_euler(std::span<const double> num,
                          std::span<const double> den, double sample_time) {
  if (num.empty() || den.empty()) {
    throw config_error("backward_euler: empty polynomial");
  }
  const std::size_t order = std::max(num.size(), den.size()) - 1;
  // s^k -> (1 - q)^k / T^k with q = z^-1; multiply through by T^order.
  auto substitute = [order, sample_time](std::span<const double> poly) {
    std::vector<double> acc(order + 1, 0.0);
    std::vector<double> binom{1.0};  // (1 - q)^k
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const double scale =
          poly[k] * std::pow(sample_time, static_cast<double>(order - k));
      for (std::size_t j = 0; j < binom.size(); ++j) {
        acc[j] += scale * binom[j];
      }
      binom = poly_mul(binom, std::array<double, 2>{1.0, -1.0});
    }
    return acc;
  };
  DiscreteTf tf;
  tf.b = substitute(num);
  tf.a = substitute(den);
  const double lead = tf.a.front();
  if (std::abs(lead) < 1e-12) {
    throw config_error("backward_euler: discretized denominator degenerates");
  }
  for (double& v : tf.b) v /= lead;
  for (double& v : tf.a) v /= lead;
  return tf;
}

PlantDiscretization discretize_plant(const NominalPlant& plant,
                                     const HyperParams& p) {
  plant.validate();
  std::vector<double> monic_den = plant.den;
  monic_den.push_back(1.0);

  PlantDiscretization out;
  out.plant = backward_euler(plant.num, monic_den, p.sample_time);

  // B * P^-1 = omega_b * den(s) / ((s + omega_b) * num(s))
  std::vector<double> obs_num = monic_den;
  for (double& v : obs_num) v *= p.omega_b;
  const std::vector<double> obs_den =
      poly_mul(plant.num, std::array<double, 2>{p.omega_b, 1.0});
  out.observer_path = backward_euler(obs_num, obs_den, p.sample_time);
  return out;
}

void DisturbanceSpec::validate(const HyperParams& p) const {
  if (envelope_depth < 0.0 || envelope_depth >= 1.0) {
    throw config_error("disturbance: envelope_depth must lie in [0, 1)");
  }
  if (envelope_depth > 0.0 && !(envelope_rate < p.rho)) {
    throw config_error("disturbance: envelope_rate must stay below rho");
  }
  if (envelope_rate < 0.0) {
    throw config_error("disturbance: envelope_rate must be >= 0");
  }
  for (const auto& h : harmonics) {
    if (h.index < 0) throw config_error("disturbance: harmonic index < 0");
  }
}

std::vector<double> make_disturbance(const DisturbanceSpec& spec,
                                     const HyperParams& p,
                                     std::size_t samples) {
  spec.validate(p);
  std::vector<double> out(samples, 0.0);
  const double T = p.sample_time;
  for (const auto& h : spec.harmonics) {
    const double omega = h.index * p.omega0;
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = static_cast<double>(k) * T;
      const double envelope =
          1.0 + spec.envelope_depth *
                    std::sin(spec.envelope_rate * t + h.envelope_phase);
      out[k] += h.amplitude * envelope * std::cos(omega * t + h.phase);
    }
  }
  return out;
}

QuasiperiodicityCheck check_quasiperiodic(std::span<const double> samples,
                                          const HyperParams& p,
                                          double energy_threshold) {
  const auto period_samples = static_cast<std::size_t>(
      std::llround(p.period() / p.sample_time));
  if (period_samples == 0 || samples.size() % period_samples != 0) {
    throw config_error(
        "check_quasiperiodic: sample count must be a multiple of the rounded "
        "period");
  }
  const std::size_t periods = samples.size() / period_samples;
  if (periods < 8) {
    throw config_error("check_quasiperiodic: need at least 8 whole periods");
  }

  const double band = p.rho * p.period();  // lifted-domain band edge
  double min_fraction = 1.0;
  std::vector<std::complex<double>> lifted(periods);
  std::vector<std::complex<double>> spectrum;
  for (std::size_t offset = 0; offset < period_samples; ++offset) {
    for (std::size_t c = 0; c < periods; ++c) {
      lifted[c] = samples[c * period_samples + offset];
    }
    dft_energy(lifted, spectrum);
    double total = 0.0;
    double in_band = 0.0;
    for (std::size_t k = 0; k < periods; ++k) {
      const double e = std::norm(spectrum[k]);
      total += e;
      double big_omega = 2.0 * kPi * static_cast<double>(k) /
                         static_cast<double>(periods);
      if (big_omega > kPi) big_omega = 2.0 * kPi - big_omega;
      if (big_omega <= band) in_band += e;
    }
    const double fraction = total == 0.0 ? 1.0 : in_band / total;
    min_fraction = std::min(min_fraction, fraction);
  }
  return {min_fraction, min_fraction >= energy_threshold};
}

PhiFilter::PhiFilter(const PhiPlan& plan) {
  const int order = plan.order;
  stages_.resize(plan.stages.size());
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    const StageSpec& spec = plan.stages[i];
    Stage& st = stages_[i];
    st.spacing = spec.spacing_samples;
    // taps reordered by ascending delay m*Ubar: tap m multiplies the input
    // delayed by m*Ubar samples and equals alpha(order - m)/gamma
    st.taps.resize(static_cast<std::size_t>(2 * order + 1));
    for (int m = 0; m <= 2 * order; ++m) {
      st.taps[static_cast<std::size_t>(m)] =
          spec.taps[static_cast<std::size_t>(2 * order - m)] / spec.gamma;
    }
    st.line.assign(static_cast<std::size_t>(2 * order * st.spacing + 1), 0.0);
    st.pos = 0;
  }
  kappa_line_.assign(static_cast<std::size_t>(plan.kappa), 0.0);
  kappa_pos_ = 0;
}

std::size_t PhiFilter::stage_line_length(std::size_t stage) const {
  return stages_[stage].line.size();
}

void PhiFilter::advance(double input) {
  double value = input;
  for (Stage& st : stages_) {
    st.line[st.pos] = value;
    const std::size_t len = st.line.size();
    double acc = 0.0;
    std::size_t idx = st.pos;
    const auto spacing = static_cast<std::size_t>(st.spacing);
    for (double tap : st.taps) {
      acc += tap * st.line[idx];
      idx = idx >= spacing ? idx - spacing : idx + len - spacing;
    }
    st.pos = st.pos + 1 == len ? 0 : st.pos + 1;
    value = acc;
  }
  kappa_line_[kappa_pos_] = value;
  kappa_pos_ = kappa_pos_ + 1 == kappa_line_.size() ? 0 : kappa_pos_ + 1;
}

SimTrace run_closed_loop(const NominalPlant& plant, const PhiPlan& plan,
                         std::span<const double> disturbance,
                         double reference, std::size_t steps,
                         bool observer_enabled) {
  if (steps > disturbance.size()) {
    throw config_error("run_closed_loop: disturbance shorter than the run");
  }
  const auto period_samples =
      static_cast<std::size_t>(plan.period_samples);
  if (steps < period_samples) {
    throw config_error(
        "run_closed_loop: need at least one full period of steps");
  }

  const PlantDiscretization disc = discretize_plant(plant, plan.params);
  TfState plant_state(disc.plant);
  TfState observer_state(disc.observer_path);
  PhiFilter phi_error(plan);
  PhiFilter phi_estimate(plan);

  const double loop_gain = plan.loop_gain();  // omega_c * L
  const double q_feed = loop_gain / (loop_gain + 2.0);
  const double g0 = plant_state.feedthrough();
  const double f0 = observer_state.feedthrough();
  const double solve_denom = 1.0 + q_feed * (f0 * g0 - 1.0);

  SimTrace trace;
  trace.sample_time = plan.params.sample_time;
  trace.time.resize(steps);
  trace.reference.assign(steps, reference);
  trace.disturbance.resize(steps);
  trace.control.resize(steps);
  trace.output.resize(steps);
  trace.estimate.resize(steps);

  for (std::size_t k = 0; k < steps; ++k) {
    const double d = disturbance[k];
    double control = reference;
    double delayed_error = 0.0;
    double delayed_estimate = 0.0;
    if (observer_enabled) {
      delayed_error = phi_error.pending_output();
      delayed_estimate = phi_estimate.pending_output();
      const double recursion_tail =
          (loop_gain * delayed_error -
           (loop_gain - 2.0) * delayed_estimate) /
          (loop_gain + 2.0);
      const double plant_hist = plant_state.history_response();
      const double observer_hist = observer_state.history_response();
      control = (reference -
                 q_feed * (f0 * g0 * d + f0 * plant_hist + observer_hist) -
                 recursion_tail) /
                solve_denom;
    }
    const double output = plant_state.commit(control + d);
    const double internal = observer_state.commit(output);
    double estimate = 0.0;
    if (observer_enabled) {
      const double error_signal = internal - control;
      estimate = q_feed * error_signal +
                 (loop_gain * delayed_error -
                  (loop_gain - 2.0) * delayed_estimate) /
                     (loop_gain + 2.0);
      phi_error.advance(error_signal);
      phi_estimate.advance(estimate);
    }
    if (!std::isfinite(output) || std::abs(output) > 1e100) {
      throw eval_error("run_closed_loop: divergence at step " +
                       std::to_string(k));
    }
    trace.time[k] = static_cast<double>(k) * trace.sample_time;
    trace.disturbance[k] = d;
    trace.control[k] = control;
    trace.output[k] = output;
    trace.estimate[k] = estimate;
  }
  return trace;
}

std::vector<HarmonicAttenuation> suppression_metrics(
    const SimTrace& closed, const SimTrace& open, const HyperParams& p,
    std::span<const int> harmonics, double discard_fraction) {
  if (closed.size() != open.size() ||
      closed.sample_time != open.sample_time) {
    throw config_error("suppression_metrics: traces do not match");
  }
  if (!(discard_fraction >= 0.0) || !(discard_fraction < 1.0)) {
    throw config_error("suppression_metrics: discard fraction out of range");
  }
  const auto period_samples = static_cast<std::size_t>(
      std::llround(p.period() / p.sample_time));
  if (closed.size() <= 10 * period_samples) {
    throw config_error("suppression_metrics: trace shorter than 10 periods");
  }
  auto retained = static_cast<std::size_t>(
      static_cast<double>(closed.size()) * (1.0 - discard_fraction));
  retained = retained / period_samples * period_samples;  // whole periods
  if (retained == 0) {
    throw config_error("suppression_metrics: nothing left after discard");
  }
  const std::size_t start = closed.size() - retained;
  const double nyquist = kPi / p.sample_time;

  std::vector<HarmonicAttenuation> out;
  out.reserve(harmonics.size());
  for (int n : harmonics) {
    HarmonicAttenuation entry;
    entry.harmonic = n;
    const double omega = n * p.omega0;
    if (omega >= nyquist) {
      entry.valid = false;
      out.push_back(entry);
      continue;
    }
    const double closed_amp = amplitude_at(
        std::span<const double>(closed.output).subspan(start), omega,
        p.sample_time);
    const double open_amp = amplitude_at(
        std::span<const double>(open.output).subspan(start), omega,
        p.sample_time);
    entry.valid = open_amp > 0.0;
    entry.measured_db =
        entry.valid ? 20.0 * std::log10(closed_amp / open_amp) : 0.0;
    out.push_back(entry);
  }
  return out;
}

}  // namespace qdob
