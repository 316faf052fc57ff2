#include "hbc/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hbc/errors.hpp"
#include "hbc/rng.hpp"

namespace hbc {

void CircuitModel::validate() const {
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) throw DomainError("circuit capacitances must be positive");
  if (!(c2 >= 10.0 * c3)) throw DomainError("circuit requires c2 >= 10 * c3");
  if (!(vs > 0.0 && is > 0.0)) throw DomainError("circuit source values must be positive");
}

double body_potential(double charge_coulomb, double capacitance_farad) {
  if (!(capacitance_farad > 0.0)) throw DomainError("body capacitance must be positive");
  return charge_coulomb / capacitance_farad;
}

std::vector<double> simulate_potential_response(std::span<const double> body_capacitance,
                                                const CircuitModel& model, double fs) {
  if (body_capacitance.empty()) throw DomainError("capacitance trajectory is empty");
  if (!(fs > 0.0)) throw DomainError("sample rate must be positive");
  model.validate();
  for (double c : body_capacitance)
    if (!std::isfinite(c)) throw DomainError("capacitance trajectory contains non-finite values");

  const double fixed = model.c1 + model.c3;
  const double decay = std::exp(-1.0 / (fs * model.time_constant()));
  std::vector<double> out(body_capacitance.size());
  double c_prev = fixed + body_capacitance[0];
  double deviation = 0.0;  // volts
  for (std::size_t k = 0; k < body_capacitance.size(); ++k) {
    const double c_now = fixed + body_capacitance[k];
    if (!(c_now > 0.0)) throw DomainError("total capacitance must stay positive");
    const double charge = (model.vs + deviation) * c_prev;
    deviation = body_potential(charge, c_now) - model.vs;
    out[k] = deviation * 1e6;
    deviation *= decay;
    c_prev = c_now;
  }
  return out;
}

void validate_script(const ExerciseScript& s) {
  if (s.repetitions < 1) throw DomainError("script needs at least one repetition");
  if (!(s.period_s > 0.0)) throw DomainError("script period must be positive");
  if (!(s.pulse_width > 0.0 && s.pulse_width <= 1.0)) throw DomainError("pulse_width must be in (0, 1]");
  if (s.noise.cap_uV < 0.0 || s.noise.acc < 0.0 || s.noise.gyro < 0.0)
    throw DomainError("noise sigma must be non-negative");
}

Session generate_session(std::span<const ExerciseScript> scripts, const GeneratorConfig& cfg,
                         std::uint64_t seed) {
  if (scripts.empty()) throw DomainError("no exercise scripts");
  if (!(cfg.fs > 0.0)) throw DomainError("sample rate must be positive");
  if (cfg.rest_gap_s < 0.0) throw DomainError("rest gap must be non-negative");
  cfg.model.validate();
  for (const auto& s : scripts) validate_script(s);

  const auto gap = static_cast<std::size_t>(std::lround(cfg.rest_gap_s * cfg.fs));
  std::vector<std::size_t> seg_len;
  std::size_t total = gap;
  for (const auto& s : scripts) {
    seg_len.push_back(static_cast<std::size_t>(std::lround(s.repetitions * s.period_s * cfg.fs)));
    total += seg_len.back() + gap;
  }

  Session out;
  out.id = cfg.session_id;
  out.user_id = cfg.user_id;
  out.session_index = cfg.session_index;
  out.group_id = cfg.group_id;
  out.position = cfg.position;
  out.sample_rate_hz = cfg.fs;
  out.acc_unit = cfg.acc_unit;
  out.label_set = cfg.label_set;
  out.frames.resize(total);
  out.labels.assign(total, cfg.rest_label);

  std::vector<double> capacitance(total, cfg.model.c2);
  std::vector<const ExerciseScript*> noise_of(total, &scripts.back());
  const double two_pi = 2.0 * std::numbers::pi;

  std::size_t cursor = gap;
  for (std::size_t k = 0; k < cursor; ++k) noise_of[k] = &scripts.front();
  for (std::size_t si = 0; si < scripts.size(); ++si) {
    const ExerciseScript& s = scripts[si];
    const std::size_t begin = cursor;
    const std::size_t end = begin + seg_len[si];
    out.segments.push_back({s.label, begin, end, s.repetitions});
    // Deflection of about cap_amplitude for an instantaneous change.
    const double delta_c = s.cap_amplitude_uV * 1e-6 * cfg.model.total_capacitance() / cfg.model.vs;
    const double width = s.pulse_width * s.period_s;
    for (std::size_t k = begin; k < end; ++k) {
      const double t = static_cast<double>(k - begin) / cfg.fs;
      const int rep = std::min(s.repetitions - 1, static_cast<int>(std::floor(t / s.period_s)));
      const double gain = 1.0 + s.amplitude_drift * rep;
      const double in_rep = t - rep * s.period_s;
      if (in_rep < width) {
        const double shape = 0.5 * (1.0 - std::cos(two_pi * in_rep / width));
        capacitance[k] -= gain * delta_c * shape;
      }
      SampleFrame& f = out.frames[k];
      for (int a = 0; a < 3; ++a) {
        const double phase = two_pi * t / s.period_s + a * std::numbers::pi / 3.0;
        f.acc[a] = s.acc_baseline[a] + (s.coupled.acc ? gain * s.imu_amplitude[a] * std::sin(phase) : 0.0);
        f.gyro[a] = s.coupled.gyro ? gain * s.imu_amplitude[3 + a] * std::cos(phase) : 0.0;
      }
      out.labels[k] = s.label;
      noise_of[k] = &s;
    }
    // The following gap inherits this segment's orientation and noise.
    const std::size_t gap_end = std::min(total, end + gap);
    for (std::size_t k = end; k < gap_end; ++k) {
      out.frames[k].acc = s.acc_baseline;
      noise_of[k] = si + 1 < scripts.size() ? &scripts[si + 1] : &s;
    }
    cursor = end + gap;
  }
  for (std::size_t k = 0; k < gap; ++k) out.frames[k].acc = scripts.front().acc_baseline;

  const std::vector<double> potential = simulate_potential_response(capacitance, cfg.model, cfg.fs);

  Rng rng = make_rng(seed, "simulate");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double acc_scale = cfg.acc_unit == AccUnit::kG ? 1.0 / 9.80665 : 1.0;
  for (std::size_t k = 0; k < total; ++k) {
    SampleFrame& f = out.frames[k];
    const NoiseSigma& n = noise_of[k]->noise;
    f.t = static_cast<double>(k) / cfg.fs;
    f.cap_uV = potential[k] + n.cap_uV * normal(rng);
    for (int a = 0; a < 3; ++a) f.acc[a] = (f.acc[a] + n.acc * normal(rng)) * acc_scale;
    for (int a = 0; a < 3; ++a) f.gyro[a] += n.gyro * normal(rng);
  }
  return out;
}

}  // namespace hbc
