#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hbc/types.hpp"

namespace hbc {

// Lumped capacitive front end. c2 is the body-to-environment capacitance
// (the human body capacitance); c1 couples body and device ground, c3
// device ground and earth. The voltage source holds the body at `vs`; the
// current source `is` replaces charge after every capacitance change.
struct CircuitModel {
  double c1 = 20e-12;
  double c2 = 100e-12;
  double c3 = 5e-12;
  double vs = 1.0;
  double is = 2.5e-10;

  double total_capacitance() const { return c1 + c2 + c3; }
  // C_total * VS / IS. The defaults give 0.5 s.
  double time_constant() const { return total_capacitance() * vs / is; }
  // Throws DomainError unless all quantities are positive and c2 >= 10 * c3.
  void validate() const;
};

// U_B = Q_B / C_B. Throws DomainError for C_B <= 0.
double body_potential(double charge_coulomb, double capacitance_farad);

// Potential deviation from VS (microvolts) produced by a body-capacitance
// trajectory (farads, one value per sample, standing in for c2). Charge is
// conserved across each capacitance change and the deviation then relaxes
// toward zero with the model's time constant. The circuit starts in steady
// state at trajectory[0].
std::vector<double> simulate_potential_response(std::span<const double> body_capacitance,
                                                const CircuitModel& model, double fs);

struct NoiseSigma {
  double cap_uV = 0.0;
  double acc = 0.0;
  double gyro = 0.0;
};

struct CoupledChannels {
  bool acc = false;
  bool gyro = false;
};

struct ExerciseScript {
  LabelId label = 0;
  int repetitions = 1;
  double period_s = 2.0;
  double cap_amplitude_uV = 500.0;
  // Peak amplitude per IMU axis: acc xyz (m/s^2) then gyro xyz (deg/s).
  std::array<double, 6> imu_amplitude{};
  // Linear amplitude change per repetition, as a fraction of the first.
  double amplitude_drift = 0.0;
  NoiseSigma noise;
  CoupledChannels coupled;
  // Capacitance pulse duration as a fraction of the period, in (0, 1].
  double pulse_width = 0.5;
  // Static accelerometer reading (gravity in device frame) for the segment.
  std::array<double, 3> acc_baseline{0.0, 0.0, 9.81};
};

struct GeneratorConfig {
  std::string session_id = "sim";
  std::string user_id = "u0";
  int session_index = 0;
  std::string group_id;
  SensorPosition position = SensorPosition::kWrist;
  LabelSetId label_set = LabelSetId::kLeg7;
  AccUnit acc_unit = AccUnit::kMetersPerSecond2;
  // Label for the rest gaps before, between and after segments.
  LabelId rest_label = kDiscard;
  double rest_gap_s = 4.0;
  double fs = 20.0;
  CircuitModel model;
};

// Throws DomainError when a script or the config violates its invariants.
void validate_script(const ExerciseScript& s);

// Renders the scripts back to back, separated by rest gaps, into a Session.
// Deterministic for a fixed seed; noise draws come from the "simulate"
// substream so the noise-free signal does not depend on the seed.
Session generate_session(std::span<const ExerciseScript> scripts, const GeneratorConfig& cfg,
                         std::uint64_t seed);

}  // namespace hbc
