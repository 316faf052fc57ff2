#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hbc/simulate.hpp"
#include "hbc/types.hpp"

namespace hbc {

// Synthetic stand-ins for the three recorded datasets. Every preset is a
// pure function of its config (including the seed).

struct LegPreset {
  int users = 5;
  int sessions_per_user = 2;
  int min_reps = 10;
  int max_reps = 30;
  // Cap-channel signal-to-noise ratio per segment; nullopt: noise free.
  std::optional<double> cap_snr_db = 20.0;
  double imu_noise_acc = 0.3;   // m/s^2
  double imu_noise_gyro = 3.0;  // deg/s
  double fs = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Seven leg exercises per session. The three lifts move the legs only: the
// wrist IMU sees noise around one shared orientation while the body
// capacitance responds. Squats move the whole body and couple every
// channel. Users differ in tempo (about +-8%) and sessions in electrode
// gain (0.5x to 2x).
std::vector<Session> simulate_leg7(const LegPreset& p);

struct GymPreset {
  int users = 5;
  int sessions_per_user = 1;
  int min_reps = 10;
  int max_reps = 20;
  std::optional<double> cap_snr_db = 15.0;
  SensorPosition position = SensorPosition::kWrist;
  double fs = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Eleven gym exercises separated by Null rest.
std::vector<Session> simulate_gym12(const GymPreset& p);

struct CollabPreset {
  int groups = 4;
  int users_per_group = 2;
  int sessions_per_group = 2;
  int blocks = 16;  // activity blocks per session
  double block_s = 12.0;
  double rest_s = 3.0;
  double fs = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Collaborative work sessions: per group and day, one synchronized
// timeline for all members mixing joint blocks (carry, lift and drop
// together) with individual activities. Rest between blocks is A2.
std::vector<Session> simulate_collab(const CollabPreset& p);

// Signal-to-noise ratio (dB) of `noisy` against the noise-free `clean`
// cap channel over frames [begin, end).
double measured_snr_db(const Session& clean, const Session& noisy, std::size_t begin, std::size_t end);

}  // namespace hbc
