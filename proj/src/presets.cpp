#include "hbc/presets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hbc/errors.hpp"
#include "hbc/rng.hpp"

namespace hbc {

namespace {

struct Signature {
  double period_s;
  double pulse_width;
  double cap_uV;
  std::array<double, 6> imu;
  std::array<double, 3> baseline;
  bool coupled;
};

constexpr double kG = 9.81;
constexpr std::array<double, 3> kUpright{0.0, 0.0, kG};
constexpr std::array<double, 3> kArmsForward{0.0, 4.9, 8.5};

// Leg exercises: the three lifts leave the wrist still.
const std::array<Signature, 7> kLeg = {{
    {2.0, 0.50, 600.0, {}, kUpright, false},                                // leg-front-lift
    {2.6, 0.75, 420.0, {}, kUpright, false},                                // leg-side-lift
    {1.5, 0.35, 850.0, {}, kUpright, false},                                // leg-back-lift
    {2.4, 0.60, 350.0, {2.0, 1.0, 3.0, 20.0, 40.0, 10.0}, kArmsForward, true},  // standard-squat
    {2.8, 0.60, 300.0, {1.0, 2.5, 2.0, 40.0, 15.0, 25.0}, kArmsForward, true},  // cross-squat
    {1.6, 0.50, 700.0, {4.0, 2.0, 6.0, 30.0, 60.0, 20.0}, kArmsForward, true},  // jump-squat
    {2.2, 0.50, 300.0, {3.0, 0.5, 1.5, 15.0, 20.0, 45.0}, kArmsForward, true},  // side-squat
}};

constexpr std::array<double, 3> kSeated{0.0, 3.0, 9.3};
constexpr std::array<double, 3> kLying{kG, 0.0, 0.0};
constexpr std::array<double, 3> kHanging{0.0, -kG, 0.0};

const std::array<Signature, 11> kGym = {{
    {3.0, 0.5, 250.0, {0.8, 0.5, 1.0, 10.0, 8.0, 5.0}, kSeated, true},        // Adductor
    {2.5, 0.5, 200.0, {3.0, 1.0, 4.0, 80.0, 20.0, 10.0}, kHanging, true},     // Armcurl
    {2.8, 0.5, 300.0, {1.0, 1.0, 5.0, 15.0, 30.0, 10.0}, kLying, true},       // Benchpress
    {2.6, 0.5, 350.0, {0.5, 0.8, 0.6, 5.0, 6.0, 4.0}, kLying, true},          // Legcurl
    {3.2, 0.6, 400.0, {0.4, 0.4, 0.8, 4.0, 4.0, 6.0}, kSeated, true},         // Legpress
    {0.9, 0.5, 300.0, {1.0, 1.5, 0.8, 10.0, 12.0, 8.0}, kArmsForward, true},  // Riding
    {0.5, 0.5, 500.0, {6.0, 3.0, 8.0, 120.0, 60.0, 40.0}, kHanging, true},    // Ropeskipping
    {0.7, 0.5, 450.0, {8.0, 4.0, 6.0, 150.0, 50.0, 60.0}, kHanging, true},    // Running
    {2.6, 0.6, 600.0, {2.0, 1.0, 3.0, 20.0, 40.0, 10.0}, kArmsForward, true}, // Squat
    {1.2, 0.5, 350.0, {2.0, 3.0, 2.0, 20.0, 15.0, 30.0}, kHanging, true},     // Stairsclimber
    {1.0, 0.5, 250.0, {3.0, 2.0, 2.0, 60.0, 20.0, 20.0}, kHanging, true},     // Walking
}};

// Collaboration activities A1..A10.
const std::array<Signature, 10> kCollab = {{
    {0.6, 0.5, 300.0, {2.0, 1.0, 3.0, 20.0, 10.0, 10.0}, kHanging, true},    // A1 start/stop steps
    {4.0, 0.5, 10.0, {}, kHanging, false},                                   // A2 doing nothing
    {1.0, 0.5, 250.0, {2.0, 1.0, 2.0, 20.0, 10.0, 10.0}, kHanging, true},    // A3 walk alone
    {1.1, 0.5, 450.0, {1.5, 1.0, 1.5, 8.0, 5.0, 5.0}, kArmsForward, true},   // A4 carry alone
    {1.2, 0.5, 1000.0, {1.2, 0.8, 1.2, 6.0, 4.0, 4.0}, kArmsForward, true},  // A5 carry together
    {3.0, 0.4, 350.0, {3.0, 1.0, 2.0, 40.0, 10.0, 20.0}, kArmsForward, true},  // A6 lift
    {3.0, 0.3, 350.0, {2.0, 2.0, 3.0, 20.0, 30.0, 10.0}, kArmsForward, true},  // A7 drop
    {0.8, 0.5, 30.0, {0.2, 0.2, 0.2, 60.0, 5.0, 5.0}, kArmsForward, true},   // A8 turn screw
    {2.0, 0.5, 200.0, {1.0, 1.0, 1.0, 10.0, 10.0, 10.0}, kHanging, true},    // A9 no definition
    {2.0, 0.5, 200.0, {1.0, 1.0, 1.0, 10.0, 10.0, 10.0}, kHanging, true},    // A10 out of camera
}};

ExerciseScript script_from(const Signature& sig, LabelId label, int reps, double tempo, double cap_gain) {
  ExerciseScript s;
  s.label = label;
  s.repetitions = reps;
  s.period_s = sig.period_s * tempo;
  s.pulse_width = sig.pulse_width;
  s.cap_amplitude_uV = sig.cap_uV * cap_gain;
  s.imu_amplitude = sig.imu;
  s.coupled = {sig.coupled, sig.coupled};
  s.acc_baseline = sig.baseline;
  return s;
}

double segment_power(const Session& s, std::size_t begin, std::size_t end) {
  double p = 0.0;
  for (std::size_t k = begin; k < end; ++k) p += s.frames[k].cap_uV * s.frames[k].cap_uV;
  return end > begin ? p / static_cast<double>(end - begin) : 0.0;
}

// Sets each script's cap noise so that its segment reaches `snr_db`
// against the noise-free render.
void calibrate_cap_noise(std::vector<ExerciseScript>& scripts, const GeneratorConfig& cfg, double snr_db) {
  std::vector<ExerciseScript> clean = scripts;
  for (auto& s : clean) s.noise.cap_uV = 0.0;
  const Session ref = generate_session(clean, cfg, 0);
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const auto& seg = ref.segments[i];
    scripts[i].noise.cap_uV = std::sqrt(segment_power(ref, seg.begin, seg.end) / std::pow(10.0, snr_db / 10.0));
  }
}

void check_common(int users, int sessions, double fs) {
  if (users < 1) throw DomainError("preset needs at least one user");
  if (sessions < 1) throw DomainError("preset needs at least one session per user");
  if (!(fs > 0.0)) throw DomainError("preset sample rate must be positive");
}

}  // namespace

void LegPreset::validate() const {
  check_common(users, sessions_per_user, fs);
  if (min_reps < 1 || max_reps < min_reps) throw DomainError("leg preset: invalid repetition range");
}

void GymPreset::validate() const {
  check_common(users, sessions_per_user, fs);
  if (min_reps < 1 || max_reps < min_reps) throw DomainError("gym preset: invalid repetition range");
}

void CollabPreset::validate() const {
  check_common(groups, sessions_per_group, fs);
  if (users_per_group < 2) throw DomainError("collab preset: groups need at least two users");
  if (blocks < 2) throw DomainError("collab preset: need at least two blocks");
  if (!(block_s > 0.0 && rest_s >= 0.0)) throw DomainError("collab preset: invalid block timing");
}

std::vector<Session> simulate_leg7(const LegPreset& p) {
  p.validate();
  Rng rng = make_rng(p.seed, "preset");
  std::uniform_real_distribution<double> tempo_d(0.92, 1.08);
  std::uniform_real_distribution<double> log_gain(std::log(0.5), std::log(2.0));
  std::uniform_real_distribution<double> style(0.9, 1.1);
  std::uniform_real_distribution<double> drift(-0.01, 0.01);
  std::uniform_int_distribution<int> reps(p.min_reps, p.max_reps);

  std::vector<Session> out;
  for (int u = 0; u < p.users; ++u) {
    const double tempo = tempo_d(rng);
    std::array<double, 7> user_style{};
    for (double& v : user_style) v = style(rng);
    for (int si = 0; si < p.sessions_per_user; ++si) {
      const double gain = std::exp(log_gain(rng));
      std::vector<ExerciseScript> scripts;
      for (LabelId c = 0; c < 7; ++c) {
        auto s = script_from(kLeg[c], c, reps(rng), tempo, gain * user_style[c]);
        s.amplitude_drift = drift(rng);
        s.noise.acc = p.imu_noise_acc;
        s.noise.gyro = p.imu_noise_gyro;
        scripts.push_back(s);
      }
      std::shuffle(scripts.begin(), scripts.end(), rng);
      GeneratorConfig cfg;
      cfg.session_id = "leg-u" + std::to_string(u) + "-s" + std::to_string(si);
      cfg.user_id = "u" + std::to_string(u);
      cfg.session_index = si;
      cfg.label_set = LabelSetId::kLeg7;
      cfg.position = SensorPosition::kWrist;
      cfg.fs = p.fs;
      if (p.cap_snr_db) calibrate_cap_noise(scripts, cfg, *p.cap_snr_db);
      out.push_back(generate_session(scripts, cfg, rng()));
    }
  }
  return out;
}

std::vector<Session> simulate_gym12(const GymPreset& p) {
  p.validate();
  Rng rng = make_rng(p.seed, "preset");
  std::uniform_real_distribution<double> tempo_d(0.92, 1.08);
  std::uniform_real_distribution<double> log_gain(std::log(0.5), std::log(2.0));
  std::uniform_real_distribution<double> style(0.85, 1.15);
  std::uniform_int_distribution<int> reps(p.min_reps, p.max_reps);
  const LabelId null_class = *label_set(LabelSetId::kGym12).null_class;

  std::vector<Session> out;
  for (int u = 0; u < p.users; ++u) {
    const double tempo = tempo_d(rng);
    for (int si = 0; si < p.sessions_per_user; ++si) {
      const double gain = std::exp(log_gain(rng));
      std::vector<ExerciseScript> scripts;
      for (LabelId c = 0; c < 11; ++c) {
        auto s = script_from(kGym[c], c, reps(rng), tempo, gain * style(rng));
        const double imu_style = style(rng);
        for (double& a : s.imu_amplitude) a *= imu_style;
        s.noise.acc = 0.4;
        s.noise.gyro = 4.0;
        scripts.push_back(s);
      }
      std::shuffle(scripts.begin(), scripts.end(), rng);
      GeneratorConfig cfg;
      cfg.session_id = "gym-u" + std::to_string(u) + "-s" + std::to_string(si);
      cfg.user_id = "u" + std::to_string(u);
      cfg.session_index = si;
      cfg.label_set = LabelSetId::kGym12;
      cfg.position = p.position;
      cfg.rest_label = null_class;
      cfg.rest_gap_s = 6.0;
      cfg.fs = p.fs;
      if (p.cap_snr_db) calibrate_cap_noise(scripts, cfg, *p.cap_snr_db);
      out.push_back(generate_session(scripts, cfg, rng()));
    }
  }
  return out;
}

std::vector<Session> simulate_collab(const CollabPreset& p) {
  p.validate();
  using namespace collab;
  Rng rng = make_rng(p.seed, "preset");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> style(0.85, 1.15);
  const std::array<LabelId, 7> solo = {kDoingNothing, kWalkAlone, kCarryAlone, kLift, kDrop, kTurnScrew, kNoDefinition};
  std::uniform_int_distribution<std::size_t> pick_solo(0, solo.size() - 1);

  std::vector<Session> out;
  for (int g = 0; g < p.groups; ++g) {
    std::vector<double> user_gain(static_cast<std::size_t>(p.users_per_group));
    for (double& v : user_gain) v = style(rng);
    for (int day = 0; day < p.sessions_per_group; ++day) {
      // plan[b][u]: activity of user u in block b.
      std::vector<std::vector<LabelId>> plan;
      for (int b = 0; b < p.blocks; ++b) {
        std::vector<LabelId> row(static_cast<std::size_t>(p.users_per_group));
        if (b == 0 || b == p.blocks - 1) {
          std::fill(row.begin(), row.end(), kStartStop);
        } else if (unit(rng) < 0.45) {
          const double r = unit(rng);
          const LabelId joint = r < 0.5 ? kCarryTogether : (r < 0.75 ? kLift : kDrop);
          for (auto& v : row) v = solo[pick_solo(rng)];
          // Two collaborators; any further member works alone.
          std::vector<std::size_t> who(row.size());
          for (std::size_t i = 0; i < who.size(); ++i) who[i] = i;
          std::shuffle(who.begin(), who.end(), rng);
          row[who[0]] = joint;
          row[who[1]] = joint;
        } else {
          for (auto& v : row) v = solo[pick_solo(rng)];
        }
        plan.push_back(std::move(row));
      }
      const std::uint64_t noise_seed = rng();
      for (int u = 0; u < p.users_per_group; ++u) {
        std::vector<ExerciseScript> scripts;
        for (int b = 0; b < p.blocks; ++b) {
          const LabelId a = plan[static_cast<std::size_t>(b)][static_cast<std::size_t>(u)];
          const Signature& sig = kCollab[static_cast<std::size_t>(a)];
          const int reps = std::max(1, static_cast<int>(std::lround(p.block_s / sig.period_s)));
          auto s = script_from(sig, a, reps, 1.0, user_gain[static_cast<std::size_t>(u)]);
          s.period_s = p.block_s / reps;  // equal block length for every user
          s.noise = {40.0, 0.4, 4.0};
          scripts.push_back(s);
        }
        GeneratorConfig cfg;
        cfg.session_id = "collab-g" + std::to_string(g) + "-d" + std::to_string(day) + "-u" + std::to_string(u);
        cfg.user_id = "g" + std::to_string(g) + "-u" + std::to_string(u);
        cfg.session_index = day;
        cfg.group_id = "g" + std::to_string(g);
        cfg.label_set = LabelSetId::kCollab;
        cfg.rest_label = kDoingNothing;
        cfg.rest_gap_s = p.rest_s;
        cfg.fs = p.fs;
        out.push_back(generate_session(scripts, cfg, splitmix64(noise_seed + static_cast<std::uint64_t>(u))));
      }
    }
  }
  return out;
}

double measured_snr_db(const Session& clean, const Session& noisy, std::size_t begin, std::size_t end) {
  if (clean.size() != noisy.size() || end > clean.size() || begin >= end)
    throw DomainError("measured_snr_db: mismatched sessions or empty range");
  double ps = 0.0;
  double pn = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double c = clean.frames[k].cap_uV;
    const double n = noisy.frames[k].cap_uV - c;
    ps += c * c;
    pn += n * n;
  }
  if (pn == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ps / pn);
}

}  // namespace hbc
