#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hbc/types.hpp"

namespace hbc::test {

// Flat session of n frames at fs, every frame labeled `label`.
inline Session flat_session(std::size_t n, LabelId label = 0, double fs = 20.0,
                            LabelSetId set = LabelSetId::kLeg7) {
  Session s;
  s.id = "s0";
  s.user_id = "u0";
  s.sample_rate_hz = fs;
  s.label_set = set;
  s.frames.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.frames[i].t = static_cast<double>(i) / fs;
    s.frames[i].acc = {0.0, 0.0, 9.81};
  }
  s.labels.assign(n, label);
  return s;
}

// The fixed 80-sample window the Python oracle also builds.
inline Window oracle_window() {
  constexpr double pi = 3.14159265358979323846;
  Window w;
  w.session_id = "oracle";
  w.length_samples = 80;
  std::vector<double> ax, ay, az, gx, gy, gz, cap;
  for (int i = 0; i < 80; ++i) {
    double t = i / 20.0;
    ax.push_back(1.5 * std::sin(2 * pi * 1.0 * t) + 0.3 * std::cos(2 * pi * 3.3 * t) + 0.2);
    ay.push_back(0.7 * std::sin(2 * pi * 2.0 * t + 0.4) - 0.1 * t);
    az.push_back(9.81 + 0.5 * std::cos(2 * pi * 0.5 * t));
    gx.push_back(20 * std::sin(2 * pi * 1.25 * t));
    gy.push_back(5 * std::cos(2 * pi * 0.75 * t + 1) + 3);
    gz.push_back(8 * std::pow(std::sin(2 * pi * 4.1 * t), 3));
    cap.push_back(300 * std::sin(2 * pi * 0.8 * t) * std::exp(-t / 3) + 50 * (i % 7));
  }
  w.channels["acc_x"] = ax;
  w.channels["acc_y"] = ay;
  w.channels["acc_z"] = az;
  w.channels["gyro_x"] = gx;
  w.channels["gyro_y"] = gy;
  w.channels["gyro_z"] = gz;
  w.channels["cap"] = cap;
  w.frame_labels.assign(80, 0);
  w.label = 0;
  return w;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace hbc::test
