#pragma once

// epsilon-outage link model for Rayleigh fading:
//   R_eps = W * log2(1 + gamma * sigma_h^2 * (-ln(1 - eps)))
//   T_comm = bits / R_eps

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>

#include "scz/error.hpp"

namespace scz {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct ChannelParams {
  double bandwidth_hz = 10e6;
  double mean_snr = db_to_linear(10.0);  // linear
  double fading_var = 1.0;
  double outage = 0.001;

  static ChannelParams from_db(double bandwidth_hz, double snr_db, double fading_var,
                               double outage) {
    return {bandwidth_hz, db_to_linear(snr_db), fading_var, outage};
  }
};

inline void validate(const ChannelParams& p) {
  if (!(p.bandwidth_hz > 0.0) || !std::isfinite(p.bandwidth_hz)) {
    fail(ErrorCode::kInvalidInput, "bandwidth must be positive");
  }
  if (!(p.mean_snr > 0.0) || !std::isfinite(p.mean_snr)) {
    fail(ErrorCode::kInvalidInput, "mean SNR must be positive");
  }
  if (!(p.fading_var > 0.0) || !std::isfinite(p.fading_var)) {
    fail(ErrorCode::kInvalidInput, "fading variance must be positive");
  }
  if (!(p.outage > 0.0 && p.outage < 1.0)) {
    fail(ErrorCode::kInvalidInput, "outage probability must be in (0, 1)");
  }
}

/// Bits per second.
inline double outage_rate(const ChannelParams& p) {
  validate(p);
  // -log1p(-eps) keeps precision for the small eps values of interest.
  const double snr_eff = p.mean_snr * p.fading_var * -std::log1p(-p.outage);
  return p.bandwidth_hz * std::log2(1.0 + snr_eff);
}

/// Seconds.
inline double comm_latency(double payload_bits, const ChannelParams& p) {
  if (payload_bits < 0.0) fail(ErrorCode::kInvalidInput, "negative payload size");
  return payload_bits / outage_rate(p);
}

/// Defaults with SCZ_EPS, SCZ_BW_HZ, SCZ_SNR_DB and SCZ_SIGMA2 applied.
inline ChannelParams channel_from_env(ChannelParams base = {}) {
  auto read = [](const char* name) -> std::optional<double> {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0') {
      fail(ErrorCode::kInvalidInput, std::string(name) + " is not a number: " + raw);
    }
    return v;
  };
  if (auto v = read("SCZ_EPS")) base.outage = *v;
  if (auto v = read("SCZ_BW_HZ")) base.bandwidth_hz = *v;
  if (auto v = read("SCZ_SNR_DB")) base.mean_snr = db_to_linear(*v);
  if (auto v = read("SCZ_SIGMA2")) base.fading_var = *v;
  return base;
}

}  // namespace scz
