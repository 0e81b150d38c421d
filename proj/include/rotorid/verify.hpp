#pragma once

#include <span>
#include <string>
#include <vector>

#include "rotorid/flighttest.hpp"
#include "rotorid/plant.hpp"
#include "rotorid/time_history.hpp"

namespace rotorid {

/// RK4 response of `model` from zero state to the recorded inputs (zero-order hold,
/// per-input delay rounded to whole samples). Input channels default to the model's
/// input labels; output channels carry the model's output labels.
TimeHistory predict(const LinearPlantModel& model, const TimeHistory& recorded,
                    const std::vector<std::string>& input_channels = {});

/// Theil inequality coefficient. Throws (Data) if both series are identically zero.
double tic(std::span<const double> measured, std::span<const double> predicted);
double rms_error(std::span<const double> measured, std::span<const double> predicted);

struct ChannelScore {
  std::string channel;
  bool present = false;  // channel found in the log
  double rms_error = 0.0;
  double tic = 0.0;
  double peak_error = 0.0;
};

struct VerificationReport {
  std::vector<ChannelScore> channels;
  double window_begin = 0.0, window_end = 0.0;  // s, log time
  bool all_present = false;
  double max_tic = 0.0;
};

struct VerifyOptions {
  double tail = 5.0;      // s scored after the record ends
  double bias_span = 1.0; // s of trim pad averaged for bias removal
};

/// Predicts over the doublet record plus `tail` and scores every model output.
/// Inputs and measured outputs are shifted by their mean over the last `bias_span`
/// before the record, so prediction runs in perturbation coordinates.
VerificationReport verify_model(const LinearPlantModel& model, const ExperimentResult& doublet,
                                const VerifyOptions& opt = {});

/// Same scoring on a bare log with an explicit record start sample.
VerificationReport verify_model(const LinearPlantModel& model, const TimeHistory& log, std::size_t record_begin,
                                std::size_t record_end, const VerifyOptions& opt = {});

std::string verification_text(const VerificationReport& r);
/// Columns: channel,present,rms_error,tic,peak_error
std::string verification_csv(const VerificationReport& r);
/// Columns: t,measured,predicted over the scored window (bias-corrected measured).
std::string overlay_csv(const LinearPlantModel& model, const TimeHistory& log, std::size_t record_begin,
                        std::size_t record_end, const std::string& channel, const VerifyOptions& opt = {});

}  // namespace rotorid
