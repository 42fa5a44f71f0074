#pragma once

#include <stdexcept>
#include <string>

namespace riskgame {

/// Error categories raised by the library. Each value corresponds to one
/// documented failure mode of the public operations.
enum class errc {
  empty_observations,
  category_out_of_range,
  invalid_bandwidth,
  degenerate_sample,
  invalid_cutoff,
  zero_mass_below_cutoff,
  invalid_argument,
  support_mismatch,
  invalid_weights,
  incomplete_grid,
  dimension_mismatch,
  no_path,
  no_convergence,
  uncoverable_threat,
  invalid_frequency,
  invalid_period,
  invalid_alpha,
  malformed_csv,
  empty_cell,
  degenerate_range,
};

inline const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::empty_observations: return "EmptyObservations";
    case errc::category_out_of_range: return "CategoryOutOfRange";
    case errc::invalid_bandwidth: return "InvalidBandwidth";
    case errc::degenerate_sample: return "DegenerateSample";
    case errc::invalid_cutoff: return "InvalidCutoff";
    case errc::zero_mass_below_cutoff: return "ZeroMassBelowCutoff";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::support_mismatch: return "SupportMismatch";
    case errc::invalid_weights: return "InvalidWeights";
    case errc::incomplete_grid: return "IncompleteGrid";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::no_path: return "NoPath";
    case errc::no_convergence: return "NoConvergence";
    case errc::uncoverable_threat: return "UncoverableThreat";
    case errc::invalid_frequency: return "InvalidFrequency";
    case errc::invalid_period: return "InvalidPeriod";
    case errc::invalid_alpha: return "InvalidAlpha";
    case errc::malformed_csv: return "MalformedCsv";
    case errc::empty_cell: return "EmptyCell";
    case errc::degenerate_range: return "DegenerateRange";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace riskgame
