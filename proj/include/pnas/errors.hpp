#pragma once

#include <stdexcept>
#include <string>

namespace pnas {

// Base class for every error thrown by this library. Callers that only need
// coarse handling can catch this; the derived types exist so tests and the
// CLI can react to specific failure modes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sample(): no grid point satisfies the head-divisibility and width-floor
// constraints simultaneously.
struct EmptyFeasibleSet final : Error { using Error::Error; };

// count_layer(): d_model not divisible by the requested head count.
struct DivisibilityError final : Error { using Error::Error; };

// count_embedding(): cutoff list empty, not strictly increasing, or not
// ending at vocab_size.
struct CutoffError final : Error { using Error::Error; };

// External proxy plugin misbehaved: nonzero exit, malformed stdout, timeout.
struct PluginFailure final : Error { using Error::Error; };

// Measurement command misbehaved (same failure modes as PluginFailure).
struct MeasurementFailure final : Error { using Error::Error; };

// Tabular cost lookup found no row for the config key.
struct MissingEntry final : Error { using Error::Error; };

// Frontier distance requested over an empty frontier.
struct EmptyFrontier final : Error { using Error::Error; };

// Hypervolume reference point not dominated by every frontier point.
struct BadReference final : Error { using Error::Error; };

// Rank correlation over series of unequal or insufficient length.
struct LengthMismatch final : Error { using Error::Error; };

// Rank correlation over a constant series.
struct DegenerateSeries final : Error { using Error::Error; };

// Common-ratio inputs do not describe the same id set.
struct IdMismatch final : Error { using Error::Error; };

// Binned correlation: a bin holds fewer than two points.
struct EmptyBin final : Error { using Error::Error; };

// Search could not produce a single new unique candidate for an entire
// iteration. Reported as a status by run_search; thrown only by callers
// that treat it as fatal.
struct ExhaustedSpace final : Error { using Error::Error; };

// Malformed input file (CSV, JSON run config, plugin reply).
struct ParseError final : Error { using Error::Error; };

}  // namespace pnas
