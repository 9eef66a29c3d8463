#pragma once

#include <stdexcept>
#include <string>

namespace erkc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Collocation nodes coincide (confluent nodes are not supported).
struct ConfluentNodes : Error { using Error::Error; };
// A collocation node lies outside [0,1].
struct NodeOutOfRange : Error { using Error::Error; };
// Stage index outside 0..s-1.
struct StageIndexError : Error { using Error::Error; };
// Vector length does not match the operator layout.
struct DimensionError : Error { using Error::Error; };
// A^gamma with gamma < 0 requested on an operator with a zero eigenvalue.
struct ZeroEigenvalueNegativePower : Error { using Error::Error; };
// Sampling detected a decrease of the deviated argument t - tau(t).
struct NonmonotoneDeviatedArgument : Error { using Error::Error; };
// Sampling detected tau(t) < tau0.
struct DelayBoundViolation : Error { using Error::Error; };
// Root bracketing failed unexpectedly in the discontinuity recursion.
struct BracketFailure : Error { using Error::Error; };
// Requested step size exceeds the delay lower bound tau0.
struct StepExceedsTauZero : Error { using Error::Error; };
// Mesh deduplication collapsed a segment to nothing.
struct EmptySegment : Error { using Error::Error; };
// Time outside [history_start, T].
struct OutOfDomain : Error { using Error::Error; };
// History evaluation past the completed range of the run.
struct FutureEvaluation : Error { using Error::Error; };
// No admissible s+2-point mesh stencil inside the smoothness segment.
struct StencilUnavailable : Error { using Error::Error; };
// Stage fixed-point iteration did not converge within the iteration cap.
struct FixedPointDivergence : Error { using Error::Error; };
// Too few data points for an order fit.
struct InsufficientData : Error { using Error::Error; };

}  // namespace erkc
