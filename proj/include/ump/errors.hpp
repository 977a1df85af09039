#pragma once

#include <stdexcept>
#include <string>

namespace ump {

// Base class for all library failures. Every error carries a human-readable
// message; the CLI maps concrete types to stable process exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration rejected before any computation started.
struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& msg) : Error("config invalid: " + msg) {}
};

// The weight's dynamic range exceeds what the selected precision mode can
// orthogonalize without losing all significant digits.
struct PrecisionExceeded : Error {
    explicit PrecisionExceeded(const std::string& msg) : Error("precision exceeded: " + msg) {}
};

// Fixed-point iteration hit its iteration cap before reaching tolerance.
struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error("no convergence: " + msg) {}
};

// Gram matrix residual stayed above threshold even after re-orthogonalization.
struct OrthogonalityLoss : Error {
    explicit OrthogonalityLoss(const std::string& msg) : Error("orthogonality loss: " + msg) {}
};

// A principal-value evaluation point must coincide with a grid node.
struct NodeMismatch : Error {
    explicit NodeMismatch(const std::string& msg) : Error("node mismatch: " + msg) {}
};

// Herglotz-transform evaluation point too close to the unit circle for the
// grid to resolve the kernel.
struct TooCloseToAxis : Error {
    explicit TooCloseToAxis(const std::string& msg) : Error("too close to axis: " + msg) {}
};

// A rescaled evaluation point left the caller-supplied bulk window.
struct OutOfWindow : Error {
    explicit OutOfWindow(const std::string& msg) : Error("out of window: " + msg) {}
};

// Correlation determinant order above the supported cap (or above n).
struct DimensionTooLarge : Error {
    explicit DimensionTooLarge(const std::string& msg) : Error("dimension too large: " + msg) {}
};

// A conditional sampling density lost essentially all of its expected mass.
struct NumericalBreakdown : Error {
    explicit NumericalBreakdown(const std::string& msg) : Error("numerical breakdown: " + msg) {}
};

// Statistics requested from a batch that is too small to be meaningful.
struct TooFewSamples : Error {
    explicit TooFewSamples(const std::string& msg) : Error("too few samples: " + msg) {}
};

// Rate fit rejected: an error entry sits at or below the noise floor.
struct DegenerateFit : Error {
    explicit DegenerateFit(const std::string& msg) : Error("degenerate fit: " + msg) {}
};

} // namespace ump
