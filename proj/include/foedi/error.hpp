#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace foedi {

enum class ErrorCode {
    invalid_node,
    self_loop_rejected,
    edge_state_conflict,
    generation_failed,
    not_connected,
    degenerate_spectrum,
    invalid_vector,
    shape_error,
    alignment_failure,
    invalid_coupling,
    invalid_frequency_model,
    numerical_blowup,
    invalid_argument,
    io_error,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_node: return "InvalidNode";
        case ErrorCode::self_loop_rejected: return "SelfLoopRejected";
        case ErrorCode::edge_state_conflict: return "EdgeStateConflict";
        case ErrorCode::generation_failed: return "GenerationFailed";
        case ErrorCode::not_connected: return "NotConnected";
        case ErrorCode::degenerate_spectrum: return "DegenerateSpectrum";
        case ErrorCode::invalid_vector: return "InvalidVector";
        case ErrorCode::shape_error: return "ShapeError";
        case ErrorCode::alignment_failure: return "AlignmentFailure";
        case ErrorCode::invalid_coupling: return "InvalidCoupling";
        case ErrorCode::invalid_frequency_model: return "InvalidFrequencyModel";
        case ErrorCode::numerical_blowup: return "NumericalBlowup";
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

// All library failures are reported through this type; code() identifies the
// failure class so callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace foedi
