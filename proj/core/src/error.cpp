#include "gcm/error.hpp"

namespace gcm {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotSpd: return "NotSpd";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidNoise: return "InvalidNoise";
        case ErrorKind::DegenerateTimes: return "DegenerateTimes";
        case ErrorKind::ShapeViolation: return "ShapeViolation";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::Parse: return "Parse";
        case ErrorKind::Io: return "Io";
        case ErrorKind::NonFinite: return "NonFinite";
    }
    return "Unknown";
}

}  // namespace gcm
