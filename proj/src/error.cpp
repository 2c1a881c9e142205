#include "seqtrace/error.hpp"

namespace seqtrace {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::ray_misses_surface: return "RayMissesSurface";
    case ErrorKind::vignetted: return "Vignetted";
    case ErrorKind::total_internal_reflection: return "TotalInternalReflection";
    case ErrorKind::model_evaluation_failure: return "ModelEvaluationFailure";
    case ErrorKind::undefined_abbe: return "UndefinedAbbe";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::duplicate_glass: return "DuplicateGlass";
    case ErrorKind::unknown_dispersion_model: return "UnknownDispersionModel";
    case ErrorKind::unknown_material: return "UnknownMaterial";
    case ErrorKind::no_stop_surface: return "NoStopSurface";
    case ErrorKind::multiple_stops: return "MultipleStops";
    case ErrorKind::afocal_system: return "AfocalSystem";
    case ErrorKind::aiming_failure: return "AimingFailure";
    case ErrorKind::no_unvignetted_rays: return "NoUnvignettedRays";
    case ErrorKind::grid_too_coarse: return "GridTooCoarse";
    case ErrorKind::unreadable_image: return "UnreadableImage";
    case ErrorKind::empty_merit_function: return "EmptyMeritFunction";
    case ErrorKind::no_variables: return "NoVariables";
    case ErrorKind::io_failure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace seqtrace
