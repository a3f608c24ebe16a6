#pragma once

#include <filesystem>
#include <string>

#include "dynheat/operators.hpp"

namespace dynheat {

/// Writes <stem>.json (dimension, extents, spacing, shape, times, quantity)
/// and <stem>.bin (little-endian doubles, time-major then SampledField order).
/// A non-empty trace goes to <stem>_trace.{json,bin} in the same format.
void write_field_dump(const std::filesystem::path& stem, const std::string& quantity,
                      const FieldTrajectory& field);

/// Reads a dump written by write_field_dump (trace included when present).
FieldTrajectory read_field_dump(const std::filesystem::path& stem);

}  // namespace dynheat
