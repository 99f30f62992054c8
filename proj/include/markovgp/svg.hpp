#pragma once

#include <optional>
#include <string>

#include "markovgp/io.hpp"

namespace markovgp {

/// Renders the posterior table (shaded band + estimate line), an optional
/// sample path, and optional observation dots as a self-contained SVG.
/// Output bytes depend only on the inputs. A band of zero width everywhere
/// is omitted, leaving lines and dots only.
std::string render_svg(const PosteriorTable& table, const std::optional<SeriesData>& path,
                       const std::optional<ObservationData>& obs);

} // namespace markovgp
