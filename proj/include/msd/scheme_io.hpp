#pragma once

#include "msd/scheme.hpp"

#include <json.hpp>

#include <string>

namespace msd {

// {horizon, k, lookback, block_horizon, templates: [[...]], actions: [{template_id, shift, cond_mask, block}]}
nlohmann::json scheme_to_json(const InferenceScheme& s);
InferenceScheme scheme_from_json(const nlohmann::json& j);

/// Text box diagram, one row per action. Columns run from -lookback to the
/// horizon: '#' available, 'C' conditioned, 'G' generated, '.' not yet known.
/// The template number (1-based) follows each row.
std::string render_scheme_text(const InferenceScheme& s);

// Same layout as SVG: dark gray available, red conditioned, blue generated.
std::string render_scheme_svg(const InferenceScheme& s);

}  // namespace msd
