#pragma once

#include <string>

#include <json.hpp>

#include "boundselect/ci.hpp"
#include "boundselect/lpbounds.hpp"
#include "boundselect/model.hpp"
#include "boundselect/select.hpp"

namespace boundselect {

// Spec documents: {"num_options", "dim_p", "lower": [[{"c": .., "v": [..]}, ..], ..],
// "upper": [..]}.
nlohmann::json spec_to_json(const BoundsSpec& spec);
BoundsSpec spec_from_json(const nlohmann::json& j);

// {"n", "p_hat": [..], "sigma_hat": [[..], ..]}
nlohmann::json reduced_form_to_json(const ReducedForm& rf);
ReducedForm reduced_form_from_json(const nlohmann::json& j);

nlohmann::json polyhedron_to_json(const Polyhedron& poly);
nlohmann::json selection_to_json(const SelectionOutcome& sel);
nlohmann::json interval_to_json(const ConfidenceInterval& ci);

// {"A": [[..], ..], "B": [[..], ..]}
nlohmann::json latent_lp_to_json(const LatentLp& lp);
LatentLp latent_lp_from_json(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Parse errors surface as Error(JsonParse).
nlohmann::json parse_json(const std::string& text, const std::string& what);
nlohmann::json load_json(const std::string& path);

// Infinite values as the strings "inf" / "-inf".
nlohmann::json extended(double v);

}  // namespace boundselect
