#pragma once

#include "socsim/inference/layer.hpp"

namespace socsim::scenarios {

// Built-in prompt templates. The copies under data/templates/ are the
// externally editable versions of the same text; builtin_template_ids()
// lists what ships.
const char* builtin_template(const std::string& id);
std::vector<std::string> builtin_template_ids();

// Installs templates, task system prompts and response schemas for the
// trust-game and opinion tasks on a layer.
void install_scenario_assets(inference::InferenceLayer& layer);

// Loads every <id>.txt in dir into the store (overriding installed text).
void load_template_dir(inference::TemplateStore& store, const std::filesystem::path& dir);

} // namespace socsim::scenarios
