#include "socsim/scenarios/templates.hpp"

#include <fstream>
#include <sstream>

#include "socsim/core/error.hpp"

namespace socsim::scenarios {

using core::Errc;
using core::Json;
using core::raise;

namespace {

const char* kTrustSystem =
    R"(You are a participant in an economic experiment based *only* on the rules and profile provided. You must strictly follow the persona provided and the rules you are given for this interaction. Output *only* a valid JSON object with the keys "thinking_process" and "amount". Do not include any other text, explanations, or markdown formatting outside the JSON structure. Ensure the "amount" is an integer.)";

const char* kTrustor =
    R"(You are participating in a one-shot, anonymous economic game. Here is your profile:

{profile_text}

Experiment Instructions for you:

1. You begin this interaction with $10.

2. You need to decide how much money, N, to send to another anonymous participant. N must be an integer between $0 and $10, inclusive.

3. The amount N you choose to send will be tripled, and the other participant will receive 3N.

4. After receiving the tripled amount, the other participant will decide how much of that money (3N) to send back to you.

5. This is a single interaction; you will not interact with this participant again.

Your Decision:

Based on your profile and the instructions, decide the amount N (from 0 to 10) you want to send.

Output Format:

Provide your decision *only* as a JSON object with two keys:

- "thinking_process": A brief explanation (1-2 sentences) of your reasoning for choosing the amount N, considering your profile and the situation.

- "amount": The integer amount N (0-10) you decided to send.

Example Output:

{{

  "thinking_process": "Given my situation and the anonymous nature, I feel a bit cautious, but I'll send a moderate amount hoping for a fair return.",

  "amount": 5

}}

Now, provide your decision based on your profile and the instructions. Output *only* the JSON object.)";

const char* kTrustee =
    R"(You are participating in a one-shot, anonymous economic game. Here is your profile:

{profile_text}

Experiment Instructions for You:

1. In this interaction, another anonymous participant started with $10 and chose to send you an amount, N.

2. The amount they sent was tripled before you received it.

3. You have received a total of ${amount_received}. (This resulted from the other participant sending ${amount_sent}).

4. You now need to decide how much money, R, from the ${amount_received} you received, to send back to the first participant. R must be an integer between $0 and ${amount_received}, inclusive.

5. This is a single interaction; you will not interact with this participant again.

Your Decision:

Based on your profile, the amount you received (${amount_received}), and the instructions, decide the amount R (from 0 to ${amount_received}) you want to send back.

Output Format:

Provide your decision *only* as a JSON object with two keys:

- "thinking_process": A brief explanation (1-2 sentences) of your reasoning for choosing the amount R, considering your profile, the amount received, and the situation.

- "amount": The integer amount R (0 to ${amount_received}) you decided to send back.

Example Output (if you received $15):

{{

  "thinking_process": "They showed significant trust by sending $5. It seems fair to return more than they sent, allowing both of us to profit from this interaction.",

  "amount": 8

}}

Now, provide your decision based on your profile, the amount you received (${amount_received}), and the instructions. Output *only* the JSON object.)";

const char* kOpinionSystem =
    R"(You are a participant in an online discussion based *only* on the profile and opinions provided. You must strictly follow the persona provided and consider the interaction you are given. Output *only* a valid JSON object with the keys "thinking_process" and "opinion". Do not include any other text, explanations, or markdown formatting outside the JSON structure. Ensure the "opinion" is exactly one of "agree", "disagree", or "neutral".)";

const char* kOpinionUpdate =
    R"(You are participating in an online discussion about a controversial statement. Here is your profile:

{influencee_profile}

The statement under discussion is: "{statement}"

Your current opinion on the statement is: {influencee_opinion}.

Another participant engages you in conversation about the statement. Here is their profile:

{influencer_profile}

Their opinion on the statement is: {influencer_opinion}, and they argue for their position based on their background and experience.

Your Decision:

Considering your profile, your current opinion, and the other participant's profile and arguments, decide your updated opinion on the statement.

Output Format:

Provide your decision *only* as a JSON object with two keys:

- "thinking_process": A brief explanation (1-2 sentences) of why you keep or change your opinion.

- "opinion": Your updated opinion, exactly one of "agree", "disagree", or "neutral".

Example Output:

{{

  "thinking_process": "Their arguments are compelling and their experience is relevant, so I am persuaded to their position.",

  "opinion": "agree"

}}

Now, provide your decision based on your profile and the interaction. Output *only* the JSON object.)";

struct BuiltinEntry {
    const char* id;
    const char* text;
};

const BuiltinEntry kBuiltins[] = {
    {"trust_system", kTrustSystem}, {"trustor", kTrustor},
    {"trustee", kTrustee},          {"opinion_system", kOpinionSystem},
    {"opinion_update", kOpinionUpdate},
};

std::optional<std::string> validate_trust_decision(const Json& fields) {
    if (!fields.is_object()) return "response is not an object";
    if (!fields.contains("thinking_process") || !fields["thinking_process"].is_string()) {
        return "missing string 'thinking_process'";
    }
    if (!fields.contains("amount") || !fields["amount"].is_number_integer()) {
        return "missing integer 'amount'";
    }
    return std::nullopt;
}

std::optional<std::string> validate_opinion_decision(const Json& fields) {
    if (!fields.is_object()) return "response is not an object";
    if (!fields.contains("thinking_process") || !fields["thinking_process"].is_string()) {
        return "missing string 'thinking_process'";
    }
    if (!fields.contains("opinion") || !fields["opinion"].is_string()) {
        return "missing string 'opinion'";
    }
    const std::string o = fields["opinion"].get<std::string>();
    if (o != "agree" && o != "disagree" && o != "neutral") {
        return "opinion '" + o + "' is not one of agree/disagree/neutral";
    }
    return std::nullopt;
}

} // namespace

const char* builtin_template(const std::string& id) {
    for (const auto& e : kBuiltins) {
        if (id == e.id) return e.text;
    }
    raise(Errc::TemplateError, "no builtin template '" + id + "'");
}

std::vector<std::string> builtin_template_ids() {
    std::vector<std::string> ids;
    for (const auto& e : kBuiltins) ids.emplace_back(e.id);
    return ids;
}

void load_template_dir(inference::TemplateStore& store, const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        raise(Errc::Io, "template directory not found: " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        store.set(entry.path().stem().string(), buf.str());
    }
}

void install_scenario_assets(inference::InferenceLayer& layer) {
    for (const auto& e : kBuiltins) {
        if (!layer.templates().has(e.id)) {
            layer.templates().set(e.id, e.text);
        }
    }
    layer.set_task_system_template("trustor_decision", "trust_system");
    layer.set_task_system_template("trustee_decision", "trust_system");
    layer.set_task_system_template("opinion_update", "opinion_system");
    layer.register_schema("trust_decision", validate_trust_decision);
    layer.register_schema("opinion_decision", validate_opinion_decision);
}

} // namespace socsim::scenarios
