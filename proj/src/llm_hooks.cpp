#include "sectionseg/llm_hooks.hpp"

namespace sectionseg {

namespace {

PromptBundle single_turn(std::string system_text, std::string user_text) {
    PromptBundle bundle;
    bundle.family = PromptFamily::llama;
    bundle.expected_line_count = 1;
    bundle.messages.push_back({"system", std::move(system_text)});
    bundle.messages.push_back({"user", std::move(user_text)});
    return bundle;
}

} // namespace

MappingClient make_llm_mapping_client(CompletionClientConfig config) {
    return [config](const std::string& invalid,
                    const LabelSet& label_set) -> std::optional<std::string> {
        std::string options;
        for (std::size_t i = 0; i < label_set.labels().size(); ++i) {
            if (i > 0) options += ", ";
            options += label_set.labels()[i];
        }
        const std::string user =
            "A clinical note segmenter produced the section header \"" + invalid +
            "\", which is not a valid label.\n"
            "Choose the single most semantically appropriate label from this list:\n" +
            options +
            "\nAnswer with exactly one label from the list and nothing else.";
        try {
            return request_completion(
                       config,
                       single_turn("You map nonstandard clinical section headers onto a "
                                   "fixed list of valid labels.",
                                   user))
                .content;
        } catch (const std::exception&) {
            return std::nullopt; // degrade to the deterministic fallback
        }
    };
}

ErrorClassifier make_llm_error_classifier(CompletionClientConfig config) {
    return [config](const std::string& line, const std::string& gold,
                    const std::string& predicted) -> std::optional<std::string> {
        const std::string user =
            "A clinical note line was labeled with the wrong section header.\n"
            "Line: \"" + line + "\"\n"
            "Gold label: " + gold + "\n"
            "Predicted label: " + predicted + "\n"
            "Classify the error as one of:\n"
            "- label_confusion: the predicted label is clearly incorrect for this line\n"
            "- valid_local_interpretation: the predicted label is semantically justifiable "
            "from the line text alone\n"
            "- other: ambiguous or not categorizable\n"
            "Answer with exactly one category name.";
        try {
            return request_completion(
                       config, single_turn("You categorize section labeling errors in "
                                           "clinical notes.",
                                           user))
                .content;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
}

} // namespace sectionseg
