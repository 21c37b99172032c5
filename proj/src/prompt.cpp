#include "sectionseg/prompt.hpp"

#include "sectionseg/errors.hpp"

namespace sectionseg {

namespace {

constexpr std::string_view kSystemText =
    "You are a clinical assistant specializing in segmenting clinical notes.";

constexpr std::string_view kExampleOutputBlock =
    "Example Output:\n"
    "Line 0: <none>\n"
    "Line 1: imaging\n"
    "Line 2: <none>\n"
    "Line 3: chief-complaint\n"
    "Line 4: history-of-present-illness\n"
    "Line 5: history-of-present-illness\n"
    "Line 6: history-of-present-illness\n"
    "Line 7: history-of-present-illness\n"
    "Line 8: history-of-present-illness\n"
    "Line 9: history-of-present-illness\n"
    "...";

std::string render_task(const Note& note, const LabelSet& label_set) {
    std::string text;
    text += "Your task is to assign section headers to each line of a clinical note. "
            "Most of the section headers will likely span multiple lines, so headers "
            "should be assigned sequentially and consistently.\n\n";
    text += "Clinical Note:\n";
    for (std::size_t i = 0; i < note.lines.size(); ++i) {
        text += "Line " + std::to_string(i) + ": " + note.lines[i] + "\n";
    }
    text += "\nSelect the most appropriate section header for each line from the "
            "following options:\n";
    for (std::size_t i = 0; i < label_set.labels().size(); ++i) {
        if (i > 0) text += ", ";
        text += label_set.labels()[i];
    }
    text += "\n\nReturn your answer as a list of section headers, one for each line, "
            "in the same order.\n\n";
    text += kExampleOutputBlock;
    text += "\n\nThe output must contain **exactly the same number of lines** as the "
            "clinical note, i.e., number of lines SHOULD BE EQUAL TO " +
            std::to_string(note.lines.size()) + "\n";
    return text;
}

} // namespace

std::string to_string(PromptFamily family) {
    switch (family) {
        case PromptFamily::llama: return "llama";
        case PromptFamily::mistral: return "mistral";
        case PromptFamily::qwen: return "qwen";
    }
    return "llama";
}

PromptFamily prompt_family_from_string(std::string_view name) {
    if (name == "llama") return PromptFamily::llama;
    if (name == "mistral") return PromptFamily::mistral;
    if (name == "qwen") return PromptFamily::qwen;
    throw UsageError("unknown prompt family '" + std::string(name) +
                     "' (expected llama, mistral, or qwen)");
}

PromptBundle build_prompt(const Note& note, const LabelSet& label_set, PromptFamily family) {
    if (note.lines.empty()) throw EmptyNote("build_prompt: note '" + note.note_id + "' is empty");

    PromptBundle bundle;
    bundle.family = family;
    bundle.expected_line_count = note.lines.size();
    bundle.label_set_name = label_set.name();

    const std::string task = render_task(note, label_set);
    switch (family) {
        case PromptFamily::llama:
            bundle.messages.push_back({"system", std::string(kSystemText)});
            bundle.messages.push_back({"user", task});
            break;
        case PromptFamily::mistral:
            bundle.messages.push_back(
                {"user", "[INST] " + std::string(kSystemText) + "\n\n" + task + " [/INST]"});
            break;
        case PromptFamily::qwen:
            bundle.messages.push_back(
                {"system",
                 "<|im_start|>system\n" + std::string(kSystemText) + "\n<|im_end|>"});
            bundle.messages.push_back({"user", "<|im_start|>user\n" + task + "\n<|im_end|>"});
            break;
    }
    return bundle;
}

std::string normalize_header(std::string_view header) {
    // Trim ASCII whitespace first so the "<none>" comparison is surface-proof.
    while (!header.empty() && (header.front() == ' ' || header.front() == '\t' ||
                               header.front() == '\r' || header.front() == '\n')) {
        header.remove_prefix(1);
    }
    while (!header.empty() && (header.back() == ' ' || header.back() == '\t' ||
                               header.back() == '\r' || header.back() == '\n')) {
        header.remove_suffix(1);
    }
    if (header == kOutsideLabel) return std::string(kOutsideLabel);

    std::string slug;
    bool pending_hyphen = false;
    for (const char c : header) {
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                           (c >= '0' && c <= '9');
        if (alnum) {
            if (pending_hyphen && !slug.empty()) slug.push_back('-');
            pending_hyphen = false;
            slug.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
        } else {
            pending_hyphen = true;
        }
    }
    return slug;
}

} // namespace sectionseg
