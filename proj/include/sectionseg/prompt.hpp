#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sectionseg/corpus.hpp"
#include "sectionseg/labels.hpp"

namespace sectionseg {

enum class PromptFamily { llama, mistral, qwen };

std::string to_string(PromptFamily family);
PromptFamily prompt_family_from_string(std::string_view name);

struct ChatMessage {
    std::string role;
    std::string content;
};

struct PromptBundle {
    PromptFamily family = PromptFamily::llama;
    std::vector<ChatMessage> messages;
    std::size_t expected_line_count = 0;
    std::string label_set_name;
};

// Renders the segmentation prompt for one note: numbered lines ("Line 0:"),
// the comma-separated label options, a fixed example-output block, and the
// line-count requirement. The family changes only the instruction wrapping
// (plain system/user roles for llama, [INST] for mistral, <|im_start|>
// markers for qwen), never the task text.
PromptBundle build_prompt(const Note& note, const LabelSet& label_set, PromptFamily family);

// Slug normalization for model-emitted headers: lowercase, runs of
// non-alphanumerics collapse to single hyphens, outer hyphens trimmed. The
// exact token "<none>" passes through unchanged. Idempotent.
std::string normalize_header(std::string_view header);

} // namespace sectionseg
