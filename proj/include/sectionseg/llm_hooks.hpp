#pragma once

#include "sectionseg/chat_client.hpp"
#include "sectionseg/error_analysis.hpp"
#include "sectionseg/hallucination.hpp"

namespace sectionseg {

// Mapping-LLM hook over the chat endpoint. The prompt carries only the
// invalid header and the valid label list, never note text.
MappingClient make_llm_mapping_client(CompletionClientConfig config);

// Error-classification hook over the chat endpoint; sends the line text with
// the gold and predicted labels and expects one category name back.
ErrorClassifier make_llm_error_classifier(CompletionClientConfig config);

} // namespace sectionseg
