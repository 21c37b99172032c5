#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sectionseg {

inline constexpr std::string_view kOutsideLabel = "<none>";

// Closed set of section-header slugs plus the outside label. Label indices
// are positional in the stored order and stable for a given file.
class LabelSet {
public:
    LabelSet() = default;

    // Validates: slugs unique, non-empty, matching [a-z0-9<>][a-z0-9<>-]*,
    // and containing "<none>" exactly once. Throws DataError otherwise.
    LabelSet(std::string name, std::vector<std::string> labels);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }

    bool contains(std::string_view slug) const { return index_of(slug) >= 0; }

    // -1 when absent.
    int index_of(std::string_view slug) const;

    const std::string& label_at(std::size_t index) const { return labels_.at(index); }
    std::size_t outside_index() const { return outside_index_; }

private:
    std::string name_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
    std::size_t outside_index_ = 0;
};

bool is_valid_slug(std::string_view slug);

} // namespace sectionseg
