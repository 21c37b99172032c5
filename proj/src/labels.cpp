#include "sectionseg/labels.hpp"

#include "sectionseg/errors.hpp"

namespace sectionseg {

namespace {

bool slug_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '<' || c == '>';
}

} // namespace

bool is_valid_slug(std::string_view slug) {
    if (slug.empty()) return false;
    if (!slug_char(slug[0])) return false;
    for (std::size_t i = 1; i < slug.size(); ++i) {
        if (!slug_char(slug[i]) && slug[i] != '-') return false;
    }
    return true;
}

LabelSet::LabelSet(std::string name, std::vector<std::string> labels)
    : name_(std::move(name)), labels_(std::move(labels)) {
    int outside_seen = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const std::string& slug = labels_[i];
        if (!is_valid_slug(slug)) {
            throw DataError("label set '" + name_ + "': invalid slug '" + slug + "'");
        }
        if (!index_.emplace(slug, static_cast<int>(i)).second) {
            throw DataError("label set '" + name_ + "': duplicate slug '" + slug + "'");
        }
        if (slug == kOutsideLabel) {
            outside_index_ = i;
            ++outside_seen;
        }
    }
    if (outside_seen != 1) {
        throw DataError("label set '" + name_ + "' must contain '" +
                        std::string(kOutsideLabel) + "' exactly once");
    }
}

int LabelSet::index_of(std::string_view slug) const {
    const auto it = index_.find(std::string(slug));
    return it == index_.end() ? -1 : it->second;
}

} // namespace sectionseg
