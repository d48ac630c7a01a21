#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "agreement/error.hpp"

namespace agreement {

/// Dense index of a label inside a LabelTable.
struct LabelId {
    std::uint32_t value = 0;

    constexpr LabelId() = default;
    constexpr explicit LabelId(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(LabelId, LabelId) = default;
};

struct LabelIdHash {
    std::size_t operator()(LabelId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

/// Interns label strings. Synthetic labels are generated by normalization and
/// are flagged so they can be filtered on output.
class LabelTable {
public:
    LabelId intern(std::string_view name)
    {
        if (auto it = index_.find(std::string(name)); it != index_.end()) {
            return it->second;
        }
        return append(std::string(name), false);
    }

    std::optional<LabelId> find(std::string_view name) const
    {
        if (auto it = index_.find(std::string(name)); it != index_.end()) {
            return it->second;
        }
        return std::nullopt;
    }

    /// Next free "_s<counter>" name; skips any name already taken.
    LabelId add_synthetic()
    {
        for (;;) {
            std::string name = "_s" + std::to_string(synthetic_counter_++);
            if (!index_.contains(name)) {
                return append(std::move(name), true);
            }
        }
    }

    const std::string& name(LabelId id) const { return names_.at(id.value); }
    bool is_synthetic(LabelId id) const { return synthetic_.at(id.value); }
    std::size_t size() const noexcept { return names_.size(); }

private:
    LabelId append(std::string name, bool synthetic)
    {
        LabelId id(static_cast<std::uint32_t>(names_.size()));
        index_.emplace(name, id);
        names_.push_back(std::move(name));
        synthetic_.push_back(synthetic);
        return id;
    }

    std::vector<std::string> names_;
    std::vector<bool> synthetic_;
    std::unordered_map<std::string, LabelId> index_;
    std::uint64_t synthetic_counter_ = 0;
};

} // namespace agreement
