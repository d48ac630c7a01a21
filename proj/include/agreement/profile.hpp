#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agreement/error.hpp"
#include "agreement/label.hpp"
#include "agreement/xtree.hpp"

namespace agreement {

/// Ordered collection of input trees over one label table.
class Profile {
public:
    Profile() = default;

    Profile(LabelTable table, std::vector<XTree> trees)
        : table_(std::move(table))
        , trees_(std::move(trees))
    {
        containing_.resize(table_.size());
        tree_labels_.reserve(trees_.size());
        for (std::size_t i = 0; i < trees_.size(); ++i) {
            trees_[i].validate();
            auto labels = trees_[i].labels();
            for (LabelId l : labels) {
                if (l.value >= table_.size()) {
                    throw Error(ErrorCode::InvalidProfile, "label id outside the label table");
                }
                containing_[l.value].push_back(static_cast<std::uint32_t>(i));
            }
            universe_.insert(universe_.end(), labels.begin(), labels.end());
            tree_labels_.push_back(std::move(labels));
        }
        std::sort(universe_.begin(), universe_.end());
        universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
    }

    const LabelTable& table() const noexcept { return table_; }
    std::size_t size() const noexcept { return trees_.size(); }
    const std::vector<XTree>& trees() const noexcept { return trees_; }
    const XTree& tree(std::size_t i) const { return trees_.at(i); }

    /// X_P: union of all tree label sets, sorted.
    const std::vector<LabelId>& label_universe() const noexcept { return universe_; }
    /// X_i, sorted.
    const std::vector<LabelId>& tree_labels(std::size_t i) const { return tree_labels_.at(i); }

    /// Indices of the trees containing `label`, ascending.
    std::span<const std::uint32_t> trees_containing(LabelId label) const
    {
        if (label.value >= containing_.size()) {
            return {};
        }
        return containing_[label.value];
    }

    /// Child labels of `label` in tree i (first label of each child node).
    std::vector<LabelId> children_labels(std::size_t i, LabelId label) const
    {
        std::vector<LabelId> out;
        const XTree& t = trees_.at(i);
        auto node = t.node_of(label);
        if (!node) {
            return out;
        }
        out.reserve(t.children(*node).size());
        for (NodeIndex c : t.children(*node)) {
            if (!t.labels_of(c).empty()) {
                out.push_back(t.labels_of(c).front());
            }
        }
        return out;
    }

    /// X_i(label): cluster of the node carrying `label` in tree i.
    Cluster cluster(std::size_t i, LabelId label) const
    {
        auto node = trees_.at(i).node_of(label);
        return node ? cluster_of(trees_[i], *node) : Cluster{};
    }

private:
    LabelTable table_;
    std::vector<XTree> trees_;
    std::vector<LabelId> universe_;
    std::vector<std::vector<LabelId>> tree_labels_;
    std::vector<std::vector<std::uint32_t>> containing_;
};

struct ProfileViolation {
    enum class Kind { Unlabeled, MultiLabeled };
    std::size_t tree = 0;
    NodeIndex node = 0;
    Kind kind = Kind::Unlabeled;

    friend bool operator==(const ProfileViolation&, const ProfileViolation&) = default;
};

/// Empty iff every node of every tree carries exactly one label.
inline std::vector<ProfileViolation> validate_profile(const Profile& profile)
{
    std::vector<ProfileViolation> out;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const XTree& t = profile.tree(i);
        for (NodeIndex u = 0; u < t.size(); ++u) {
            const auto n = t.labels_of(u).size();
            if (n == 0) {
                out.push_back({i, u, ProfileViolation::Kind::Unlabeled});
            } else if (n > 1) {
                out.push_back({i, u, ProfileViolation::Kind::MultiLabeled});
            }
        }
    }
    return out;
}

struct NormalizedProfile {
    Profile profile;
    std::vector<LabelId> synthetic;
};

/// Gives every unlabeled node a fresh synthetic label. Trees are visited in
/// order, nodes in postorder, so "((a,b),c);" becomes "((a,b)_s0,c)_s1;".
inline NormalizedProfile normalize_profile(const Profile& profile)
{
    LabelTable table = profile.table();
    std::vector<XTree> trees;
    std::vector<LabelId> synthetic;
    trees.reserve(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        XTree t = profile.tree(i);
        for (NodeIndex u : t.postorder()) {
            const auto n = t.labels_of(u).size();
            if (n > 1) {
                throw Error(ErrorCode::MultiLabeledInput,
                    "tree " + std::to_string(i) + " node " + std::to_string(u) + " carries several labels");
            }
            if (n == 0) {
                LabelId fresh = table.add_synthetic();
                t.add_label(u, fresh);
                synthetic.push_back(fresh);
            }
        }
        trees.push_back(std::move(t));
    }
    return {Profile(std::move(table), std::move(trees)), std::move(synthetic)};
}

} // namespace agreement
