#pragma once

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agreement/error.hpp"
#include "agreement/label.hpp"
#include "agreement/profile.hpp"
#include "agreement/xtree.hpp"

namespace agreement {

namespace newick_detail {

inline bool is_label_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

class Parser {
public:
    Parser(std::string_view text, LabelTable& table) : text_(text), table_(table) {}

    XTree run()
    {
        std::vector<NodeIndex> open;
        bool expect_subtree = true;
        for (;;) {
            skip_space();
            if (expect_subtree) {
                if (at('(')) {
                    open.push_back(new_node(open, {}));
                    ++pos_;
                    continue;
                }
                if (pos_ < text_.size() && is_label_char(text_[pos_])) {
                    const std::size_t start = pos_;
                    new_node(open, read_labels(), start);
                    expect_subtree = false;
                    continue;
                }
                if (at(',') || at(')')) {
                    throw Error(ErrorCode::EmptySubtree, "empty subtree at offset " + std::to_string(pos_), pos_);
                }
                fail("expected '(' or a label");
            }
            if (at(',')) {
                if (open.empty()) {
                    fail("',' outside parentheses");
                }
                ++pos_;
                expect_subtree = true;
                continue;
            }
            if (at(')')) {
                if (open.empty()) {
                    fail("unbalanced ')'");
                }
                ++pos_;
                const NodeIndex closed = open.back();
                open.pop_back();
                skip_space();
                if (pos_ < text_.size() && is_label_char(text_[pos_])) {
                    const std::size_t start = pos_;
                    for (LabelId l : read_labels()) {
                        try {
                            tree_.add_label(closed, l);
                        } catch (const Error& e) {
                            throw Error(e.code(), "label '" + table_.name(l) + "' repeated", start);
                        }
                    }
                }
                continue;
            }
            if (at(';')) {
                if (!open.empty()) {
                    fail("';' before all parentheses are closed");
                }
                ++pos_;
                skip_space();
                if (pos_ != text_.size()) {
                    fail("trailing characters after ';'");
                }
                return std::move(tree_);
            }
            fail(pos_ >= text_.size() ? "unexpected end of input" : "unexpected character");
        }
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorCode::SyntaxError, what + " at offset " + std::to_string(pos_), pos_);
    }

    bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::vector<LabelId> read_labels()
    {
        std::vector<LabelId> labels;
        for (;;) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && is_label_char(text_[pos_])) {
                ++pos_;
            }
            if (start == pos_) {
                fail("empty label");
            }
            labels.push_back(table_.intern(text_.substr(start, pos_ - start)));
            if (!at('+')) {
                return labels;
            }
            ++pos_;
        }
    }

    NodeIndex new_node(const std::vector<NodeIndex>& open, std::vector<LabelId> labels, std::size_t offset = 0)
    {
        if (open.empty() && !tree_.empty()) {
            fail("more than one root subtree");
        }
        std::optional<NodeIndex> parent;
        if (!open.empty()) {
            parent = open.back();
        }
        try {
            return tree_.add_node(parent, std::move(labels));
        } catch (const Error& e) {
            throw Error(e.code(), "label repeated at offset " + std::to_string(offset), offset);
        }
    }

    std::string_view text_;
    LabelTable& table_;
    std::size_t pos_ = 0;
    XTree tree_;
};

} // namespace newick_detail

/// Parses Newick with internal labels; '+' joins several labels on one node.
/// Unlabeled internal nodes are accepted.
inline XTree parse_newick(std::string_view text, LabelTable& table)
{
    return newick_detail::Parser(text, table).run();
}

/// Canonical text: labels of a node sorted and '+'-joined, children ordered
/// by the smallest label name in their subtree.
inline std::string serialize_newick(const XTree& tree, const LabelTable& table, bool strip_synthetic = false)
{
    if (tree.empty()) {
        return ";";
    }
    std::vector<std::string> label_text(tree.size());
    std::vector<const std::string*> min_name(tree.size(), nullptr);
    std::vector<std::vector<NodeIndex>> kids(tree.size());
    for (NodeIndex u : tree.postorder()) {
        std::vector<const std::string*> names;
        for (LabelId l : tree.labels_of(u)) {
            if (!(strip_synthetic && table.is_synthetic(l))) {
                names.push_back(&table.name(l));
            }
        }
        std::sort(names.begin(), names.end(), [](auto* a, auto* b) { return *a < *b; });
        for (std::size_t j = 0; j < names.size(); ++j) {
            label_text[u] += (j ? "+" : "") + *names[j];
        }
        if (!names.empty()) {
            min_name[u] = names.front();
        }
        kids[u].assign(tree.children(u).begin(), tree.children(u).end());
        for (NodeIndex c : kids[u]) {
            if (min_name[c] && (!min_name[u] || *min_name[c] < *min_name[u])) {
                min_name[u] = min_name[c];
            }
        }
        std::stable_sort(kids[u].begin(), kids[u].end(), [&](NodeIndex a, NodeIndex b) {
            if (!min_name[a] || !min_name[b]) {
                return min_name[a] != nullptr && min_name[b] == nullptr;
            }
            return *min_name[a] < *min_name[b];
        });
    }
    std::string out;
    std::vector<std::pair<NodeIndex, std::size_t>> stack{{tree.root(), 0}};
    while (!stack.empty()) {
        auto& [u, next] = stack.back();
        if (next == 0 && !kids[u].empty()) {
            out += '(';
        }
        if (next < kids[u].size()) {
            if (next > 0) {
                out += ',';
            }
            const NodeIndex c = kids[u][next++];
            stack.emplace_back(c, 0);
            continue;
        }
        if (!kids[u].empty()) {
            out += ')';
        }
        out += label_text[u];
        stack.pop_back();
    }
    return out + ";";
}

/// One Newick tree per line; blank lines and lines starting with '#' are
/// skipped. Tree order follows line order.
inline Profile parse_profile(std::string_view text)
{
    LabelTable table;
    std::vector<XTree> trees;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        const auto first = line.find_first_not_of(" \t\r");
        if (first != std::string_view::npos && line[first] != '#') {
            try {
                trees.push_back(parse_newick(line, table));
            } catch (const Error& e) {
                throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), e.offset());
            }
        }
        start = end + 1;
    }
    if (trees.empty()) {
        throw Error(ErrorCode::InvalidProfile, "profile contains no trees");
    }
    try {
        return Profile(std::move(table), std::move(trees));
    } catch (const Error& e) {
        throw Error(e.code(), std::string("profile: ") + e.what());
    }
}

inline std::string serialize_profile(const Profile& profile, bool strip_synthetic = false)
{
    std::string out;
    for (const XTree& t : profile.trees()) {
        out += serialize_newick(t, profile.table(), strip_synthetic);
        out += '\n';
    }
    return out;
}

} // namespace agreement
