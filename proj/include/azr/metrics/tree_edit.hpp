#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace azr::metrics {

struct TreeNode {
  std::string label;
  std::vector<TreeNode> children;
};

/// Builds a tree from the harness dump format `[label, [child, ...]]`.
TreeNode tree_from_json(const nlohmann::json& node);

std::size_t tree_size(const TreeNode& root);

/// Ordered tree edit distance with unit insert, delete and relabel costs
/// (Zhang-Shasha keyroot dynamic program).
std::size_t tree_edit_distance(const TreeNode& a, const TreeNode& b);

/// Unit-cost edit distance between token sequences.
std::size_t token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Splits source text into identifier, number, string and single-symbol
/// tokens, skipping whitespace and comments.
std::vector<std::string> lex_tokens(const std::string& source);

}  // namespace azr::metrics
