#include "azr/metrics/tree_edit.hpp"

#include <algorithm>
#include <cctype>

#include "azr/core/types.hpp"

namespace azr::metrics {

namespace {

// Postorder numbering with leftmost-leaf descendants, 1-based.
struct Indexed {
  std::vector<const std::string*> labels{nullptr};
  std::vector<std::size_t> leftmost{0};
  std::vector<std::size_t> keyroots;
};

std::size_t index_tree(const TreeNode& node, Indexed& out) {
  std::size_t first_leaf = 0;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    std::size_t child = index_tree(node.children[i], out);
    if (i == 0) first_leaf = out.leftmost[child];
  }
  out.labels.push_back(&node.label);
  std::size_t id = out.labels.size() - 1;
  out.leftmost.push_back(node.children.empty() ? id : first_leaf);
  return id;
}

Indexed prepare(const TreeNode& root) {
  Indexed t;
  index_tree(root, t);
  std::size_t n = t.labels.size() - 1;
  // A keyroot is the highest node having a given leftmost leaf.
  std::vector<bool> seen(n + 1, false);
  for (std::size_t i = n; i >= 1; --i) {
    if (!seen[t.leftmost[i]]) {
      seen[t.leftmost[i]] = true;
      t.keyroots.push_back(i);
    }
  }
  std::sort(t.keyroots.begin(), t.keyroots.end());
  return t;
}

}  // namespace

TreeNode tree_from_json(const nlohmann::json& node) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_string() || !node[1].is_array()) {
    throw Error("malformed syntax tree node");
  }
  TreeNode out{node[0].get<std::string>(), {}};
  out.children.reserve(node[1].size());
  for (const auto& child : node[1]) out.children.push_back(tree_from_json(child));
  return out;
}

std::size_t tree_size(const TreeNode& root) {
  std::size_t n = 1;
  for (const auto& child : root.children) n += tree_size(child);
  return n;
}

std::size_t tree_edit_distance(const TreeNode& a, const TreeNode& b) {
  Indexed ta = prepare(a);
  Indexed tb = prepare(b);
  const std::size_t n = ta.labels.size() - 1;
  const std::size_t m = tb.labels.size() - 1;
  std::vector<std::vector<std::size_t>> td(n + 1, std::vector<std::size_t>(m + 1, 0));
  std::vector<std::vector<std::size_t>> fd(n + 2, std::vector<std::size_t>(m + 2, 0));

  for (std::size_t i : ta.keyroots) {
    for (std::size_t j : tb.keyroots) {
      const std::size_t li = ta.leftmost[i];
      const std::size_t lj = tb.leftmost[j];
      // Forest distances; row/column 0 is the empty forest (li - 1, lj - 1).
      auto row = [&](std::size_t x) { return x + 1 - li; };
      auto col = [&](std::size_t y) { return y + 1 - lj; };
      fd[0][0] = 0;
      for (std::size_t x = li; x <= i; ++x) fd[row(x)][0] = fd[row(x) - 1][0] + 1;
      for (std::size_t y = lj; y <= j; ++y) fd[0][col(y)] = fd[0][col(y) - 1] + 1;
      for (std::size_t x = li; x <= i; ++x) {
        for (std::size_t y = lj; y <= j; ++y) {
          std::size_t del = fd[row(x) - 1][col(y)] + 1;
          std::size_t ins = fd[row(x)][col(y) - 1] + 1;
          if (ta.leftmost[x] == li && tb.leftmost[y] == lj) {
            std::size_t relabel = *ta.labels[x] == *tb.labels[y] ? 0 : 1;
            fd[row(x)][col(y)] = std::min({del, ins, fd[row(x) - 1][col(y) - 1] + relabel});
            td[x][y] = fd[row(x)][col(y)];
          } else {
            std::size_t sub = fd[ta.leftmost[x] - li][tb.leftmost[y] - lj] + td[x][y];
            fd[row(x)][col(y)] = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return td[n][m];
}

std::size_t token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> lex_tokens(const std::string& source) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = source.size();
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < n) {
    char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < n && source[i] != '\n') ++i;
    } else if (c == '\'' || c == '"') {
      std::size_t start = i++;
      while (i < n && source[i] != c) i += source[i] == '\\' ? 2 : 1;
      i = std::min(i + 1, n);
      out.push_back(source.substr(start, i - start));
    } else if (ident(c)) {
      std::size_t start = i;
      bool number = std::isdigit(static_cast<unsigned char>(c));
      while (i < n && (ident(source[i]) || (number && source[i] == '.'))) ++i;
      out.push_back(source.substr(start, i - start));
    } else {
      out.emplace_back(1, c);
      ++i;
    }
  }
  return out;
}

}  // namespace azr::metrics
