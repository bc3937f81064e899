#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clutter {

enum class ScoreVariant { ucb1, ucb_virtual, uct_top_m, guided };

std::string to_string(ScoreVariant v);
ScoreVariant score_variant_from_string(const std::string& s);

struct SelectionPolicy {
    ScoreVariant variant = ScoreVariant::ucb1;
    /// Exploration weight; +infinity ranks by the exploration term alone.
    double c = 0.3;
    int m = 3;
    /// When > 0, Q is the sum of the top-k recorded rewards instead of all of them.
    int q_top_k = 0;
};

/// Selection statistics of one node. `top` holds the recorded rewards in descending
/// order (possibly truncated); `q_sum` is the sum of every reward ever recorded.
struct NodeStats {
    int n = 0;
    int n_virtual = 0;
    double q_sum = 0.0;
    std::span<const double> top;
};

/// Selection score of `child` under `parent`. Unvisited children score +infinity.
/// The guided variant needs `prior` and throws std::invalid_argument without it.
double score_child(const SelectionPolicy& policy, const NodeStats& parent, const NodeStats& child,
                   std::optional<double> prior = std::nullopt);

/// Exploitation-only value used to pick the action to execute: Q/N for the UCB
/// variants, the best reward for top-m UCT (m = 1, C = 0), prior + best reward for
/// the guided variant.
double exploitation_value(const SelectionPolicy& policy, const NodeStats& child, double prior = 0.0);

/// Descending multiset keeping the `capacity` largest values, plus the running sum
/// and count of everything inserted.
class RewardRecord {
public:
    explicit RewardRecord(std::size_t capacity = 100) : capacity_(std::max<std::size_t>(capacity, 1)) {}

    void insert(double r) {
        sum_ += r;
        ++count_;
        auto it = std::upper_bound(values_.begin(), values_.end(), r, std::greater<>());
        if (values_.size() < capacity_) {
            values_.insert(it, r);
        } else if (it != values_.end()) {
            values_.insert(it, r);
            values_.pop_back();
        }
    }

    double sum() const { return sum_; }
    std::size_t count() const { return count_; }
    const std::vector<double>& values() const { return values_; }
    double max() const { return values_.empty() ? 0.0 : values_.front(); }
    double top_sum(std::size_t m) const {
        double s = 0.0;
        for (std::size_t i = 0; i < std::min(m, values_.size()); ++i) s += values_[i];
        return s;
    }

private:
    std::size_t capacity_;
    std::vector<double> values_;
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

enum class BackupMode { max, sum };

/// Tree store shared by the tree planners. Nodes live in an arena addressed by index;
/// index 0 is the root. Each node owns its untried actions in expansion order.
template <class Action, class Payload>
class SearchTree {
public:
    struct Node {
        int parent = -1;
        std::optional<Action> action;
        int depth = 0;
        int n = 0;
        int n_virtual = 0;
        RewardRecord rewards;
        std::vector<int> children;
        std::vector<Action> untried;
        std::size_t next_untried = 0;
        /// Untried actions left in this subtree.
        std::size_t subtree_open = 0;
        bool terminal = false;
        /// Reward of this node's own state, folded in by max-mode backups.
        double node_reward = 0.0;
        double prior = 0.0;
        Payload payload;

        std::size_t open() const { return untried.size() - next_untried; }
        bool fully_expanded() const { return open() == 0; }
        NodeStats stats() const { return {n, n_virtual, rewards.sum(), rewards.values()}; }
    };

    struct Selection {
        int node = -1;
        Action action;
        /// Position of the action in the node's untried list.
        std::size_t action_index = 0;
    };

    explicit SearchTree(std::size_t reward_capacity = 100) : reward_capacity_(reward_capacity) {}

    int add_root(Payload payload, std::vector<Action> untried, double node_reward = 0.0, bool terminal = false) {
        nodes_.clear();
        return add_node(-1, std::nullopt, std::move(payload), std::move(untried), node_reward, terminal, 0.0);
    }

    int add_child(int parent, Action action, Payload payload, std::vector<Action> untried, double node_reward,
                  bool terminal, double prior = 0.0) {
        return add_node(parent, std::move(action), std::move(payload), std::move(untried), node_reward, terminal,
                        prior);
    }

    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    Node& node(int i) { return nodes_.at(static_cast<std::size_t>(i)); }
    const std::vector<Node>& nodes() const { return nodes_; }
    bool exhausted() const { return nodes_.empty() || nodes_[0].subtree_open == 0; }

    /// Drops the remaining untried actions of `i` (depth caps, terminal discoveries).
    void close(int i) {
        Node& nd = node(i);
        const std::size_t k = nd.open();
        nd.next_untried = nd.untried.size();
        for (int a = i; a >= 0; a = node(a).parent) node(a).subtree_open -= k;
    }

    /// Descends by maximum score to the first node with untried actions and takes its
    /// next action. Children without untried actions below them are skipped; nullopt
    /// when the whole tree is exhausted.
    std::optional<Selection> select_leaf(const SelectionPolicy& policy) {
        if (exhausted()) return std::nullopt;
        int cur = 0;
        while (node(cur).fully_expanded()) cur = best_open_child(cur, policy);
        Node& nd = node(cur);
        Selection sel{cur, nd.untried[nd.next_untried], nd.next_untried};
        ++nd.next_untried;
        for (int a = cur; a >= 0; a = node(a).parent) --node(a).subtree_open;
        return sel;
    }

    /// Up to `batch_size` distinct selections. Virtual counts along each selected path
    /// steer later selections of the same batch and are reset before returning.
    std::vector<Selection> select_batch(const SelectionPolicy& policy, std::size_t batch_size) {
        std::vector<Selection> out;
        while (out.size() < batch_size) {
            auto sel = select_leaf(policy);
            if (!sel) break;
            for (int a = sel->node; a >= 0; a = node(a).parent) ++node(a).n_virtual;
            out.push_back(std::move(*sel));
        }
        for (Node& nd : nodes_) nd.n_virtual = 0;
        return out;
    }

    /// Walks from `leaf` to the root recording the running value at each node.
    void backpropagate(int leaf, double reward, BackupMode mode, double gamma) {
        double r = reward;
        for (int a = leaf; a >= 0; a = node(a).parent) {
            Node& nd = node(a);
            if (mode == BackupMode::max) r = std::max(r, nd.node_reward);
            ++nd.n;
            nd.rewards.insert(r);
            r *= gamma;
        }
    }

    /// Child of `i` maximizing the exploitation value; first in insertion order on ties.
    std::optional<int> best_child(int i, const SelectionPolicy& policy) const {
        std::optional<int> best;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int c : node(i).children) {
            const Node& ch = node(c);
            const double v = exploitation_value(policy, ch.stats(), ch.prior);
            if (!best || v > best_v) {
                best = c;
                best_v = v;
            }
        }
        return best;
    }

private:
    int add_node(int parent, std::optional<Action> action, Payload payload, std::vector<Action> untried,
                 double node_reward, bool terminal, double prior) {
        Node nd;
        nd.rewards = RewardRecord(reward_capacity_);
        nd.payload = std::move(payload);
        nd.parent = parent;
        nd.action = std::move(action);
        nd.depth = parent < 0 ? 0 : node(parent).depth + 1;
        nd.untried = terminal ? std::vector<Action>{} : std::move(untried);
        nd.terminal = terminal;
        nd.node_reward = node_reward;
        nd.prior = prior;
        const int id = static_cast<int>(nodes_.size());
        const std::size_t k = nd.untried.size();
        nodes_.push_back(std::move(nd));
        if (parent >= 0) node(parent).children.push_back(id);
        for (int a = id; a >= 0; a = node(a).parent) node(a).subtree_open += k;
        return id;
    }

    int best_open_child(int i, const SelectionPolicy& policy) const {
        const Node& nd = node(i);
        const NodeStats ps = nd.stats();
        int best = -1;
        double best_s = -std::numeric_limits<double>::infinity();
        for (int c : nd.children) {
            const Node& ch = node(c);
            if (ch.subtree_open == 0) continue;
            const std::optional<double> prior =
                policy.variant == ScoreVariant::guided ? std::optional<double>(ch.prior) : std::nullopt;
            const double s = score_child(policy, ps, ch.stats(), prior);
            if (best < 0 || s > best_s) {
                best = c;
                best_s = s;
            }
        }
        if (best < 0) throw std::logic_error("search tree open counts are inconsistent");
        return best;
    }

    std::size_t reward_capacity_;
    std::vector<Node> nodes_;
};

}  // namespace clutter
