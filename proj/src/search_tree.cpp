#include "clutter/search_tree.hpp"

namespace clutter {

std::string to_string(ScoreVariant v) {
    switch (v) {
        case ScoreVariant::ucb1: return "ucb1";
        case ScoreVariant::ucb_virtual: return "ucb_virtual";
        case ScoreVariant::uct_top_m: return "uct_top_m";
        case ScoreVariant::guided: return "guided";
    }
    return "?";
}

ScoreVariant score_variant_from_string(const std::string& s) {
    if (s == "ucb1") return ScoreVariant::ucb1;
    if (s == "ucb_virtual") return ScoreVariant::ucb_virtual;
    if (s == "uct_top_m") return ScoreVariant::uct_top_m;
    if (s == "guided") return ScoreVariant::guided;
    throw std::invalid_argument("unknown score variant '" + s + "'");
}

namespace {

double top_sum(std::span<const double> top, std::size_t m) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(m, top.size()); ++i) s += top[i];
    return s;
}

double q_value(const SelectionPolicy& policy, const NodeStats& s) {
    return policy.q_top_k > 0 ? top_sum(s.top, static_cast<std::size_t>(policy.q_top_k)) : s.q_sum;
}

/// value + c * bonus; an infinite c keeps only the bonus.
double explore(double value, double c, double bonus) {
    if (std::isinf(c)) return bonus;
    return c == 0.0 ? value : value + c * bonus;
}

}  // namespace

double score_child(const SelectionPolicy& policy, const NodeStats& parent, const NodeStats& child,
                   std::optional<double> prior) {
    if (policy.variant == ScoreVariant::guided && !prior) {
        throw std::invalid_argument("guided scoring needs a prior value");
    }
    if (child.n == 0 && child.n_virtual == 0) return std::numeric_limits<double>::infinity();
    const double n = child.n;
    switch (policy.variant) {
        case ScoreVariant::ucb1:
            return explore(q_value(policy, child) / n, policy.c, std::sqrt(2.0 * std::log(parent.n) / n));
        case ScoreVariant::ucb_virtual: {
            const double nv = child.n + child.n_virtual;
            const double np = parent.n + parent.n_virtual;
            return explore(q_value(policy, child) / nv, policy.c, std::sqrt(2.0 * std::log(np) / nv));
        }
        case ScoreVariant::uct_top_m: {
            const std::size_t k = std::min({static_cast<std::size_t>(child.n), static_cast<std::size_t>(policy.m),
                                            child.top.size()});
            const double mean = k == 0 ? 0.0 : top_sum(child.top, k) / static_cast<double>(k);
            return explore(mean, policy.c, std::sqrt(std::log(parent.n) / n));
        }
        case ScoreVariant::guided:
            return (*prior + top_sum(child.top, static_cast<std::size_t>(policy.m))) / (1.0 + n);
    }
    return 0.0;
}

double exploitation_value(const SelectionPolicy& policy, const NodeStats& child, double prior) {
    switch (policy.variant) {
        case ScoreVariant::ucb1:
        case ScoreVariant::ucb_virtual:
            return child.n == 0 ? 0.0 : q_value(policy, child) / child.n;
        case ScoreVariant::uct_top_m: return child.top.empty() ? 0.0 : child.top.front();
        case ScoreVariant::guided: return prior + (child.top.empty() ? 0.0 : child.top.front());
    }
    return 0.0;
}

}  // namespace clutter
