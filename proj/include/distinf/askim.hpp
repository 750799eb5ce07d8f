#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "decay.hpp"
#include "dijkstra.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "graph.hpp"
#include "ranks.hpp"
#include "types.hpp"

namespace distinf {

// PPS inclusion rule: a contribution is in the sample when contribution / rank >= tau.
inline bool pps_include(double contribution, double rank, double tau) noexcept {
    return contribution > 0.0 && contribution / rank >= tau;
}

enum class selection_mode { fixed, adaptive };

struct askim_config {
    std::uint32_t k = 64;
    double lambda = 0.5;
    // Initial sampling threshold; alpha(0) * n * ell / (2k) when unset.
    std::optional<double> tau0;
    selection_mode mode = selection_mode::fixed;
    // Accuracy for the adaptive check; also used for the error sum in fixed mode.
    double epsilon = 0.1;
    node_id max_seeds = 50;
    std::uint64_t seed = 1;
    std::function<void(std::size_t)> on_seed;
};

struct tau_event {
    double tau;
    std::size_t seeds; // seeds selected when tau was set
};

struct askim_metrics {
    std::vector<tau_event> tau_schedule;
    std::uint64_t delta_updates = 0;
    std::uint64_t cursor_scans = 0;   // nodes settled by reverse searches
    std::uint64_t resumes = 0;        // reverse-search resumptions
    std::uint64_t index_entries = 0;  // entries ever appended to the index
    std::uint64_t rejections = 0;     // adaptive-mode rejected candidates
};

struct askim_result {
    greedy_trace trace;
    askim_metrics metrics;
};

// State of the approximate greedy for a general decay function.
//
// Each node-instance pair (v, i) owns a list of (u, d) entries produced by a
// pausable reverse Dijkstra from v. With c = alpha(d) - alpha(delta(v, i)), a
// list splits into consecutive parts H (c >= tau), M (c / r >= tau) and L
// (0 < c). est_h[u] sums c over H entries naming u and est_m[u] counts M
// entries naming u, so (est_h[u] + tau * est_m[u]) / ell estimates the
// marginal influence of u.
class askim_state {
public:
    struct index_entry {
        node_id node;
        double distance;
    };

    askim_state(const multi_instance_graph& g, const decay_function& alpha, const askim_config& config)
        : g_(&g), alpha_(alpha), config_(config), n_(g.node_count()), ell_(g.instance_count()),
          ranks_(n_, ell_, ell_, config.seed), residual_(g), ws_(n_) {
        if (config.k == 0) {
            throw validation_error("k must be at least 1");
        }
        if (!(config.lambda > 0.0 && config.lambda < 1.0)) {
            throw validation_error("lambda must lie in (0, 1)");
        }
        if (!(config.epsilon >= 0.0 && config.epsilon < 1.0)) {
            throw validation_error("epsilon must lie in [0, 1)");
        }
        tau_ = config.tau0.value_or(alpha_.alpha0() * n_ * static_cast<double>(ell_) / (2.0 * config.k));
        if (!(tau_ > 0.0) || std::isinf(tau_)) {
            throw validation_error("initial tau must be positive and finite");
        }
        const pair_index pairs = g.pair_count();
        rank_.resize(pairs);
        lists_.resize(pairs);
        h_end_.assign(pairs, 0);
        m_end_.assign(pairs, 0);
        status_.assign(pairs, pair_status::fresh);
        pair_key_.resize(pairs);
        hml_key_.assign(pairs, no_key);
        est_h_.assign(n_, 0.0);
        h_count_.assign(n_, 0);
        est_m_.assign(n_, 0);
        cand_key_.assign(n_, no_key);

        std::vector<queue_item> initial;
        initial.reserve(pairs);
        for (pair_index p = 0; p < pairs; ++p) {
            rank_[p] = ranks_.normalized(p);
            pair_key_[p] = alpha_.alpha0() / rank_[p];
            initial.push_back({pair_key_[p], p});
        }
        qpairs_ = pair_queue(pair_order{}, std::move(initial));
        metrics_.tau_schedule.push_back({tau_, 0});
    }

    // The state keeps a reference to the graph.
    askim_state(multi_instance_graph&&, const decay_function&, const askim_config&) = delete;

    double tau() const noexcept { return tau_; }
    const rank_assignment& ranks() const noexcept { return ranks_; }
    const residual_state& residual() const noexcept { return residual_; }
    const askim_metrics& metrics() const noexcept { return metrics_; }
    const greedy_trace& trace() const noexcept { return trace_; }
    double coverage() const noexcept { return coverage_; }
    bool saturated() const noexcept { return saturated_pairs_ == g_->pair_count(); }
    double error_sum() const noexcept { return error_sum_; }

    double est_h(node_id u) const { return est_h_.at(u); }
    std::uint64_t est_m(node_id u) const { return est_m_.at(u); }
    std::span<const index_entry> index(pair_index p) const { return lists_.at(p); }
    std::size_t h_end(pair_index p) const { return h_end_.at(p); }
    std::size_t m_end(pair_index p) const { return m_end_.at(p); }
    // Position of the first M / first L entry, if there is one.
    std::optional<std::size_t> hm(pair_index p) const {
        return h_end_[p] < m_end_[p] ? std::optional<std::size_t>(h_end_[p]) : std::nullopt;
    }
    std::optional<std::size_t> ml(pair_index p) const {
        return m_end_[p] < lists_[p].size() ? std::optional<std::size_t>(m_end_[p]) : std::nullopt;
    }
    bool cursor_active(pair_index p) const { return status_.at(p) != pair_status::dead; }

    // Unnormalized estimate est_h + tau * est_m.
    double raw_estimate(node_id u) const { return est_h_[u] + tau_ * static_cast<double>(est_m_[u]); }
    double estimate_node(node_id u) const { return raw_estimate(u) / ell_; }

    // tau <- tau * lambda, then bring the samples up to date.
    void lower_tau_and_sample() {
        tau_ *= config_.lambda;
        if (!(tau_ > 0.0)) {
            throw contract_error("sampling threshold underflowed");
        }
        metrics_.tau_schedule.push_back({tau_, trace_.entries.size()});
        sample();
    }

    // Reclassifies entries that moved up under the current tau, then resumes
    // every reverse search whose priority reached tau.
    void sample() {
        move_up();
        while (true) {
            const auto top = top_pair();
            if (!top || top->key < tau_) {
                break;
            }
            qpairs_.pop();
            resume(top->pair);
        }
    }

    struct candidate {
        node_id node;
        double raw_estimate;
    };

    // Node with the largest estimate if that estimate reaches k * tau (and,
    // in adaptive mode, the exact marginal confirms it); otherwise none.
    std::optional<candidate> next_seed() {
        const double gate = config_.k * tau_;
        while (true) {
            const auto top = top_candidate();
            if (!top || top->key < gate) {
                return std::nullopt;
            }
            qcands_.pop();
            const node_id u = top->node;
            const double est = raw_estimate(u);
            const auto rival = top_candidate();
            const bool beaten = rival && (est < rival->key || (est == rival->key && rival->node < u));
            if (est < gate || beaten) {
                push_candidate(u, est);
                continue;
            }
            if (config_.mode == selection_mode::adaptive) {
                const double exact = marg_gain(*g_, residual_, u, alpha_, ws_) * ell_;
                if (exact < (1.0 - config_.epsilon) * est) {
                    ++metrics_.rejections;
                    push_candidate(u, exact);
                    return std::nullopt;
                }
            }
            cand_key_[u] = no_key;
            return candidate{u, est};
        }
    }

    // Adds x to the seed set and updates distances, samples and queues.
    // Returns the exact marginal influence (normalized by ell).
    double commit_seed(node_id x, std::optional<double> raw_estimate = std::nullopt) {
        if (x >= n_) {
            throw contract_error("node id out of range");
        }
        residual_.mark_seed(x);
        cand_key_[x] = no_key;
        double gain = 0.0;
        const node_id sources[] = {x};
        for (instance_id i = 0; i < ell_; ++i) {
            ws_.run(forward_arcs((*g_)[i]), sources, [&](node_id v, double d) {
                const pair_index p = make_pair_index(v, i, n_);
                const double old_delta = residual_.delta(p);
                if (d >= old_delta) {
                    return scan_action::prune;
                }
                const double a = alpha_(d);
                if (a == 0.0) {
                    return scan_action::prune;
                }
                gain += a - alpha_(old_delta);
                residual_.set_delta(p, d);
                ++metrics_.delta_updates;
                if (a >= alpha_.alpha0() && alpha_(old_delta) < alpha_.alpha0()) {
                    ++saturated_pairs_;
                }
                move_down(p, old_delta);
                refresh_pair_priority(p);
                return scan_action::relax;
            }, alpha_.support_bound());
        }
        coverage_ += gain;
        std::optional<double> estimate;
        if (raw_estimate) {
            estimate = *raw_estimate / ell_;
            error_sum_ += std::max(0.0, (1.0 - config_.epsilon) * *raw_estimate - gain) / ell_;
        }
        trace_.entries.push_back({x, gain / ell_, estimate});
        return gain / ell_;
    }

    // Recomputes classes, boundaries and estimate components from the index
    // lists and compares them with the maintained values. est_h is compared
    // up to `tolerance` relative to the largest contribution magnitude
    // involved; everything else must match exactly. Returns a description of
    // the first mismatch.
    std::optional<std::string> check_consistency(double tolerance = 1e-9) const {
        std::vector<double> h(n_, 0.0);
        std::vector<double> h_scale(n_, 0.0);
        std::vector<std::uint64_t> m(n_, 0);
        for (pair_index p = 0; p < lists_.size(); ++p) {
            const auto& list = lists_[p];
            const double base = alpha_(residual_.delta(p));
            std::size_t h_count = 0;
            std::size_t m_count = 0;
            for (std::size_t j = 0; j < list.size(); ++j) {
                const double c = alpha_(list[j].distance) - base;
                if (!(c > 0.0)) {
                    return describe("entry with no contribution left in list", p, j);
                }
                if (j > 0 && list[j].distance < list[j - 1].distance) {
                    return describe("list not in scan order", p, j);
                }
                if (c >= tau_) {
                    if (j != h_count) {
                        return describe("H entry after a lower class", p, j);
                    }
                    ++h_count;
                    h[list[j].node] += c;
                    h_scale[list[j].node] += std::abs(c);
                } else if (pps_include(c, rank_[p], tau_)) {
                    if (j != h_count + m_count) {
                        return describe("M entry after an L entry", p, j);
                    }
                    ++m_count;
                    ++m[list[j].node];
                }
            }
            if (h_end_[p] != h_count || m_end_[p] != h_count + m_count) {
                return describe("HM/ML boundaries disagree with classes", p, 0);
            }
        }
        for (node_id u = 0; u < n_; ++u) {
            if (m[u] != est_m_[u]) {
                return "est_m mismatch at node " + std::to_string(u);
            }
            const double scale = std::max({h_scale[u], std::abs(est_h_[u]), 1e-300});
            if (std::abs(h[u] - est_h_[u]) > tolerance * scale + 1e-15) {
                return "est_h mismatch at node " + std::to_string(u) + ": " + std::to_string(est_h_[u]) + " kept, " +
                       std::to_string(h[u]) + " rescanned";
            }
        }
        return std::nullopt;
    }

private:
    enum class pair_status : std::uint8_t { fresh, active, dead };

    static constexpr double no_key = -std::numeric_limits<double>::infinity();

    struct queue_item {
        double key;
        pair_index pair;
    };
    // Larger key first; ties go to the lower pair index.
    struct pair_order {
        bool operator()(const queue_item& a, const queue_item& b) const noexcept {
            return a.key != b.key ? a.key < b.key : a.pair > b.pair;
        }
    };
    using pair_queue = std::priority_queue<queue_item, std::vector<queue_item>, pair_order>;

    struct cand_item {
        double key;
        node_id node;
    };
    struct cand_order {
        bool operator()(const cand_item& a, const cand_item& b) const noexcept {
            return a.key != b.key ? a.key < b.key : a.node > b.node;
        }
    };

    std::string describe(const char* what, pair_index p, std::size_t j) const {
        const auto [v, i] = split_pair_index(p, n_);
        return std::string(what) + " (pair " + std::to_string(v) + "/" + std::to_string(i) + ", position " +
               std::to_string(j) + ")";
    }

    double contribution(pair_index p, std::size_t j) const {
        return alpha_(lists_[p][j].distance) - alpha_(residual_.delta(p));
    }

    std::optional<queue_item> top_pair() {
        while (!qpairs_.empty()) {
            const auto top = qpairs_.top();
            if (status_[top.pair] != pair_status::dead && top.key == pair_key_[top.pair]) {
                return top;
            }
            qpairs_.pop();
        }
        return std::nullopt;
    }

    std::optional<cand_item> top_candidate() {
        while (!qcands_.empty()) {
            const auto top = qcands_.top();
            if (!residual_.is_seed(top.node) && top.key == cand_key_[top.node]) {
                return top;
            }
            qcands_.pop();
        }
        return std::nullopt;
    }

    void push_candidate(node_id u, double key) {
        cand_key_[u] = key;
        qcands_.push({key, u});
    }

    // Highest tau at which some entry of the list would move up.
    double reclass_threshold(pair_index p) const {
        double key = no_key;
        if (h_end_[p] < m_end_[p]) {
            key = contribution(p, h_end_[p]);
        }
        if (m_end_[p] < lists_[p].size()) {
            key = std::max(key, contribution(p, m_end_[p]) / rank_[p]);
        }
        return key;
    }

    void refresh_hml(pair_index p) {
        const double key = reclass_threshold(p);
        if (key != hml_key_[p]) {
            hml_key_[p] = key;
            if (key != no_key) {
                qhml_.push({key, p});
            }
        }
    }

    void enter_h(node_id u, double c) {
        est_h_[u] += c;
        ++h_count_[u];
    }

    // Clears rounding residue once u has no H entries left.
    void leave_h(node_id u, double c) {
        est_h_[u] = --h_count_[u] == 0 ? 0.0 : est_h_[u] - c;
    }

    void move_up() {
        while (!qhml_.empty()) {
            const auto top = qhml_.top();
            if (top.key != hml_key_[top.pair]) {
                qhml_.pop();
                continue;
            }
            if (top.key < tau_) {
                break;
            }
            qhml_.pop();
            const pair_index p = top.pair;
            hml_key_[p] = no_key;
            auto& list = lists_[p];
            const double r = rank_[p];
            while (h_end_[p] < m_end_[p]) {
                const double c = contribution(p, h_end_[p]);
                if (c < tau_) {
                    break;
                }
                const node_id u = list[h_end_[p]].node;
                --est_m_[u];
                enter_h(u, c);
                ++h_end_[p];
            }
            while (m_end_[p] < list.size()) {
                const double c = contribution(p, m_end_[p]);
                if (!pps_include(c, r, tau_)) {
                    break;
                }
                const node_id u = list[m_end_[p]].node;
                if (c >= tau_ && h_end_[p] == m_end_[p]) {
                    enter_h(u, c);
                    ++h_end_[p];
                } else {
                    ++est_m_[u];
                }
                ++m_end_[p];
                push_candidate(u, raw_estimate(u));
            }
            refresh_hml(p);
        }
    }

    void resume(pair_index p) {
        const auto [v, i] = split_pair_index(p, n_);
        if (status_[p] == pair_status::fresh) {
            cursors_.emplace(p, dijkstra_cursor(v));
            status_[p] = pair_status::active;
        }
        auto& cursor = cursors_.at(p);
        const double r = rank_[p];
        const double base = alpha_(residual_.delta(p));
        const double tau = tau_;
        auto& list = lists_[p];
        ++metrics_.resumes;
        const auto before = cursor.settled_count();
        cursor.resume(
            reverse_arcs((*g_)[i]), [&](double d) { return !pps_include(alpha_(d) - base, r, tau); },
            [&](node_id u, double d) {
                const double c = alpha_(d) - base;
                list.push_back({u, d});
                ++metrics_.index_entries;
                ++m_end_[p];
                if (h_end_[p] + 1 == m_end_[p] && c >= tau) {
                    enter_h(u, c);
                    ++h_end_[p];
                } else {
                    ++est_m_[u];
                    if (h_end_[p] + 1 == m_end_[p]) {
                        refresh_hml(p); // first M entry
                    }
                }
                push_candidate(u, raw_estimate(u));
                return true;
            });
        metrics_.cursor_scans += cursor.settled_count() - before;
        refresh_pair_priority(p);
    }

    // Recomputes (alpha(mu) - alpha(delta)) / r; a pair whose priority is
    // no longer positive is retired for good.
    void refresh_pair_priority(pair_index p) {
        if (status_[p] == pair_status::dead) {
            return;
        }
        double mu = 0.0;
        if (status_[p] == pair_status::active) {
            const auto& cursor = cursors_.at(p);
            mu = cursor.terminated() ? infinite_distance : cursor.next_distance();
        }
        const double key = (alpha_(mu) - alpha_(residual_.delta(p))) / rank_[p];
        if (!(key > 0.0)) {
            status_[p] = pair_status::dead;
            cursors_.erase(p);
            pair_key_[p] = no_key;
            return;
        }
        if (key != pair_key_[p]) {
            pair_key_[p] = key;
            qpairs_.push({key, p});
        }
    }

    // Reclassifies a list after delta(p) dropped from old_delta.
    void move_down(pair_index p, double old_delta) {
        auto& list = lists_[p];
        if (list.empty()) {
            return;
        }
        const double r = rank_[p];
        const double old_base = alpha_(old_delta);
        const double new_base = alpha_(residual_.delta(p));
        auto old_c = [&](std::size_t j) { return alpha_(list[j].distance) - old_base; };
        auto new_c = [&](std::size_t j) { return alpha_(list[j].distance) - new_base; };
        const std::size_t old_h = h_end_[p];
        const std::size_t old_m = m_end_[p];

        // Trim the tail of entries that no longer contribute.
        while (!list.empty() && !(new_c(list.size() - 1) > 0.0)) {
            const std::size_t j = list.size() - 1;
            if (j < old_h) {
                leave_h(list[j].node, old_c(j));
            } else if (j < old_m) {
                --est_m_[list[j].node];
            }
            list.pop_back();
        }
        const std::size_t size = list.size();
        const std::size_t h_lim = std::min(old_h, size);
        const std::size_t m_lim = std::min(old_m, size);

        std::size_t h = 0;
        for (; h < h_lim; ++h) {
            const double c = new_c(h);
            if (c < tau_) {
                break;
            }
            est_h_[list[h].node] += c - old_c(h);
        }
        for (std::size_t j = h; j < h_lim; ++j) {
            leave_h(list[j].node, old_c(j));
        }
        std::size_t m = h;
        while (m < h_lim && pps_include(new_c(m), r, tau_)) {
            ++est_m_[list[m].node];
            ++m;
        }
        if (m < h_lim) {
            for (std::size_t j = h_lim; j < m_lim; ++j) {
                --est_m_[list[j].node];
            }
        } else {
            m = m_lim;
            while (m > h_lim && !pps_include(new_c(m - 1), r, tau_)) {
                --est_m_[list[m - 1].node];
                --m;
            }
        }
        h_end_[p] = h;
        m_end_[p] = m;
        refresh_hml(p);
    }

    const multi_instance_graph* g_;
    decay_function alpha_;
    askim_config config_;
    node_id n_;
    std::uint32_t ell_;
    rank_assignment ranks_;
    residual_state residual_;
    dijkstra_workspace ws_;
    double tau_ = 0.0;

    std::vector<double> rank_;
    std::vector<std::vector<index_entry>> lists_;
    std::vector<std::uint32_t> h_end_;
    std::vector<std::uint32_t> m_end_;
    std::vector<pair_status> status_;
    std::unordered_map<pair_index, dijkstra_cursor> cursors_;

    std::vector<double> pair_key_;
    std::vector<double> hml_key_;
    std::vector<double> cand_key_;
    pair_queue qpairs_;
    pair_queue qhml_;
    std::priority_queue<cand_item, std::vector<cand_item>, cand_order> qcands_;

    std::vector<double> est_h_;
    std::vector<std::uint32_t> h_count_;
    std::vector<std::uint64_t> est_m_;

    pair_index saturated_pairs_ = 0;
    double coverage_ = 0.0;
    double error_sum_ = 0.0;
    greedy_trace trace_;
    askim_metrics metrics_;
};

// Approximate greedy for a general decay function. Runs until max_seeds
// seeds are chosen or every pair is at full utility.
inline askim_result run_askim(const multi_instance_graph& g, const decay_function& alpha, const askim_config& config) {
    if (config.max_seeds > g.node_count()) {
        throw validation_error("seed count exceeds node count");
    }
    askim_state state(g, alpha, config);
    while (state.trace().entries.size() < config.max_seeds && !state.saturated()) {
        std::optional<askim_state::candidate> next;
        while (!(next = state.next_seed())) {
            state.lower_tau_and_sample();
        }
        state.commit_seed(next->node, next->raw_estimate);
        if (config.on_seed) {
            config.on_seed(state.trace().entries.size());
        }
    }
    askim_result result{state.trace(), state.metrics()};
    result.trace.error_sum = state.error_sum();
    return result;
}

} // namespace distinf
