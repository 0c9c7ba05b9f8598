#include "bbc/ask_tell.hpp"

#include <chrono>
#include <cmath>

namespace bbc {

namespace {
bool same_point(const Point& a, const Point& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        // slack for evaluators that reformat numbers in transit
        const double tol = 1e-12 * std::max(1.0, std::fabs(a[i]));
        if (std::fabs(a[i] - b[i]) > tol) return false;
    }
    return true;
}
} // namespace

class SessionEvaluator : public Evaluator {
public:
    explicit SessionEvaluator(AskTellSession& session) : session_(session) {}

    std::vector<SampleRecord> evaluate(std::span<const Point> raw, BudgetState& budget,
                                       std::vector<long>& wall_ms) override {
        if (budget.used + static_cast<long>(raw.size()) > budget.total)
            throw BudgetError(static_cast<long>(raw.size()), budget.remaining());
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> ys;
        session_.exchange(raw, ys);
        const auto t1 = std::chrono::steady_clock::now();
        const long total_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        const long per_point = ys.empty() ? 0 : total_ms / static_cast<long>(ys.size());
        std::vector<SampleRecord> out;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            out.push_back(SampleRecord{raw[i], ys[i]});
            wall_ms.push_back(per_point);
            budget.used += 1;
        }
        return out;
    }

private:
    AskTellSession& session_;
};

AskTellSession::AskTellSession(const CampaignConfig& cfg) {
    cfg.validate();
    const SearchSpace space = objective_space(cfg.objective);
    worker_ = std::thread([this, cfg, space]() {
        SessionEvaluator ev(*this);
        RunResult r;
        try {
            r = run_search(cfg, space, ev);
        } catch (const std::exception& e) {
            r.truncated = true;
            r.error = e.what();
        }
        std::lock_guard lock(mu_);
        result_ = std::move(r);
        campaign_done_ = true;
        cv_.notify_all();
    });
}

AskTellSession::~AskTellSession() {
    {
        std::lock_guard lock(mu_);
        shutdown_ = true;
        cv_.notify_all();
    }
    if (worker_.joinable()) worker_.join();
}

bool AskTellSession::exchange(std::span<const Point> raw, std::vector<double>& out) {
    std::unique_lock lock(mu_);
    pending_.assign(raw.begin(), raw.end());
    answers_.clear();
    answered_ = 0;
    batch_done_ = raw.empty();
    cv_.notify_all();
    cv_.wait(lock, [&] { return batch_done_ || shutdown_; });
    out = answers_;
    pending_.clear();
    outstanding_.clear();
    return !shutdown_;
}

std::vector<Point> AskTellSession::ask(int max_points) {
    std::unique_lock lock(mu_);
    if (!outstanding_.empty())
        throw ProtocolError("ask called again before the previous batch was told");
    cv_.wait(lock, [&] { return !pending_.empty() || campaign_done_ || shutdown_; });
    if (pending_.empty()) return {};
    const std::size_t take =
        std::min<std::size_t>(pending_.size(), static_cast<std::size_t>(std::max(1, max_points)));
    outstanding_.assign(pending_.begin(), pending_.begin() + take);
    pending_.erase(pending_.begin(), pending_.begin() + take);
    return outstanding_;
}

void AskTellSession::tell(std::span<const SampleRecord> results) {
    std::unique_lock lock(mu_);
    if (outstanding_.empty()) throw ProtocolError("tell without a pending ask");
    if (results.size() != outstanding_.size())
        throw ProtocolError("tell must answer exactly the asked points");
    for (std::size_t i = 0; i < results.size(); ++i)
        if (!same_point(outstanding_[i], results[i].x))
            throw ProtocolError("tell contains a point that was not asked");
    for (const auto& r : results) answers_.push_back(r.y);
    answered_ += results.size();
    outstanding_.clear();
    if (pending_.empty()) {
        batch_done_ = true;
        cv_.notify_all();
    }
}

bool AskTellSession::finished() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !pending_.empty() || campaign_done_ || shutdown_; });
    return campaign_done_ && pending_.empty();
}

RunResult AskTellSession::take_result() {
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return campaign_done_; });
    }
    if (worker_.joinable()) worker_.join();
    return std::move(result_);
}

} // namespace bbc
