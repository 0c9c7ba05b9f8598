#pragma once

#include "bbc/campaign.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

namespace bbc {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inversion-of-control driver: the campaign runs on an internal thread and
// blocks in its evaluator; the owner pulls pending points with ask() and
// feeds values back with tell(). ask and tell strictly alternate.
class AskTellSession {
public:
    explicit AskTellSession(const CampaignConfig& cfg);
    ~AskTellSession();

    AskTellSession(const AskTellSession&) = delete;
    AskTellSession& operator=(const AskTellSession&) = delete;

    // Up to max_points raw-coordinate points awaiting evaluation; empty once
    // the campaign has finished. Throws ProtocolError on a double ask.
    std::vector<Point> ask(int max_points);

    // Results for exactly the points handed out by the last ask, in order.
    // Throws ProtocolError on tell-before-ask or mismatched points.
    void tell(std::span<const SampleRecord> results);

    bool finished();

    // Valid after finished(); the campaign's dataset and status.
    RunResult take_result();

private:
    friend class SessionEvaluator;

    // Campaign side: publishes a batch, blocks until it is fully answered.
    // Returns false when the session is shutting down.
    bool exchange(std::span<const Point> raw, std::vector<double>& out);

    std::mutex mu_;
    std::condition_variable cv_;
    std::vector<Point> pending_;      // not yet handed to ask()
    std::vector<Point> outstanding_;  // handed out, awaiting tell()
    std::vector<double> answers_;     // filled by tell, consumed by campaign
    std::size_t answered_ = 0;
    bool batch_done_ = false;
    bool shutdown_ = false;
    bool campaign_done_ = false;

    RunResult result_;
    std::thread worker_;
};

} // namespace bbc
