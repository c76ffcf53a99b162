#pragma once

// Client for an audience-estimate provider.
//
// Wire contract:
//   GET {base_url}/audience?pop={fingerprint}&interest={id}
//   200 -> {"audience_size": <non-negative integer>}
//
// 5xx, 429 and transport failures are retried with exponential backoff.
// Any other status, or a 200 with a non-conforming body, is a
// ContractViolation. A fetch is all-or-nothing.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "assim/core.hpp"

namespace assim {

using Clock = std::chrono::steady_clock;
using Seconds = std::chrono::duration<double>;

struct ProviderConfig {
    std::string base_url = "http://127.0.0.1:8080";
    int max_requests_per_window = 10;
    Seconds window{1.0};
    // Attempt budget per interest: a persistently failing interest is tried
    // exactly max_retries times before ProviderUnavailable.
    int max_retries = 3;
    Seconds cache_ttl{3600.0};
    Seconds backoff_base{0.05};
    int concurrency = 8;
};

void validate_provider_config(const ProviderConfig& config);

struct HttpResponse {
    int status = 0; // 0 means the request never completed
    std::string body;
};

// Issues one GET for a path+query relative to the provider base URL.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const std::string& path_and_query) = 0;
};

/// cpp-httplib backed transport.
std::unique_ptr<Transport> make_http_transport(const std::string& base_url,
                                               Seconds timeout = Seconds{10.0});

std::string percent_encode(std::string_view s);
std::string audience_request_path(const PopulationSpec& pop, const std::string& interest_id);

/// Parses a 200 body. Throws ContractViolation.
Audience parse_audience_body(const std::string& body);

// Sliding-window limiter: in any interval of length `window` at most
// `max_requests` acquisitions are granted.
class RateLimiter {
public:
    RateLimiter(int max_requests, Seconds window, bool record_trace = false);

    /// Blocks until a slot is free and returns the grant time.
    Clock::time_point acquire();

    std::vector<Clock::time_point> trace() const;

private:
    int max_requests_;
    Clock::duration window_;
    bool record_trace_;
    mutable std::mutex mutex_;
    std::deque<Clock::time_point> recent_;
    std::vector<Clock::time_point> trace_;
};

struct CacheEntry {
    Audience value = 0;
    Clock::time_point fetched_at;
};

// Thread-safe (population fingerprint, interest id) -> audience cache.
class AudienceCache {
public:
    using NowFn = std::function<Clock::time_point()>;

    explicit AudienceCache(Seconds ttl, NowFn now = [] { return Clock::now(); });

    std::optional<Audience> lookup(const std::string& fingerprint, const std::string& interest_id) const;
    void store(const std::string& fingerprint, const std::string& interest_id, Audience value);
    std::size_t size() const;

private:
    Clock::duration ttl_;
    NowFn now_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<std::string, std::string>, CacheEntry> entries_;
};

class AudienceClient {
public:
    AudienceClient(ProviderConfig config, std::shared_ptr<Transport> transport,
                   AudienceCache::NowFn cache_clock = [] { return Clock::now(); });

    /// One count per requested interest, or an exception; never a partial table.
    AudienceTable fetch(const PopulationSpec& population, std::span<const InterestId> interests);

    std::uint64_t requests_issued() const noexcept;
    const RateLimiter& limiter() const noexcept { return limiter_; }
    const AudienceCache& cache() const noexcept { return cache_; }

private:
    Audience fetch_one(const std::string& fp, const PopulationSpec& pop, const std::string& id);

    ProviderConfig config_;
    std::shared_ptr<Transport> transport_;
    RateLimiter limiter_;
    AudienceCache cache_;
    std::atomic<std::uint64_t> requests_{0};
};

inline AudienceTable fetch_audience(AudienceClient& client, const PopulationSpec& population,
                                    std::span<const InterestId> interests) {
    return client.fetch(population, interests);
}

} // namespace assim
