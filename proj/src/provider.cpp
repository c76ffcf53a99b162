#include "assim/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace assim {

void validate_provider_config(const ProviderConfig& config) {
    if (config.max_requests_per_window < 1)
        throw Error(ErrorCode::InvalidConfig, "max_requests_per_window must be >= 1");
    if (!(config.window.count() > 0.0))
        throw Error(ErrorCode::InvalidConfig, "rate window must be positive");
    if (config.max_retries < 1)
        throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 1");
    if (config.cache_ttl.count() < 0.0 || config.backoff_base.count() < 0.0)
        throw Error(ErrorCode::InvalidConfig, "durations must be non-negative");
    if (config.concurrency < 1)
        throw Error(ErrorCode::InvalidConfig, "concurrency must be >= 1");
}

std::string percent_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string audience_request_path(const PopulationSpec& pop, const std::string& interest_id) {
    return "/audience?pop=" + percent_encode(fingerprint(pop)) + "&interest=" + percent_encode(interest_id);
}

Audience parse_audience_body(const std::string& body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorCode::ContractViolation, "response body is not a JSON object");
    const auto it = j.find("audience_size");
    if (it == j.end() || !it->is_number_integer())
        throw Error(ErrorCode::ContractViolation, "response lacks an integer audience_size");
    if (it->is_number_unsigned())
        return static_cast<Audience>(it->get<std::uint64_t>());
    const auto v = it->get<std::int64_t>();
    if (v < 0)
        throw Error(ErrorCode::ContractViolation, "audience_size is negative");
    return v;
}

namespace {

class HttplibTransport final : public Transport {
public:
    HttplibTransport(const std::string& base_url, Seconds timeout) {
        // split scheme://host[:port] from an optional path prefix
        const auto scheme_end = base_url.find("://");
        const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto path_start = base_url.find('/', host_start);
        origin_ = base_url.substr(0, path_start);
        if (path_start != std::string::npos)
            prefix_ = base_url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/')
            prefix_.pop_back();
        timeout_ = timeout;
    }

    HttpResponse get(const std::string& path_and_query) override {
        // one client per call keeps the transport usable from several threads
        httplib::Client client(origin_);
        const auto secs = static_cast<time_t>(timeout_.count());
        const auto usecs = static_cast<time_t>((timeout_.count() - static_cast<double>(secs)) * 1e6);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        auto res = client.Get(prefix_ + path_and_query);
        if (!res)
            return {0, {}};
        return {res->status, res->body};
    }

private:
    std::string origin_;
    std::string prefix_;
    Seconds timeout_{10.0};
};

} // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url, Seconds timeout) {
    return std::make_unique<HttplibTransport>(base_url, timeout);
}

RateLimiter::RateLimiter(int max_requests, Seconds window, bool record_trace)
    : max_requests_(max_requests),
      window_(std::chrono::duration_cast<Clock::duration>(window)),
      record_trace_(record_trace) {}

Clock::time_point RateLimiter::acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = Clock::now();
        if (static_cast<int>(recent_.size()) < max_requests_ || recent_.front() + window_ <= now) {
            if (static_cast<int>(recent_.size()) == max_requests_)
                recent_.pop_front();
            recent_.push_back(now);
            if (record_trace_)
                trace_.push_back(now);
            return now;
        }
        const auto wake = recent_.front() + window_;
        lock.unlock();
        std::this_thread::sleep_until(wake);
        lock.lock();
    }
}

std::vector<Clock::time_point> RateLimiter::trace() const {
    std::lock_guard lock(mutex_);
    return trace_;
}

AudienceCache::AudienceCache(Seconds ttl, NowFn now)
    : ttl_(std::chrono::duration_cast<Clock::duration>(ttl)), now_(std::move(now)) {}

std::optional<Audience> AudienceCache::lookup(const std::string& fingerprint,
                                              const std::string& interest_id) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find({fingerprint, interest_id});
    if (it == entries_.end() || now_() - it->second.fetched_at > ttl_)
        return std::nullopt;
    return it->second.value;
}

void AudienceCache::store(const std::string& fingerprint, const std::string& interest_id,
                          Audience value) {
    const auto now = now_();
    std::unique_lock lock(mutex_);
    entries_[{fingerprint, interest_id}] = CacheEntry{value, now};
}

std::size_t AudienceCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

AudienceClient::AudienceClient(ProviderConfig config, std::shared_ptr<Transport> transport,
                               AudienceCache::NowFn cache_clock)
    : config_((validate_provider_config(config), std::move(config))),
      transport_(std::move(transport)),
      limiter_(config_.max_requests_per_window, config_.window, true),
      cache_(config_.cache_ttl, std::move(cache_clock)) {}

std::uint64_t AudienceClient::requests_issued() const noexcept { return requests_.load(); }

Audience AudienceClient::fetch_one(const std::string& fp, const PopulationSpec& pop,
                                   const std::string& id) {
    if (auto hit = cache_.lookup(fp, id))
        return *hit;

    const auto path = audience_request_path(pop, id);
    int last_status = 0;
    for (int attempt = 0; attempt < config_.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = config_.backoff_base * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration_cast<Clock::duration>(delay));
        }
        limiter_.acquire();
        requests_.fetch_add(1);
        const auto res = transport_->get(path);
        last_status = res.status;
        if (res.status == 200) {
            const auto value = parse_audience_body(res.body);
            cache_.store(fp, id, value);
            return value;
        }
        const bool transient = res.status == 0 || res.status == 429 || res.status >= 500;
        if (!transient)
            throw Error(ErrorCode::ContractViolation,
                        "interest '" + id + "': unexpected HTTP status " + std::to_string(res.status));
    }
    throw Error(ErrorCode::ProviderUnavailable,
                "interest '" + id + "': " + std::to_string(config_.max_retries) +
                    " attempts failed (last status " + std::to_string(last_status) + ")");
}

AudienceTable AudienceClient::fetch(const PopulationSpec& population,
                                    std::span<const InterestId> interests) {
    validate_population(population);
    if (interests.empty())
        throw Error(ErrorCode::EmptyTable, "no interests requested");
    const auto fp = fingerprint(population);

    std::vector<Audience> values(interests.size());
    std::vector<std::exception_ptr> errors(interests.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= interests.size() || failed.load())
                return;
            try {
                values[i] = fetch_one(fp, population, interests[i].id);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };

    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config_.concurrency),
                                                 interests.size());
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
    }

    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::vector<AudienceEntry> entries;
    entries.reserve(interests.size());
    for (std::size_t i = 0; i < interests.size(); ++i)
        entries.push_back({interests[i].id, interests[i].name, values[i]});
    return make_table(population, std::move(entries));
}

} // namespace assim
