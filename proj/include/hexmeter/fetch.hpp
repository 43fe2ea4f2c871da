#pragma once

// Local cache of downloaded MQDQ XML files, keyed by the SHA-256 of the URL.

#include "hexmeter/error.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hexmeter {

enum class FetchErrorKind { Dns, Connect, HttpStatus, Io, Other };

class FetchError : public Error {
public:
    FetchError(FetchErrorKind kind, const std::string& what, int status = 0)
        : Error(what), kind_(kind), status_(status) {}

    FetchErrorKind kind() const noexcept { return kind_; }
    // HTTP status for HttpStatus errors, 0 otherwise.
    int status() const noexcept { return status_; }

private:
    FetchErrorKind kind_;
    int status_;
};

struct HttpResponse {
    int status = 0;
    std::string content_type;
    std::string body;
};

class Transport {
public:
    virtual ~Transport() = default;
    // Throws FetchError for DNS / connection failures. Non-2xx statuses are
    // returned, not thrown.
    virtual HttpResponse get(const std::string& url) = 0;
};

// cpp-httplib backed transport for http:// and https:// URLs.
class HttpTransport : public Transport {
public:
    HttpResponse get(const std::string& url) override;
};

struct FetchResult {
    std::filesystem::path path;
    bool from_cache = false;
    std::vector<std::string> warnings;
};

inline constexpr const char* kCacheDirEnv = "HEXMETER_CACHE_DIR";

// $HEXMETER_CACHE_DIR, else $XDG_CACHE_HOME/hexmeter, else ~/.cache/hexmeter.
std::filesystem::path default_cache_dir();

std::filesystem::path cache_path_for(const std::string& url, const std::filesystem::path& cache_dir);

FetchResult fetch_corpus(const std::string& url, const std::filesystem::path& cache_dir, Transport& transport,
                         bool refresh = false);

}  // namespace hexmeter
