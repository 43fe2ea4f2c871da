#include <httplib.h>

#include "hexmeter/fetch.hpp"

#include "hexmeter/digest.hpp"

#include <netdb.h>
#include <sys/socket.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

namespace hexmeter {

namespace {

struct UrlParts {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;
};

UrlParts split_url(const std::string& url) {
    UrlParts u;
    const auto sep = url.find("://");
    if (sep == std::string::npos) throw FetchError(FetchErrorKind::Other, "not an absolute URL: " + url);
    u.scheme = url.substr(0, sep);
    if (u.scheme != "http" && u.scheme != "https") {
        throw FetchError(FetchErrorKind::Other, "unsupported URL scheme '" + u.scheme + "'");
    }
    const auto rest = url.substr(sep + 3);
    const auto slash = rest.find('/');
    std::string authority = rest.substr(0, slash);
    u.path = slash == std::string::npos ? "/" : rest.substr(slash);
    u.port = u.scheme == "https" ? 443 : 80;
    if (const auto colon = authority.rfind(':'); colon != std::string::npos && authority.back() != ']') {
        u.port = std::atoi(authority.c_str() + colon + 1);
        authority.resize(colon);
    }
    u.host = authority;
    if (u.host.empty()) throw FetchError(FetchErrorKind::Other, "URL has no host: " + url);
    return u;
}

void check_resolves(const std::string& host) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const int rc = getaddrinfo(host.c_str(), nullptr, &hints, &res);
    if (res) freeaddrinfo(res);
    if (rc != 0) {
        throw FetchError(FetchErrorKind::Dns, "cannot resolve host '" + host + "': " + gai_strerror(rc));
    }
}

std::mutex& key_mutex(const std::string& key) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<std::mutex>> registry;
    std::lock_guard lock(registry_mutex);
    auto& slot = registry[key];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

}  // namespace

HttpResponse HttpTransport::get(const std::string& url) {
    const UrlParts u = split_url(url);
    check_resolves(u.host);

    httplib::Client client(u.scheme + "://" + u.host + ":" + std::to_string(u.port));
    client.set_follow_location(true);
    client.set_connection_timeout(15);
    client.set_read_timeout(60);
    auto res = client.Get(u.path);
    if (!res) {
        const auto err = res.error();
        const auto kind = err == httplib::Error::Connection || err == httplib::Error::ConnectionTimeout ||
                                  err == httplib::Error::SSLConnection
                              ? FetchErrorKind::Connect
                              : FetchErrorKind::Other;
        throw FetchError(kind, "request to " + url + " failed: " + httplib::to_string(err));
    }
    HttpResponse out;
    out.status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.body = std::move(res->body);
    return out;
}

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
        return std::filesystem::path(xdg) / "hexmeter";
    }
    if (const char* home = std::getenv("HOME"); home && *home) {
        return std::filesystem::path(home) / ".cache" / "hexmeter";
    }
    return std::filesystem::temp_directory_path() / "hexmeter-cache";
}

std::filesystem::path cache_path_for(const std::string& url, const std::filesystem::path& cache_dir) {
    return cache_dir / (sha256_hex(url) + ".xml");
}

FetchResult fetch_corpus(const std::string& url, const std::filesystem::path& cache_dir, Transport& transport,
                         bool refresh) {
    namespace fs = std::filesystem;
    FetchResult result;
    result.path = cache_path_for(url, cache_dir);

    std::lock_guard lock(key_mutex(result.path.string()));
    if (!refresh && fs::exists(result.path)) {
        result.from_cache = true;
        return result;
    }

    HttpResponse res = transport.get(url);
    if (res.status < 200 || res.status >= 300) {
        throw FetchError(FetchErrorKind::HttpStatus,
                         "GET " + url + " returned HTTP " + std::to_string(res.status), res.status);
    }
    if (res.content_type.find("xml") == std::string::npos) {
        result.warnings.push_back("content type '" + res.content_type + "' for " + url +
                                  " is not XML; stored anyway");
    }

    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    if (ec) throw FetchError(FetchErrorKind::Io, "cannot create cache directory " + cache_dir.string());
    const fs::path tmp = result.path.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(res.body.data(), static_cast<std::streamsize>(res.body.size()));
        if (!out) throw FetchError(FetchErrorKind::Io, "cannot write " + tmp.string());
    }
    fs::rename(tmp, result.path, ec);
    if (ec) throw FetchError(FetchErrorKind::Io, "cannot move download into " + result.path.string());
    return result;
}

}  // namespace hexmeter
