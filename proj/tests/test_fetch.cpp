#include <doctest.h>

#include <httplib.h>

#include "hexmeter/digest.hpp"
#include "hexmeter/fetch.hpp"
#include "support.hpp"

#include <atomic>
#include <thread>

using namespace hexmeter;

namespace {

class LocalServer {
public:
    LocalServer() {
        server_.Get("/corpus.xml", [this](const httplib::Request&, httplib::Response& res) {
            ++hits_;
            res.set_content(testing::kLine952, "application/xml");
        });
        server_.Get("/plain", [this](const httplib::Request&, httplib::Response& res) {
            ++hits_;
            res.set_content("<line/>", "text/plain");
        });
        server_.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/corpus.xml"); });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }

    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }
    int hits() const { return hits_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> hits_{0};
};

class CountingTransport : public Transport {
public:
    HttpResponse get(const std::string&) override {
        ++calls;
        return {200, "application/xml", "<line/>"};
    }
    int calls = 0;
};

}  // namespace

TEST_CASE("first fetch, cache hit and refresh") {
    LocalServer server;
    const auto dir = testing::temp_dir("fetch");
    HttpTransport http;

    const auto first = fetch_corpus(server.url("/corpus.xml"), dir, http);
    CHECK_FALSE(first.from_cache);
    CHECK(first.path == cache_path_for(server.url("/corpus.xml"), dir));
    CHECK(read_file(first.path) == testing::kLine952);
    CHECK(first.warnings.empty());
    CHECK(server.hits() == 1);

    const auto second = fetch_corpus(server.url("/corpus.xml"), dir, http);
    CHECK(second.from_cache);
    CHECK(second.path == first.path);
    CHECK(server.hits() == 1);

    const auto third = fetch_corpus(server.url("/corpus.xml"), dir, http, true);
    CHECK_FALSE(third.from_cache);
    CHECK(server.hits() == 2);

    const auto moved = fetch_corpus(server.url("/moved"), dir, http);
    CHECK(read_file(moved.path) == testing::kLine952);
}

TEST_CASE("cache hits make no transport call") {
    const auto dir = testing::temp_dir("fetch_stub");
    CountingTransport stub;
    const auto a = fetch_corpus("https://example.org/a.xml", dir, stub);
    const auto b = fetch_corpus("https://example.org/a.xml", dir, stub);
    CHECK(stub.calls == 1);
    CHECK(a.path == b.path);
    CHECK(b.from_cache);
    fetch_corpus("https://example.org/b.xml", dir, stub);
    CHECK(stub.calls == 2);
}

TEST_CASE("HTTP errors carry the status") {
    LocalServer server;
    const auto dir = testing::temp_dir("fetch_404");
    HttpTransport http;
    try {
        fetch_corpus(server.url("/missing.xml"), dir, http);
        FAIL("expected FetchError");
    } catch (const FetchError& e) {
        CHECK(e.kind() == FetchErrorKind::HttpStatus);
        CHECK(e.status() == 404);
    }
    CHECK_FALSE(std::filesystem::exists(cache_path_for(server.url("/missing.xml"), dir)));
}

TEST_CASE("non-XML content type warns") {
    LocalServer server;
    const auto dir = testing::temp_dir("fetch_plain");
    HttpTransport http;
    const auto r = fetch_corpus(server.url("/plain"), dir, http);
    CHECK(r.warnings.size() == 1);
}

TEST_CASE("unresolvable host and refused connection") {
    const auto dir = testing::temp_dir("fetch_dns");
    HttpTransport http;
    try {
        fetch_corpus("http://no-such-host.invalid/x.xml", dir, http);
        FAIL("expected FetchError");
    } catch (const FetchError& e) {
        CHECK(e.kind() == FetchErrorKind::Dns);
    }
    try {
        fetch_corpus("http://127.0.0.1:1/x.xml", dir, http);
        FAIL("expected FetchError");
    } catch (const FetchError& e) {
        CHECK(e.kind() == FetchErrorKind::Connect);
    }
    CHECK_THROWS_AS(fetch_corpus("ftp://example.org/x", dir, http), FetchError);
}

TEST_CASE("cache directory from the environment") {
    setenv(kCacheDirEnv, "/tmp/hexmeter-env-cache", 1);
    CHECK(default_cache_dir() == std::filesystem::path("/tmp/hexmeter-env-cache"));
    unsetenv(kCacheDirEnv);
    CHECK(default_cache_dir() != std::filesystem::path("/tmp/hexmeter-env-cache"));
}
