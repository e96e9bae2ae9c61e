#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "aiskit/export.hpp"

namespace aiskit::server {

struct ServerOptions {
    std::filesystem::path db;
    /// GeoJSON zones served at /zones; an empty collection when unset.
    std::optional<std::filesystem::path> zones;
    std::size_t default_limit = 100;
    std::size_t max_limit = 10000;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using Params = std::multimap<std::string, std::string>;

/// Read-only request handling, independent of the HTTP transport. Every
/// call opens its own read-only view of the store.
class TrackService {
public:
    /// Loads and validates the zones file up front.
    explicit TrackService(ServerOptions options);

    Response handle(std::string_view path, const Params& params) const;

    Response tracks(const Params& params) const;
    Response vessel(std::string_view mmsi) const;
    Response zones() const;
    Response stats() const;

    const ServerOptions& options() const noexcept { return options_; }

private:
    ServerOptions options_;
    std::string zones_json_;
};

/// Builds the /tracks request; throws FormatError on bad or unknown
/// parameters.
io::TrackRequest parse_track_params(const Params& params, std::size_t default_limit, std::size_t max_limit);

/// JSON error body: {"error":{"status":N,"message":"..."}}.
Response error_response(int status, std::string_view message);

/// HTTP front end for a TrackService.
class HttpServer {
public:
    explicit HttpServer(const TrackService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds `host:port` (0 picks a free port); returns the bound port.
    /// Throws std::runtime_error when binding fails.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace aiskit::server
