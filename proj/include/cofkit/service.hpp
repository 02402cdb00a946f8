#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cofkit/pipeline.hpp"
#include "cofkit/scribbles.hpp"

namespace httplib {
class Server;
}

namespace cofkit {

/// Largest upload accepted by the service, in pixels.
inline constexpr std::size_t kMaxUploadPixels = 16'000'000;

/// Foreground/background statistics derived from the scribbles.
struct RegionModels {
  RegionMask foreground;
  PmiMatrix fg;
  PmiMatrix bg;
};

/// One uploaded image and everything derived from it. Callers hold `mutex`
/// while reading or writing any other member.
struct Session {
  std::mutex mutex;
  std::string id;
  ColorImage image;
  PipelineConfig config;
  ScribbleSet scribbles;
  std::optional<PipelineModel> model;
  std::optional<RegionModels> regions;
  std::string last_mode;
  std::vector<std::uint8_t> last_render;

  /// Drops every cached matrix and result.
  void invalidate();
};

/// In-memory session table with least-recently-used eviction.
class SessionStore {
 public:
  explicit SessionStore(std::size_t capacity = 8) : capacity_(capacity) {}

  std::shared_ptr<Session> create(ColorImage image);
  std::shared_ptr<Session> find(const std::string& id);
  bool erase(const std::string& id);
  std::size_t size() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<std::string> order_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

/// Installs the JSON/PNG API on `server`:
///
///   POST   /session                 multipart field "image" or raw PNG body
///   PUT    /session/{id}/params     JSON subset of the pipeline config
///   PUT    /session/{id}/scribbles  {"width", "height", "runs": [[value, length], ...]}
///   POST   /session/{id}/render     {"mode": "filter" | "fb" | "recolor" | "mask"}
///   GET    /session/{id}/matrix     matrix dump; ?which=t|fg|bg
///   DELETE /session/{id}
void install_routes(httplib::Server& server, SessionStore& store);

/// Blocking; serves on host:port until the process exits.
int serve(const std::string& host, int port, std::size_t max_sessions = 8);

/// Result of the `filter` render mode; identical to run_pipeline for the
/// session config.
ColorImage render_filter(Session& session);

}  // namespace cofkit
