#include "cofkit/service.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cofkit/color.hpp"
#include "cofkit/image_io.hpp"
#include "cofkit/matrix_io.hpp"

namespace cofkit {
namespace {

using nlohmann::json;

/// Maps to an HTTP status with a JSON error body.
struct HttpError {
  int status;
  std::string message;
};

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status, e.message);
    } catch (const ImageTooLarge& e) {
      send_error(res, 413, e.what());
    } catch (const DecodeError& e) {
      send_error(res, 400, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

std::shared_ptr<Session> lookup(SessionStore& store, const httplib::Request& req) {
  auto session = store.find(req.matches[1]);
  if (!session) throw HttpError{404, "unknown session '" + std::string(req.matches[1]) + "'"};
  return session;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw HttpError{400, std::string("malformed JSON: ") + e.what()};
  }
}

PipelineModel& ensure_model(Session& s) {
  if (!s.model) s.model = build_model(s.config, s.image);
  return *s.model;
}

RegionModels& ensure_regions(Session& s) {
  if (s.regions) return *s.regions;
  if (s.scribbles.count(Stroke::Foreground) == 0) {
    throw HttpError{409, "this mode needs foreground scribbles; PUT /session/{id}/scribbles first"};
  }
  const PipelineModel& model = ensure_model(s);
  FilterParams params = s.config.filter_params();
  RegionMask fg = propagate_scribbles(s.scribbles, model.guided.guide, model.guided.pmi, params);
  const RegionMask bg = fg.complement();
  if (bg.count() == 0) throw HttpError{409, "foreground mask covers the whole image; add background strokes"};
  RegionModels regions{fg, region_pmi(s.config, model, fg), region_pmi(s.config, model, bg)};
  s.regions = std::move(regions);
  return *s.regions;
}

std::vector<std::uint8_t> render(Session& s, const std::string& mode) {
  if (mode == "filter") return encode_png(render_filter(s));
  if (mode != "fb" && mode != "recolor" && mode != "mask") {
    throw HttpError{400, "mode must be one of filter, fb, recolor, mask"};
  }
  const RegionModels& regions = ensure_regions(s);
  const PipelineModel& model = *s.model;
  const FilterParams params = s.config.filter_params();
  if (mode == "mask") {
    GrayImage mask(regions.foreground.width, regions.foreground.height);
    for (std::size_t i = 0; i < mask.data.size(); ++i) mask.data[i] = regions.foreground.inside[i] ? 1.0 : 0.0;
    return encode_png(mask);
  }
  if (mode == "fb") return encode_png(fb_cof(s.image, model.guided.guide, regions.fg, regions.bg, params));
  return encode_png(selective_gray(s.image, model.guided.guide, regions.fg, regions.bg, params));
}

ColorImage decode_upload(const httplib::Request& req) {
  std::string payload;
  if (req.has_file("image")) {
    payload = req.get_file_value("image").content;
  } else {
    payload = req.body;
  }
  if (payload.empty()) throw HttpError{400, "missing PNG upload (multipart field 'image' or raw body)"};
  return decode_png(std::vector<std::uint8_t>(payload.begin(), payload.end()), kMaxUploadPixels);
}

}  // namespace

void Session::invalidate() {
  model.reset();
  regions.reset();
  last_mode.clear();
  last_render.clear();
}

std::shared_ptr<Session> SessionStore::create(ColorImage image) {
  auto session = std::make_shared<Session>();
  session->scribbles = ScribbleSet(image.width, image.height);
  session->image = std::move(image);

  std::lock_guard lock(mutex_);
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char id[40];
  std::snprintf(id, sizeof(id), "%016llx%04llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(++counter_ & 0xFFFF));
  session->id = id;
  sessions_[session->id] = session;
  order_.push_front(session->id);
  while (sessions_.size() > capacity_) {
    sessions_.erase(order_.back());
    order_.pop_back();
  }
  return session;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  order_.remove(id);
  order_.push_front(id);
  return it->second;
}

bool SessionStore::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(id) == 0) return false;
  order_.remove(id);
  return true;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

ColorImage render_filter(Session& s) {
  const PipelineModel& model = ensure_model(s);
  const PipelineConfig cfg = s.config;
  ModelBuilder rebuild = [&cfg](const ColorImage& current) { return build_model(cfg, current).guided; };
  return iterate(s.image, model.guided, cfg.filter_params(), rebuild).image;
}

void install_routes(httplib::Server& server, SessionStore& store) {
  server.Post("/session", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    ColorImage image = decode_upload(req);
    const int width = image.width;
    const int height = image.height;
    auto session = store.create(std::move(image));
    res.status = 201;
    res.set_content(json{{"session_id", session->id},
                         {"preview", {{"width", width}, {"height", height}}}}
                        .dump(),
                    "application/json");
  }));

  server.Put(R"(/session/([0-9a-f]+)/params)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
    auto session = lookup(store, req);
    const json body = parse_body(req);
    if (!body.is_object()) throw HttpError{400, "expected a JSON object"};
    for (const auto& item : body.items()) {
      if (item.key() == "region_mask" || item.key() == "matrix_in" || item.key() == "matrix_out") {
        throw HttpError{400, "'" + item.key() + "' is not settable over HTTP"};
      }
    }
    std::lock_guard lock(session->mutex);
    try {
      session->config = config_from_json(req.body, session->config);
    } catch (const Error& e) {
      throw HttpError{400, e.what()};
    }
    session->invalidate();
    res.set_content(config_to_json(session->config), "application/json");
  }));

  server.Put(R"(/session/([0-9a-f]+)/scribbles)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
    auto session = lookup(store, req);
    const json body = parse_body(req);
    ScribbleSet scribbles;
    try {
      const int width = body.at("width").get<int>();
      const int height = body.at("height").get<int>();
      scribbles = decode_runs(width, height, body.at("runs").get<StrokeRuns>());
    } catch (const json::exception& e) {
      throw HttpError{400, std::string("malformed scribbles: ") + e.what()};
    } catch (const Error& e) {
      throw HttpError{400, e.what()};
    }
    std::lock_guard lock(session->mutex);
    if (scribbles.width != session->image.width || scribbles.height != session->image.height) {
      throw HttpError{400, "scribbles must match the image size"};
    }
    session->scribbles = std::move(scribbles);
    // The quantized model does not depend on the strokes.
    session->regions.reset();
    session->last_mode.clear();
    session->last_render.clear();
    res.set_content(json{{"foreground", session->scribbles.count(Stroke::Foreground)},
                         {"background", session->scribbles.count(Stroke::Background)}}
                        .dump(),
                    "application/json");
  }));

  server.Post(R"(/session/([0-9a-f]+)/render)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
    auto session = lookup(store, req);
    const json body = req.body.empty() ? json::object() : parse_body(req);
    const std::string mode = body.value("mode", "filter");
    std::lock_guard lock(session->mutex);
    const auto start = std::chrono::steady_clock::now();
    bool hit = session->last_mode == mode && !session->last_render.empty();
    if (!hit) {
      session->last_render = render(*session, mode);
      session->last_mode = mode;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    res.set_header("X-Render-Ms", std::to_string(ms));
    res.set_header("X-Cache", hit ? "hit" : "miss");
    res.set_content(std::string(session->last_render.begin(), session->last_render.end()), "image/png");
  }));

  server.Get(R"(/session/([0-9a-f]+)/matrix)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
    auto session = lookup(store, req);
    const std::string which = req.has_param("which") ? req.get_param_value("which") : "t";
    std::lock_guard lock(session->mutex);
    const PipelineModel& model = ensure_model(*session);
    const double sigma = std::sqrt(session->config.sigma_s2);
    const int window = session->config.window;
    PmiMatrix m;
    if (which == "t") {
      m = model.guided.pmi;
    } else if (which == "fg" || which == "bg") {
      const RegionModels& regions = ensure_regions(*session);
      m = which == "fg" ? regions.fg : regions.bg;
    } else {
      throw HttpError{400, "which must be t, fg or bg"};
    }
    res.set_content(matrix_to_json(MatrixFile::from(m, sigma, window, model.guided.palette)),
                    "application/json");
  }));

  server.Delete(R"(/session/([0-9a-f]+))",
                guarded([&store](const httplib::Request& req, httplib::Response& res) {
    if (!store.erase(req.matches[1])) throw HttpError{404, "unknown session"};
    res.status = 204;
  }));
}

int serve(const std::string& host, int port, std::size_t max_sessions) {
  SessionStore store(max_sessions);
  httplib::Server server;
  server.set_payload_max_length(256u << 20);
  install_routes(server, store);
  std::fprintf(stderr, "cofkit: listening on http://%s:%d\n", host.c_str(), port);
  if (!server.listen(host, port)) {
    std::fprintf(stderr, "cofkit: cannot listen on %s:%d\n", host.c_str(), port);
    return 1;
  }
  return 0;
}

}  // namespace cofkit
