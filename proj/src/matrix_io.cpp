#include "cofkit/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cofkit {
namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::vector<unsigned char> pack_f64le(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return bytes;
}

std::vector<double> unpack_f64le(const std::vector<unsigned char>& bytes) {
  if (bytes.size() % 8 != 0) throw Error("matrix: value payload is not a whole number of float64");
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

}  // namespace

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  std::vector<unsigned char> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    if (c == '\n' || c == '\r' || c == ' ') continue;
    const int v = decode_char(c);
    if (v < 0) throw Error("base64: invalid character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

PmiMatrix MatrixFile::pmi() const { return {dim, epsilon, values}; }
CoocMatrix MatrixFile::cooc() const { return {dim, sigma, window, values}; }

MatrixFile MatrixFile::from(const PmiMatrix& m, double sigma, int window,
                            std::optional<Palette> palette) {
  return {Kind::Pmi, m.dim, sigma, window, m.epsilon, m.values, std::move(palette)};
}

MatrixFile MatrixFile::from(const CoocMatrix& c, std::optional<Palette> palette) {
  return {Kind::Cooc, c.dim, c.sigma, c.window, 0.0, c.values, std::move(palette)};
}

std::string matrix_to_json(const MatrixFile& file) {
  nlohmann::json j;
  j["kind"] = file.kind == MatrixFile::Kind::Pmi ? "pmi" : "cooc";
  j["dim"] = file.dim;
  j["sigma"] = file.sigma;
  j["window"] = file.window;
  j["epsilon"] = file.epsilon;
  j["encoding"] = "base64-f64le";
  j["values"] = base64_encode(pack_f64le(file.values));
  if (file.palette) j["palette"] = nlohmann::json::parse(palette_to_json(*file.palette));
  return j.dump(2);
}

MatrixFile matrix_from_json(const std::string& text) {
  MatrixFile file;
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string kind = j.value("kind", "pmi");
    if (kind == "pmi") {
      file.kind = MatrixFile::Kind::Pmi;
    } else if (kind == "cooc") {
      file.kind = MatrixFile::Kind::Cooc;
    } else {
      throw Error("matrix: unknown kind '" + kind + "'");
    }
    file.dim = j.at("dim").get<int>();
    file.sigma = j.at("sigma").get<double>();
    file.window = j.at("window").get<int>();
    file.epsilon = j.at("epsilon").get<double>();
    if (j.value("encoding", "base64-f64le") != "base64-f64le") {
      throw Error("matrix: unsupported value encoding");
    }
    file.values = unpack_f64le(base64_decode(j.at("values").get<std::string>()));
    if (j.contains("palette")) file.palette = palette_from_json(j.at("palette").dump());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("matrix: malformed JSON: ") + e.what());
  }
  if (file.dim < 1 || file.values.size() != static_cast<std::size_t>(file.dim) * file.dim) {
    throw Error("matrix: value count does not match dim");
  }
  for (double v : file.values) {
    if (!std::isfinite(v) || v < 0.0) throw Error("matrix: entries must be finite and >= 0");
  }
  if (file.palette && file.palette->k() != file.dim) {
    throw Error("matrix: palette size does not match dim");
  }
  return file;
}

void save_matrix(const MatrixFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write matrix file '" + path + "'");
  out << matrix_to_json(file) << '\n';
  if (!out) throw Error("write failed for matrix file '" + path + "'");
}

MatrixFile load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read matrix file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return matrix_from_json(ss.str());
}

}  // namespace cofkit
