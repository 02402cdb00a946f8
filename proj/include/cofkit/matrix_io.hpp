#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cofkit/cooc.hpp"
#include "cofkit/quantize.hpp"

namespace cofkit {

/// A dumped matrix: JSON header plus base64 row-major little-endian float64
/// values. The palette travels along so a matrix learned on one image can
/// guide another (the labels of the new image come from the same centers).
struct MatrixFile {
  enum class Kind { Pmi, Cooc };

  Kind kind = Kind::Pmi;
  int dim = 0;
  double sigma = 0.0;
  int window = 0;
  double epsilon = 0.0;
  std::vector<double> values;
  std::optional<Palette> palette;

  PmiMatrix pmi() const;
  CoocMatrix cooc() const;

  static MatrixFile from(const PmiMatrix& m, double sigma, int window,
                         std::optional<Palette> palette = std::nullopt);
  static MatrixFile from(const CoocMatrix& c, std::optional<Palette> palette = std::nullopt);
};

std::string matrix_to_json(const MatrixFile& file);
MatrixFile matrix_from_json(const std::string& text);

void save_matrix(const MatrixFile& file, const std::string& path);
MatrixFile load_matrix(const std::string& path);

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace cofkit
