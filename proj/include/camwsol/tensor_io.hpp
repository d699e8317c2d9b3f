#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace camwsol {

enum class DType { F32, F64 };

std::size_t item_size(DType dtype) noexcept;
std::string_view dtype_descr(DType dtype) noexcept;  // "<f4" / "<f8"

/// Dense row-major tensor. Elements are held as double regardless of the
/// on-disk dtype; an f32 value widened to double narrows back exactly, so
/// writing an F32 tensor reproduces the original bytes.
struct Tensor {
  std::vector<std::size_t> shape;
  DType dtype = DType::F64;
  std::vector<double> data;

  std::size_t rank() const noexcept { return shape.size(); }
  std::size_t element_count() const noexcept;
};

/// Shape, dtype and every byte of data must match (so -0.0 != 0.0 here).
bool bit_equal(const Tensor& a, const Tensor& b) noexcept;

/// Throws InvalidTensor for an empty shape, zero dims or a size mismatch,
/// NonFiniteData for NaN/Inf, or if an F32 tensor holds values that do not
/// survive narrowing to float.
void validate(const Tensor& t);

struct TensorHeader {
  std::vector<std::size_t> shape;
  DType dtype = DType::F64;
  bool fortran_order = false;
  std::size_t data_offset = 0;  // bytes from file start to payload
};

/// Parses an NPY 1.0-style container from memory.
Tensor decode_tensor(std::span<const std::byte> bytes);
std::vector<std::byte> encode_tensor(const Tensor& t);

Tensor load_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& t);

/// Reads only the header and checks the payload length against the file size.
TensorHeader read_tensor_header(const std::filesystem::path& path);

}  // namespace camwsol
