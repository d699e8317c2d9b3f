#include "camwsol/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <string_view>

#include "camwsol/error.hpp"

namespace camwsol {
namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kAlignment = 64;

std::uint64_t read_le(const std::byte* p, std::size_t n) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v |= std::uint64_t(std::to_integer<std::uint8_t>(p[i])) << (8 * i);
  return v;
}

void append_le(std::vector<std::byte>& out, std::uint64_t v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::byte((v >> (8 * i)) & 0xff));
}

// Minimal parser for the Python dict literal numpy writes into the header.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  TensorHeader parse() {
    std::optional<std::string> descr;
    std::optional<bool> fortran;
    std::optional<std::vector<std::size_t>> shape;

    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = parse_string();
      expect(':');
      if (key == "descr") {
        descr = parse_string();
      } else if (key == "fortran_order") {
        fortran = parse_bool();
      } else if (key == "shape") {
        shape = parse_tuple();
      } else {
        fail(ErrorCode::MalformedHeader, "unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail(ErrorCode::MalformedHeader, "expected ',' or '}' in header");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) fail(ErrorCode::MalformedHeader, "trailing bytes after header dict");
    if (!descr || !fortran || !shape) fail(ErrorCode::MalformedHeader, "header lacks descr, fortran_order or shape");

    TensorHeader h;
    if (*descr == "<f4") {
      h.dtype = DType::F32;
    } else if (*descr == "<f8") {
      h.dtype = DType::F64;
    } else {
      fail(ErrorCode::UnsupportedDtype, "dtype '" + *descr + "' (only <f4 and <f8 are accepted)");
    }
    h.fortran_order = *fortran;
    h.shape = std::move(*shape);
    return h;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(ErrorCode::MalformedHeader, std::string("expected '") + c + "' in header");
    ++pos_;
  }

  std::string parse_string() {
    skip_ws();
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail(ErrorCode::MalformedHeader, "expected quoted string in header");
    const auto end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) fail(ErrorCode::MalformedHeader, "unterminated string in header");
    std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return s;
  }

  bool parse_bool() {
    skip_ws();
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail(ErrorCode::MalformedHeader, "fortran_order is not True/False");
  }

  std::vector<std::size_t> parse_tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(ErrorCode::MalformedHeader, "bad shape entry");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        const std::size_t digit = static_cast<std::size_t>(peek() - '0');
        if (v > (std::numeric_limits<std::size_t>::max() - digit) / 10) {
          fail(ErrorCode::MalformedHeader, "shape entry overflows");
        }
        v = v * 10 + digit;
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Parses magic, version and the header dict. `available` is the number of
// bytes in `bytes`; only the header prefix needs to be present.
TensorHeader parse_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kMagic.size() + 2 ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    fail(ErrorCode::BadMagic, "not a tensor container (missing \\x93NUMPY magic)");
  }
  const auto major = std::to_integer<unsigned>(bytes[6]);
  std::size_t len_bytes = 0;
  if (major == 1) {
    len_bytes = 2;
  } else if (major == 2 || major == 3) {
    len_bytes = 4;
  } else {
    fail(ErrorCode::MalformedHeader, "unsupported container version " + std::to_string(major));
  }
  const std::size_t prefix = kMagic.size() + 2 + len_bytes;
  if (bytes.size() < prefix) fail(ErrorCode::MalformedHeader, "truncated header length");
  const std::size_t header_len = read_le(bytes.data() + kMagic.size() + 2, len_bytes);
  if (bytes.size() < prefix + header_len) fail(ErrorCode::MalformedHeader, "truncated header");

  std::string_view text(reinterpret_cast<const char*>(bytes.data() + prefix), header_len);
  TensorHeader h = HeaderParser(text).parse();
  h.data_offset = prefix + header_len;
  return h;
}

std::size_t checked_payload_bytes(const TensorHeader& h) {
  std::size_t count = 1;
  for (std::size_t d : h.shape) {
    if (d != 0 && count > std::numeric_limits<std::size_t>::max() / d) {
      fail(ErrorCode::HeaderShapeMismatch, "declared shape overflows");
    }
    count *= d;
  }
  if (count > std::numeric_limits<std::size_t>::max() / item_size(h.dtype)) {
    fail(ErrorCode::HeaderShapeMismatch, "declared shape overflows");
  }
  return count * item_size(h.dtype);
}

void check_shape_invariants(const std::vector<std::size_t>& shape) {
  if (shape.empty()) fail(ErrorCode::InvalidTensor, "scalar (empty shape) tensors are not supported");
  if (std::ranges::find(shape, std::size_t{0}) != shape.end()) {
    fail(ErrorCode::InvalidTensor, "tensor has a zero-sized dimension");
  }
}

std::string shape_literal(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  if (size && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    fail(ErrorCode::IoError, "read failed for " + path.string());
  }
  return bytes;
}

}  // namespace

std::size_t item_size(DType dtype) noexcept { return dtype == DType::F32 ? 4 : 8; }

std::string_view dtype_descr(DType dtype) noexcept { return dtype == DType::F32 ? "<f4" : "<f8"; }

std::size_t Tensor::element_count() const noexcept {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

bool bit_equal(const Tensor& a, const Tensor& b) noexcept {
  return a.shape == b.shape && a.dtype == b.dtype && a.data.size() == b.data.size() &&
         (a.data.empty() ||
          std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0);
}

void validate(const Tensor& t) {
  check_shape_invariants(t.shape);
  if (t.element_count() != t.data.size()) {
    fail(ErrorCode::InvalidTensor, "shape product " + std::to_string(t.element_count()) +
                                       " != data length " + std::to_string(t.data.size()));
  }
  for (double v : t.data) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteData, "tensor contains NaN or Inf");
    if (t.dtype == DType::F32 && static_cast<double>(static_cast<float>(v)) != v) {
      fail(ErrorCode::InvalidTensor, "f32 tensor holds a value not representable as float");
    }
  }
}

Tensor decode_tensor(std::span<const std::byte> bytes) {
  const TensorHeader h = parse_header(bytes);
  const std::size_t payload = checked_payload_bytes(h);
  if (bytes.size() - h.data_offset != payload) {
    fail(ErrorCode::HeaderShapeMismatch, "payload is " + std::to_string(bytes.size() - h.data_offset) +
                                             " bytes, header declares " + std::to_string(payload));
  }
  check_shape_invariants(h.shape);

  Tensor t;
  t.shape = h.shape;
  t.dtype = h.dtype;
  const std::size_t count = payload / item_size(h.dtype);
  std::vector<double> raw(count);
  const std::byte* p = bytes.data() + h.data_offset;
  for (std::size_t i = 0; i < count; ++i) {
    if (h.dtype == DType::F32) {
      raw[i] = std::bit_cast<float>(static_cast<std::uint32_t>(read_le(p + 4 * i, 4)));
    } else {
      raw[i] = std::bit_cast<double>(read_le(p + 8 * i, 8));
    }
    if (!std::isfinite(raw[i])) fail(ErrorCode::NonFiniteData, "payload contains NaN or Inf");
  }

  if (!h.fortran_order || h.shape.size() == 1) {
    t.data = std::move(raw);
    return t;
  }
  // Column-major: the first index varies fastest.
  const std::size_t rank = h.shape.size();
  std::vector<std::size_t> fstride(rank, 1);
  for (std::size_t k = 1; k < rank; ++k) fstride[k] = fstride[k - 1] * h.shape[k - 1];
  t.data.resize(count);
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t out = 0; out < count; ++out) {
    std::size_t src = 0;
    for (std::size_t k = 0; k < rank; ++k) src += idx[k] * fstride[k];
    t.data[out] = raw[src];
    for (std::size_t k = rank; k-- > 0;) {
      if (++idx[k] < h.shape[k]) break;
      idx[k] = 0;
    }
  }
  return t;
}

std::vector<std::byte> encode_tensor(const Tensor& t) {
  validate(t);
  std::string dict = "{'descr': '" + std::string(dtype_descr(t.dtype)) +
                     "', 'fortran_order': False, 'shape': " + shape_literal(t.shape) + ", }";
  const std::size_t prefix = kMagic.size() + 2 + 2;
  std::size_t total = prefix + dict.size() + 1;  // +1 for the trailing newline
  total = (total + kAlignment - 1) / kAlignment * kAlignment;
  dict.append(total - prefix - dict.size() - 1, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xffff) fail(ErrorCode::InvalidTensor, "header too large for a 1.0 container");

  std::vector<std::byte> out;
  out.reserve(total + t.data.size() * item_size(t.dtype));
  for (char c : kMagic) out.push_back(std::byte(static_cast<unsigned char>(c)));
  out.push_back(std::byte{1});
  out.push_back(std::byte{0});
  append_le(out, dict.size(), 2);
  for (char c : dict) out.push_back(std::byte(static_cast<unsigned char>(c)));
  for (double v : t.data) {
    if (t.dtype == DType::F32) {
      append_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
    } else {
      append_le(out, std::bit_cast<std::uint64_t>(v), 8);
    }
  }
  return out;
}

Tensor load_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_tensor(bytes);
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

TensorHeader read_tensor_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  // Version 1.0 headers are at most 64 KiB; read enough for any version we accept.
  std::vector<std::byte> head(std::min<std::size_t>(file_size, 12));
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  std::size_t need = head.size();
  if (head.size() >= 8 && std::memcmp(head.data(), kMagic.data(), kMagic.size()) == 0) {
    const auto major = std::to_integer<unsigned>(head[6]);
    const std::size_t len_bytes = major == 1 ? 2 : 4;
    if (head.size() >= 8 + len_bytes) need = 8 + len_bytes + read_le(head.data() + 8, len_bytes);
  }
  need = std::min(need, file_size);
  if (need > head.size()) {
    const std::size_t have = head.size();
    head.resize(need);
    in.read(reinterpret_cast<char*>(head.data() + have), static_cast<std::streamsize>(need - have));
  }
  TensorHeader h = parse_header(head);
  const std::size_t payload = checked_payload_bytes(h);
  if (file_size - h.data_offset != payload) {
    fail(ErrorCode::HeaderShapeMismatch, path.string() + ": payload length disagrees with declared shape");
  }
  check_shape_invariants(h.shape);
  return h;
}

}  // namespace camwsol
