#pragma once

// Subcommand implementations behind the `lumen` executable. Argument parsing
// lives in tools/lumen.cpp; everything here works on a validated RunConfig so
// it can be driven directly from tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lumen/dct.hpp"
#include "lumen/error.hpp"
#include "lumen/metrics.hpp"
#include "lumen/pixelbuf.hpp"
#include "lumen/weber.hpp"

namespace lumen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitParam = 3;

enum class TableFormat { Csv, Markdown };

struct MetricRequest {
  Metric metric;
  std::vector<std::filesystem::path> inputs;
};

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;

  // enhance-gray / sweep gray
  std::string method;
  std::vector<std::string> methods;
  std::vector<int> mu;
  std::vector<std::string> blocks;
  std::optional<std::filesystem::path> emit_background;

  // enhance-color / sweep color
  std::string mapping = "eta";
  std::string mode = "dc";
  std::vector<std::string> mappings;
  std::vector<std::string> modes;

  // metrics
  std::vector<MetricRequest> metrics;

  // sweep
  std::string sweep_kind;
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> table;
  std::string format = "csv";
};

/// Raised for invalid parameters; maps to exit code 3.
class ParamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parsing of parameter spellings.

inline BackgroundMethod parse_method(std::string_view s) {
  if (s == "blocks") return BackgroundMethod::Blocks;
  if (s == "eroded") return BackgroundMethod::ErosionDilation;
  if (s == "reconstruction") return BackgroundMethod::Reconstruction;
  throw ParamError("unknown method '" + std::string(s) + "' (blocks|eroded|reconstruction)");
}

inline BlockSize parse_block(std::string_view s) {
  const auto x = s.find('x');
  auto to_int = [&](std::string_view part) {
    if (part.empty() || part.size() > 6 || part.find_first_not_of("0123456789") != std::string_view::npos) {
      throw ParamError("bad block size '" + std::string(s) + "', expected WxH");
    }
    return std::stoi(std::string(part));
  };
  if (x == std::string_view::npos) throw ParamError("bad block size '" + std::string(s) + "', expected WxH");
  BlockSize b{to_int(s.substr(0, x)), to_int(s.substr(x + 1))};
  if (b.width < 1 || b.height < 1) throw ParamError("block dimensions must be positive");
  return b;
}

inline MappingFunction parse_mapping(std::string_view s) {
  if (s == "twisting") return MappingFunction::twisting();
  if (s == "s") return MappingFunction::s_curve();
  if (s == "eta") return MappingFunction::eta();
  if (s.starts_with("eta:")) {
    const std::string num(s.substr(4));
    std::size_t used = 0;
    double exponent = 0.0;
    try {
      exponent = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !(exponent > 0.0) || !std::isfinite(exponent)) {
      throw ParamError("bad eta exponent '" + num + "'");
    }
    return MappingFunction::eta(exponent);
  }
  throw ParamError("unknown mapping '" + std::string(s) + "' (twisting|eta[:exponent]|s)");
}

inline EnhanceMode parse_mode(std::string_view s) {
  if (s == "dc") return EnhanceMode::Dc;
  if (s == "dc-ac") return EnhanceMode::DcAc;
  if (s == "dc-ac-chroma") return EnhanceMode::DcAcChroma;
  throw ParamError("unknown mode '" + std::string(s) + "' (dc|dc-ac|dc-ac-chroma)");
}

inline TableFormat parse_format(std::string_view s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "markdown") return TableFormat::Markdown;
  throw ParamError("unknown format '" + std::string(s) + "' (csv|markdown)");
}

/// Six significant digits, ties rounded away from zero.
inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0.00000";
  const bool negative = v < 0;
  const double a = std::abs(v);
  int exp10 = static_cast<int>(std::floor(std::log10(a)));
  long long digits = std::llround(a * std::pow(10.0, 5 - exp10));
  if (digits >= 1'000'000) {
    ++exp10;
    digits = std::llround(a * std::pow(10.0, 5 - exp10));
  } else if (digits < 100'000) {
    --exp10;
    digits = std::llround(a * std::pow(10.0, 5 - exp10));
  }
  std::string d = std::to_string(digits);
  std::string out;
  if (exp10 >= 15 || exp10 < -5) {
    out = d.substr(0, 1) + "." + d.substr(1) + "e" + (exp10 < 0 ? "-" : "+") +
          (std::abs(exp10) < 10 ? "0" : "") + std::to_string(std::abs(exp10));
  } else if (exp10 >= 5) {
    out = d + std::string(static_cast<std::size_t>(exp10 - 5), '0');
  } else if (exp10 >= 0) {
    const auto int_len = static_cast<std::size_t>(exp10 + 1);
    out = d.substr(0, int_len) + "." + d.substr(int_len);
  } else {
    out = "0." + std::string(static_cast<std::size_t>(-exp10 - 1), '0') + d;
  }
  return negative ? "-" + out : out;
}

inline std::string error_cell(ErrorCode code) { return "ERROR:" + std::string(to_string(code)); }

/// A rectangular result table; CSV is canonical, Markdown renders the same cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render(TableFormat format) const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (format == TableFormat::Csv) {
          os << (i ? "," : "") << cells[i];
        } else {
          os << "| " << cells[i] << " ";
        }
      }
      os << (format == TableFormat::Markdown ? "|\n" : "\n");
    };
    line(header);
    if (format == TableFormat::Markdown) {
      for (std::size_t i = 0; i < header.size(); ++i) os << "|---";
      os << "|\n";
    }
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

namespace detail {

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string cell(const MetricsReport& r, Metric m) {
  if (const auto v = r.get(m)) return format_value(*v);
  if (const auto e = r.error(m)) return error_cell(*e);
  return "";
}

inline void print_row(std::ostream& out, Metric m, const MetricsReport& r) {
  out << to_string(m) << "," << cell(r, m) << "\n";
}

// Runs `body`, translating failures into exit codes and a diagnostic.
template <class Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const ParamError& e) {
    err << "lumen: " << e.what() << "\n";
    return kExitParam;
  } catch (const Error& e) {
    err << "lumen: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::BadMagic:
      case ErrorCode::BadHeader:
      case ErrorCode::UnsupportedMaxval:
      case ErrorCode::Truncated:
      case ErrorCode::Io:
        return kExitIo;
      default:
        return kExitParam;
    }
  }
}

inline void require_inputs(const RunConfig& cfg, std::size_t n, std::string_view what) {
  if (cfg.inputs.size() != n) {
    throw ParamError(std::string(what) + " expects " + std::to_string(n) + " input path(s)");
  }
}

inline std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (c == ':' || c == '=' || c == '/') c = '-';
  }
  return s;
}

}  // namespace detail

/// enhance-gray: single-method enhancement of a P5 image.
inline int cmd_enhance_gray(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::require_inputs(cfg, 1, "enhance-gray");
    if (cfg.output.empty()) throw ParamError("enhance-gray needs an output path");
    const BackgroundMethod method = parse_method(cfg.method);
    std::optional<SweepParam> param;
    if (method == BackgroundMethod::Blocks) {
      if (cfg.blocks.size() != 1) throw ParamError("--method blocks needs exactly one --block WxH");
      param = parse_block(cfg.blocks.front());
    } else {
      if (cfg.mu.size() != 1) throw ParamError("morphological methods need exactly one --mu");
      if (cfg.mu.front() < 1) throw ParamError("--mu must be >= 1");
      param = StructuringElement(cfg.mu.front());
    }

    const auto f = load_pnm_as<GrayImage>(cfg.inputs.front());
    const GrayImage g = enhance_gray(f, method, *param);
    std::optional<GrayImage> background;
    if (cfg.emit_background) background = estimate_background(f, method, *param).to_image();

    save_pnm(cfg.output, g);
    if (background) save_pnm(*cfg.emit_background, *background);

    const MetricsReport r = score_gray(f, g);
    detail::print_row(out, Metric::Ssim, r);
    detail::print_row(out, Metric::NormalizedEntropy, r);
    return kExitOk;
  });
}

inline MetricsReport score_color(const RgbImage& original, const RgbImage& enhanced) {
  MetricsReport r;
  try {
    r.jpqm = jpqm(luminance(enhanced));
  } catch (const Error& e) {
    r.errors.emplace_back(Metric::Jpqm, e.code());
  }
  try {
    r.cef = cef(original, enhanced);
  } catch (const Error& e) {
    r.errors.emplace_back(Metric::Cef, e.code());
  }
  return r;
}

/// enhance-color: block-DCT enhancement of a P6 image.
inline int cmd_enhance_color(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::require_inputs(cfg, 1, "enhance-color");
    if (cfg.output.empty()) throw ParamError("enhance-color needs an output path");
    const MappingFunction fn = parse_mapping(cfg.mapping);
    const EnhanceMode mode = parse_mode(cfg.mode);

    const auto img = load_pnm_as<RgbImage>(cfg.inputs.front());
    const RgbImage enhanced = enhance_color(img, fn, mode);
    save_pnm(cfg.output, enhanced);

    const MetricsReport r = score_color(img, enhanced);
    detail::print_row(out, Metric::Jpqm, r);
    detail::print_row(out, Metric::Cef, r);
    return kExitOk;
  });
}

inline std::size_t metric_arity(Metric m) {
  switch (m) {
    case Metric::Ssim:
    case Metric::NormalizedEntropy:
    case Metric::Cef:
      return 2;
    default:
      return 1;
  }
}

/// metrics: one `name,value` row per request, in request order. Failures are
/// reported in their own row; I/O failures make the exit status 2.
inline int cmd_metrics(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (cfg.metrics.empty()) throw ParamError("metrics: request at least one metric");
    for (const auto& req : cfg.metrics) {
      if (req.inputs.size() != metric_arity(req.metric)) {
        throw ParamError("--" + std::string(to_string(req.metric)) + " takes " +
                         std::to_string(metric_arity(req.metric)) + " path(s)");
      }
    }
    int status = kExitOk;
    for (const auto& req : cfg.metrics) {
      const auto& in = req.inputs;
      std::string value;
      try {
        double v = 0.0;
        switch (req.metric) {
          case Metric::Ssim:
            v = ssim(load_pnm_as<GrayImage>(in[0]), load_pnm_as<GrayImage>(in[1]));
            break;
          case Metric::Entropy:
            v = entropy(load_pnm_as<GrayImage>(in[0]));
            break;
          case Metric::NormalizedEntropy:
            v = normalized_entropy(load_pnm_as<GrayImage>(in[0]), load_pnm_as<GrayImage>(in[1]));
            break;
          case Metric::WeberContrast:
            v = weber_contrast(load_pnm_as<GrayImage>(in[0]));
            break;
          case Metric::Colorfulness:
            v = colorfulness(load_pnm_as<RgbImage>(in[0]));
            break;
          case Metric::Cef:
            v = cef(load_pnm_as<RgbImage>(in[0]), load_pnm_as<RgbImage>(in[1]));
            break;
          case Metric::Jpqm: {
            const auto any = load_pnm(in[0]);
            const auto* rgb = std::get_if<RgbImage>(&any);
            v = jpqm(rgb ? luminance(*rgb) : std::get<GrayImage>(any));
            break;
          }
        }
        value = format_value(v);
      } catch (const Error& e) {
        value = error_cell(e.code());
        switch (e.code()) {
          case ErrorCode::BadMagic:
          case ErrorCode::BadHeader:
          case ErrorCode::UnsupportedMaxval:
          case ErrorCode::Truncated:
          case ErrorCode::Io:
            err << "lumen: " << e.what() << "\n";
            status = kExitIo;
            break;
          default:
            break;
        }
      }
      out << to_string(req.metric) << "," << value << "\n";
    }
    return status;
  });
}

namespace detail {

inline Table sweep_gray(const RunConfig& cfg, const GrayImage& f, const std::string& stem, bool& any_ok) {
  if (cfg.methods.empty()) throw ParamError("sweep gray: --methods is empty");
  std::vector<std::pair<BackgroundMethod, std::vector<SweepParam>>> plan;
  for (const auto& name : cfg.methods) {
    const BackgroundMethod m = parse_method(name);
    std::vector<SweepParam> params;
    if (m == BackgroundMethod::Blocks) {
      for (const auto& b : cfg.blocks) params.emplace_back(parse_block(b));
      if (params.empty()) throw ParamError("sweep gray: blocks method needs --block values");
    } else {
      for (const int mu : cfg.mu) {
        if (mu < 1) throw ParamError("sweep gray: --mu values must be >= 1");
        params.emplace_back(StructuringElement(mu));
      }
      if (params.empty()) throw ParamError("sweep gray: --mu list is empty");
    }
    plan.emplace_back(m, std::move(params));
  }

  const Metric columns[] = {Metric::Ssim, Metric::NormalizedEntropy};
  Table t;
  t.header = {"param"};
  for (const auto m : columns) t.header.emplace_back(to_string(m));
  for (const auto& [method, params] : plan) {
    for (const auto& p : params) {
      const std::string label = std::string(to_string(method)) + ":" + to_string(p);
      std::vector<std::string> row{label};
      try {
        const auto entries = enhance_sweep(f, method, {p});
        const auto& e = entries.front();
        save_pnm(cfg.out_dir / (stem + "_" + sanitize(label) + ".pgm"), e.image);
        for (const auto m : columns) {
          row.push_back(cell(e.report, m));
          if (e.report.get(m)) any_ok = true;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        for (std::size_t i = 0; i < std::size(columns); ++i) row.push_back(error_cell(e.code()));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

inline Table sweep_color(const RunConfig& cfg, const RgbImage& img, const std::string& stem, bool& any_ok) {
  if (cfg.mappings.empty()) throw ParamError("sweep color: --maps is empty");
  if (cfg.modes.empty()) throw ParamError("sweep color: --modes is empty");
  std::vector<MappingFunction> fns;
  for (const auto& s : cfg.mappings) fns.push_back(parse_mapping(s));
  std::vector<EnhanceMode> modes;
  for (const auto& s : cfg.modes) modes.push_back(parse_mode(s));

  const Metric columns[] = {Metric::Jpqm, Metric::Cef};
  Table t;
  t.header = {"param"};
  for (const auto mode : modes) {
    for (const auto m : columns) t.header.push_back(std::string(to_string(mode)) + ":" + std::string(to_string(m)));
  }
  for (const auto& fn : fns) {
    std::vector<std::string> row{fn.name()};
    for (const auto mode : modes) {
      const RgbImage out = enhance_color(img, fn, mode);
      save_pnm(cfg.out_dir / (stem + "_" + sanitize(fn.name()) + "_" + std::string(to_string(mode)) + ".ppm"), out);
      const MetricsReport r = score_color(img, out);
      for (const auto m : columns) {
        row.push_back(cell(r, m));
        if (r.get(m)) any_ok = true;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace detail

/// sweep: runs a method or mapping grid and prints one table row per parameter.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (cfg.sweep_kind != "gray" && cfg.sweep_kind != "color") {
      throw ParamError("sweep kind must be 'gray' or 'color'");
    }
    detail::require_inputs(cfg, 1, "sweep");
    const TableFormat format = parse_format(cfg.format);
    const bool gray = cfg.sweep_kind == "gray";
    // Validate the whole grid before touching any file.
    if (gray) {
      if (cfg.methods.empty()) throw ParamError("sweep gray: --methods is empty");
      for (const auto& m : cfg.methods) {
        if (parse_method(m) == BackgroundMethod::Blocks) {
          if (cfg.blocks.empty()) throw ParamError("sweep gray: blocks method needs --block values");
          for (const auto& b : cfg.blocks) parse_block(b);
        } else {
          if (cfg.mu.empty()) throw ParamError("sweep gray: --mu list is empty");
          for (const int mu : cfg.mu) {
            if (mu < 1) throw ParamError("sweep gray: --mu values must be >= 1");
          }
        }
      }
    } else {
      if (cfg.mappings.empty()) throw ParamError("sweep color: --maps is empty");
      if (cfg.modes.empty()) throw ParamError("sweep color: --modes is empty");
      for (const auto& s : cfg.mappings) parse_mapping(s);
      for (const auto& s : cfg.modes) parse_mode(s);
    }

    const std::string stem = cfg.inputs.front().stem().string();
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + cfg.out_dir.string());

    bool any_ok = false;
    const Table table = gray ? detail::sweep_gray(cfg, load_pnm_as<GrayImage>(cfg.inputs.front()), stem, any_ok)
                             : detail::sweep_color(cfg, load_pnm_as<RgbImage>(cfg.inputs.front()), stem, any_ok);
    const std::string text = table.render(format);
    if (cfg.table) detail::write_text_atomic(*cfg.table, text);
    out << text;
    if (!any_ok) {
      err << "lumen: every sweep cell failed\n";
      return kExitParam;
    }
    return kExitOk;
  });
}

}  // namespace lumen::cli
