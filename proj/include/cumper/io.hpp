#pragma once

// Image readers (PGM P2/P5, 8-bit PNG, CSV grids) and the versioned JSON
// documents written by the command-line tool. PNG support links libpng.

#include <png.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cumper/error.hpp"
#include "cumper/grid.hpp"
#include "cumper/multipers.hpp"
#include "cumper/persistence.hpp"
#include "cumper/vectorize.hpp"

namespace cumper::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string lowercase_extension(const std::string& path) {
    auto slash = path.find_last_of('/');
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return {};
    std::string ext = path.substr(dot + 1);
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

// Next whitespace-delimited token of a PNM header, skipping '#' comments.
inline std::string pnm_token(const std::string& data, std::size_t& pos) {
    for (;;) {
        while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
        if (pos < data.size() && data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (start == pos) throw FormatError("truncated PGM data");
    return data.substr(start, pos - start);
}

inline long parse_integer(const std::string& tok, const char* what) {
    long v = 0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size())
        throw FormatError(std::string("invalid PGM ") + what + ": " + tok);
    return v;
}

inline double parse_real(const std::string& tok) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) throw FormatError("");
        return v;
    } catch (...) {
        throw FormatError("invalid number in CSV: '" + tok + "'");
    }
}

}  // namespace detail

inline ValueGrid read_pgm(const std::string& path) {
    const std::string data = detail::read_file(path);
    std::size_t pos = 0;
    const std::string magic = detail::pnm_token(data, pos);
    if (magic != "P2" && magic != "P5") throw FormatError(path + ": not a P2/P5 PGM file");
    const long width = detail::parse_integer(detail::pnm_token(data, pos), "width");
    const long height = detail::parse_integer(detail::pnm_token(data, pos), "height");
    const long maxval = detail::parse_integer(detail::pnm_token(data, pos), "maxval");
    if (width <= 0 || height <= 0 || width > 1 << 16 || height > 1 << 16)
        throw FormatError(path + ": bad PGM dimensions");
    if (maxval <= 0 || maxval > 65535) throw FormatError(path + ": PGM maxval must be in 1..65535");

    std::vector<double> values(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    if (magic == "P2") {
        for (auto& v : values) {
            const long s = detail::parse_integer(detail::pnm_token(data, pos), "sample");
            if (s < 0 || s > maxval) throw FormatError(path + ": PGM sample out of range");
            v = static_cast<double>(s);
        }
    } else {
        ++pos;  // single whitespace after maxval
        const std::size_t bytes = maxval < 256 ? 1 : 2;
        if (data.size() < pos + values.size() * bytes) throw FormatError(path + ": truncated PGM raster");
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos + i * bytes);
            values[i] = bytes == 1 ? p[0] : (p[0] << 8 | p[1]);
        }
    }
    return ValueGrid(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

inline void write_pgm(const std::string& path, const ValueGrid& grid) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << "P2\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
            const double v = grid(r, c);
            if (v < 0 || v > 255 || v != std::floor(v)) throw FormatError("PGM samples must be integers in 0..255");
            out << (c ? " " : "") << static_cast<int>(v);
        }
        out << '\n';
    }
}

/// Comma- or whitespace-separated numeric rows; blank lines are skipped.
inline ValueGrid read_csv(const std::string& path) {
    std::istringstream in(detail::read_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        for (auto& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) row.push_back(detail::parse_real(tok));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError(path + ": empty CSV grid");
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw FormatError(path + ": ragged CSV rows");
    return ValueGrid::from_rows(rows);
}

inline void write_csv(const std::string& path, const ValueGrid& grid) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out.precision(17);
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) out << (c ? "," : "") << grid(r, c);
        out << '\n';
    }
}

/// 8-bit PNG; grayscale files yield one channel, color files three (alpha
/// is dropped).
inline MultiChannelImage read_png(const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw FormatError(path + ": " + image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw FormatError(path + ": " + msg);
    }
    const int h = static_cast<int>(image.height);
    const int w = static_cast<int>(image.width);
    const std::size_t nch = color ? 3 : 1;
    std::vector<ValueGrid> channels;
    for (std::size_t c = 0; c < nch; ++c) {
        std::vector<double> v(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = buffer[i * nch + c];
        channels.emplace_back(h, w, std::move(v));
    }
    return MultiChannelImage(std::move(channels));
}

inline void write_png(const std::string& path, const MultiChannelImage& img) {
    if (img.channel_count() != 1 && img.channel_count() != 3)
        throw FormatError("PNG output needs 1 or 3 channels");
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channel_count() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t nch = img.channel_count();
    std::vector<png_byte> buffer(static_cast<std::size_t>(img.width()) * img.height() * nch);
    for (std::size_t c = 0; c < nch; ++c)
        for (std::size_t i = 0; i < img.channel(c).size(); ++i) {
            const double v = img.channel(c).values()[i];
            if (v < 0 || v > 255) throw FormatError("PNG samples must lie in 0..255");
            buffer[i * nch + c] = static_cast<png_byte>(std::lround(v));
        }
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
        throw FormatError(path + ": " + image.message);
}

/// Dispatches on the file extension: .pgm, .png or .csv.
inline MultiChannelImage read_image(const std::string& path) {
    const std::string ext = detail::lowercase_extension(path);
    if (ext == "pgm") return MultiChannelImage({read_pgm(path)});
    if (ext == "png") return read_png(path);
    if (ext == "csv" || ext == "txt") return MultiChannelImage({read_csv(path)});
    throw FormatError(path + ": unsupported image format (expected .pgm, .png or .csv)");
}

// ---------------------------------------------------------------------------
// JSON documents

/// Numbers that are integral (and exactly representable) are written as JSON
/// integers; infinity is written as the string "inf".
inline json encode_number(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (v == std::floor(v) && std::abs(v) < 9007199254740992.0) return json(static_cast<std::int64_t>(v));
    return json(v);
}

inline double decode_number(const json& j) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw FormatError("unexpected string in numeric field: " + s);
    }
    if (!j.is_number()) throw FormatError("expected a number");
    return j.get<double>();
}

/// Diagrams of one or more slices plus the filtration metadata they came from.
struct DiagramDocument {
    std::vector<PersistenceDiagram> slices;
    bool include_coordinates = true;
    int num_slices = 1;  // M
    int num_levels = 0;  // N, 0 when not a leveled filtration
    std::vector<double> thresholds;

    friend bool operator==(const DiagramDocument& a, const DiagramDocument& b);
};

namespace detail {

inline bool same_pair(const PersistencePair& a, const PersistencePair& b, bool coords) {
    auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    if (a.dim != b.dim || !eq(a.birth, b.birth) || !eq(a.death, b.death) || a.slice_index != b.slice_index)
        return false;
    return !coords || (a.birth_coord == b.birth_coord && a.death_coord == b.death_coord);
}

}  // namespace detail

inline bool operator==(const DiagramDocument& a, const DiagramDocument& b) {
    if (a.include_coordinates != b.include_coordinates || a.num_slices != b.num_slices ||
        a.num_levels != b.num_levels || a.thresholds != b.thresholds || a.slices.size() != b.slices.size())
        return false;
    for (std::size_t s = 0; s < a.slices.size(); ++s)
        for (int dim = 0; dim < 2; ++dim) {
            const auto& x = a.slices[s].pairs(dim);
            const auto& y = b.slices[s].pairs(dim);
            if (x.size() != y.size()) return false;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (!detail::same_pair(x[i], y[i], a.include_coordinates)) return false;
        }
    return true;
}

inline json to_json(const DiagramDocument& doc) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "diagrams";
    json meta;
    meta["M"] = doc.num_slices;
    meta["N"] = doc.num_levels;
    meta["thresholds"] = json::array();
    for (double t : doc.thresholds) meta["thresholds"].push_back(encode_number(t));
    out["metadata"] = meta;
    out["slices"] = json::array();
    for (std::size_t s = 0; s < doc.slices.size(); ++s) {
        json js;
        js["index"] = s;
        for (int dim = 0; dim < 2; ++dim) {
            json pairs = json::array();
            json coords = json::array();
            for (const auto& p : doc.slices[s].pairs(dim)) {
                pairs.push_back(json::array({encode_number(p.birth), encode_number(p.death)}));
                coords.push_back(json::array(
                    {p.birth_coord.row, p.birth_coord.col, p.death_coord.row, p.death_coord.col}));
            }
            js["dim" + std::to_string(dim)] = pairs;
            if (doc.include_coordinates) js["coords" + std::to_string(dim)] = coords;
        }
        out["slices"].push_back(js);
    }
    return out;
}

inline DiagramDocument diagram_document_from_json(const json& j) {
    try {
        if (j.value("schema_version", "") != std::string(kSchemaVersion))
            throw FormatError("unsupported or missing schema_version");
        if (j.value("kind", "") != "diagrams") throw FormatError("document is not a diagram document");
        DiagramDocument doc;
        const json& meta = j.at("metadata");
        doc.num_slices = meta.at("M").get<int>();
        doc.num_levels = meta.at("N").get<int>();
        for (const auto& t : meta.at("thresholds")) doc.thresholds.push_back(decode_number(t));
        doc.include_coordinates = false;
        for (const auto& js : j.at("slices")) {
            PersistenceDiagram pd;
            const int index = js.at("index").get<int>();
            for (int dim = 0; dim < 2; ++dim) {
                const std::string key = "dim" + std::to_string(dim);
                const std::string ckey = "coords" + std::to_string(dim);
                const bool has_coords = js.contains(ckey);
                doc.include_coordinates = doc.include_coordinates || has_coords;
                const auto& pairs = js.at(key);
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    PersistencePair p;
                    p.dim = dim;
                    p.slice_index = index;
                    if (pairs[i].size() != 2) throw FormatError("pair must have two entries");
                    p.birth = decode_number(pairs[i][0]);
                    p.death = decode_number(pairs[i][1]);
                    if (has_coords) {
                        const auto& c = js.at(ckey).at(i);
                        p.birth_coord = {c.at(0).get<int>(), c.at(1).get<int>()};
                        p.death_coord = {c.at(2).get<int>(), c.at(3).get<int>()};
                    }
                    pd.pairs(dim).push_back(p);
                }
            }
            doc.slices.push_back(std::move(pd));
        }
        return doc;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed diagram document: ") + e.what());
    }
}

/// Slice-level vectorization document: shape [M, 2, L] with row-major values.
struct VectorizationDocument {
    std::string base;
    std::string aggregator = "flatten";
    int slices = 0;
    int length = 0;
    std::vector<double> values;
    std::vector<double> aggregate;
    std::vector<double> sample_times;
};

inline json to_json(const VectorizationDocument& doc) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "mp_vectorization";
    out["base"] = doc.base;
    out["aggregator"] = doc.aggregator;
    out["shape"] = json::array({doc.slices, 2, doc.length});
    out["values"] = json::array();
    for (double v : doc.values) out["values"].push_back(encode_number(v));
    out["aggregate"] = json::array();
    for (double v : doc.aggregate) out["aggregate"].push_back(encode_number(v));
    out["sample_times"] = json::array();
    for (double v : doc.sample_times) out["sample_times"].push_back(encode_number(v));
    return out;
}

inline VectorizationDocument vectorization_document_from_json(const json& j) {
    try {
        if (j.value("schema_version", "") != std::string(kSchemaVersion))
            throw FormatError("unsupported or missing schema_version");
        if (j.value("kind", "") != "mp_vectorization") throw FormatError("document is not a vectorization");
        VectorizationDocument doc;
        doc.base = j.at("base").get<std::string>();
        doc.aggregator = j.at("aggregator").get<std::string>();
        const auto& shape = j.at("shape");
        if (shape.size() != 3 || shape[1].get<int>() != 2) throw FormatError("vectorization shape must be [M, 2, L]");
        doc.slices = shape[0].get<int>();
        doc.length = shape[2].get<int>();
        for (const auto& v : j.at("values")) doc.values.push_back(decode_number(v));
        for (const auto& v : j.at("aggregate")) doc.aggregate.push_back(decode_number(v));
        for (const auto& v : j.at("sample_times")) doc.sample_times.push_back(decode_number(v));
        if (doc.values.size() != static_cast<std::size_t>(doc.slices) * 2 * doc.length)
            throw FormatError("vectorization value count does not match shape");
        return doc;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed vectorization document: ") + e.what());
    }
}

/// Rows of the [M, 2, L] array as an M x 2L matrix.
inline Matrix as_matrix(const VectorizationDocument& doc) {
    return Matrix{doc.slices, 2 * doc.length, doc.values};
}

inline json read_json(const std::string& path) {
    try {
        return json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
}

}  // namespace cumper::io
