#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinephen/csv.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/errors.hpp"
#include "kinephen/pose.hpp"

namespace kinephen {

// Optional per-file overrides; loaded from a "<file>.json" sidecar.
struct CsvSchema {
    double fps_override = 0;                       // > 0 replaces the inferred rate
    std::string video_id;                          // defaults to the file stem
    std::map<std::string, std::string> columns;    // logical name -> actual header
};

inline CsvSchema load_sidecar(const std::string& csv_path) {
    CsvSchema schema;
    const std::string side = csv_path + ".json";
    if (!std::filesystem::exists(side)) return schema;
    std::ifstream in(side);
    nlohmann::json j;
    in >> j;
    if (j.contains("fps")) schema.fps_override = j["fps"].get<double>();
    if (j.contains("video_id")) schema.video_id = j["video_id"].get<std::string>();
    if (j.contains("columns"))
        for (const auto& [k, v] : j["columns"].items()) schema.columns[k] = v.get<std::string>();
    return schema;
}

namespace detail {

inline std::string mapped(const CsvSchema& schema, const std::string& logical) {
    const auto it = schema.columns.find(logical);
    return it == schema.columns.end() ? logical : it->second;
}

inline bool is_missing_cell(const std::string& cell) {
    if (cell.empty()) return true;
    std::string lower;
    for (char c : cell) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower == "nan";
}

inline bool parse_bool_cell(const std::string& cell, std::size_t line) {
    std::string lower;
    for (char c : cell) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "1" || lower == "true") return true;
    if (lower == "0" || lower == "false") return false;
    throw MalformedRow(line, "unparseable boolean: '" + cell + "'");
}

}  // namespace detail

// Parses one per-video keypoint time-series file.
//
// Expected columns: timestamp,frame,subject_id,is_control,condition,from,to,
// then <kp>_x,<kp>_y for the 17 COCO keypoints in order, then label_<phenotype>
// for the eight phenotypes. Missing coordinates are empty cells or NaN and
// become explicit missing markers. One subject (and one detected person) per
// file; duplicate or regressing frame indices are rejected.
inline PoseSeries load_pose_csv(const std::string& path, const CsvSchema& schema = {}) {
    const CsvTable table = read_csv(path);
    PoseSeries series;
    series.video_id =
        schema.video_id.empty() ? std::filesystem::path(path).stem().string() : schema.video_id;

    const int c_time = table.require_column(detail::mapped(schema, "timestamp"));
    const int c_frame = table.require_column(detail::mapped(schema, "frame"));
    const int c_subject = table.require_column(detail::mapped(schema, "subject_id"));
    const int c_control = table.require_column(detail::mapped(schema, "is_control"));
    const int c_condition = table.require_column(detail::mapped(schema, "condition"));
    const int c_from = table.require_column(detail::mapped(schema, "from"));
    const int c_to = table.require_column(detail::mapped(schema, "to"));
    std::array<int, kNumLandmarks> c_x{}, c_y{};
    for (int j = 0; j < kNumLandmarks; ++j) {
        const std::string base(kLandmarkNames[j]);
        c_x[j] = table.require_column(detail::mapped(schema, base + "_x"));
        c_y[j] = table.require_column(detail::mapped(schema, base + "_y"));
    }
    std::array<int, kNumPhenotypes> c_label{};
    for (int l = 0; l < kNumPhenotypes; ++l)
        c_label[l] =
            table.require_column(detail::mapped(schema, "label_" + std::string(kPhenotypeNames[l])));

    const std::size_t ncols = table.header.size();
    series.frames.reserve(table.rows.size());
    double prev_time = -std::numeric_limits<double>::infinity();
    long prev_frame = std::numeric_limits<long>::min();
    std::map<std::pair<double, double>, int> seen_bounds;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = r + 2;  // header is line 1
        if (row.size() != ncols)
            throw MalformedRow(line, "expected " + std::to_string(ncols) + " fields, got " +
                                         std::to_string(row.size()));
        Frame f;
        if (!parse_double(row[c_time], f.timestamp))
            throw MalformedRow(line, "unparseable timestamp: '" + row[c_time] + "'");
        if (!parse_long(row[c_frame], f.frame_index))
            throw MalformedRow(line, "unparseable frame index: '" + row[c_frame] + "'");
        if (f.timestamp < prev_time)
            throw NonMonotonicTime(line, "timestamp decreases");
        if (f.frame_index <= prev_frame)
            throw NonMonotonicTime(line, "frame index not strictly increasing "
                                         "(duplicate frames suggest more than one person per frame)");
        prev_time = f.timestamp;
        prev_frame = f.frame_index;

        const std::string& subj = row[c_subject];
        if (series.frames.empty()) {
            series.subject_id = subj;
            series.is_control = detail::parse_bool_cell(row[c_control], line);
        } else if (subj != series.subject_id) {
            throw MalformedRow(line, "multiple subject ids in one file");
        }
        f.condition = [&] {
            try {
                return parse_condition(row[c_condition]);
            } catch (const InputError& e) {
                throw MalformedRow(line, e.what());
            }
        }();

        for (int j = 0; j < kNumLandmarks; ++j) {
            double v;
            f.x[j] = detail::is_missing_cell(row[c_x[j]]) || !parse_double(row[c_x[j]], v) ? kMissing : v;
            f.y[j] = detail::is_missing_cell(row[c_y[j]]) || !parse_double(row[c_y[j]], v) ? kMissing : v;
            if (!is_missing(f.x[j]) && f.x[j] < 0)
                throw MalformedRow(line, "negative x coordinate for " + std::string(kLandmarkNames[j]));
            if (!is_missing(f.y[j]) && f.y[j] < 0)
                throw MalformedRow(line, "negative y coordinate for " + std::string(kLandmarkNames[j]));
        }
        for (int l = 0; l < kNumPhenotypes; ++l) {
            long v;
            if (!parse_long(row[c_label[l]], v) || v < 0 || v > 2)
                throw MalformedRow(line, "annotation for " + std::string(kPhenotypeNames[l]) +
                                             " must be 0, 1 or 2; got '" + row[c_label[l]] + "'");
            f.annotations[l] = static_cast<std::uint8_t>(v);
        }

        const bool has_from = !detail::is_missing_cell(row[c_from]);
        const bool has_to = !detail::is_missing_cell(row[c_to]);
        if (has_from != has_to) throw MalformedRow(line, "window bound requires both from and to");
        if (has_from) {
            double from, to;
            if (!parse_double(row[c_from], from) || !parse_double(row[c_to], to))
                throw MalformedRow(line, "unparseable window bound");
            if (!(from < to)) throw MalformedRow(line, "window bound must satisfy from < to");
            const auto key = std::make_pair(from, to);
            if (seen_bounds.emplace(key, 1).second) series.window_bounds.push_back({from, to});
        }
        series.frames.push_back(f);
    }

    if (series.frames.empty()) throw InputError("no data rows in " + path);
    if (schema.fps_override > 0) {
        series.fps = schema.fps_override;
    } else {
        if (series.frames.size() < 2)
            throw InputError("cannot infer fps from a single frame in " + path);
        const double span = series.frames.back().timestamp - series.frames.front().timestamp;
        if (span <= 0) throw InputError("cannot infer fps: zero time span in " + path);
        series.fps = static_cast<double>(series.frames.size() - 1) / span;
    }
    return series;
}

}  // namespace kinephen
