#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kinephen/extract.hpp"
#include "kinephen/ingest.hpp"

using namespace kinephen;
using Catch::Approx;

namespace {

std::string header_line() {
    std::string h = "timestamp,frame,subject_id,is_control,condition,from,to";
    for (int j = 0; j < kNumLandmarks; ++j) {
        h += "," + std::string(kLandmarkNames[j]) + "_x";
        h += "," + std::string(kLandmarkNames[j]) + "_y";
    }
    for (int l = 0; l < kNumPhenotypes; ++l) h += ",label_" + std::string(kPhenotypeNames[l]);
    return h;
}

struct RowSpec {
    double t = 0;
    long frame = 0;
    std::string subject = "s1";
    std::string control = "0";
    std::string condition = "rest";
    std::string from = "0";
    std::string to = "10";
    std::string x = "3";
    std::string y = "4";
    std::string label = "0";
};

std::string row_line(const RowSpec& r) {
    std::ostringstream os;
    os << r.t << "," << r.frame << "," << r.subject << "," << r.control << "," << r.condition << ","
       << r.from << "," << r.to;
    for (int j = 0; j < kNumLandmarks; ++j) os << "," << r.x << "," << r.y;
    for (int l = 0; l < kNumPhenotypes; ++l) os << "," << r.label;
    return os.str();
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path() / "kinephen_ingest_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string simple_file(int frames, double dt = 1.0 / 30.0) {
    std::ostringstream os;
    os << header_line() << "\n";
    for (int i = 0; i < frames; ++i) {
        RowSpec r;
        r.t = i * dt;
        r.frame = i;
        os << row_line(r) << "\n";
    }
    return os.str();
}

}  // namespace

TEST_CASE("load_pose_csv parses a small file and infers fps") {
    std::ostringstream os;
    os << header_line() << "\n";
    for (int i = 0; i < 3; ++i) {
        RowSpec r;
        r.t = i * 0.033;
        r.frame = i;
        os << row_line(r) << "\n";
    }
    const auto path = write_file("tiny.csv", os.str());
    const auto series = load_pose_csv(path.string());
    CHECK(series.frames.size() == 3);
    CHECK(series.fps == Approx(30.0).margin(0.5));
    CHECK(series.subject_id == "s1");
    CHECK_FALSE(series.is_control);
    CHECK(series.video_id == "tiny");
    CHECK(series.window_bounds.size() == 1);
}

TEST_CASE("annotation values outside {0,1,2} are malformed") {
    std::ostringstream os;
    os << header_line() << "\n";
    RowSpec r0;
    os << row_line(r0) << "\n";
    RowSpec r1;
    r1.t = 0.1;
    r1.frame = 1;
    r1.label = "3";
    os << row_line(r1) << "\n";
    const auto path = write_file("badlabel.csv", os.str());
    CHECK_THROWS_AS(load_pose_csv(path.string()), MalformedRow);
    try {
        load_pose_csv(path.string());
    } catch (const MalformedRow& e) {
        CHECK(e.line == 3);  // header is line 1
    }
}

TEST_CASE("shuffled timestamps raise NonMonotonicTime") {
    std::ostringstream os;
    os << header_line() << "\n";
    RowSpec r0, r1;
    r0.t = 0.5;
    r1.t = 0.1;
    r1.frame = 1;
    os << row_line(r0) << "\n" << row_line(r1) << "\n";
    const auto path = write_file("shuffled.csv", os.str());
    CHECK_THROWS_AS(load_pose_csv(path.string()), NonMonotonicTime);
}

TEST_CASE("duplicate frame indices (multi-person export) are rejected") {
    std::ostringstream os;
    os << header_line() << "\n";
    RowSpec r0, r1;
    r1.t = 0.1;
    r1.frame = 0;  // same frame twice
    os << row_line(r0) << "\n" << row_line(r1) << "\n";
    const auto path = write_file("multiperson.csv", os.str());
    CHECK_THROWS_AS(load_pose_csv(path.string()), NonMonotonicTime);
}

TEST_CASE("missing required column is reported by name") {
    std::string h = header_line();
    const auto pos = h.find(",nose_x");
    h.erase(pos, 7);
    std::ostringstream os;
    os << h << "\n";
    const auto path = write_file("nocol.csv", os.str());
    try {
        load_pose_csv(path.string());
        FAIL("expected MissingColumn");
    } catch (const MissingColumn& e) {
        CHECK(e.column == "nose_x");
    }
}

TEST_CASE("missing and non-numeric coordinates become missing markers") {
    std::ostringstream os;
    os << header_line() << "\n";
    RowSpec r0;
    os << row_line(r0) << "\n";
    RowSpec r1;
    r1.t = 0.1;
    r1.frame = 1;
    r1.x = "";
    os << row_line(r1) << "\n";
    RowSpec r2;
    r2.t = 0.2;
    r2.frame = 2;
    r2.y = "NaN";
    os << row_line(r2) << "\n";
    const auto path = write_file("missing.csv", os.str());
    const auto series = load_pose_csv(path.string());
    CHECK_FALSE(is_missing(series.frames[0].x[0]));
    CHECK(is_missing(series.frames[1].x[0]));
    CHECK(is_missing(series.frames[2].y[5]));
}

TEST_CASE("negative coordinates are malformed, never silently clamped") {
    std::ostringstream os;
    os << header_line() << "\n";
    RowSpec r;
    r.x = "-4";
    os << row_line(r) << "\n";
    const auto path = write_file("negative.csv", os.str());
    CHECK_THROWS_AS(load_pose_csv(path.string()), MalformedRow);
}

TEST_CASE("two subject ids in one file are rejected") {
    std::ostringstream os;
    os << header_line() << "\n";
    RowSpec r0, r1;
    r1.t = 0.1;
    r1.frame = 1;
    r1.subject = "s2";
    os << row_line(r0) << "\n" << row_line(r1) << "\n";
    const auto path = write_file("twosubjects.csv", os.str());
    CHECK_THROWS_AS(load_pose_csv(path.string()), MalformedRow);
}

TEST_CASE("sidecar overrides fps and column names") {
    std::string h = header_line();
    const auto pos = h.find("timestamp");
    h.replace(pos, 9, "time_s");
    std::ostringstream os;
    os << h << "\n";
    for (int i = 0; i < 4; ++i) {
        RowSpec r;
        r.t = i * 0.1;
        r.frame = i;
        os << row_line(r) << "\n";
    }
    const auto path = write_file("sidecar.csv", os.str());
    write_file("sidecar.csv.json",
               R"({"fps": 25.0, "video_id": "vid7", "columns": {"timestamp": "time_s"}})");
    const auto schema = load_sidecar(path.string());
    const auto series = load_pose_csv(path.string(), schema);
    CHECK(series.fps == Approx(25.0));
    CHECK(series.video_id == "vid7");
}

TEST_CASE("pixel_from_normalized floor-scales") {
    CHECK(pixel_from_normalized(0.5, 0.5, 1920, 1080) == std::make_pair(960L, 540L));
    CHECK(pixel_from_normalized(1.0, 1.0, 1920, 1080) == std::make_pair(1920L, 1080L));
    CHECK(pixel_from_normalized(0.333, 0.75, 100, 200) == std::make_pair(33L, 150L));
    CHECK_THROWS_AS(pixel_from_normalized(1.2, 0.5, 100, 100), InputError);
    CHECK_THROWS_AS(pixel_from_normalized(0.5, -0.1, 100, 100), InputError);
}

TEST_CASE("displacement magnitude and missing propagation") {
    const auto path = write_file("disp.csv", simple_file(3));
    auto series = load_pose_csv(path.string());
    series.frames[1].x[0] = kMissing;
    const auto ch = displacement(series, Landmark::Nose);
    CHECK(ch.samples[0] == Approx(5.0));  // (3,4)
    CHECK(is_missing(ch.samples[1]));
    series.frames[2].x[0] = 0;
    series.frames[2].y[0] = 0;
    const auto ch2 = displacement(series, Landmark::Nose);
    CHECK(ch2.samples[2] == 0.0);
}

TEST_CASE("displacement bounds for present coordinates") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng), y = dist(rng);
        const double d = std::hypot(x, y);
        CHECK(d >= std::max(x, y) / std::sqrt(2.0) - 1e-12);
        CHECK(d <= x + y + 1e-12);
    }
}

TEST_CASE("cut_windows membership and bookkeeping") {
    SECTION("a 10 s bound at 30 Hz over 20 s of data holds 300 frames") {
        const auto path = write_file("w300.csv", simple_file(600));
        const auto series = load_pose_csv(path.string());
        const auto spans = cut_windows(series);
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].end - spans[0].begin == 300);
    }
    SECTION("bounds entirely past the end are dropped and counted") {
        std::ostringstream os;
        os << header_line() << "\n";
        for (int i = 0; i < 30; ++i) {
            RowSpec r;
            r.t = i / 30.0;
            r.frame = i;
            r.from = "100";
            r.to = "110";
            os << row_line(r) << "\n";
        }
        const auto path = write_file("wempty.csv", os.str());
        const auto series = load_pose_csv(path.string());
        WindowCutReport report;
        const auto spans = cut_windows(series, &report);
        CHECK(spans.empty());
        CHECK(report.empty_dropped == 1);
    }
    SECTION("two disjoint bounds never share frames; outside frames belong nowhere") {
        std::ostringstream os;
        os << header_line() << "\n";
        for (int i = 0; i < 900; ++i) {  // 30 s
            RowSpec r;
            r.t = i / 30.0;
            r.frame = i;
            if (r.t < 10) {
                r.from = "0";
                r.to = "10";
            } else if (r.t >= 20) {
                r.from = "20";
                r.to = "30";
            } else {
                r.from = "";
                r.to = "";
            }
            os << row_line(r) << "\n";
        }
        const auto path = write_file("wdisjoint.csv", os.str());
        const auto series = load_pose_csv(path.string());
        const auto spans = cut_windows(series);
        REQUIRE(spans.size() == 2);
        CHECK(spans[0].end <= spans[1].begin);
        std::size_t covered = 0;
        for (const auto& s : spans) covered += s.end - s.begin;
        CHECK(covered <= series.frames.size());
        CHECK(covered == 600);  // the middle 10 s is in no bound
    }
    SECTION("half-open boundary: the shared instant belongs to the later window") {
        std::ostringstream os;
        os << header_line() << "\n";
        for (int i = 0; i <= 20; ++i) {
            RowSpec r;
            r.t = static_cast<double>(i);
            r.frame = i;
            r.from = i < 10 ? "0" : "10";
            r.to = i < 10 ? "10" : "20";
            os << row_line(r) << "\n";
        }
        const auto path = write_file("wboundary.csv", os.str());
        const auto series = load_pose_csv(path.string());
        const auto spans = cut_windows(series);
        REQUIRE(spans.size() == 2);
        CHECK(series.frames[spans[0].end - 1].timestamp == Approx(9.0));
        CHECK(series.frames[spans[1].begin].timestamp == Approx(10.0));
    }
}

TEST_CASE("extract_features honors the missing policy") {
    const auto path = write_file("extract.csv", simple_file(600));
    auto series = load_pose_csv(path.string());
    // poison 3 of 300 samples (1%) in one channel inside the first window
    for (int i = 0; i < 3; ++i) series.frames[i].x[2] = kMissing;

    SECTION("strict any-missing default drops the window") {
        ExtractOptions opt;
        DropReport report;
        const auto rows = extract_features(series, opt, report);
        CHECK(rows.empty());
        CHECK(report.missing_data == 1);
    }
    SECTION("10% tolerance keeps it") {
        ExtractOptions opt;
        opt.max_missing_frac = 0.10;
        DropReport report;
        const auto rows = extract_features(series, opt, report);
        REQUIRE(rows.size() == 1);
        CHECK(report.missing_data == 0);
        CHECK(rows[0].values.size() == 374);
    }
}
