#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include "n2d3/disentangle.hpp"
#include "n2d3/io/image_io.hpp"
#include "n2d3/io/label_map.hpp"
#include "n2d3/io/report.hpp"
#include "n2d3/io/tensor_file.hpp"
#include "n2d3/rng.hpp"

namespace fs = std::filesystem;
using n2d3::LabelImage;
using n2d3::RgbImage;
using n2d3::io::IoCode;
using n2d3::io::IoError;
using n2d3::io::Tensor;

namespace {

const fs::path& tmp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("n2d3_io_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string tmp(const std::string& name) { return (tmp_dir() / name).string(); }

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(is), {});
}

void spit(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream os(path, std::ios::binary);
  REQUIRE(os);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
}

IoCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const IoError& e) {
    return e.code();
  }
  FAIL("expected an IoError");
  return IoCode::kBadHeader;  // unreachable
}

}  // namespace

TEST_CASE("tensor files round-trip bit-exactly") {
  Tensor t;
  t.dims = {2, 3, 4};
  n2d3::Rng rng(17);
  for (int i = 0; i < 24; ++i)
    t.data.push_back(static_cast<float>(2.0 * rng.unit() - 1.0));
  // special values must survive verbatim
  t.data[0] = 0.0f;
  t.data[1] = -0.0f;
  t.data[2] = std::numeric_limits<float>::infinity();
  t.data[3] = -std::numeric_limits<float>::infinity();
  t.data[4] = std::numeric_limits<float>::quiet_NaN();
  t.data[5] = std::numeric_limits<float>::denorm_min();

  const std::string path = tmp("roundtrip.n2t");
  n2d3::io::write_tensor(path, t);
  const Tensor back = n2d3::io::read_tensor(path);
  REQUIRE(back.dims == t.dims);
  REQUIRE(back.data.size() == t.data.size());
  for (size_t i = 0; i < t.data.size(); ++i)
    CHECK(std::bit_cast<uint32_t>(back.data[i]) ==
          std::bit_cast<uint32_t>(t.data[i]));
}

TEST_CASE("the on-disk layout is frozen") {
  Tensor t;
  t.dims = {3};
  t.data = {1.0f, 2.0f, 3.0f};
  const std::string path = tmp("layout.n2t");
  n2d3::io::write_tensor(path, t);
  const std::vector<unsigned char> want = {
      'N', '2',  'D',  '3',  'T',  'E',  'N',  'S',   // magic
      1,   0,    0,    0,                             // version
      1,   0,    0,    0,                             // rank
      3,   0,    0,    0,                             // dims[0]
      0,   0,    0x80, 0x3f,                          // 1.0f
      0,   0,    0,    0x40,                          // 2.0f
      0,   0,    0x40, 0x40,                          // 3.0f
  };
  CHECK(slurp(path) == want);
}

TEST_CASE("tensor reader rejects every corruption mode with the right code") {
  Tensor t;
  t.dims = {2, 2};
  t.data = {1, 2, 3, 4};
  const std::string good = tmp("good.n2t");
  n2d3::io::write_tensor(good, t);
  const std::vector<unsigned char> bytes = slurp(good);
  REQUIRE(bytes.size() == 8 + 4 + 4 + 8 + 16);

  auto mutate = [&](const std::string& name, auto fn) {
    std::vector<unsigned char> b = bytes;
    fn(b);
    const std::string p = tmp(name);
    spit(p, b);
    return p;
  };

  SECTION("missing file") {
    CHECK(code_of([&] { n2d3::io::read_tensor(tmp("nope.n2t")); }) ==
          IoCode::kMissingFile);
  }
  SECTION("short header") {
    const auto p = mutate("short_header.n2t",
                          [](auto& b) { b.resize(5); });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kTruncated);
  }
  SECTION("bad magic") {
    const auto p = mutate("bad_magic.n2t", [](auto& b) { b[0] = 'X'; });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kBadMagic);
  }
  SECTION("missing version word") {
    const auto p = mutate("no_version.n2t", [](auto& b) { b.resize(10); });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kTruncated);
  }
  SECTION("wrong version") {
    const auto p = mutate("bad_version.n2t", [](auto& b) { b[8] = 9; });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kBadVersion);
  }
  SECTION("rank zero") {
    const auto p = mutate("rank0.n2t", [](auto& b) { b[12] = 0; });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kBadRank);
  }
  SECTION("rank too large") {
    const auto p = mutate("rank9.n2t", [](auto& b) { b[12] = 9; });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kBadRank);
  }
  SECTION("zero dim") {
    const auto p = mutate("dim0.n2t", [](auto& b) { b[16] = 0; });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kBadDims);
  }
  SECTION("dims overflowing the element cap") {
    // rank 3 with dims 65536^3
    std::vector<unsigned char> b(bytes.begin(), bytes.begin() + 12);
    auto push32 = [&](uint32_t v) {
      for (int i = 0; i < 4; ++i)
        b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    };
    push32(3);
    push32(1u << 16);
    push32(1u << 16);
    push32(1u << 16);
    const std::string p = tmp("overflow.n2t");
    spit(p, b);
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kDimOverflow);
  }
  SECTION("short payload") {
    const auto p = mutate("short_payload.n2t",
                          [](auto& b) { b.resize(b.size() - 6); });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kTruncated);
  }
  SECTION("trailing byte") {
    const auto p = mutate("trailing.n2t", [](auto& b) { b.push_back(0); });
    CHECK(code_of([&] { n2d3::io::read_tensor(p); }) == IoCode::kTrailingData);
  }
}

TEST_CASE("tensor writer validates its input") {
  const std::string p = tmp("writer.n2t");
  Tensor t;
  CHECK(code_of([&] { n2d3::io::write_tensor(p, t); }) == IoCode::kBadRank);
  t.dims = {1, 1, 1, 1, 1};
  CHECK(code_of([&] { n2d3::io::write_tensor(p, t); }) == IoCode::kBadRank);
  t.dims = {2, 0};
  CHECK(code_of([&] { n2d3::io::write_tensor(p, t); }) == IoCode::kBadDims);
  t.dims = {2, 2};
  t.data = {1, 2, 3};  // five... wrong count
  CHECK(code_of([&] { n2d3::io::write_tensor(p, t); }) == IoCode::kBadDims);
  t.dims = {1u << 16, 1u << 16};
  CHECK(code_of([&] { n2d3::io::write_tensor(p, t); }) ==
        IoCode::kDimOverflow);
}

TEST_CASE("plane bridge keeps shape and float-rounded values") {
  n2d3::Plane p(5, 3);
  n2d3::Rng rng(4);
  for (double& v : p.v) v = rng.unit();
  const Tensor t = n2d3::io::tensor_from_plane(p);
  REQUIRE(t.dims == std::vector<uint32_t>{3, 5});
  const n2d3::Plane back = n2d3::io::plane_from_tensor(t, "mem");
  REQUIRE(back.width == 5);
  REQUIRE(back.height == 3);
  for (size_t i = 0; i < p.v.size(); ++i)
    CHECK(back.v[i] == static_cast<double>(static_cast<float>(p.v[i])));

  Tensor bad;
  bad.dims = {4};
  bad.data = {1, 2, 3, 4};
  CHECK(code_of([&] { n2d3::io::plane_from_tensor(bad, "mem"); }) ==
        IoCode::kBadRank);
}

TEST_CASE("rgb images round-trip through ppm and png") {
  RgbImage img(7, 5);
  n2d3::Rng rng(8);
  for (double& v : img.rgb)
    v = static_cast<double>(rng.below(256)) / 255.0;  // on the 8-bit grid
  for (const char* name : {"img.ppm", "img.png"}) {
    const std::string path = tmp(name);
    n2d3::io::write_image(path, img);
    const RgbImage back = n2d3::io::read_image(path);
    REQUIRE(back.width == 7);
    REQUIRE(back.height == 5);
    for (size_t i = 0; i < img.rgb.size(); ++i) CHECK(back.rgb[i] == img.rgb[i]);
  }
}

TEST_CASE("out-of-range intensities clamp on write") {
  RgbImage img(2, 1);
  img.at(0, 0, 0) = -0.5;
  img.at(0, 0, 1) = 1.5;
  img.at(0, 0, 2) = 0.5;
  img.at(1, 0, 0) = 2.0;
  img.at(1, 0, 1) = -1.0;
  img.at(1, 0, 2) = 1.0;
  const std::string path = tmp("clamp.ppm");
  n2d3::io::write_image(path, img);
  const RgbImage back = n2d3::io::read_image(path);
  CHECK(back.at(0, 0, 0) == 0.0);
  CHECK(back.at(0, 0, 1) == 1.0);
  CHECK(back.at(1, 0, 0) == 1.0);
  CHECK(back.at(1, 0, 1) == 0.0);
  CHECK(back.at(1, 0, 2) == 1.0);
}

TEST_CASE("image reader model failures") {
  SECTION("missing") {
    CHECK(code_of([&] { n2d3::io::read_image(tmp("nope.png")); }) ==
          IoCode::kMissingFile);
  }
  SECTION("unknown bytes") {
    const std::string p = tmp("garbage.img");
    spit(p, {'h', 'e', 'l', 'l', 'o'});
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kUnknownFormat);
  }
  SECTION("grayscale pnm is not an rgb image") {
    LabelImage li(3, 2, 1);
    const std::string p = tmp("labels.pgm");
    n2d3::io::write_label_map(p, li);
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kBadColorspace);
  }
  SECTION("grayscale png is not an rgb image") {
    LabelImage li(3, 2, 2);
    const std::string p = tmp("labels_gray.png");
    n2d3::io::write_label_map(p, li);
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kBadColorspace);
  }
  SECTION("pnm with 16-bit maxval") {
    const std::string p = tmp("deep.ppm");
    const std::string head = "P6\n2 1\n65535\n";
    std::vector<unsigned char> b(head.begin(), head.end());
    for (int i = 0; i < 12; ++i) b.push_back(0);
    spit(p, b);
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kBadDepth);
  }
  SECTION("pnm with a non-numeric size") {
    const std::string p = tmp("alpha.ppm");
    const std::string head = "P6\nab 4\n255\n";
    spit(p, std::vector<unsigned char>(head.begin(), head.end()));
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kBadHeader);
  }
  SECTION("pnm with a short payload") {
    const std::string p = tmp("short.ppm");
    const std::string head = "P6\n4 4\n255\n";
    std::vector<unsigned char> b(head.begin(), head.end());
    for (int i = 0; i < 10; ++i) b.push_back(7);  // needs 48
    spit(p, b);
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kTruncated);
  }
  SECTION("pnm with trailing bytes") {
    RgbImage img(2, 2);
    const std::string p = tmp("trail.ppm");
    n2d3::io::write_image(p, img);
    auto b = slurp(p);
    b.push_back(0);
    spit(p, b);
    CHECK(code_of([&] { n2d3::io::read_image(p); }) == IoCode::kTrailingData);
  }
  SECTION("pnm comments in the header are fine") {
    RgbImage img(2, 2);
    for (double& v : img.rgb) v = 100.0 / 255.0;
    const std::string p = tmp("comment.ppm");
    n2d3::io::write_image(p, img);
    auto b = slurp(p);
    const std::string commented = "P6\n# made by hand\n2 2\n255\n";
    std::vector<unsigned char> nb(commented.begin(), commented.end());
    nb.insert(nb.end(), b.end() - 12, b.end());
    spit(p, nb);
    const RgbImage back = n2d3::io::read_image(p);
    CHECK(back.at(1, 1, 2) == 100.0 / 255.0);
  }
  SECTION("writer refuses unknown extensions") {
    RgbImage img(2, 2);
    CHECK(code_of([&] { n2d3::io::write_image(tmp("img.bmp"), img); }) ==
          IoCode::kUnknownFormat);
  }
}

TEST_CASE("label maps round-trip through pgm and png") {
  LabelImage li(6, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) li.at(x, y) = static_cast<uint8_t>((x + y) % 4);
  for (const char* name : {"labels_rt.pgm", "labels_rt.png"}) {
    const std::string path = tmp(name);
    n2d3::io::write_label_map(path, li);
    const LabelImage back = n2d3::io::read_label_map(path);
    REQUIRE(back.width == 6);
    REQUIRE(back.height == 4);
    CHECK(back.labels == li.labels);
  }
}

TEST_CASE("label maps reject out-of-range values") {
  SECTION("on write") {
    LabelImage li(2, 2);
    li.at(1, 1) = 7;
    CHECK(code_of([&] {
            n2d3::io::write_label_map(tmp("bad_label.pgm"), li);
          }) == IoCode::kBadPixel);
  }
  SECTION("on read") {
    const std::string head = "P5\n2 2\n255\n";
    std::vector<unsigned char> b(head.begin(), head.end());
    b.insert(b.end(), {0, 1, 2, 4});  // 4 is out of range
    const std::string p = tmp("bad_label_in.pgm");
    spit(p, b);
    CHECK(code_of([&] { n2d3::io::read_label_map(p); }) == IoCode::kBadPixel);
  }
  SECTION("rgb input is not a label map") {
    RgbImage img(2, 2);
    const std::string p = tmp("rgb_as_labels.ppm");
    n2d3::io::write_image(p, img);
    CHECK(code_of([&] { n2d3::io::read_label_map(p); }) ==
          IoCode::kBadColorspace);
  }
  SECTION("writer wants .png or .pgm") {
    LabelImage li(2, 2);
    CHECK(code_of([&] { n2d3::io::write_label_map(tmp("l.ppm"), li); }) ==
          IoCode::kUnknownFormat);
  }
}

TEST_CASE("the palette render uses the fixed region colors") {
  LabelImage li(4, 1);
  for (int x = 0; x < 4; ++x) li.at(x, 0) = static_cast<uint8_t>(x);
  const RgbImage img = n2d3::io::palette_render(li);
  CHECK(img.at(0, 0, 0) == 0.0);  // darkness is pure blue
  CHECK(img.at(0, 0, 2) == 1.0);
  CHECK(img.at(1, 0, 0) == 128.0 / 255.0);
  CHECK(img.at(2, 0, 1) == 200.0 / 255.0);  // light effects are green
  CHECK(img.at(3, 0, 0) == 1.0);            // high light is yellow
  CHECK(img.at(3, 0, 1) == 230.0 / 255.0);
  CHECK(img.at(3, 0, 2) == 0.0);
}

TEST_CASE("a disentanglement writes labels plus false color in one call") {
  n2d3::DisentanglementMap d;
  d.width = 3;
  d.height = 2;
  d.labels = LabelImage(3, 2);
  for (int x = 0; x < 3; ++x) d.labels.at(x, 1) = static_cast<uint8_t>(x + 1);
  const std::string lp = tmp("dis_labels.png");
  const std::string pp = tmp("dis_palette.png");
  n2d3::io::write_disentanglement(d, lp, pp);
  const LabelImage labels = n2d3::io::read_label_map(lp);
  CHECK(labels.labels == d.labels.labels);
  const RgbImage palette = n2d3::io::read_image(pp);
  const RgbImage want = n2d3::io::palette_render(d.labels);
  CHECK(palette.rgb == want.rgb);  // palette bytes are exact 8-bit values
}

TEST_CASE("reports print, write, and parse back") {
  n2d3::io::Report rep;
  rep.add("sigma", 1.5);
  rep.add("name", std::string("lamp post"));
  rep.add("iterations", 42);
  rep.add("converged", true);
  rep.add("third", 1.0 / 3.0);
  rep.add("tiny", 4.9406564584124654e-324);  // min denormal survives %.17g
  rep.add("negzero", -0.0);

  CHECK(rep.str().find("sigma = 1.5\n") != std::string::npos);
  CHECK(rep.str().find("converged = true\n") != std::string::npos);
  REQUIRE(rep.find("name") != nullptr);
  CHECK(*rep.find("name") == "lamp post");
  CHECK(rep.find("absent") == nullptr);

  const std::string path = tmp("report.txt");
  rep.write(path);
  const n2d3::io::Report back = n2d3::io::parse_report(path);
  REQUIRE(back.entries().size() == rep.entries().size());
  for (size_t i = 0; i < rep.entries().size(); ++i) {
    CHECK(back.entries()[i].first == rep.entries()[i].first);
    CHECK(back.entries()[i].second == rep.entries()[i].second);
  }
  // numeric fields recover the exact double
  auto as_double = [&](const char* key) {
    return std::strtod(back.find(key)->c_str(), nullptr);
  };
  CHECK(as_double("third") == 1.0 / 3.0);
  CHECK(as_double("tiny") == 4.9406564584124654e-324);
  CHECK(std::signbit(as_double("negzero")));
}

TEST_CASE("report parser failures") {
  CHECK(code_of([&] { n2d3::io::parse_report(tmp("no_report.txt")); }) ==
        IoCode::kMissingFile);
  const std::string p = tmp("bad_report.txt");
  {
    std::ofstream os(p);
    os << "alpha = 1\n\nnot a kv line\n";
  }
  try {
    n2d3::io::parse_report(p);
    FAIL("expected parse failure");
  } catch (const IoError& e) {
    CHECK(e.code() == IoCode::kBadHeader);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
